#pragma once

#include <cstdint>
#include <string>

namespace heavytail {

// Hex SHA-256 digest of a byte string / of a file's contents.
std::string sha256_hex(const std::string& data);
std::string sha256_file(const std::string& path);

}  // namespace heavytail
