#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "heavytail/config.hpp"

namespace heavytail::io {

inline constexpr const char* kToolVersion = "0.1.0";

// Reproducibility record written next to every output set.
struct RunManifest {
    std::string command;
    std::string config_json;  // serialized parameter set
    std::uint64_t seed = 0;
    int workers = 1;
    std::string tool_version = kToolVersion;
    std::vector<std::pair<std::string, std::string>> outputs;  // path, sha256

    void write(const std::string& path) const;
};

// Parses and validates an EnsembleConfig JSON file; unknown keys are
// rejected by name.
EnsembleConfig load_config(const std::string& path);
void save_config(const EnsembleConfig& cfg, const std::string& path);
std::string config_to_json(const EnsembleConfig& cfg);

// CSV table with a fixed header; numbers are written with 17 significant
// digits so doubles round-trip exactly.
class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> header)
        : header_(std::move(header)) {}
    void add_row(const std::vector<double>& row);
    void write(const std::string& path) const;

private:
    std::vector<std::string> header_;
    std::vector<std::vector<double>> rows_;
};

// CLI entry point: returns the process exit status (0 success, 1 config
// error, 2 numerical-convergence failure with a diagnostics file).
int run(int argc, const char* const* argv);

}  // namespace heavytail::io
