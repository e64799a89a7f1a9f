#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "heavytail/cli_io.hpp"
#include "heavytail/errors.hpp"
#include "heavytail/sha256.hpp"

using namespace heavytail;
namespace fs = std::filesystem;

namespace {

int run_cli(const std::vector<std::string>& args) {
    std::vector<const char*> argv = {"htail"};
    for (const auto& a : args) argv.push_back(a.c_str());
    return io::run(static_cast<int>(argv.size()), argv.data());
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TmpDir {
    fs::path dir;
    TmpDir() {
        dir = fs::temp_directory_path() /
              ("htail_test_" + std::to_string(::getpid()) + "_" +
               std::to_string(counter()++));
        fs::create_directories(dir);
    }
    ~TmpDir() { fs::remove_all(dir); }
    std::string operator/(const std::string& f) const { return (dir / f).string(); }
    static int& counter() {
        static int c = 0;
        return c;
    }
};

}  // namespace

TEST_CASE("sha256 known vectors") {
    CHECK(sha256_hex("") ==
          "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("config round trip and validation") {
    TmpDir tmp;
    EnsembleConfig cfg;
    cfg.kind = EnsembleKind::wigner_levy;
    cfg.N = 200;
    cfg.alpha = 1.5;
    cfg.beta = 0.0;
    cfg.range = 1.0;
    cfg.trials = 500;
    cfg.scaling_exponent = 1.0 / 1.5;
    std::string path = tmp / "cfg.json";
    io::save_config(cfg, path);
    auto back = io::load_config(path);
    CHECK(back.kind == cfg.kind);
    CHECK(back.N == cfg.N);
    CHECK(back.alpha == cfg.alpha);
    CHECK(back.trials == cfg.trials);
    CHECK(back.scaling_exponent == cfg.scaling_exponent);

    SUBCASE("alpha outside the stable domain is rejected") {
        std::ofstream out(tmp / "bad.json");
        out << R"({"kind":"wigner-levy","N":10,"alpha":2.5,"trials":1})";
        out.close();
        CHECK_THROWS_AS(io::load_config(tmp / "bad.json"), ConfigError);
    }

    SUBCASE("unknown keys are rejected by name") {
        std::ofstream out(tmp / "unk.json");
        out << R"({"kind":"goe","N":10,"trials":1,"sigmaa":1.0})";
        out.close();
        try {
            io::load_config(tmp / "unk.json");
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find("sigmaa") != std::string::npos);
        }
    }

    SUBCASE("wishart shape constraint") {
        std::ofstream out(tmp / "w.json");
        out << R"({"kind":"wishart-student","N":100,"T":50,"alpha":3,"trials":1})";
        out.close();
        CHECK_THROWS_AS(io::load_config(tmp / "w.json"), ConfigError);
    }
}

TEST_CASE("stable-pdf subcommand pins the Cauchy row") {
    TmpDir tmp;
    std::string prefix = tmp / "sp";
    CHECK(run_cli({"stable-pdf", "--alpha", "1", "--beta", "0", "--range", "1",
                   "--xmin", "-5", "--xmax", "5", "--points", "101", "--out",
                   prefix}) == 0);
    std::ifstream in(prefix + ".csv");
    std::string line, hit;
    std::getline(in, line);
    CHECK(line == "x,pdf");
    while (std::getline(in, line))
        if (line.rfind("0,", 0) == 0) hit = line;
    CHECK(hit.substr(0, 11) == "0,0.3183098");
}

TEST_CASE("deterministic outputs for identical seed and worker count") {
    TmpDir tmp;
    auto run_once = [&](const std::string& tag) {
        std::string prefix = tmp / tag;
        REQUIRE(run_cli({"fig2", "--K", "1", "--N", "120", "--trials", "10",
                         "--seed", "7", "--workers", "2", "--out", prefix}) == 0);
        return sha256_file(prefix + ".csv");
    };
    CHECK(run_once("a") == run_once("b"));

    SUBCASE("and independent of the worker count") {
        std::string p1 = tmp / "w1";
        std::string p4 = tmp / "w4";
        REQUIRE(run_cli({"fig2", "--K", "1", "--N", "120", "--trials", "10",
                         "--seed", "7", "--workers", "1", "--out", p1}) == 0);
        REQUIRE(run_cli({"fig2", "--K", "1", "--N", "120", "--trials", "10",
                         "--seed", "7", "--workers", "4", "--out", p4}) == 0);
        CHECK(sha256_file(p1 + ".csv") == sha256_file(p4 + ".csv"));
    }
}

TEST_CASE("manifest pairs every output with its hash") {
    TmpDir tmp;
    std::string prefix = tmp / "mc";
    REQUIRE(run_cli({"mc-spectrum", "--ensemble", "goe", "--N", "40", "--trials",
                     "5", "--sigma", "1", "--exponent", "0.5", "--hmin", "-3",
                     "--hmax", "3", "--bins", "20", "--seed", "3", "--out",
                     prefix}) == 0);
    std::string manifest = slurp(prefix + "_manifest.json");
    CHECK(manifest.find("\"sha256\"") != std::string::npos);
    CHECK(manifest.find(prefix + ".csv") != std::string::npos);
    // recorded hash matches the file on disk
    std::string actual = sha256_file(prefix + ".csv");
    CHECK(manifest.find(actual) != std::string::npos);
}

TEST_CASE("exit codes: config errors and convergence failures") {
    TmpDir tmp;
    CHECK(run_cli({"mc-spectrum", "--ensemble", "nonsense", "--out",
                   tmp / "x"}) == 1);

    std::string prefix = tmp / "diverge";
    CHECK(run_cli({"wl-density", "--alpha", "1.5", "--grid-nodes", "201",
                   "--grid-xmax", "30", "--tol", "1e-14", "--max-iter", "2",
                   "--points", "3", "--out", prefix}) == 2);
    CHECK(fs::exists(prefix + "_diagnostics.json"));
    std::string diag = slurp(prefix + "_diagnostics.json");
    CHECK(diag.find("residual_history") != std::string::npos);
}

TEST_CASE("config-driven mc-spectrum run") {
    TmpDir tmp;
    EnsembleConfig cfg;
    cfg.kind = EnsembleKind::goe;
    cfg.N = 30;
    cfg.sigma = 1.0;
    cfg.trials = 4;
    cfg.scaling_exponent = 0.5;
    std::string cpath = tmp / "cfg.json";
    io::save_config(cfg, cpath);
    std::string prefix = tmp / "run";
    CHECK(run_cli({"mc-spectrum", "--config", cpath, "--hmin", "-3", "--hmax",
                   "3", "--bins", "10", "--out", prefix}) == 0);
    CHECK(fs::exists(prefix + ".csv"));
}
