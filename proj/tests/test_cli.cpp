#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "cavsim/config.hpp"

namespace fs = std::filesystem;
using namespace cavsim;

namespace {

std::string simulate_bin() {
    const char* p = std::getenv("SIMULATE_BIN");
    REQUIRE(p != nullptr);
    return p;
}

std::string config_dir() {
    const char* p = std::getenv("CONFIG_DIR");
    REQUIRE(p != nullptr);
    return p;
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "cavsim_cli_tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

int run_cmd(const std::string& cmd) {
    const int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

size_t count_lines(const std::string& s) {
    size_t n = 0;
    for (char c : s)
        if (c == '\n') ++n;
    return n;
}

}  // namespace

TEST_CASE("load_config defaults and echo") {
    const auto cfg = load_config(config_dir() + "/hom.json");
    CHECK(cfg.scenario == "hom");
    CHECK(cfg.hom_n == 2);
    CHECK(cfg.n_max_a == 5);
    CHECK(cfg.filter_cutoff == 1.0);  // default
    CHECK(cfg.format == "csv");
    CHECK(cfg.rwa);
    CHECK_FALSE(cfg.sweep.active);
    CHECK(!cfg.echo.empty());
}

TEST_CASE("sweep override parsing") {
    auto cfg = load_config(config_dir() + "/hom.json");
    apply_sweep_override(cfg, "theta=0:0.5:2");
    CHECK(cfg.sweep.active);
    CHECK(cfg.sweep.parameter == SweepParameter::theta);
    CHECK(cfg.sweep.grid().size() == 5);
    CHECK_THROWS_AS(apply_sweep_override(cfg, "theta 0:1:2"), std::invalid_argument);
    CHECK_THROWS_AS(apply_sweep_override(cfg, "bogus=0:1:2"), std::invalid_argument);
    CHECK_THROWS_AS(apply_sweep_override(cfg, "theta=0:-1:2"), std::invalid_argument);
}

TEST_CASE("rabi sweep run: row count and byte-identical reruns") {
    const auto d1 = fresh_dir("rabi1");
    const auto d2 = fresh_dir("rabi2");
    const std::string base =
        simulate_bin() + " --config " + config_dir() + "/rabi.json --check --out ";
    CHECK(run_cmd(base + d1.string() + " > /dev/null") == 0);
    CHECK(run_cmd(base + d2.string() + " > /dev/null") == 0);

    const std::string c1 = slurp(d1 / "results.csv");
    const std::string c2 = slurp(d2 / "results.csv");
    CHECK(c1 == c2);
    // Header + one row per sweep point (theta = 0, 0.1, ..., 3.2).
    CHECK(count_lines(c1) == 34);
    CHECK(c1.rfind("scenario,parameter,value,population,coincidence,oracle_delta\n", 0) == 0);
}

TEST_CASE("hom run passes check and supports jsonl") {
    const auto dir = fresh_dir("hom");
    const std::string cmd = simulate_bin() + " --config " + config_dir() +
                            "/hom.json --check --format jsonl --out " + dir.string() +
                            " > /dev/null";
    CHECK(run_cmd(cmd) == 0);
    const std::string body = slurp(dir / "results.jsonl");
    CHECK(count_lines(body) == 1);
    CHECK(body.find("\"scenario\":\"hom\"") != std::string::npos);
}

TEST_CASE("oracle run satisfies the tolerance under --check") {
    const auto dir = fresh_dir("oracle");
    const std::string cmd = simulate_bin() + " --config " + config_dir() +
                            "/oracle.json --check --out " + dir.string() + " > /dev/null";
    CHECK(run_cmd(cmd) == 0);
    const std::string body = slurp(dir / "results.csv");
    CHECK(count_lines(body) == 402);  // header + 401 sample times
}

TEST_CASE("check breach exits with code 2") {
    // Strengthen the dipole coupling until the second-order effective theory
    // misses the oracle tolerance.
    const auto dir = fresh_dir("breach");
    std::string text = slurp(fs::path(config_dir()) / "oracle.json");
    size_t pos;
    while ((pos = text.find("\"omega\": 1.0")) != std::string::npos)
        text.replace(pos, std::string("\"omega\": 1.0").size(), "\"omega\": 8.0");
    const fs::path cfg = dir / "oracle_strong.json";
    std::ofstream(cfg) << text;

    const std::string cmd = simulate_bin() + " --config " + cfg.string() + " --check --out " +
                            dir.string() + " > " + (dir / "stdout.txt").string();
    CHECK(run_cmd(cmd) == 2);
    CHECK(slurp(dir / "stdout.txt").find("FAIL") != std::string::npos);
}

TEST_CASE("schema violations are fatal with exit code 1") {
    const auto dir = fresh_dir("schema");

    SUBCASE("unknown key") {
        const fs::path bad = dir / "unknown_key.json";
        std::ofstream(bad) << R"({
            "units": {"frequency": "MHz"},
            "levels": {"omega": [0, 1, 20], "Omega_a": 17, "Omega_b": 18},
            "couplings": [],
            "pulse": {"area": 1, "strength": 1},
            "scenario": {"name": "rabi"},
            "typo_key": 1
        })";
        CHECK(run_cmd(simulate_bin() + " --config " + bad.string() + " 2> " +
                      (dir / "err1.txt").string()) == 1);
        CHECK(slurp(dir / "err1.txt").find("typo_key") != std::string::npos);
    }
    SUBCASE("negative sigma") {
        const fs::path bad = dir / "bad_sigma.json";
        std::ofstream(bad) << R"({
            "units": {"frequency": "MHz"},
            "levels": {"omega": [0, 1, 20], "Omega_a": 17, "Omega_b": 18},
            "couplings": [],
            "pulse": {"area": 1, "strength": 1},
            "scenario": {"name": "rabi", "gaussian": true, "sigma": -2.0}
        })";
        CHECK(run_cmd(simulate_bin() + " --config " + bad.string() + " 2> " +
                      (dir / "err2.txt").string()) == 1);
        CHECK(slurp(dir / "err2.txt").find("sigma") != std::string::npos);
    }
    SUBCASE("bad ancilla index") {
        const fs::path bad = dir / "bad_ancilla.json";
        std::ofstream(bad) << R"({
            "units": {"frequency": "MHz"},
            "levels": {"omega": [0, 1, 20], "Omega_a": 17, "Omega_b": 18},
            "couplings": [{"ancilla": 1, "mode": "a", "omega": 0.1}],
            "pulse": {"area": 1, "strength": 1},
            "scenario": {"name": "rabi"}
        })";
        CHECK(run_cmd(simulate_bin() + " --config " + bad.string() + " 2>/dev/null") == 1);
    }
    SUBCASE("missing config file") {
        CHECK(run_cmd(simulate_bin() + " --config " + (dir / "absent.json").string() +
                      " 2>/dev/null") == 1);
    }
    SUBCASE("missing --config flag") {
        CHECK(run_cmd(simulate_bin() + " 2>/dev/null") != 0);
    }
    SUBCASE("invalid --format") {
        CHECK(run_cmd(simulate_bin() + " --config " + config_dir() +
                      "/hom.json --format xml 2>/dev/null") != 0);
    }
}
