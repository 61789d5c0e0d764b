#pragma once

#include <string>
#include <vector>

#include "cavsim/lambda_model.hpp"
#include "cavsim/scenarios.hpp"

namespace cavsim {

/** Sweep grid: start:step:stop inclusive of both ends (within half a step). */
struct SweepSpec {
    bool active = false;
    SweepParameter parameter = SweepParameter::theta;
    double start = 0, stop = 0, step = 1;

    std::vector<double> grid() const;
};

/** Fully resolved run configuration (defaults applied, schema validated). */
struct SimulationConfig {
    std::string frequency_unit = "scaled";
    LevelScheme levels;
    CouplingSet cps;

    int n_max_a = 8, n_max_b = 8;
    std::string backend = "ladder";
    int d = 1;

    double filter_cutoff = 1.0;
    PulseSpec pulse;

    std::string scenario = "rabi";  // rabi | hom | oracle
    int n_a = 1, n_b = 0;           // photon input (rabi / oracle)
    int kappa = 0;                  // atomic momentum label
    int hom_n = 1;                  // |n,n> light input (hom)
    bool rwa = true;
    bool optical_limit = false;
    bool gaussian = false;          // single-particle Gaussian packet input
    double sigma = 1.0;             // its width

    std::string echo;               // normalized config serialization

    SweepSpec sweep;
    std::string out_dir = ".";
    std::string format = "csv";  // csv | jsonl
    unsigned long seed = 0;
};

/** Parse and validate a JSON config file.  Unknown keys are fatal. */
SimulationConfig load_config(const std::string& path);

/** Apply a CLI sweep override of the form "theta=0:0.1:3.2". */
void apply_sweep_override(SimulationConfig& cfg, const std::string& spec);

struct ResultRow {
    std::string scenario;
    std::string parameter;
    double value = 0;
    double population = 0;
    double coincidence = 0;
    double oracle_delta = 0;
};

struct RunReport {
    std::string config_echo;
    std::vector<ResultRow> rows;
    std::vector<std::string> provenance;
    double max_oracle_delta = 0;
    double wall_seconds = 0;
    bool check_passed = true;
    std::vector<std::string> check_messages;
};

/** Exact-vs-effective population comparison for the configured model. */
struct OracleComparison {
    std::vector<double> times;
    std::vector<double> exact_filtered;
    std::vector<double> effective;
    double max_delta = 0;
};

OracleComparison compare_oracle(const SimulationConfig& cfg);

/** Execute the configured scenario (and sweep); deterministic given the config. */
RunReport run(const SimulationConfig& cfg);

/** Enforce the scenario's closed-form tolerance; fills check_messages, returns pass. */
bool check(const SimulationConfig& cfg, RunReport& report);

std::string to_csv(const RunReport& report);
std::string to_jsonl(const RunReport& report);

/** Write results.<ext> into out_dir; returns the file path. */
std::string emit(const RunReport& report, const std::string& format,
                 const std::string& out_dir);

}  // namespace cavsim
