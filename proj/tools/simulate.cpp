#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "cavsim/config.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Two-mode cavity multi-level Raman simulator"};

    std::string config_path;
    std::string scenario_override;
    std::string sweep_override;
    std::string out_override;
    std::string format_override;
    bool check_mode = false;
    bool oracle_mode = false;
    unsigned long seed = 0;
    bool seed_set = false;

    app.add_option("--config", config_path, "Path to the JSON run configuration")->required();
    app.add_option("--scenario", scenario_override, "Override the scenario (rabi|hom|oracle)");
    app.add_option("--sweep", sweep_override, "Override the sweep, e.g. theta=0:0.1:3.2");
    app.add_flag("--check", check_mode, "Enforce closed-form tolerances; exit 2 on breach");
    app.add_flag("--oracle", oracle_mode, "Also run the exact-vs-effective oracle comparison");
    app.add_option("--out", out_override, "Output directory");
    app.add_option("--format", format_override, "Output format (csv|jsonl)")
        ->check(CLI::IsMember({"csv", "jsonl"}));
    app.add_option("--seed", seed, "Random seed for property sampling")
        ->each([&](const std::string&) { seed_set = true; });

    CLI11_PARSE(app, argc, argv);

    try {
        cavsim::SimulationConfig cfg = cavsim::load_config(config_path);
        if (!scenario_override.empty()) {
            if (scenario_override != "rabi" && scenario_override != "hom" &&
                scenario_override != "oracle")
                throw std::invalid_argument("--scenario must be rabi, hom, or oracle");
            cfg.scenario = scenario_override;
        }
        if (!sweep_override.empty()) cavsim::apply_sweep_override(cfg, sweep_override);
        if (!out_override.empty()) cfg.out_dir = out_override;
        if (!format_override.empty()) cfg.format = format_override;
        if (seed_set) cfg.seed = seed;

        cavsim::RunReport report = cavsim::run(cfg);

        if (oracle_mode && cfg.scenario != "oracle") {
            const auto oc = cavsim::compare_oracle(cfg);
            report.max_oracle_delta = oc.max_delta;
            for (auto& row : report.rows) row.oracle_delta = oc.max_delta;
        }

        const std::string path = cavsim::emit(report, cfg.format, cfg.out_dir);
        std::printf("wrote %s (%zu rows, %.3f s)\n", path.c_str(), report.rows.size(),
                    report.wall_seconds);
        for (const auto& p : report.provenance) std::printf("note: %s\n", p.c_str());

        if (check_mode) {
            const bool ok = cavsim::check(cfg, report);
            for (const auto& m : report.check_messages) std::printf("%s\n", m.c_str());
            if (!ok) return 2;
        }
        return 0;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
