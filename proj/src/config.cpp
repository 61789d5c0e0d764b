#include "cavsim/config.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "cavsim/averaging.hpp"
#include "cavsim/pulse.hpp"

namespace cavsim {

using nlohmann::json;

std::vector<double> SweepSpec::grid() const {
    if (step <= 0) throw std::invalid_argument("sweep: step must be positive");
    std::vector<double> g;
    for (double v = start; v <= stop + 0.5 * step; v += step) g.push_back(v);
    return g;
}

namespace {

[[noreturn]] void schema_error(const std::string& path, const std::string& message) {
    throw std::invalid_argument("config: " + path + ": " + message);
}

void check_keys(const json& obj, const std::string& path, const std::set<std::string>& allowed) {
    if (!obj.is_object()) schema_error(path, "expected an object");
    for (const auto& [key, value] : obj.items())
        if (allowed.find(key) == allowed.end())
            schema_error(path + "." + key, "unknown key (strict schema)");
}

template <typename T>
T get_or(const json& obj, const std::string& path, const std::string& key, T fallback) {
    if (!obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        schema_error(path + "." + key, "wrong type");
    }
}

template <typename T>
T get_req(const json& obj, const std::string& path, const std::string& key) {
    if (!obj.contains(key)) schema_error(path + "." + key, "missing required key");
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        schema_error(path + "." + key, "wrong type");
    }
}

cplx get_cplx(const json& obj, const std::string& path, const std::string& key) {
    if (!obj.contains(key)) return {0, 0};
    const json& v = obj.at(key);
    if (v.is_number()) return {v.get<double>(), 0};
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
        return {v[0].get<double>(), v[1].get<double>()};
    schema_error(path + "." + key, "expected a number or [re, im] pair");
}

SweepParameter parse_parameter(const std::string& name, const std::string& path) {
    if (name == "theta") return SweepParameter::theta;
    if (name == "n_a") return SweepParameter::n_a;
    if (name == "n_b") return SweepParameter::n_b;
    if (name == "detuning") return SweepParameter::detuning;
    schema_error(path, "unknown sweep parameter '" + name + "'");
}

const char* parameter_name(SweepParameter p) {
    switch (p) {
        case SweepParameter::theta: return "theta";
        case SweepParameter::n_a: return "n_a";
        case SweepParameter::n_b: return "n_b";
        default: return "detuning";
    }
}

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

SimulationConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open " + path);
    json root;
    try {
        root = json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::runtime_error("config: parse error in " + path + ": " + e.what());
    }

    check_keys(root, "config",
               {"units", "levels", "couplings", "basis", "filter", "pulse", "scenario", "sweep",
                "output", "seed"});

    SimulationConfig cfg;

    // Units block (mandatory).
    if (!root.contains("units")) schema_error("config.units", "missing required key");
    const json& units = root.at("units");
    check_keys(units, "config.units", {"frequency", "hbar"});
    cfg.frequency_unit = get_req<std::string>(units, "config.units", "frequency");
    if (get_or<double>(units, "config.units", "hbar", 1.0) != 1.0)
        schema_error("config.units.hbar", "only hbar = 1 units are supported");

    // Level scheme.
    if (!root.contains("levels")) schema_error("config.levels", "missing required key");
    const json& lv = root.at("levels");
    check_keys(lv, "config.levels", {"omega", "Omega_a", "Omega_b", "k_a", "k_b", "mass"});
    cfg.levels.omega = get_req<std::vector<double>>(lv, "config.levels", "omega");
    if (cfg.levels.omega.size() < 2)
        schema_error("config.levels.omega", "need at least the two ground levels");
    cfg.levels.Omega_a = get_req<double>(lv, "config.levels", "Omega_a");
    cfg.levels.Omega_b = get_req<double>(lv, "config.levels", "Omega_b");
    cfg.levels.k_a = get_or<int>(lv, "config.levels", "k_a", 0);
    cfg.levels.k_b = get_or<int>(lv, "config.levels", "k_b", 0);
    cfg.levels.mass = get_or<double>(lv, "config.levels", "mass", 1.0);
    if (cfg.levels.mass <= 0) schema_error("config.levels.mass", "must be positive");

    // Couplings.
    if (!root.contains("couplings")) schema_error("config.couplings", "missing required key");
    const json& cj = root.at("couplings");
    if (!cj.is_array()) schema_error("config.couplings", "expected an array");
    for (size_t i = 0; i < cj.size(); ++i) {
        const std::string p = "config.couplings[" + std::to_string(i) + "]";
        check_keys(cj[i], p, {"ancilla", "mode", "omega", "lambda"});
        Coupling c;
        c.ancilla = get_req<int>(cj[i], p, "ancilla");
        if (c.ancilla < 2 || c.ancilla >= static_cast<int>(cfg.levels.omega.size()))
            schema_error(p + ".ancilla", "must index an ancilla level (>= 2)");
        const std::string mode = get_req<std::string>(cj[i], p, "mode");
        if (mode != "a" && mode != "b") schema_error(p + ".mode", "must be 'a' or 'b'");
        c.mode = (mode == "a") ? PhotonMode::a : PhotonMode::b;
        c.omega = get_cplx(cj[i], p, "omega");
        c.lambda = get_cplx(cj[i], p, "lambda");
        cfg.cps.channels.push_back(c);
    }
    cfg.cps.set_plane_waves(cfg.levels);

    // Basis truncations.
    if (root.contains("basis")) {
        const json& bj = root.at("basis");
        check_keys(bj, "config.basis", {"n_max_a", "n_max_b", "backend", "d"});
        cfg.n_max_a = get_or<int>(bj, "config.basis", "n_max_a", 8);
        cfg.n_max_b = get_or<int>(bj, "config.basis", "n_max_b", 8);
        cfg.backend = get_or<std::string>(bj, "config.basis", "backend", "ladder");
        cfg.d = get_or<int>(bj, "config.basis", "d", 1);
    }
    if (cfg.n_max_a < 1 || cfg.n_max_b < 1)
        schema_error("config.basis", "photon ladders need n_max >= 1");
    if (cfg.backend != "ladder")
        schema_error("config.basis.backend", "config-driven runs support only 'ladder'");
    if (cfg.d != 1 && cfg.d != 3) schema_error("config.basis.d", "must be 1 or 3");

    if (root.contains("filter")) {
        const json& fj = root.at("filter");
        check_keys(fj, "config.filter", {"cutoff"});
        cfg.filter_cutoff = get_or<double>(fj, "config.filter", "cutoff", 1.0);
    }
    if (cfg.filter_cutoff <= 0) schema_error("config.filter.cutoff", "must be positive");

    if (!root.contains("pulse")) schema_error("config.pulse", "missing required key");
    const json& pj = root.at("pulse");
    check_keys(pj, "config.pulse", {"area", "strength", "instant"});
    cfg.pulse.area = get_req<double>(pj, "config.pulse", "area");
    cfg.pulse.strength = get_req<double>(pj, "config.pulse", "strength");
    cfg.pulse.instant = get_or<double>(pj, "config.pulse", "instant", 0.0);
    if (cfg.pulse.strength <= 0) schema_error("config.pulse.strength", "must be positive");
    if (cfg.pulse.area < 0) schema_error("config.pulse.area", "must be non-negative");

    if (!root.contains("scenario")) schema_error("config.scenario", "missing required key");
    const json& sj = root.at("scenario");
    check_keys(sj, "config.scenario",
               {"name", "n_a", "n_b", "kappa", "n", "rwa", "optical_limit", "gaussian", "sigma"});
    cfg.scenario = get_req<std::string>(sj, "config.scenario", "name");
    if (cfg.scenario != "rabi" && cfg.scenario != "hom" && cfg.scenario != "oracle")
        schema_error("config.scenario.name", "must be 'rabi', 'hom', or 'oracle'");
    cfg.n_a = get_or<int>(sj, "config.scenario", "n_a", 1);
    cfg.n_b = get_or<int>(sj, "config.scenario", "n_b", 0);
    cfg.kappa = get_or<int>(sj, "config.scenario", "kappa", 0);
    cfg.hom_n = get_or<int>(sj, "config.scenario", "n", 1);
    cfg.rwa = get_or<bool>(sj, "config.scenario", "rwa", true);
    cfg.optical_limit = get_or<bool>(sj, "config.scenario", "optical_limit", false);
    cfg.gaussian = get_or<bool>(sj, "config.scenario", "gaussian", false);
    cfg.sigma = get_or<double>(sj, "config.scenario", "sigma", 1.0);
    if (cfg.sigma <= 0) schema_error("config.scenario.sigma", "must be positive");

    if (root.contains("sweep")) {
        const json& wj = root.at("sweep");
        check_keys(wj, "config.sweep", {"parameter", "start", "stop", "step"});
        cfg.sweep.active = true;
        cfg.sweep.parameter = parse_parameter(
            get_req<std::string>(wj, "config.sweep", "parameter"), "config.sweep.parameter");
        cfg.sweep.start = get_req<double>(wj, "config.sweep", "start");
        cfg.sweep.stop = get_req<double>(wj, "config.sweep", "stop");
        cfg.sweep.step = get_req<double>(wj, "config.sweep", "step");
        if (cfg.sweep.step <= 0) schema_error("config.sweep.step", "must be positive");
        if (cfg.sweep.stop < cfg.sweep.start)
            schema_error("config.sweep.stop", "must be >= start");
    }

    if (root.contains("output")) {
        const json& oj = root.at("output");
        check_keys(oj, "config.output", {"dir", "format"});
        cfg.out_dir = get_or<std::string>(oj, "config.output", "dir", ".");
        cfg.format = get_or<std::string>(oj, "config.output", "format", "csv");
    }
    if (cfg.format != "csv" && cfg.format != "jsonl")
        schema_error("config.output.format", "must be 'csv' or 'jsonl'");

    cfg.seed = get_or<unsigned long>(root, "config", "seed", 0UL);

    cfg.echo = root.dump();
    return cfg;
}

void apply_sweep_override(SimulationConfig& cfg, const std::string& spec) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos)
        throw std::invalid_argument("--sweep expects name=start:step:stop");
    cfg.sweep.active = true;
    cfg.sweep.parameter = parse_parameter(spec.substr(0, eq), "--sweep");
    const std::string rest = spec.substr(eq + 1);
    double a = 0, s = 0, b = 0;
    if (std::sscanf(rest.c_str(), "%lf:%lf:%lf", &a, &s, &b) != 3)
        throw std::invalid_argument("--sweep expects name=start:step:stop");
    cfg.sweep.start = a;
    cfg.sweep.step = s;
    cfg.sweep.stop = b;
    if (s <= 0) throw std::invalid_argument("--sweep: step must be positive");
}

namespace {

ScenarioSpec to_scenario_spec(const SimulationConfig& cfg) {
    ScenarioSpec spec;
    spec.levels = cfg.levels;
    spec.cps = cfg.cps;
    spec.pulse = cfg.pulse;
    spec.rwa = cfg.rwa;
    spec.optical_limit = cfg.optical_limit;
    spec.n_max_a = cfg.n_max_a;
    spec.n_max_b = cfg.n_max_b;
    if (cfg.scenario == "rabi") {
        spec.kind = ScenarioSpec::Kind::single;
        AtomicInput::Particle p;
        p.level = 0;
        p.kappa = cfg.kappa;
        if (cfg.gaussian) {
            p.gaussian = true;
            p.packet = GaussianAmplitude{cfg.sigma, static_cast<double>(cfg.kappa), cfg.d};
        }
        spec.atom.particles = {p};
        spec.light = OpticalInput::fock(cfg.n_a, cfg.n_b, cfg.n_max_a, cfg.n_max_b);
    } else {
        spec.kind = ScenarioSpec::Kind::hom;
        AtomicInput::Particle pa, pb;
        pa.level = 0;
        pa.kappa = cfg.kappa;
        pb.level = 1;
        pb.kappa = cfg.kappa + cfg.levels.K();
        spec.atom.particles = {pa, pb};
        spec.light = OpticalInput::fock(cfg.hom_n, cfg.hom_n, cfg.n_max_a, cfg.n_max_b);
    }
    return spec;
}

}  // namespace

OracleComparison compare_oracle(const SimulationConfig& cfg) {
    if (cfg.levels.k_a != 0 || cfg.levels.k_b != 0)
        throw std::invalid_argument(
            "compare_oracle: requires zero photon recoil (k_a = k_b = 0)");
    if (cfg.levels.omega.size() < 3)
        throw std::invalid_argument("compare_oracle: needs at least one ancilla level");

    // Full-level basis, one atom, a single zero-momentum mode per level.
    AtomicModeSet atoms;
    atoms.backend = SpatialBackend::ladder;
    atoms.max_atoms = 1;
    for (size_t l = 0; l < cfg.levels.omega.size(); ++l) {
        atoms.level_names.push_back("l" + std::to_string(l));
        atoms.modes.push_back({ExternalMode{0, {}}});
    }
    atoms.finalize();
    const auto basis = CompositeBasis::build(PhotonLadder{cfg.n_max_a, PhotonMode::a},
                                             PhotonLadder{cfg.n_max_b, PhotonMode::b}, atoms);

    // Exact model (static in the Schroedinger picture) and the effective one.
    const Mat H_full = internal_plus_light(cfg.levels, basis) +
                       com_hamiltonian(cfg.levels, basis) +
                       build_dipole_hamiltonian(cfg.levels, cfg.cps, basis);
    const auto h = to_interaction_picture(cfg.levels, cfg.cps, basis);
    const FilterSpec filter{cfg.filter_cutoff, FilterSpec::Window::gaussian, 0};
    const Mat H_eff = effective_hamiltonian(h, filter, 0.0);

    // Initial state: atom in a, photons (n_a, n_b).
    std::vector<int> occ(atoms.n_sp(), 0);
    occ[atoms.sp_index(0, 0)] = 1;
    Vec psi0 = Vec::Zero(basis.dim());
    psi0(basis.index(basis.config_of(occ), cfg.n_a, cfg.n_b)) = 1.0;

    // Level-b population observable (picture-invariant).
    const Mat Ob = kron(one_body_config(basis, sp_transition(atoms, 1, 1, SpatialFactor{})),
                        Mat::Identity(basis.photon_dim(), basis.photon_dim()));

    // One two-photon Rabi period.
    const double omega2 = std::abs(effective_two_photon_omega(cfg.levels, cfg.cps)) *
                          std::sqrt(static_cast<double>(cfg.n_a) * (cfg.n_b + 1));
    if (omega2 <= 0)
        throw std::invalid_argument("compare_oracle: vanishing two-photon Rabi frequency");
    const double T = M_PI / omega2;
    OracleComparison oc;
    const int N = 400;
    for (int i = 0; i <= N; ++i) oc.times.push_back(T * i / N);

    // Both populations pass through the same low-pass transfer function.
    oc.exact_filtered = filtered_expectation_static(H_full, psi0, Ob, filter, oc.times);
    oc.effective = filtered_expectation_static(H_eff, psi0, Ob, filter, oc.times);
    for (size_t i = 0; i < oc.times.size(); ++i)
        oc.max_delta = std::max(oc.max_delta, std::abs(oc.exact_filtered[i] - oc.effective[i]));
    return oc;
}

RunReport run(const SimulationConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    RunReport report;
    report.config_echo = cfg.echo;

    if (cfg.scenario == "oracle") {
        const auto oc = compare_oracle(cfg);
        report.max_oracle_delta = oc.max_delta;
        for (size_t i = 0; i < oc.times.size(); ++i)
            report.rows.push_back({"oracle", "t", oc.times[i], oc.exact_filtered[i],
                                   oc.effective[i],
                                   std::abs(oc.exact_filtered[i] - oc.effective[i])});
        report.provenance.push_back("oracle: spectral propagation of the static Hamiltonian");
    } else {
        const ScenarioSpec spec = to_scenario_spec(cfg);
        if (cfg.sweep.active) {
            const auto grid = cfg.sweep.grid();
            const auto table = sweep(spec, cfg.sweep.parameter, grid);
            for (const auto& pt : table)
                report.rows.push_back({cfg.scenario, parameter_name(cfg.sweep.parameter),
                                       pt.value, pt.population, pt.coincidence, 0.0});
        } else {
            const PulseResult res = run_scenario(spec);
            const double pop = (spec.kind == ScenarioSpec::Kind::single) ? res.p_transfer
                                                                         : res.coincidence;
            report.rows.push_back(
                {cfg.scenario, "theta", cfg.pulse.theta(), pop, res.coincidence, 0.0});
            for (const auto& r : res.phase_records) report.provenance.push_back(r);
        }
    }

    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

bool check(const SimulationConfig& cfg, RunReport& report) {
    bool pass = true;
    auto fail = [&](const std::string& msg) {
        pass = false;
        report.check_messages.push_back("FAIL: " + msg);
    };

    if (cfg.scenario == "oracle") {
        if (report.max_oracle_delta > 2e-3)
            fail("oracle delta " + fmt17(report.max_oracle_delta) + " > 2e-3");
    } else if (!cfg.rwa) {
        report.check_messages.push_back("check: closed forms apply to RWA runs only; skipped");
    } else if (cfg.scenario == "rabi") {
        const double om = std::abs(effective_two_photon_omega(cfg.levels, cfg.cps));
        for (const auto& row : report.rows) {
            if (row.parameter != "theta") continue;
            const double w = om * std::sqrt(static_cast<double>(cfg.n_a) * (cfg.n_b + 1));
            const double expected = std::pow(std::sin(row.value * w), 2);
            if (std::abs(row.population - expected) > 1e-10)
                fail("rabi transfer at theta=" + fmt17(row.value) + " deviates by " +
                     fmt17(std::abs(row.population - expected)));
        }
    } else if (cfg.scenario == "hom") {
        const double om = std::abs(effective_two_photon_omega(cfg.levels, cfg.cps));
        const double wn =
            om * std::sqrt(static_cast<double>(cfg.hom_n) * cfg.hom_n + cfg.hom_n);
        for (const auto& row : report.rows) {
            if (row.parameter != "theta") continue;
            const double expected = std::pow(std::cos(2.0 * row.value * wn), 2);
            if (std::abs(row.coincidence - expected) > 1e-10)
                fail("hom coincidence at theta=" + fmt17(row.value) + " deviates by " +
                     fmt17(std::abs(row.coincidence - expected)));
        }
    }

    report.check_passed = pass;
    if (pass) report.check_messages.push_back("check: all tolerances satisfied");
    return pass;
}

std::string to_csv(const RunReport& report) {
    std::ostringstream os;
    os << "scenario,parameter,value,population,coincidence,oracle_delta\n";
    for (const auto& r : report.rows)
        os << r.scenario << ',' << r.parameter << ',' << fmt17(r.value) << ','
           << fmt17(r.population) << ',' << fmt17(r.coincidence) << ','
           << fmt17(r.oracle_delta) << '\n';
    return os.str();
}

std::string to_jsonl(const RunReport& report) {
    std::ostringstream os;
    for (const auto& r : report.rows) {
        json row{{"scenario", r.scenario},     {"parameter", r.parameter},
                 {"value", r.value},           {"population", r.population},
                 {"coincidence", r.coincidence}, {"oracle_delta", r.oracle_delta}};
        os << row.dump() << '\n';
    }
    return os.str();
}

std::string emit(const RunReport& report, const std::string& format,
                 const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    const std::string path =
        (fs::path(out_dir) / (format == "csv" ? "results.csv" : "results.jsonl")).string();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("emit: cannot write " + path);
    out << (format == "csv" ? to_csv(report) : to_jsonl(report));
    return path;
}

}  // namespace cavsim
