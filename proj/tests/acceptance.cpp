#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "cavsim/config.hpp"
#include "cavsim/scenarios.hpp"

using namespace cavsim;
namespace fs = std::filesystem;

namespace {

void report(int criterion, bool pass, const std::string& detail) {
    std::printf("%s criterion %d: %s\n", pass ? "PASS" : "FAIL", criterion, detail.c_str());
    std::fflush(stdout);
    CHECK_MESSAGE(pass, "criterion ", criterion, ": ", detail);
}

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

LevelScheme resonant_scheme() {
    LevelScheme levels;
    levels.omega = {0.0, 1.0, 20.0};
    levels.Omega_a = 17.0;
    levels.Omega_b = 18.0;  // two-photon resonant
    levels.k_a = 1;
    levels.k_b = 1;
    levels.mass = 1.0;
    return levels;
}

CouplingSet rwa_couplings(const LevelScheme& levels) {
    CouplingSet cps;
    cps.channels = {{2, PhotonMode::a, cplx{0.1, 0}, cplx{0, 0}},
                    {2, PhotonMode::b, cplx{0.08, 0}, cplx{0, 0}}};
    cps.set_plane_waves(levels);
    return cps;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

/** d-dimensional central-difference Laplacian of the packet at an on-axis point. */
cplx fd_com_energy(const GaussianAmplitude& amp, double R, double mass) {
    const double h = 1e-4 * amp.sigma;
    auto f = [&](double x1, double rest2) {
        const double r2 = x1 * x1 + rest2;
        return std::pow(M_PI * amp.sigma * amp.sigma, -amp.d / 4.0) *
               std::exp(-r2 / (2.0 * amp.sigma * amp.sigma)) * std::exp(I * amp.kappa * x1);
    };
    cplx lap = (f(R + h, 0) - 2.0 * f(R, 0) + f(R - h, 0)) / (h * h);
    for (int k = 1; k < amp.d; ++k)
        lap += (2.0 * f(R, h * h) - 2.0 * f(R, 0)) / (h * h);
    return -lap / (2.0 * mass * f(R, 0));
}

}  // namespace

TEST_CASE("criterion 1: single-particle Rabi law") {
    const auto t0 = std::chrono::steady_clock::now();
    const auto levels = resonant_scheme();
    const auto cps = rwa_couplings(levels);
    const double Om = std::abs(effective_two_photon_omega(levels, cps));
    const int na = 3, nb = 2;
    const double wn = Om * std::sqrt(double(na) * (nb + 1));

    ScenarioSpec spec;
    spec.kind = ScenarioSpec::Kind::single;
    spec.levels = levels;
    spec.cps = cps;
    spec.atom.particles = {{0, 0, false, {}}};
    spec.light = OpticalInput::fock(na, nb, 8, 8);
    spec.pulse = {0.0, 1.0, 0.0};
    spec.rwa = true;
    spec.n_max_a = spec.n_max_b = 8;

    std::vector<double> grid;
    for (int k = 0; k < 100; ++k) grid.push_back(k * (3.0 / Om) / 99.0);
    const auto pts = sweep(spec, SweepParameter::theta, grid);

    double max_err = 0;
    for (size_t k = 0; k < grid.size(); ++k)
        max_err = std::max(max_err,
                           std::abs(pts[k].population - std::pow(std::sin(grid[k] * wn), 2)));
    const double dt = seconds_since(t0);
    report(1, max_err <= 1e-10 && dt < 1.0,
           "Rabi sin^2 law, 100 areas at n_max=8: max error " + fmt(max_err) + " (<=1e-10), " +
               fmt(dt) + " s (<1)");
}

TEST_CASE("criterion 2: Hong-Ou-Mandel cancellation") {
    const auto t0 = std::chrono::steady_clock::now();
    const auto levels = resonant_scheme();
    const auto cps = rwa_couplings(levels);
    const double Om = std::abs(effective_two_photon_omega(levels, cps));
    const int n = 2;
    const double Omega_n = Om * std::sqrt(double(n) * n + n);
    const double theta = M_PI / (4.0 * Omega_n);

    AtomicInput atoms;
    atoms.particles = {{0, 0, false, {}}, {1, levels.K(), false, {}}};
    const auto light = OpticalInput::fock(n, n, 5, 5);

    double coincidence = 1, p_aa = 0, p_bb = 0, branch_err = 1;
    bool ok = true;
    for (bool optical : {false, true}) {
        const auto r = run_hom(levels, cps, atoms, light, {theta, 1.0, 0.0}, true, optical, 5, 5);
        coincidence = r.coincidence;
        p_aa = p_bb = 0;
        for (const auto& [label, p] : r.sector_populations) {
            if (label.rfind("20A", 0) == 0) p_aa += p;
            if (label.rfind("02A", 0) == 0) p_bb += p;
        }
        branch_err = std::max(std::abs(p_aa - 0.5), std::abs(p_bb - 0.5));
        ok = ok && coincidence <= 1e-10 && branch_err <= 1e-10;
    }
    const double dt = seconds_since(t0);
    report(2, ok && dt < 5.0,
           "HOM at the balanced area: coincidence " + fmt(coincidence) +
               " (<=1e-10), optical-limit branch error " + fmt(branch_err) + " (<=1e-10), " +
               fmt(dt) + " s (<5)");
}

TEST_CASE("criterion 3: exact-evolution oracle") {
    const auto t0 = std::chrono::steady_clock::now();
    SimulationConfig cfg;
    cfg.levels.omega = {0.0, 2.0, 1050.0};
    cfg.levels.Omega_a = 1000.0;  // Delta-_a = Delta-_b = -50, g/|Delta-| = 0.02
    cfg.levels.Omega_b = 998.0;   // Delta+_a = 2050, ratio Delta+/|Delta-| = 41 >= 40
    cfg.levels.k_a = cfg.levels.k_b = 0;
    cfg.cps.channels = {{2, PhotonMode::a, cplx{1, 0}, cplx{1, 0}},
                        {2, PhotonMode::b, cplx{1, 0}, cplx{1, 0}}};
    cfg.cps.set_plane_waves(cfg.levels);
    cfg.n_max_a = cfg.n_max_b = 3;
    cfg.filter_cutoff = 3.0;
    cfg.n_a = 1;
    cfg.n_b = 0;

    const auto oc = compare_oracle(cfg);
    const double dt = seconds_since(t0);
    report(3, oc.max_delta <= 2e-3 && dt < 30.0,
           "filtered exact vs effective populations over one two-photon Rabi period: max "
           "delta " +
               fmt(oc.max_delta) + " (<=2e-3), " + fmt(dt) + " s (<30)");
}

TEST_CASE("criterion 4: two construction paths") {
    LevelScheme levels;
    levels.omega = {0.0, 1.0, 20.0, 24.0};  // two ancillas
    levels.Omega_a = 17.0;
    levels.Omega_b = 18.0;
    levels.k_a = levels.k_b = 0;
    CouplingSet cps;
    cps.channels = {{2, PhotonMode::a, cplx{0.1, 0}, cplx{0.03, 0}},
                    {2, PhotonMode::b, cplx{0.08, 0}, cplx{0.02, 0}},
                    {3, PhotonMode::a, cplx{0.06, 0.02}, cplx{0.01, 0}},
                    {3, PhotonMode::b, cplx{0.05, 0}, cplx{0.015, -0.01}}};
    cps.set_plane_waves(levels);

    AtomicModeSet atoms;
    atoms.max_atoms = 2;
    atoms.level_names = {"a", "b", "e1", "e2"};
    atoms.modes = {{ExternalMode{0, {}}},
                   {ExternalMode{0, {}}},
                   {ExternalMode{0, {}}},
                   {ExternalMode{0, {}}}};
    atoms.finalize();
    const auto basis = CompositeBasis::build(PhotonLadder{4, PhotonMode::a},
                                             PhotonLadder{4, PhotonMode::b}, atoms);

    const auto eff = assemble_H_eff(levels, cps, basis);
    const auto h = to_interaction_picture(levels, cps, basis);
    const FilterSpec keep_all{1e9, FilterSpec::Window::ideal, 0};
    const Mat engine = internal_plus_light(levels, basis) +
                       effective_hamiltonian(h, keep_all, 0.0);

    const double scale = eff.total().cwiseAbs().maxCoeff();
    const double rel = (eff.total() - engine).cwiseAbs().maxCoeff() / scale;
    report(4, rel <= 1e-12,
           "structured assembly vs averaging engine, 4 levels / 2 ancillas / 2 atoms / "
           "n_max=4: relative deviation " +
               fmt(rel) + " (<=1e-12)");
}

TEST_CASE("criterion 5: dressed-level shifts vs perturbation theory") {
    LevelScheme levels;
    levels.omega = {0.0, 1.0, 20.0};
    levels.Omega_a = 19.0;  // Delta- = -1
    levels.Omega_b = 500.0;
    const double g = 0.02, lam = 0.02;
    CouplingSet cps;
    cps.channels = {{2, PhotonMode::a, cplx{g, 0}, cplx{lam, 0}}};
    cps.set_plane_waves(levels);

    AtomicModeSet atoms;
    atoms.max_atoms = 1;
    atoms.level_names = {"a", "b", "e"};
    atoms.modes = {{ExternalMode{0, {}}}, {ExternalMode{0, {}}}, {ExternalMode{0, {}}}};
    atoms.finalize();
    const auto basis = CompositeBasis::build(PhotonLadder{5, PhotonMode::a},
                                             PhotonLadder{5, PhotonMode::b}, atoms);
    const Mat H = internal_plus_light(levels, basis) +
                  build_dipole_hamiltonian(levels, cps, basis);
    const int ca = basis.config_of({1, 0, 0});
    const int ce = basis.config_of({0, 0, 1});
    const int n = 3;

    // Co-rotating channel: |a; n> couples to |e; n-1> across the gap Delta-.
    double worst = 0;
    {
        const int ia = basis.index(ca, n, 0), ie = basis.index(ce, n - 1, 0);
        Mat block(2, 2);
        block << H(ia, ia), H(ia, ie), H(ie, ia), H(ie, ie);
        Eigen::SelfAdjointEigenSolver<Mat> es(block);
        const double exact = es.eigenvalues()(0) - H(ia, ia).real();
        const auto ac = ac_stark(levels, cps, basis, +1);
        const double predicted = ac.op(ia, ia).real();
        worst = std::max(worst, std::abs(predicted - exact) / std::abs(exact));
    }
    // Counter-rotating channel: |a; n> couples to |e; n+1> across the gap Delta+.
    {
        const int ia = basis.index(ca, n, 0), ie = basis.index(ce, n + 1, 0);
        Mat block(2, 2);
        block << H(ia, ia), H(ia, ie), H(ie, ia), H(ie, ie);
        Eigen::SelfAdjointEigenSolver<Mat> es(block);
        const double exact = es.eigenvalues()(0) - H(ia, ia).real();
        const auto bs = bloch_siegert(levels, cps, basis, +1);
        const double predicted = -(bs.op(ia, ia).real() + bs.vacuum);
        worst = std::max(worst, std::abs(predicted - exact) / std::abs(exact));
    }
    report(5, worst <= 0.05,
           "AC-Stark and Bloch-Siegert shifts vs exact dressed levels at g/|Delta| = 0.02: "
           "worst relative deviation " +
               fmt(worst) + " (<=5%)");
}

TEST_CASE("criterion 6: conservation suite") {
    const auto levels = resonant_scheme();
    auto cps = rwa_couplings(levels);
    cps.channels[0].lambda = cplx{0.03, 0};
    cps.channels[1].lambda = cplx{0.02, 0};

    AtomicModeSet atoms;
    atoms.max_atoms = 2;
    atoms.level_names = {"a", "b", "e"};
    atoms.modes = {{ExternalMode{0, {}}, ExternalMode{2, {}}},
                   {ExternalMode{0, {}}, ExternalMode{2, {}}},
                   {ExternalMode{1, {}}}};
    atoms.finalize();
    const auto basis = CompositeBasis::build(PhotonLadder{3, PhotonMode::a},
                                             PhotonLadder{3, PhotonMode::b}, atoms);
    const auto eff = assemble_H_eff(levels, cps, basis);

    const double herm = std::max({hermiticity_defect(eff.H_L), hermiticity_defect(eff.H_sp),
                                  hermiticity_defect(eff.H_pp)});

    Mat na_l = Mat::Zero(4, 4), nb_l = Mat::Zero(4, 4);
    for (int k = 0; k < 4; ++k) na_l(k, k) = nb_l(k, k) = double(k);
    const Mat N = photon_embed(basis, PhotonMode::a, na_l) +
                  photon_embed(basis, PhotonMode::b, nb_l);
    const double comm = std::max((eff.H_sp * N - N * eff.H_sp).cwiseAbs().maxCoeff(),
                                 (eff.H_pp * N - N * eff.H_pp).cwiseAbs().maxCoeff());

    // RWA pulse unitarity and probability closure.
    const auto rcps = rwa_couplings(levels);
    ScenarioSpec spec;
    spec.kind = ScenarioSpec::Kind::single;
    spec.levels = levels;
    spec.cps = rcps;
    spec.atom.particles = {{0, 0, false, {}}};
    spec.light = OpticalInput::fock(2, 1, 4, 4);
    spec.rwa = true;
    spec.n_max_a = spec.n_max_b = 4;

    AtomicModeSet patoms;
    patoms.max_atoms = 1;
    patoms.level_names = {"a", "b"};
    patoms.modes = {{ExternalMode{0, {}}}, {ExternalMode{levels.K(), {}}}};
    patoms.finalize();
    const auto pbasis = CompositeBasis::build(PhotonLadder{4, PhotonMode::a},
                                              PhotonLadder{4, PhotonMode::b}, patoms);
    auto red = build_reduced(levels, rcps, pbasis, true);
    const auto prop = make_propagator(red);
    double unit = 0, closure = 0;
    for (double theta : {0.2, 0.9, 2.3}) {
        const Mat U = prop.unitary(theta);
        unit = std::max(unit, (U * U.adjoint() - Mat::Identity(pbasis.dim(), pbasis.dim()))
                                  .cwiseAbs()
                                  .maxCoeff());
        spec.pulse = {theta, 1.0, 0.0};
        const auto r = run_scenario(spec);
        closure = std::max(closure, std::abs(r.p_stay + r.p_transfer - 1.0));
    }

    const bool pass = herm <= 1e-12 && comm == 0.0 && unit <= 1e-10 && closure <= 1e-10;
    report(6, pass,
           "hermiticity " + fmt(herm) + " (<=1e-12), photon-number commutator " + fmt(comm) +
               " (=0), RWA unitarity " + fmt(unit) + " (<=1e-10), probability closure " +
               fmt(closure) + " (<=1e-10)");
}

TEST_CASE("criterion 7: Gaussian COM energy vs finite differences") {
    double worst = 0;
    for (int d : {1, 3})
        for (int is = 0; is < 5; ++is)
            for (int ik = 0; ik < 5; ++ik) {
                GaussianAmplitude g{0.5 + 0.25 * is, 0.5 * ik, d};
                for (double R : {0.0, 0.3, 0.9}) {
                    const cplx analytic = gaussian_com_energy(g, R, 1.3);
                    const cplx fd = fd_com_energy(g, R, 1.3);
                    worst = std::max(worst,
                                     std::abs(analytic - fd) / std::max(1.0, std::abs(analytic)));
                }
            }
    report(7, worst <= 1e-6,
           "complex COM energy vs discrete Laplacian over the 5x5 (sigma, kappa) grid, d = 1 "
           "and 3: worst relative deviation " +
               fmt(worst) + " (<=1e-6)");
}

TEST_CASE("criterion 8: deterministic CLI output") {
    const char* bin = std::getenv("SIMULATE_BIN");
    const char* cfg = std::getenv("CONFIG_DIR");
    REQUIRE(bin != nullptr);
    REQUIRE(cfg != nullptr);

    const fs::path base = fs::temp_directory_path() / "cavsim_acceptance";
    fs::remove_all(base);
    auto run_once = [&](const std::string& sub) {
        const fs::path dir = base / sub;
        fs::create_directories(dir);
        const std::string cmd = std::string(bin) + " --config " + cfg +
                                "/rabi.json --out " + dir.string() + " > /dev/null";
        REQUIRE(std::system(cmd.c_str()) == 0);
        std::ifstream in(dir / "results.csv", std::ios::binary);
        std::ostringstream os;
        os << in.rdbuf();
        return os.str();
    };
    const std::string first = run_once("r1");
    const std::string second = run_once("r2");
    const bool pass = !first.empty() && first == second;
    report(8, pass, "repeated runs emit byte-identical CSV (17 significant digits), " +
                        std::to_string(first.size()) + " bytes");
}
