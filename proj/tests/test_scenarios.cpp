#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "cavsim/scenarios.hpp"

using namespace cavsim;

namespace {

LevelScheme scheme(int k_a = 1, int k_b = 1) {
    LevelScheme levels;
    levels.omega = {0.0, 1.0, 20.0};
    levels.Omega_a = 17.0;
    levels.Omega_b = 18.0;  // two-photon resonant
    levels.k_a = k_a;
    levels.k_b = k_b;
    levels.mass = 1.0;
    return levels;
}

CouplingSet couplings(const LevelScheme& levels) {
    CouplingSet cps;
    cps.channels = {{2, PhotonMode::a, cplx{0.1, 0}, cplx{0, 0}},
                    {2, PhotonMode::b, cplx{0.08, 0}, cplx{0, 0}}};
    cps.set_plane_waves(levels);
    return cps;
}

AtomicInput single_a(int kappa = 0) {
    AtomicInput in;
    in.particles = {{0, kappa, false, {}}};
    return in;
}

AtomicInput hom_pair(int K) {
    AtomicInput in;
    in.particles = {{0, 0, false, {}}, {1, K, false, {}}};
    return in;
}

}  // namespace

TEST_CASE("optical input tables") {
    auto f = OpticalInput::fock(2, 1, 4, 3);
    CHECK(f.w.rows() == 5);
    CHECK(f.w.cols() == 4);
    CHECK(f.w(2, 1) == cplx{1, 0});
    CHECK(f.w.cwiseAbs().sum() == 1.0);

    Vec wa(3), wb(2);
    wa << 1.0, 2.0, 0.0;
    wb << 1.0, 1.0;
    auto p = OpticalInput::product(wa, wb);
    p.normalize();
    CHECK(std::abs(p.w.norm() - 1.0) < 1e-14);
    CHECK(std::abs(p.w(1, 0) / p.w(0, 0) - 2.0) < 1e-14);
}

TEST_CASE("single-particle transfer probabilities") {
    const auto levels = scheme();
    const auto cps = couplings(levels);
    const double Om = std::abs(effective_two_photon_omega(levels, cps));
    const int na = 2, nb = 1;
    const double wn = Om * std::sqrt(double(na) * (nb + 1));
    const auto light = OpticalInput::fock(na, nb, 6, 6);

    SUBCASE("zero area is the identity on populations") {
        const auto r = run_single_particle(levels, cps, single_a(), light, {0.0, 1.0, 0.0},
                                           true, 6, 6);
        CHECK(r.p_stay == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(r.p_transfer < 1e-14);
        CHECK(std::abs(r.norm2 - 1.0) < 1e-12);
    }
    SUBCASE("pi/2 pulse transfers fully") {
        const double theta = M_PI / (2.0 * wn);
        const auto r = run_single_particle(levels, cps, single_a(), light, {theta, 1.0, 0.0},
                                           true, 6, 6);
        CHECK(std::abs(r.p_transfer - 1.0) < 1e-10);
        CHECK(r.p_stay < 1e-10);
    }
    SUBCASE("balanced splitter and probability closure") {
        const double theta = M_PI / (4.0 * wn);
        const auto r = run_single_particle(levels, cps, single_a(), light, {theta, 1.0, 0.0},
                                           true, 6, 6);
        CHECK(std::abs(r.p_transfer - 0.5) < 1e-10);
        CHECK(std::abs(r.p_stay + r.p_transfer - 1.0) < 1e-10);
    }
    SUBCASE("generic area follows sin^2") {
        for (double theta : {0.13, 0.41, 0.97}) {
            const auto r = run_single_particle(levels, cps, single_a(), light,
                                               {theta, 1.0, 0.0}, true, 6, 6);
            CHECK(std::abs(r.p_transfer - std::pow(std::sin(theta * wn), 2)) < 1e-10);
        }
    }
}

TEST_CASE("beam splitter block matches the full run") {
    const auto levels = scheme();
    const auto cps = couplings(levels);
    const double Om = std::abs(effective_two_photon_omega(levels, cps));
    const int na = 3, nb = 2;
    const double theta = 0.6 / Om;
    const PulseSpec pulse{theta, 1.0, 0.0};

    const auto bs = beam_splitter_matrix(levels, cps, pulse, na, nb, 0);
    const auto r = run_single_particle(levels, cps, single_a(), OpticalInput::fock(na, nb, 6, 6),
                                       pulse, true, 6, 6);

    // Locate the stay/swap amplitudes in the full state.
    const auto& basis = r.basis;
    const auto& atoms = basis.atoms;
    const int ka = atoms.find_kappa(0, 0);
    const int kb = atoms.find_kappa(1, levels.K());
    REQUIRE(ka >= 0);
    REQUIRE(kb >= 0);
    std::vector<int> occ_a(atoms.n_sp(), 0), occ_b(atoms.n_sp(), 0);
    occ_a[atoms.sp_index(0, ka)] = 1;
    occ_b[atoms.sp_index(1, kb)] = 1;
    const cplx stay = r.state(basis.index(basis.config_of(occ_a), na, nb));
    const cplx swap = r.state(basis.index(basis.config_of(occ_b), na - 1, nb + 1));

    CHECK(std::abs(std::abs(stay) - std::abs(bs.block(0, 0))) < 1e-12);
    CHECK(std::abs(std::abs(swap) - std::abs(bs.block(1, 0))) < 1e-12);
    // Relative phase agrees (global phase conventions cancel in the ratio).
    CHECK(std::abs(swap / stay - bs.block(1, 0) / bs.block(0, 0)) < 1e-10);
    // Block is unitary.
    CHECK((bs.block * bs.block.adjoint() - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff() <
          1e-12);
}

TEST_CASE("vacuum mode a leaves the atom in place") {
    const auto levels = scheme();
    const auto cps = couplings(levels);
    const auto r = run_single_particle(levels, cps, single_a(), OpticalInput::fock(0, 2, 4, 4),
                                       {0.8, 1.0, 0.0}, true, 4, 4);
    CHECK(r.p_stay == doctest::Approx(1.0).epsilon(1e-12));
    const auto bs = beam_splitter_matrix(levels, cps, {0.8, 1.0, 0.0}, 0, 2, 0);
    CHECK(std::abs(bs.block(0, 0)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(bs.block(1, 0)) < 1e-14);
}

TEST_CASE("gaussian packet input stays normalized up to recorded truncation") {
    // Single-kick geometry keeps the momentum window (and the basis) small.
    const auto levels = scheme(1, 0);
    const auto cps = couplings(levels);
    AtomicInput in;
    GaussianAmplitude g{3.0, 0.0, 1};
    in.particles = {{0, 0, true, g}};
    const auto r = run_single_particle(levels, cps, in, OpticalInput::fock(2, 1, 3, 3),
                                       {0.3, 1.0, 0.0}, true, 3, 3);
    CHECK(std::abs(r.norm2 - 1.0) < 1e-3);  // wide packet, small momentum truncation
    CHECK(std::abs(r.p_stay + r.p_transfer - r.norm2) < 1e-12);
    CHECK(!r.phase_records.empty());
}

TEST_CASE("hong-ou-mandel coincidence") {
    const auto levels = scheme();
    const auto cps = couplings(levels);
    const double Om = std::abs(effective_two_photon_omega(levels, cps));
    const int n = 2;
    const double Omega_n = Om * std::sqrt(double(n) * n + n);
    const auto light = OpticalInput::fock(n, n, 5, 5);
    const auto atoms = hom_pair(levels.K());

    SUBCASE("zero area keeps perfect coincidence") {
        const auto r = run_hom(levels, cps, atoms, light, {0.0, 1.0, 0.0}, true, false, 5, 5);
        CHECK(r.coincidence == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("balanced pulse cancels coincidences") {
        const double theta = M_PI / (4.0 * Omega_n);
        for (bool optical : {false, true}) {
            const auto r = run_hom(levels, cps, atoms, light, {theta, 1.0, 0.0}, true, optical,
                                   5, 5);
            CHECK(r.coincidence < 1e-10);
            CHECK(std::abs(r.norm2 - 1.0) < 1e-10);

            // Output is the anti-correlated pair |aa;n+1,n-1> / |bb;n-1,n+1>, half each.
            // Sector labels read "<count_a><count_b>A|<n_a>,<n_b>L".
            double p_aa = 0, p_bb = 0, p_other = 0;
            for (const auto& [label, p] : r.sector_populations) {
                if (label.rfind("20A", 0) == 0) {
                    p_aa += p;
                    CHECK(label == "20A|3,1L");
                } else if (label.rfind("02A", 0) == 0) {
                    p_bb += p;
                    CHECK(label == "02A|1,3L");
                } else {
                    p_other += p;
                }
            }
            CHECK(std::abs(p_aa - 0.5) < 1e-10);
            CHECK(std::abs(p_bb - 0.5) < 1e-10);
            CHECK(p_other < 1e-10);
        }
    }
    SUBCASE("generic area follows cos^2 of twice the area") {
        for (double theta : {0.1 / Omega_n, 0.5 / Omega_n, 1.1 / Omega_n}) {
            const auto r = run_hom(levels, cps, atoms, light, {theta, 1.0, 0.0}, true, false,
                                   5, 5);
            CHECK(std::abs(r.coincidence - std::pow(std::cos(2.0 * theta * Omega_n), 2)) <
                  1e-10);
        }
    }
    SUBCASE("input validation") {
        AtomicInput two_a;
        two_a.particles = {{0, 0, false, {}}, {0, 1, false, {}}};
        CHECK_THROWS_AS(run_hom(levels, cps, two_a, light, {0.1, 1.0, 0.0}, true, false, 5, 5),
                        std::domain_error);
        AtomicInput wrong_kappa = hom_pair(levels.K() + 1);
        CHECK_THROWS_AS(
            run_hom(levels, cps, wrong_kappa, light, {0.1, 1.0, 0.0}, true, false, 5, 5),
            std::domain_error);
    }
}

TEST_CASE("sweeps") {
    const auto levels = scheme();
    const auto cps = couplings(levels);
    const double Om = std::abs(effective_two_photon_omega(levels, cps));

    ScenarioSpec base;
    base.kind = ScenarioSpec::Kind::single;
    base.levels = levels;
    base.cps = cps;
    base.atom = single_a();
    base.light = OpticalInput::fock(2, 1, 6, 6);
    base.pulse = {0.2, 1.0, 0.0};
    base.rwa = true;
    base.n_max_a = base.n_max_b = 6;

    SUBCASE("empty grid") { CHECK(sweep(base, SweepParameter::theta, {}).empty()); }

    SUBCASE("theta sweep follows sin^2 pointwise") {
        const double wn = Om * std::sqrt(2.0 * 2.0);
        std::vector<double> grid;
        for (int k = 0; k <= 40; ++k) grid.push_back(0.05 * k / Om);
        const auto pts = sweep(base, SweepParameter::theta, grid);
        REQUIRE(pts.size() == grid.size());
        for (size_t k = 0; k < grid.size(); ++k) {
            CHECK(pts[k].value == doctest::Approx(grid[k]));
            CHECK(std::abs(pts[k].population - std::pow(std::sin(grid[k] * wn), 2)) < 1e-10);
            CHECK(std::abs(pts[k].norm2 - 1.0) < 1e-10);
        }
    }

    SUBCASE("hom theta sweep has coincidence minima at the balanced area") {
        ScenarioSpec hom = base;
        hom.kind = ScenarioSpec::Kind::hom;
        hom.atom = hom_pair(levels.K());
        hom.light = OpticalInput::fock(2, 2, 5, 5);
        hom.n_max_a = hom.n_max_b = 5;
        const double Omega_n = Om * std::sqrt(6.0);
        std::vector<double> grid;
        for (int k = 0; k <= 8; ++k) grid.push_back(k * M_PI / (8.0 * Omega_n));
        const auto pts = sweep(hom, SweepParameter::theta, grid);
        for (size_t k = 0; k < grid.size(); ++k)
            CHECK(std::abs(pts[k].coincidence -
                           std::pow(std::cos(2.0 * grid[k] * Omega_n), 2)) < 1e-10);
        // Minima at theta = pi/(4 Omega_n) and 3 pi/(4 Omega_n).
        CHECK(pts[2].coincidence < 1e-10);
        CHECK(pts[6].coincidence < 1e-10);
    }

    SUBCASE("photon-number sweep rescales the Rabi angle") {
        std::vector<double> grid{1.0, 2.0, 3.0, 4.0};
        const auto pts = sweep(base, SweepParameter::n_a, grid);
        REQUIRE(pts.size() == grid.size());
        for (size_t k = 0; k < grid.size(); ++k) {
            const double wn = Om * std::sqrt(grid[k] * 2.0);  // n_b pinned at 1
            CHECK(std::abs(pts[k].population - std::pow(std::sin(0.2 * wn), 2)) < 1e-10);
        }
    }
}
