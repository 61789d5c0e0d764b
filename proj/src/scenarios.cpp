#include "cavsim/scenarios.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace cavsim {

OpticalInput OpticalInput::fock(int n_a, int n_b, int n_max_a, int n_max_b) {
    if (n_a < 0 || n_b < 0 || n_a > n_max_a || n_b > n_max_b)
        throw std::invalid_argument("OpticalInput::fock: photon number outside the ladder");
    OpticalInput in;
    in.w = Mat::Zero(n_max_a + 1, n_max_b + 1);
    in.w(n_a, n_b) = 1.0;
    return in;
}

OpticalInput OpticalInput::product(const Vec& wa, const Vec& wb) {
    OpticalInput in;
    in.w = wa * wb.transpose();
    in.normalize();
    return in;
}

void OpticalInput::normalize() {
    const double n = w.norm();
    if (n == 0.0) throw std::invalid_argument("OpticalInput: zero amplitude table");
    w /= n;
}

namespace {

/** Gaussian momentum-ladder support half-width (labels) around the carrier. */
int gaussian_half_width(const LevelScheme& levels) {
    return std::max(1, 4 * std::abs(levels.K()));
}

/** Ladder weight of a Gaussian packet at label kappa (unnormalized). */
double gaussian_weight(const GaussianAmplitude& packet, double q, int kappa) {
    const double dk = q * (kappa - packet.kappa);
    return std::exp(-packet.sigma * packet.sigma * dk * dk / 2.0);
}

struct Prepared {
    CompositeBasis basis;
    ReducedHamiltonian red;
    PulsePropagator prop;
    Vec psi0;
    ScenarioSpec::Kind kind;
    int initial_level = 0;
    std::vector<std::string> phase_records;
};

CompositeBasis make_two_level_basis(const LevelScheme& levels, const AtomicInput& atom,
                                    bool rwa, int n_max_a, int n_max_b, int max_atoms) {
    const int K = levels.K();
    std::set<int> ka, kb;
    for (const auto& p : atom.particles) {
        std::set<int>& dst = (p.level == 0) ? ka : kb;
        if (!p.gaussian) {
            dst.insert(p.kappa);
        } else {
            const int W = gaussian_half_width(levels);
            const int center = static_cast<int>(std::lround(p.packet.kappa));
            for (int k = center - W; k <= center + W; ++k) dst.insert(k);
        }
    }
    // Close the ladder under the co-rotating swap a(k) <-> b(k+K).
    std::set<int> a_final = ka, b_final = kb;
    for (int k : kb) a_final.insert(k - K);
    for (int k : ka) b_final.insert(k + K);
    if (!rwa) {
        // One rung of counter-rotating transfers a(k) <-> b(k-K).
        for (int k : ka) b_final.insert(k - K);
        for (int k : kb) a_final.insert(k + K);
    }

    AtomicModeSet atoms;
    atoms.backend = SpatialBackend::ladder;
    atoms.base_momentum = 1.0;
    atoms.max_atoms = max_atoms;
    atoms.level_names = {"a", "b"};
    atoms.modes.resize(2);
    for (int k : a_final) atoms.modes[0].push_back(ExternalMode{k, {}});
    for (int k : b_final) atoms.modes[1].push_back(ExternalMode{k, {}});
    atoms.finalize();
    return CompositeBasis::build(PhotonLadder{n_max_a, PhotonMode::a},
                                 PhotonLadder{n_max_b, PhotonMode::b}, atoms);
}

/** Amplitude vector over configs for the given particles (occupancy state). */
Vec config_amplitudes(const CompositeBasis& basis, const LevelScheme& levels,
                      const AtomicInput& atom, std::vector<std::string>& records) {
    const auto& atoms = basis.atoms;
    auto mode_index = [&](int level, int kappa) {
        const int ext = atoms.find_kappa(level, kappa);
        if (ext < 0) throw std::invalid_argument("atomic input momentum not in the ladder");
        return atoms.sp_index(level, ext);
    };
    Vec amps = Vec::Zero(basis.n_configs());
    if (atom.particles.size() == 1) {
        const auto& p = atom.particles[0];
        if (!p.gaussian) {
            std::vector<int> occ(atoms.n_sp(), 0);
            occ[mode_index(p.level, p.kappa)] = 1;
            amps(basis.config_of(occ)) = 1.0;
        } else {
            const int W = gaussian_half_width(levels);
            const int center = static_cast<int>(std::lround(p.packet.kappa));
            double inside = 0, total = 0;
            for (int k = center - 4 * W; k <= center + 4 * W; ++k) {
                const double w = gaussian_weight(p.packet, atoms.base_momentum, k);
                total += w * w;
                if (std::abs(k - center) <= W) inside += w * w;
            }
            for (int k = center - W; k <= center + W; ++k) {
                std::vector<int> occ(atoms.n_sp(), 0);
                occ[mode_index(p.level, k)] = 1;
                amps(basis.config_of(occ)) = gaussian_weight(p.packet, atoms.base_momentum, k);
            }
            std::ostringstream os;
            os << "gaussian ladder truncation error " << (1.0 - inside / total);
            records.push_back(os.str());
        }
    } else {
        std::vector<int> occ(atoms.n_sp(), 0);
        for (const auto& p : atom.particles) {
            if (p.gaussian)
                throw std::domain_error("two-particle runs require plane-wave inputs");
            occ[mode_index(p.level, p.kappa)] += 1;
        }
        amps(basis.config_of(occ)) = 1.0;
    }
    amps.normalize();
    return amps;
}

Prepared prepare(const ScenarioSpec& spec) {
    LevelScheme levels = spec.levels;
    if (spec.optical_limit) levels.mass = std::numeric_limits<double>::infinity();

    if (spec.kind == ScenarioSpec::Kind::single) {
        if (spec.atom.particles.size() != 1)
            throw std::invalid_argument("single-particle scenario needs exactly one particle");
    } else {
        if (spec.atom.particles.size() != 2)
            throw std::domain_error("HOM scenario needs exactly two particles");
        const auto& p0 = spec.atom.particles[0];
        const auto& p1 = spec.atom.particles[1];
        const auto* pa = (p0.level == 0) ? &p0 : (p1.level == 0 ? &p1 : nullptr);
        const auto* pb = (p0.level == 1) ? &p0 : (p1.level == 1 ? &p1 : nullptr);
        if (pa == nullptr || pb == nullptr)
            throw std::domain_error("HOM input must hold one a-level and one b-level atom");
        if (pb->kappa != pa->kappa + levels.K())
            throw std::domain_error(
                "HOM input momenta must match the swap kick (kappa_b = kappa_a + K)");
    }

    const int max_atoms = static_cast<int>(spec.atom.particles.size());
    Prepared prep{make_two_level_basis(levels, spec.atom, spec.rwa, spec.n_max_a, spec.n_max_b,
                                       max_atoms),
                  {}, {}, {}, spec.kind};
    prep.initial_level = spec.atom.particles[0].level;
    prep.red = build_reduced(levels, spec.cps, prep.basis, spec.rwa);
    prep.prop = make_propagator(prep.red);

    // Initial state: atomic configuration amplitudes x optical amplitude table.
    const Vec camps = config_amplitudes(prep.basis, levels, spec.atom, prep.phase_records);
    OpticalInput light = spec.light;
    light.normalize();
    if (light.w.rows() != prep.basis.ladder_a.dim() || light.w.cols() != prep.basis.ladder_b.dim())
        throw std::invalid_argument("optical input table does not match the photon ladders");
    prep.psi0 = Vec::Zero(prep.basis.dim());
    for (int c = 0; c < prep.basis.n_configs(); ++c) {
        if (camps(c) == cplx{0, 0}) continue;
        for (int na = 0; na <= prep.basis.ladder_a.n_max; ++na)
            for (int nb = 0; nb <= prep.basis.ladder_b.n_max; ++nb)
                prep.psi0(prep.basis.index(c, na, nb)) = camps(c) * light.w(na, nb);
    }
    return prep;
}

PulseResult finish(const Prepared& prep, double theta) {
    PulseResult res;
    res.basis = prep.basis;
    res.state = prep.prop.apply(theta, prep.psi0);
    res.norm2 = res.state.squaredNorm();
    res.phase_records = prep.phase_records;

    const auto& basis = prep.basis;
    const auto& atoms = basis.atoms;
    // Per-config internal-level occupation counts.
    std::vector<std::array<int, 2>> counts(basis.n_configs(), {0, 0});
    for (int c = 0; c < basis.n_configs(); ++c)
        for (int i = 0; i < atoms.n_sp(); ++i)
            counts[c][atoms.sp[i].level] += basis.configs[c][i];

    std::map<std::string, double> sectors;
    for (int c = 0; c < basis.n_configs(); ++c)
        for (int na = 0; na <= basis.ladder_a.n_max; ++na)
            for (int nb = 0; nb <= basis.ladder_b.n_max; ++nb) {
                const double p = std::norm(res.state(basis.index(c, na, nb)));
                if (p == 0.0) continue;
                if (prep.kind == ScenarioSpec::Kind::single) {
                    if (counts[c][prep.initial_level] > 0)
                        res.p_stay += p;
                    else if (counts[c][1 - prep.initial_level] > 0)
                        res.p_transfer += p;
                } else if (counts[c][0] == 1 && counts[c][1] == 1) {
                    res.coincidence += p;
                }
                if (p > 1e-12) {
                    std::ostringstream os;
                    os << counts[c][0] << counts[c][1] << "A|" << na << "," << nb << "L";
                    sectors[os.str()] += p;
                }
            }
    res.sector_populations.assign(sectors.begin(), sectors.end());
    return res;
}

}  // namespace

PulseResult run_single_particle(const LevelScheme& levels, const CouplingSet& cps,
                                const AtomicInput& atom, const OpticalInput& light,
                                const PulseSpec& pulse, bool rwa, int n_max_a, int n_max_b) {
    ScenarioSpec spec{ScenarioSpec::Kind::single, levels, cps,   atom,   light,
                      pulse,                      rwa,    false, n_max_a, n_max_b};
    return finish(prepare(spec), pulse.theta());
}

PulseResult run_hom(const LevelScheme& levels, const CouplingSet& cps, const AtomicInput& atoms,
                    const OpticalInput& light, const PulseSpec& pulse, bool rwa,
                    bool optical_limit, int n_max_a, int n_max_b) {
    ScenarioSpec spec{ScenarioSpec::Kind::hom, levels, cps,           atoms,  light,
                      pulse,                   rwa,    optical_limit, n_max_a, n_max_b};
    return finish(prepare(spec), pulse.theta());
}

PulseResult run_scenario(const ScenarioSpec& spec) {
    return finish(prepare(spec), spec.pulse.theta());
}

BeamSplitterBlock beam_splitter_matrix(const LevelScheme& levels, const CouplingSet& cps,
                                       const PulseSpec& pulse, int n_a, int n_b, int kappa) {
    const double theta = pulse.theta();
    const double q = 1.0;  // ladder base momentum, matching make_two_level_basis
    const cplx Omega = effective_two_photon_omega(levels, cps);

    const double pk_a = q * kappa, pk_b = q * (kappa + levels.K());
    const double E_stay = levels.Omega_a * (n_a + 0.5) + levels.Omega_b * (n_b + 0.5) +
                          pk_a * pk_a / (2.0 * levels.mass) +
                          level_shift_energy(levels, cps, 0, n_a, n_b, true);
    BeamSplitterBlock bs;
    bs.phase_stay = std::exp(-I * theta * E_stay);
    if (n_a == 0) {
        bs.block << bs.phase_stay, 0, 0, 0;
        return bs;
    }
    const double E_swap = levels.Omega_a * (n_a - 0.5) + levels.Omega_b * (n_b + 1.5) +
                          pk_b * pk_b / (2.0 * levels.mass) +
                          level_shift_energy(levels, cps, 1, n_a - 1, n_b + 1, true);
    bs.phase_swap = std::exp(-I * theta * E_swap);

    const cplx v = HBAR * Omega * std::sqrt(static_cast<double>(n_a) * (n_b + 1));
    const double w = std::abs(v) / HBAR;
    const double c = std::cos(theta * w);
    const double sinc = (w == 0.0) ? theta : std::sin(theta * w) / w;
    // [cos(theta W) - i sinc(W) V] on the 2x2 block, then the free phases.
    bs.block(0, 0) = c * bs.phase_stay;
    bs.block(1, 1) = c * bs.phase_swap;
    bs.block(1, 0) = -I * sinc * (v / HBAR) * bs.phase_stay;
    bs.block(0, 1) = -I * sinc * (std::conj(v) / HBAR) * bs.phase_swap;
    return bs;
}

std::vector<SweepPoint> sweep(const ScenarioSpec& base, SweepParameter param,
                              const std::vector<double>& grid) {
    std::vector<SweepPoint> table(grid.size());
    if (grid.empty()) return table;

    auto record = [&](size_t i, const PulseResult& res) {
        table[i].value = grid[i];
        table[i].population =
            (base.kind == ScenarioSpec::Kind::single) ? res.p_transfer : res.coincidence;
        table[i].coincidence = res.coincidence;
        table[i].norm2 = res.norm2;
    };

    if (param == SweepParameter::theta) {
        const Prepared prep = prepare(base);
        for (size_t i = 0; i < grid.size(); ++i) record(i, finish(prep, grid[i]));
        return table;
    }

    // Photon-number sweeps pin the other mode at the peak of the base table.
    int peak_a = 0, peak_b = 0;
    base.light.w.cwiseAbs().maxCoeff(&peak_a, &peak_b);

#ifdef CAVSIM_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (size_t i = 0; i < grid.size(); ++i) {
        ScenarioSpec spec = base;
        switch (param) {
            case SweepParameter::n_a:
                spec.light = OpticalInput::fock(static_cast<int>(std::lround(grid[i])), peak_b,
                                                spec.n_max_a, spec.n_max_b);
                break;
            case SweepParameter::n_b:
                spec.light = OpticalInput::fock(peak_a, static_cast<int>(std::lround(grid[i])),
                                                spec.n_max_a, spec.n_max_b);
                break;
            case SweepParameter::detuning:
                for (int l = 2; l < spec.levels.n_levels(); ++l)
                    spec.levels.omega[l] += grid[i];
                break;
            default:
                break;
        }
        record(i, run_scenario(spec));
    }
    return table;
}

}  // namespace cavsim
