#pragma once

#include <string>
#include <vector>

#include "cavsim/basis.hpp"
#include "cavsim/lambda_model.hpp"
#include "cavsim/pulse.hpp"

namespace cavsim {

/** Optical input: amplitude table w(n_a, n_b) over Fock pairs, normalized on use. */
struct OpticalInput {
    Mat w;  // (n_max_a+1) x (n_max_b+1) amplitudes

    static OpticalInput fock(int n_a, int n_b, int n_max_a, int n_max_b);
    static OpticalInput product(const Vec& wa, const Vec& wb);
    void normalize();
};

/** Atomic input: one or two particles, plane-wave momentum labels or Gaussian packets. */
struct AtomicInput {
    struct Particle {
        int level = 0;  // 0 = a, 1 = b
        int kappa = 0;  // momentum label (plane wave) or packet carrier (Gaussian)
        bool gaussian = false;
        GaussianAmplitude packet;
    };
    std::vector<Particle> particles;
};

/** Outcome of one delta-pulse run, with the basis needed to interpret the state. */
struct PulseResult {
    CompositeBasis basis;
    Vec state;
    double norm2 = 0;
    double p_stay = 0;      // single particle: initial internal level kept
    double p_transfer = 0;  // single particle: internal level flipped
    double coincidence = 0; // two particles: |1 1> internal-state sector
    std::vector<std::pair<std::string, double>> sector_populations;
    std::vector<std::string> phase_records;
};

/** Single-particle Raman diffraction: build the reduced model, apply the pulse. */
PulseResult run_single_particle(const LevelScheme& levels, const CouplingSet& cps,
                                const AtomicInput& atom, const OpticalInput& light,
                                const PulseSpec& pulse, bool rwa, int n_max_a, int n_max_b);

/** 2x2 beam-splitter block on {|a,kappa;n_a,n_b>, |b,kappa+K;n_a-1,n_b+1>} (plane waves, RWA). */
struct BeamSplitterBlock {
    Eigen::Matrix2cd block;
    cplx phase_stay{1, 0};  // free-propagation phases entering the block
    cplx phase_swap{1, 0};
};

BeamSplitterBlock beam_splitter_matrix(const LevelScheme& levels, const CouplingSet& cps,
                                       const PulseSpec& pulse, int n_a, int n_b, int kappa);

/** Two-particle Hong-Ou-Mandel run; optical_limit zeroes the COM kinetic energy. */
PulseResult run_hom(const LevelScheme& levels, const CouplingSet& cps, const AtomicInput& atoms,
                    const OpticalInput& light, const PulseSpec& pulse, bool rwa,
                    bool optical_limit, int n_max_a, int n_max_b);

enum class SweepParameter { theta, n_a, n_b, detuning };

struct ScenarioSpec {
    enum class Kind { single, hom } kind = Kind::single;
    LevelScheme levels;
    CouplingSet cps;
    AtomicInput atom;
    OpticalInput light;
    PulseSpec pulse;
    bool rwa = true;
    bool optical_limit = false;
    int n_max_a = 8;
    int n_max_b = 8;
};

PulseResult run_scenario(const ScenarioSpec& spec);

struct SweepPoint {
    double value = 0;
    double population = 0;   // transfer probability (single) / coincidence (hom)
    double coincidence = 0;
    double norm2 = 0;
};

/**
 * Evaluate the scenario over a parameter grid.  theta sweeps reuse one cached
 * propagator; other parameters rebuild per point, parallelized over the grid.
 */
std::vector<SweepPoint> sweep(const ScenarioSpec& base, SweepParameter param,
                              const std::vector<double>& grid);

}  // namespace cavsim
