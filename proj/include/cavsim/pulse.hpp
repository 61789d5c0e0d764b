#pragma once

#include <string>
#include <vector>

#include "cavsim/basis.hpp"
#include "cavsim/lambda_model.hpp"
#include "cavsim/operators.hpp"

namespace cavsim {

/** Delta-pulse parameters: area A, strength Gamma, effective duration theta = A/Gamma. */
struct PulseSpec {
    double area = 0;
    double strength = 1;
    double instant = 0;

    double theta() const { return area / strength; }
};

/** Normalized Gaussian wave packet N exp(-R^2/(2 sigma^2) + i kappa R), d in {1,3}. */
struct GaussianAmplitude {
    double sigma = 1;
    double kappa = 0;
    int d = 1;

    double norm_const() const;
    cplx value(double R) const;
};

/**
 * Complex COM energy of the Gaussian packet at position R:
 * -(hbar^2/2M)(R^2 - 2 i sigma^2 kappa R - d sigma^2 - sigma^4 kappa^2)/sigma^4.
 */
cplx gaussian_com_energy(const GaussianAmplitude& amp, double R, double mass);

/**
 * Two-photon joint operators on a two-level (a,b) composite basis: photon-pair
 * swap c = b+ a, atomic transfer psi_c = psi_b+ psi_a with momentum kick +K
 * (co-rotating) or -K (counter-rotating), and the effective two-photon
 * frequencies Omega (co) and Lambda (counter).
 */
struct JointOperators {
    Mat c, c_dag, n_c;        // composite photon matrices; n_c = c+ c
    Mat psi_c, psi_c_minus;   // config-space transfer a->b with +K / -K kick
    cplx Omega{0, 0};
    cplx Lambda{0, 0};
};

JointOperators make_joint_operators(const LevelScheme& levels, const CouplingSet& cps,
                                    const CompositeBasis& basis);

/** Effective two-photon Rabi frequency Omega: sum over ancilla paths j. */
cplx effective_two_photon_omega(const LevelScheme& levels, const CouplingSet& cps);

/** Counter-rotating counterpart Lambda. */
cplx effective_two_photon_lambda(const LevelScheme& levels, const CouplingSet& cps);

/**
 * Reduced Rabi-block Hamiltonian H_R = H0_2 + V on a two-level basis:
 * H0_2 collects the diagonal energies (light field, internal, kinetic, level
 * shifts) and V the off-diagonal two-photon transfer; the split is exact.
 */
struct ReducedHamiltonian {
    Mat H_R, H0_2, V;
    JointOperators joint;
    bool rwa = false;
    std::vector<std::string> drop_record;
};

/** Assemble the reduced model; requires a two-level ladder-backend basis. */
ReducedHamiltonian build_reduced(const LevelScheme& levels, const CouplingSet& cps,
                                 const CompositeBasis& basis, bool rwa);

/** Exact matrix square V^2 (hbar^2 units included). */
Mat build_V2_full(const ReducedHamiltonian& red);

/**
 * Approximated V^2: keeps the four Omega-only terms (including c^2 / c+^2) and
 * the two mixed Lambda terms; drops the Omega-Lambda cross terms and the
 * Lambda-only two-photon-pair terms, appending their norms to the drop record.
 */
Mat build_V2_approx(ReducedHamiltonian& red);

/**
 * Rabi operator: spectral square root of V2/hbar^2 with eigenvalues clamped at
 * >= 0.  Throws std::domain_error if an eigenvalue is below -1e-8 * ||V2||.
 */
Mat rabi_operator(const Mat& V2);

/**
 * Cached delta-pulse applicator: U(theta) = [cos(theta W) - i sinc_theta(W) V]
 * exp(-i theta H0_2) with W the Rabi operator and sinc_theta(x) = sin(theta x)/x,
 * sinc_theta(0) = theta.  apply() is O(dim^2) per call.
 */
struct PulsePropagator {
    Mat evecs;          // eigenvectors of the Rabi operator
    RVec evals;         // its eigenvalues (>= 0)
    Mat V;
    Mat h0_evecs;
    RVec h0_evals;

    Vec apply(double theta, const Vec& psi) const;
    Mat unitary(double theta) const;
};

PulsePropagator make_propagator(ReducedHamiltonian& red);

/** One-shot delta-pulse evolution operator for the given pulse spec. */
Mat delta_pulse_U(const PulseSpec& pulse, ReducedHamiltonian& red);

/**
 * Internal + photon-number-shift energy of one particle in `level` with photon
 * numbers (n_a, n_b): omega_level plus the AC-Stark term and, unless rwa, the
 * counter-rotating (n+1) term.  Kinetic and light-field energies excluded.
 */
double level_shift_energy(const LevelScheme& levels, const CouplingSet& cps, int level, int n_a,
                          int n_b, bool rwa);

/**
 * Diagonal phase factor C_{n,alpha}(R) for a packet in ground level alpha with
 * photon numbers (n_a, n_b): COM energy plus light-field, internal, and
 * photon-number-dependent level-shift contributions (counter part gated by rwa).
 */
cplx phase_factor_C(int n_a, int n_b, PhotonMode alpha, const GaussianAmplitude& amp, double R,
                    const LevelScheme& levels, const CouplingSet& cps, bool rwa);

}  // namespace cavsim
