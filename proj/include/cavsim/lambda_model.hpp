#pragma once

#include <map>
#include <string>
#include <vector>

#include "cavsim/averaging.hpp"
#include "cavsim/basis.hpp"
#include "cavsim/operators.hpp"

namespace cavsim {

/**
 * Sign of the hermitian-conjugate partner in the dipole interaction.  The +h.c.
 * form is the hermitian one and makes the dressed-level shifts agree with
 * stationary perturbation theory; the averaging engine keeps the sign generic.
 */
inline constexpr int MODEL_HC_SIGN = +1;

/** Internal level frequencies, cavity mode frequencies/momenta, and COM parameters. */
struct LevelScheme {
    std::vector<double> omega;  // per level: [0]=a, [1]=b, >=2 ancillas
    double Omega_a = 0;
    double Omega_b = 0;
    int k_a = 0;  // photon momentum per mode, ladder units
    int k_b = 0;
    double mass = 1.0;
    std::vector<double> trap;  // optional per-level harmonic trap frequency (grid backend)

    int n_levels() const { return static_cast<int>(omega.size()); }
    double Omega(PhotonMode m) const { return m == PhotonMode::a ? Omega_a : Omega_b; }
    int level_of(PhotonMode m) const { return m == PhotonMode::a ? 0 : 1; }
    /** Total photon-swap momentum kick K = k_a + k_b (ladder units). */
    int K() const { return k_a + k_b; }
};

/** One (ancilla j, cavity mode alpha) coupling channel. */
struct Coupling {
    int ancilla = 2;              // level index >= 2
    PhotonMode mode = PhotonMode::a;
    cplx omega{0, 0};             // co-rotating amplitude
    cplx lambda{0, 0};            // counter-rotating amplitude
};

struct CouplingSet {
    SpatialFactor u_a{cplx{1, 0}, 0};
    SpatialFactor u_b{cplx{1, 0}, 0};
    std::vector<Coupling> channels;

    const SpatialFactor& u(PhotonMode m) const { return m == PhotonMode::a ? u_a : u_b; }
    /** Counter-propagating plane waves: u_a shifts +k_a, u_b shifts -k_b. */
    void set_plane_waves(const LevelScheme& levels);
    cplx omega_of(int j, PhotonMode m) const;
    cplx lambda_of(int j, PhotonMode m) const;
    std::vector<int> ancillas() const;  // sorted unique ancilla levels present
};

/** Detunings Delta^(+-)_{j,alpha} = Omega_alpha +- (omega_j - omega_alpha) and inverses. */
struct DetuningTable {
    LevelScheme levels;

    double Delta(int j, PhotonMode alpha, int sign) const;
    /** 1/omega+_{jk,alpha beta}: co-rotating (slow-domain) pair inverse. */
    double inv_co(int j, int k, PhotonMode alpha, PhotonMode beta) const;
    /** 1/Omega+_{jk,alpha beta}: counter-rotating (fast-domain) pair inverse. */
    double inv_counter(int j, int k, PhotonMode alpha, PhotonMode beta) const;
    /** Two-photon detuning delta^(+-)_{alpha beta}. */
    double two_photon(PhotonMode alpha, PhotonMode beta, int sign) const;
};

DetuningTable make_detunings(const LevelScheme& levels);

/** Schroedinger-picture dipole Hamiltonian (hermitian, both Omega and Lambda channels). */
Mat build_dipole_hamiltonian(const LevelScheme& levels, const CouplingSet& cps,
                             const CompositeBasis& basis);

/** COM kinetic (+ optional trap) for all levels, embedded in the composite basis. */
Mat com_hamiltonian(const LevelScheme& levels, const CompositeBasis& basis);

/** H_c = H_L + internal level energies; the interaction-picture reference. */
Mat internal_plus_light(const LevelScheme& levels, const CompositeBasis& basis);

/** Photon-field Hamiltonian H_L = Omega_a(n_a + 1/2) + Omega_b(n_b + 1/2). */
Mat light_hamiltonian(const LevelScheme& levels, const CompositeBasis& basis);

/**
 * Interaction picture w.r.t. H_c: slow terms (h_{j alpha}, Delta^-), fast terms
 * (g_{j alpha}, Delta^+), H0 = COM part, hc_sign = MODEL_HC_SIGN.
 */
HarmonicHamiltonian to_interaction_picture(const LevelScheme& levels, const CouplingSet& cps,
                                           const CompositeBasis& basis);

/** Structured decomposition of [X+_{k beta}, X_{j alpha}] for one domain. */
struct CommutatorPieces {
    Mat exchange;   // one-body x (beta+ alpha) photon exchange/number term
    Mat reversed;   // minus one-body x (alpha beta+) term
    Mat pair_term;  // two-body remainder (particle-particle content)
    Mat total;      // sum of the three == direct matrix commutator
};

CommutatorPieces evaluate_commutator(const LevelScheme& levels, const CouplingSet& cps,
                                     const CompositeBasis& basis, int j, PhotonMode alpha,
                                     int k, PhotonMode beta, bool counter_domain);

/** Photon-number-dependent shift operator plus its scalar vacuum part. */
struct ShiftPair {
    Mat op;
    double vacuum = 0;
};

ShiftPair ac_stark(const LevelScheme& levels, const CouplingSet& cps,
                   const CompositeBasis& basis, int sign);
ShiftPair ac_stark_j(const LevelScheme& levels, const CouplingSet& cps,
                     const CompositeBasis& basis, int j, int sign);
ShiftPair bloch_siegert(const LevelScheme& levels, const CouplingSet& cps,
                        const CompositeBasis& basis, int sign);
ShiftPair bloch_siegert_j(const LevelScheme& levels, const CouplingSet& cps,
                          const CompositeBasis& basis, int j, int sign);

/** Composite self-coupling terms psi+_l Delta_l psi_l per level (display form, n+1 = n+I). */
struct SelfCouplings {
    Mat a, b;
    std::map<int, Mat> ancilla;
};

SelfCouplings self_couplings(const LevelScheme& levels, const CouplingSet& cps,
                             const CompositeBasis& basis);
/** Same built from the AC-Stark / Bloch-Siegert decomposition; must agree to 1e-12. */
SelfCouplings self_couplings_decomposed(const LevelScheme& levels, const CouplingSet& cps,
                                        const CompositeBasis& basis);

/** Rabi-coupling term psi_b+ Omega_ba psi_a + h.c. (truncation-consistent photon products). */
Mat rabi_coupling(const LevelScheme& levels, const CouplingSet& cps,
                  const CompositeBasis& basis);

/** Ancilla-coupling term psi_j+ chi_jk psi_k (j != k); chi_jk+ = chi_kj. */
Mat ancilla_coupling(const LevelScheme& levels, const CouplingSet& cps,
                     const CompositeBasis& basis, int j, int k);

struct EffectiveHamiltonian {
    Mat H_L, H_sp, H_pp;
    Mat M_R, M_A;  // relevant / ancilla blocks of H_sp (composite matrices)
    std::vector<std::string> provenance;

    Mat total() const { return H_L + H_sp + H_pp; }
};

EffectiveHamiltonian assemble_H_eff(const LevelScheme& levels, const CouplingSet& cps,
                                    const CompositeBasis& basis);

/** Heisenberg right-hand side [op, H_eff] (structural diagnostic). */
Mat heisenberg_rhs(const Mat& H_eff, const Mat& field_op);

/** Undo the interaction picture: H_c + U_c(t) H_eff_I(t) U_c+(t). */
Mat restore_schroedinger(const Mat& H_eff_I_at_t, const Mat& H_c, double t);

}  // namespace cavsim
