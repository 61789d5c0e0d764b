#include "cavsim/lambda_model.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace cavsim {

void CouplingSet::set_plane_waves(const LevelScheme& levels) {
    u_a = SpatialFactor(cplx{1, 0}, +levels.k_a);
    u_b = SpatialFactor(cplx{1, 0}, -levels.k_b);
}

cplx CouplingSet::omega_of(int j, PhotonMode m) const {
    for (const auto& c : channels)
        if (c.ancilla == j && c.mode == m) return c.omega;
    return {0, 0};
}

cplx CouplingSet::lambda_of(int j, PhotonMode m) const {
    for (const auto& c : channels)
        if (c.ancilla == j && c.mode == m) return c.lambda;
    return {0, 0};
}

std::vector<int> CouplingSet::ancillas() const {
    std::set<int> s;
    for (const auto& c : channels) s.insert(c.ancilla);
    return {s.begin(), s.end()};
}

double DetuningTable::Delta(int j, PhotonMode alpha, int sign) const {
    const int la = levels.level_of(alpha);
    return levels.Omega(alpha) +
           static_cast<double>(sign) * (levels.omega[j] - levels.omega[la]);
}

double DetuningTable::inv_co(int j, int k, PhotonMode alpha, PhotonMode beta) const {
    return inverse_detuning_sum(Delta(j, alpha, -1), Delta(k, beta, -1), +1);
}

double DetuningTable::inv_counter(int j, int k, PhotonMode alpha, PhotonMode beta) const {
    return inverse_detuning_sum(Delta(j, alpha, +1), Delta(k, beta, +1), +1);
}

double DetuningTable::two_photon(PhotonMode alpha, PhotonMode beta, int sign) const {
    const int la = levels.level_of(alpha), lb = levels.level_of(beta);
    return levels.Omega(beta) - levels.Omega(alpha) +
           static_cast<double>(sign) * (levels.omega[lb] - levels.omega[la]);
}

DetuningTable make_detunings(const LevelScheme& levels) { return DetuningTable{levels}; }

namespace {

/** Co-rotating one-body transition: alpha -> j with factor Omega_{j alpha} u_alpha. */
Mat T_co(const LevelScheme& lv, const CouplingSet& cps, const AtomicModeSet& atoms, int j,
         PhotonMode alpha) {
    SpatialFactor f = SpatialFactor(cps.omega_of(j, alpha)) * cps.u(alpha);
    return sp_transition(atoms, j, lv.level_of(alpha), f);
}

/** Counter-rotating one-body transition: j -> alpha with factor Lambda*_{j alpha} u_alpha. */
Mat T_ct(const LevelScheme& lv, const CouplingSet& cps, const AtomicModeSet& atoms, int j,
         PhotonMode alpha) {
    SpatialFactor f = SpatialFactor(std::conj(cps.lambda_of(j, alpha))) * cps.u(alpha);
    return sp_transition(atoms, lv.level_of(alpha), j, f);
}

/** |u_alpha(R)|^2 weight (shift 0). */
SpatialFactor mode_intensity(const CouplingSet& cps, PhotonMode alpha) {
    return conj(cps.u(alpha)) * cps.u(alpha);
}

/** Photon-pair-space matrix A_local(a) x B_local(b). */
Mat pair_op(const CompositeBasis& basis, const Mat& op_a, const Mat& op_b) {
    return kron(op_a, op_b);
}

struct PhotonOps {
    Mat a, b, ia, ib;
    explicit PhotonOps(const CompositeBasis& basis)
        : a(build_annihilation(basis.ladder_a)),
          b(build_annihilation(basis.ladder_b)),
          ia(Mat::Identity(basis.ladder_a.dim(), basis.ladder_a.dim())),
          ib(Mat::Identity(basis.ladder_b.dim(), basis.ladder_b.dim())) {}

    Mat local(PhotonMode m, bool dagger) const {
        Mat op = (m == PhotonMode::a) ? a : b;
        return dagger ? Mat(op.adjoint()) : op;
    }
    Mat ident(PhotonMode m) const { return m == PhotonMode::a ? ia : ib; }
};

/** Pair-space matrix for (create beta)(annihilate alpha), in that operator order. */
Mat pair_create_annihilate(const CompositeBasis& basis, const PhotonOps& ph, PhotonMode beta,
                           PhotonMode alpha) {
    if (alpha == beta) {
        const Mat prod = ph.local(beta, true) * ph.local(alpha, false);
        return (alpha == PhotonMode::a) ? pair_op(basis, prod, ph.ib)
                                        : pair_op(basis, ph.ia, prod);
    }
    const Mat opa = (alpha == PhotonMode::a) ? ph.a : Mat(ph.a.adjoint());
    const Mat opb = (beta == PhotonMode::b) ? Mat(ph.b.adjoint()) : ph.b;
    return pair_op(basis, opa, opb);
}

/** Pair-space matrix for (annihilate alpha)(create beta), in that operator order. */
Mat pair_annihilate_create(const CompositeBasis& basis, const PhotonOps& ph, PhotonMode alpha,
                           PhotonMode beta) {
    if (alpha == beta) {
        const Mat prod = ph.local(alpha, false) * ph.local(beta, true);
        return (alpha == PhotonMode::a) ? pair_op(basis, prod, ph.ib)
                                        : pair_op(basis, ph.ia, prod);
    }
    // Different ladders commute exactly, even truncated.
    return pair_create_annihilate(basis, ph, beta, alpha);
}

Mat embed(const CompositeBasis& basis, const Mat& config_op, const Mat& pair) {
    return kron(config_op, pair);
}

/** Diagonal sp matrix selecting one level, optionally weighted by a spatial factor. */
Mat level_weight(const CouplingSet& cps, const AtomicModeSet& atoms, int level,
                 const SpatialFactor& f) {
    return sp_transition(atoms, level, level, f);
}

Mat level_number(const AtomicModeSet& atoms, int level) {
    SpatialFactor unit;
    return sp_transition(atoms, level, level, unit);
}

/** sp-diagonal COM matrix: kinetic energy (+ optional trap, grid backend). */
Mat com_sp_matrix(const LevelScheme& levels, const AtomicModeSet& atoms) {
    const int M = atoms.n_sp();
    Mat T = Mat::Zero(M, M);
    if (atoms.backend == SpatialBackend::ladder) {
        for (int i = 0; i < M; ++i) {
            const auto& sm = atoms.sp[i];
            const double p = atoms.base_momentum * atoms.modes[sm.level][sm.ext].kappa;
            T(i, i) = p * p / (2.0 * levels.mass);
        }
        return T;
    }
    const auto& g = atoms.grid;
    const Eigen::Index G = g.points.size();
    const double dx = G > 1 ? g.points(1) - g.points(0) : 1.0;
    for (int lt = 0; lt < atoms.n_levels(); ++lt) {
        const double trap = (lt < static_cast<int>(levels.trap.size())) ? levels.trap[lt] : 0.0;
        const auto& lm = atoms.modes[lt];
        for (size_t et = 0; et < lm.size(); ++et)
            for (size_t ef = 0; ef < lm.size(); ++ef) {
                cplx acc = 0;
                for (Eigen::Index i = 0; i < G; ++i) {
                    const cplx fm = (i > 0) ? lm[ef].profile(i - 1) : cplx{0, 0};
                    const cplx fp = (i + 1 < G) ? lm[ef].profile(i + 1) : cplx{0, 0};
                    const cplx d2 = (fp - 2.0 * lm[ef].profile(i) + fm) / (dx * dx);
                    cplx h = -d2 / (2.0 * levels.mass);
                    if (trap != 0.0) {
                        const double x = g.points(i);
                        h += 0.5 * levels.mass * trap * trap * x * x * lm[ef].profile(i);
                    }
                    acc += std::conj(lm[et].profile(i)) * h * g.weights(i);
                }
                T(atoms.sp_index(lt, static_cast<int>(et)),
                  atoms.sp_index(lt, static_cast<int>(ef))) = acc;
            }
    }
    return T;
}

}  // namespace

Mat build_dipole_hamiltonian(const LevelScheme& levels, const CouplingSet& cps,
                             const CompositeBasis& basis) {
    const auto& atoms = basis.atoms;
    for (const auto& c : cps.channels)
        if (c.ancilla < 2 || c.ancilla >= levels.n_levels() ||
            c.ancilla >= atoms.n_levels())
            throw std::domain_error("build_dipole_hamiltonian: coupling references absent level");
    const PhotonOps ph(basis);
    Mat H = Mat::Zero(basis.dim(), basis.dim());
    for (PhotonMode alpha : {PhotonMode::a, PhotonMode::b}) {
        const Mat ann =
            (alpha == PhotonMode::a) ? pair_op(basis, ph.a, ph.ib) : pair_op(basis, ph.ia, ph.b);
        Mat T = Mat::Zero(atoms.n_sp(), atoms.n_sp());
        for (int j : cps.ancillas()) {
            T += T_co(levels, cps, atoms, j, alpha);
            T += T_ct(levels, cps, atoms, j, alpha);
        }
        const Mat S = HBAR * embed(basis, one_body_config(basis, T), ann);
        H += S + S.adjoint();
    }
    return H;
}

Mat com_hamiltonian(const LevelScheme& levels, const CompositeBasis& basis) {
    const Mat T = com_sp_matrix(levels, basis.atoms);
    return embed(basis, one_body_config(basis, T), Mat::Identity(basis.photon_dim(),
                                                                  basis.photon_dim()));
}

Mat light_hamiltonian(const LevelScheme& levels, const CompositeBasis& basis) {
    const PhotonOps ph(basis);
    const Mat na = pair_op(basis, Mat(ph.a.adjoint() * ph.a), ph.ib);
    const Mat nb = pair_op(basis, ph.ia, Mat(ph.b.adjoint() * ph.b));
    const Mat ip = Mat::Identity(basis.photon_dim(), basis.photon_dim());
    const Mat pairH =
        levels.Omega_a * (na + 0.5 * ip) + levels.Omega_b * (nb + 0.5 * ip);
    return photon_pair_embed(basis, pairH);
}

Mat internal_plus_light(const LevelScheme& levels, const CompositeBasis& basis) {
    const auto& atoms = basis.atoms;
    Mat T = Mat::Zero(atoms.n_sp(), atoms.n_sp());
    for (int l = 0; l < atoms.n_levels(); ++l)
        T += levels.omega[l] * level_number(atoms, l);
    const Mat ip = Mat::Identity(basis.photon_dim(), basis.photon_dim());
    return embed(basis, one_body_config(basis, T), ip) + light_hamiltonian(levels, basis);
}

HarmonicHamiltonian to_interaction_picture(const LevelScheme& levels, const CouplingSet& cps,
                                           const CompositeBasis& basis) {
    const auto& atoms = basis.atoms;
    const PhotonOps ph(basis);
    const auto det = make_detunings(levels);
    HarmonicHamiltonian h;
    h.hc_sign = MODEL_HC_SIGN;
    h.H0 = com_hamiltonian(levels, basis);
    for (int j : cps.ancillas()) {
        for (PhotonMode alpha : {PhotonMode::a, PhotonMode::b}) {
            const Mat ann = (alpha == PhotonMode::a) ? pair_op(basis, ph.a, ph.ib)
                                                     : pair_op(basis, ph.ia, ph.b);
            if (cps.omega_of(j, alpha) != cplx{0, 0}) {
                const Mat op =
                    HBAR * embed(basis, one_body_config(basis, T_co(levels, cps, atoms, j, alpha)),
                                 ann);
                h.slow.push_back({op, det.Delta(j, alpha, -1)});
            }
            if (cps.lambda_of(j, alpha) != cplx{0, 0}) {
                const Mat op =
                    HBAR * embed(basis, one_body_config(basis, T_ct(levels, cps, atoms, j, alpha)),
                                 ann);
                h.fast.push_back({op, det.Delta(j, alpha, +1)});
            }
        }
    }
    return h;
}

CommutatorPieces evaluate_commutator(const LevelScheme& levels, const CouplingSet& cps,
                                     const CompositeBasis& basis, int j, PhotonMode alpha,
                                     int k, PhotonMode beta, bool counter_domain) {
    const auto& atoms = basis.atoms;
    const PhotonOps ph(basis);
    const Mat Tj = counter_domain ? T_ct(levels, cps, atoms, j, alpha)
                                  : T_co(levels, cps, atoms, j, alpha);
    const Mat Tk = counter_domain ? T_ct(levels, cps, atoms, k, beta)
                                  : T_co(levels, cps, atoms, k, beta);
    const Mat Aj = one_body_config(basis, Tj);
    const Mat Ak = one_body_config(basis, Tk);

    const Mat fwd = pair_create_annihilate(basis, ph, beta, alpha);
    const Mat rev = pair_annihilate_create(basis, ph, alpha, beta);

    const Mat contact_fwd = one_body_config(basis, Mat(Tk.adjoint() * Tj));
    const Mat contact_rev = one_body_config(basis, Mat(Tj * Tk.adjoint()));
    const Mat NB = Mat(Ak.adjoint() * Aj) - contact_fwd;  // two-body remainder

    CommutatorPieces out;
    out.exchange = embed(basis, contact_fwd, fwd);
    out.reversed = -embed(basis, contact_rev, rev);
    out.pair_term = embed(basis, NB, Mat(fwd - rev));
    out.total = out.exchange + out.reversed + out.pair_term;
    return out;
}

namespace {

ShiftPair shift_pair(const LevelScheme& levels, const CouplingSet& cps,
                     const CompositeBasis& basis, const std::vector<int>& js, int sign,
                     bool counter) {
    const PhotonOps ph(basis);
    const auto det = make_detunings(levels);
    double ca = 0, cb = 0;
    for (int j : js) {
        if (!counter) {
            ca += std::norm(cps.omega_of(j, PhotonMode::a) * cps.u_a.amp) *
                  det.inv_co(j, j, PhotonMode::a, PhotonMode::a);
            cb += std::norm(cps.omega_of(j, PhotonMode::b) * cps.u_b.amp) *
                  det.inv_co(j, j, PhotonMode::b, PhotonMode::b);
        } else {
            ca += std::norm(cps.lambda_of(j, PhotonMode::a) * cps.u_a.amp) *
                  det.inv_counter(j, j, PhotonMode::a, PhotonMode::a);
            cb += std::norm(cps.lambda_of(j, PhotonMode::b) * cps.u_b.amp) *
                  det.inv_counter(j, j, PhotonMode::b, PhotonMode::b);
        }
    }
    const double s = static_cast<double>(sign);
    const Mat na = pair_op(basis, Mat(ph.a.adjoint() * ph.a), ph.ib);
    const Mat nb = pair_op(basis, ph.ia, Mat(ph.b.adjoint() * ph.b));
    ShiftPair out;
    out.op = photon_pair_embed(basis, Mat(ca * na + s * cb * nb));
    out.vacuum = ca + s * cb;
    return out;
}

}  // namespace

ShiftPair ac_stark(const LevelScheme& levels, const CouplingSet& cps,
                   const CompositeBasis& basis, int sign) {
    return shift_pair(levels, cps, basis, cps.ancillas(), sign, false);
}

ShiftPair ac_stark_j(const LevelScheme& levels, const CouplingSet& cps,
                     const CompositeBasis& basis, int j, int sign) {
    return shift_pair(levels, cps, basis, {j}, sign, false);
}

ShiftPair bloch_siegert(const LevelScheme& levels, const CouplingSet& cps,
                        const CompositeBasis& basis, int sign) {
    return shift_pair(levels, cps, basis, cps.ancillas(), sign, true);
}

ShiftPair bloch_siegert_j(const LevelScheme& levels, const CouplingSet& cps,
                          const CompositeBasis& basis, int j, int sign) {
    return shift_pair(levels, cps, basis, {j}, sign, true);
}

namespace {

/**
 * Composite self-coupling term for one level.  display=true uses the n+1 = n+I
 * reading of the creation-ordered photon weights; display=false keeps the literal
 * truncated products (a a+ etc.) so both construction paths of the effective
 * Hamiltonian carry identical truncation artifacts.
 */
Mat self_term(const LevelScheme& levels, const CouplingSet& cps, const CompositeBasis& basis,
              int level, bool display) {
    const auto& atoms = basis.atoms;
    const PhotonOps ph(basis);
    const auto det = make_detunings(levels);
    const double s = static_cast<double>(MODEL_HC_SIGN);
    const Mat ip = Mat::Identity(basis.photon_dim(), basis.photon_dim());

    // COM + internal energy.
    Mat T_free = com_sp_matrix(levels, atoms);
    Mat mask = level_number(atoms, level);
    // Restrict the free part to this level.
    Mat T_level = Mat::Zero(atoms.n_sp(), atoms.n_sp());
    for (int i = 0; i < atoms.n_sp(); ++i)
        if (atoms.sp[i].level == level)
            for (int jj = 0; jj < atoms.n_sp(); ++jj)
                if (atoms.sp[jj].level == level) T_level(i, jj) = T_free(i, jj);
    T_level += levels.omega[level] * mask;
    Mat H = embed(basis, one_body_config(basis, T_level), ip);

    auto number_pair = [&](PhotonMode m) {
        const Mat n = ph.local(m, true) * ph.local(m, false);
        return (m == PhotonMode::a) ? pair_op(basis, n, ph.ib) : pair_op(basis, ph.ia, n);
    };
    auto antinumber_pair = [&](PhotonMode m) {
        if (display) return Mat(number_pair(m) + ip);
        const Mat n = ph.local(m, false) * ph.local(m, true);
        return (m == PhotonMode::a) ? pair_op(basis, n, ph.ib) : pair_op(basis, ph.ia, n);
    };

    if (level <= 1) {
        const PhotonMode alpha = (level == 0) ? PhotonMode::a : PhotonMode::b;
        const Mat W = embed(
            basis, one_body_config(basis, level_weight(cps, atoms, level,
                                                       mode_intensity(cps, alpha))),
            ip);
        for (int j : cps.ancillas()) {
            const double co =
                std::norm(cps.omega_of(j, alpha)) * det.inv_co(j, j, alpha, alpha);
            const double ct =
                std::norm(cps.lambda_of(j, alpha)) * det.inv_counter(j, j, alpha, alpha);
            H += s * co * W * photon_pair_embed(basis, number_pair(alpha));
            H -= s * ct * W * photon_pair_embed(basis, antinumber_pair(alpha));
        }
    } else {
        for (PhotonMode alpha : {PhotonMode::a, PhotonMode::b}) {
            const Mat W = embed(
                basis, one_body_config(basis, level_weight(cps, atoms, level,
                                                           mode_intensity(cps, alpha))),
                ip);
            const double co =
                std::norm(cps.omega_of(level, alpha)) * det.inv_co(level, level, alpha, alpha);
            const double ct = std::norm(cps.lambda_of(level, alpha)) *
                              det.inv_counter(level, level, alpha, alpha);
            H -= s * co * W * photon_pair_embed(basis, antinumber_pair(alpha));
            H += s * ct * W * photon_pair_embed(basis, number_pair(alpha));
        }
    }
    return H;
}

}  // namespace

SelfCouplings self_couplings(const LevelScheme& levels, const CouplingSet& cps,
                             const CompositeBasis& basis) {
    SelfCouplings sc;
    sc.a = self_term(levels, cps, basis, 0, true);
    sc.b = self_term(levels, cps, basis, 1, true);
    for (int j : cps.ancillas()) sc.ancilla[j] = self_term(levels, cps, basis, j, true);
    return sc;
}

SelfCouplings self_couplings_decomposed(const LevelScheme& levels, const CouplingSet& cps,
                                        const CompositeBasis& basis) {
    const auto& atoms = basis.atoms;
    const double s = static_cast<double>(MODEL_HC_SIGN);
    const Mat ip = Mat::Identity(basis.photon_dim(), basis.photon_dim());
    const Mat id = Mat::Identity(basis.dim(), basis.dim());

    const auto acp = ac_stark(levels, cps, basis, +1);
    const auto acm = ac_stark(levels, cps, basis, -1);
    const auto bsp = bloch_siegert(levels, cps, basis, +1);
    const auto bsm = bloch_siegert(levels, cps, basis, -1);

    auto free_part = [&](int level) {
        Mat T_free = com_sp_matrix(levels, atoms);
        Mat T_level = Mat::Zero(atoms.n_sp(), atoms.n_sp());
        for (int i = 0; i < atoms.n_sp(); ++i)
            if (atoms.sp[i].level == level)
                for (int jj = 0; jj < atoms.n_sp(); ++jj)
                    if (atoms.sp[jj].level == level) T_level(i, jj) = T_free(i, jj);
        T_level += levels.omega[level] * level_number(atoms, level);
        return Mat(embed(basis, one_body_config(basis, T_level), ip));
    };
    auto weight = [&](int level) {
        return Mat(embed(basis, one_body_config(basis, level_number(atoms, level)), ip));
    };

    SelfCouplings sc;
    {
        const Mat bracket = acp.op + acm.op - bsp.op - bsm.op -
                            (bsp.vacuum + bsm.vacuum) * id;
        sc.a = free_part(0) + weight(0) * (0.5 * s * bracket);
    }
    {
        const Mat bracket = acp.op - acm.op - bsp.op + bsm.op -
                            (bsp.vacuum - bsm.vacuum) * id;
        sc.b = free_part(1) + weight(1) * (0.5 * s * bracket);
    }
    for (int j : cps.ancillas()) {
        const auto acj = ac_stark_j(levels, cps, basis, j, +1);
        const auto bsj = bloch_siegert_j(levels, cps, basis, j, +1);
        const Mat bracket = acj.op + acj.vacuum * id - bsj.op;
        sc.ancilla[j] = free_part(j) - weight(j) * (s * bracket);
    }
    return sc;
}

Mat rabi_coupling(const LevelScheme& levels, const CouplingSet& cps,
                  const CompositeBasis& basis) {
    const auto& atoms = basis.atoms;
    const PhotonOps ph(basis);
    const auto det = make_detunings(levels);
    const double s = static_cast<double>(MODEL_HC_SIGN);
    Mat H = Mat::Zero(basis.dim(), basis.dim());
    const Mat swap_co = pair_op(basis, ph.a, Mat(ph.b.adjoint()));   // b+ a
    const Mat swap_ct = pair_op(basis, ph.a, Mat(ph.b.adjoint()));  // a b+ (same matrix)
    for (int j : cps.ancillas()) {
        // Co-rotating: a -> b via j, photon swap b+ a, momentum +K.
        const Mat Tco = Mat(T_co(levels, cps, atoms, j, PhotonMode::b).adjoint() *
                            T_co(levels, cps, atoms, j, PhotonMode::a));
        if (Tco.cwiseAbs().maxCoeff() > 0) {
            const Mat term = s * det.inv_co(j, j, PhotonMode::a, PhotonMode::b) *
                             embed(basis, one_body_config(basis, Tco), swap_co);
            H += term + term.adjoint();
        }
        // Counter-rotating: b -> a via j, photon a b+, momentum +K on b -> a.
        const Mat Tct = Mat(T_ct(levels, cps, atoms, j, PhotonMode::a) *
                            T_ct(levels, cps, atoms, j, PhotonMode::b).adjoint());
        if (Tct.cwiseAbs().maxCoeff() > 0) {
            const Mat term = -s * det.inv_counter(j, j, PhotonMode::a, PhotonMode::b) *
                             embed(basis, one_body_config(basis, Tct), swap_ct);
            H += term + term.adjoint();
        }
    }
    return H;
}

Mat ancilla_coupling(const LevelScheme& levels, const CouplingSet& cps,
                     const CompositeBasis& basis, int j, int k) {
    if (j == k) throw std::invalid_argument("ancilla_coupling: need j != k");
    const auto& atoms = basis.atoms;
    const PhotonOps ph(basis);
    const auto det = make_detunings(levels);
    const double s = static_cast<double>(MODEL_HC_SIGN);
    Mat H = Mat::Zero(basis.dim(), basis.dim());
    for (PhotonMode alpha : {PhotonMode::a, PhotonMode::b}) {
        const Mat nn = (alpha == PhotonMode::a)
                           ? pair_op(basis, Mat(ph.a.adjoint() * ph.a), ph.ib)
                           : pair_op(basis, ph.ia, Mat(ph.b.adjoint() * ph.b));
        const Mat anti = (alpha == PhotonMode::a)
                             ? pair_op(basis, Mat(ph.a * ph.a.adjoint()), ph.ib)
                             : pair_op(basis, ph.ia, Mat(ph.b * ph.b.adjoint()));
        const Mat Tco = Mat(T_co(levels, cps, atoms, j, alpha) *
                            T_co(levels, cps, atoms, k, alpha).adjoint());  // k -> j
        H -= s * det.inv_co(j, k, alpha, alpha) *
             embed(basis, one_body_config(basis, Tco), anti);
        // Counter-rotating piece also carries k -> j.
        const Mat Tct = Mat(T_ct(levels, cps, atoms, k, alpha).adjoint() *
                            T_ct(levels, cps, atoms, j, alpha))
                            .adjoint();
        H += s * det.inv_counter(j, k, alpha, alpha) *
             embed(basis, one_body_config(basis, Tct), nn);
    }
    return H;
}

EffectiveHamiltonian assemble_H_eff(const LevelScheme& levels, const CouplingSet& cps,
                                    const CompositeBasis& basis) {
    const auto& atoms = basis.atoms;
    const PhotonOps ph(basis);
    const auto det = make_detunings(levels);
    const double s = static_cast<double>(MODEL_HC_SIGN);
    const int D = basis.dim();

    EffectiveHamiltonian eff;
    eff.H_L = light_hamiltonian(levels, basis);

    // Relevant block: self-couplings (truncation-consistent products) + Rabi coupling.
    eff.M_R = self_term(levels, cps, basis, 0, false) + self_term(levels, cps, basis, 1, false) +
              rabi_coupling(levels, cps, basis);

    // Ancilla block: self-couplings and chi couplings.
    eff.M_A = Mat::Zero(D, D);
    const auto js = cps.ancillas();
    for (int j : js) eff.M_A += self_term(levels, cps, basis, j, false);
    for (int j : js)
        for (int k : js)
            if (j != k) eff.M_A += ancilla_coupling(levels, cps, basis, j, k);

    eff.H_sp = eff.M_R + eff.M_A;

    // Particle-particle part: two-body remainders x truncated [a, a+].
    eff.H_pp = Mat::Zero(D, D);
    for (PhotonMode alpha : {PhotonMode::a, PhotonMode::b}) {
        const Mat n_ph = ph.local(alpha, true) * ph.local(alpha, false);
        const Mat anti_ph = ph.local(alpha, false) * ph.local(alpha, true);
        const Mat comm =
            (alpha == PhotonMode::a)
                ? pair_op(basis, Mat(n_ph - anti_ph), ph.ib)
                : pair_op(basis, ph.ia, Mat(n_ph - anti_ph));
        for (int j : js)
            for (int k : js) {
                // Co-rotating domain.
                {
                    const Mat Tj = T_co(levels, cps, atoms, j, alpha);
                    const Mat Tk = T_co(levels, cps, atoms, k, alpha);
                    const Mat NB = Mat(one_body_config(basis, Tk).adjoint() *
                                       one_body_config(basis, Tj)) -
                                   one_body_config(basis, Mat(Tk.adjoint() * Tj));
                    if (NB.cwiseAbs().maxCoeff() > 0)
                        eff.H_pp += s * det.inv_co(j, k, alpha, alpha) * embed(basis, NB, comm);
                }
                // Counter-rotating domain.
                {
                    const Mat Tj = T_ct(levels, cps, atoms, j, alpha);
                    const Mat Tk = T_ct(levels, cps, atoms, k, alpha);
                    const Mat NB = Mat(one_body_config(basis, Tk).adjoint() *
                                       one_body_config(basis, Tj)) -
                                   one_body_config(basis, Mat(Tk.adjoint() * Tj));
                    if (NB.cwiseAbs().maxCoeff() > 0)
                        eff.H_pp +=
                            s * det.inv_counter(j, k, alpha, alpha) * embed(basis, NB, comm);
                }
            }
    }

    eff.provenance.push_back("co-rotating denominators use the slow-domain pair inverse");
    eff.provenance.push_back("counter-rotating denominators use the fast-domain pair inverse");
    eff.provenance.push_back(
        "cross-domain and inter-mode fast combinations dropped by the low-pass rules");
    return eff;
}

Mat heisenberg_rhs(const Mat& H_eff, const Mat& field_op) {
    return field_op * H_eff - H_eff * field_op;
}

Mat restore_schroedinger(const Mat& H_eff_I_at_t, const Mat& H_c, double t) {
    const Mat Uc = matrix_function_c(H_c, [t](double x) { return std::exp(-I * x * t); });
    return H_c + Uc * H_eff_I_at_t * Uc.adjoint();
}

}  // namespace cavsim
