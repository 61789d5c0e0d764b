#include "cavsim/pulse.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace cavsim {

double GaussianAmplitude::norm_const() const {
    return std::pow(M_PI * sigma * sigma, -0.25 * d);
}

cplx GaussianAmplitude::value(double R) const {
    return norm_const() * std::exp(cplx{-R * R / (2 * sigma * sigma), kappa * R});
}

cplx gaussian_com_energy(const GaussianAmplitude& amp, double R, double mass) {
    const double s2 = amp.sigma * amp.sigma;
    const cplx num = R * R - 2.0 * I * s2 * amp.kappa * R - static_cast<double>(amp.d) * s2 -
                     s2 * s2 * amp.kappa * amp.kappa;
    return -(HBAR * HBAR / (2.0 * mass)) * num / (s2 * s2);
}

namespace {

void require_two_level_ladder(const CompositeBasis& basis) {
    if (basis.atoms.n_levels() != 2)
        throw std::invalid_argument("reduced model requires a two-level (a,b) basis");
    if (basis.atoms.backend != SpatialBackend::ladder)
        throw std::invalid_argument("reduced model requires the momentum-ladder backend");
}

}  // namespace

double level_shift_energy(const LevelScheme& levels, const CouplingSet& cps, int level, int n_a,
                          int n_b, bool rwa) {
    const auto det = make_detunings(levels);
    const double s = static_cast<double>(MODEL_HC_SIGN);
    double E = levels.omega[level];
    const PhotonMode alpha = (level == 0) ? PhotonMode::a : PhotonMode::b;
    const int n_alpha = (level == 0) ? n_a : n_b;
    for (int j : cps.ancillas()) {
        const double co = std::norm(cps.omega_of(j, alpha) * cps.u(alpha).amp) *
                          det.inv_co(j, j, alpha, alpha);
        const double ct = std::norm(cps.lambda_of(j, alpha) * cps.u(alpha).amp) *
                          det.inv_counter(j, j, alpha, alpha);
        E += s * co * n_alpha;
        if (!rwa) E -= s * ct * (n_alpha + 1);
    }
    return E;
}

cplx effective_two_photon_omega(const LevelScheme& levels, const CouplingSet& cps) {
    const auto det = make_detunings(levels);
    const double s = static_cast<double>(MODEL_HC_SIGN);
    cplx om{0, 0};
    for (int j : cps.ancillas())
        om += s * std::conj(cps.omega_of(j, PhotonMode::b)) * cps.omega_of(j, PhotonMode::a) *
              cps.u_a.amp * std::conj(cps.u_b.amp) *
              det.inv_co(j, j, PhotonMode::a, PhotonMode::b);
    return om;
}

cplx effective_two_photon_lambda(const LevelScheme& levels, const CouplingSet& cps) {
    const auto det = make_detunings(levels);
    const double s = static_cast<double>(MODEL_HC_SIGN);
    cplx la{0, 0};
    for (int j : cps.ancillas())
        la += -s * cps.lambda_of(j, PhotonMode::a) * std::conj(cps.lambda_of(j, PhotonMode::b)) *
              std::conj(cps.u_a.amp) * cps.u_b.amp *
              det.inv_counter(j, j, PhotonMode::a, PhotonMode::b);
    return la;
}

JointOperators make_joint_operators(const LevelScheme& levels, const CouplingSet& cps,
                                    const CompositeBasis& basis) {
    require_two_level_ladder(basis);

    JointOperators jo;
    const Mat a = build_annihilation(basis.ladder_a);
    const Mat b = build_annihilation(basis.ladder_b);
    jo.c = photon_pair_embed(basis, kron(a, Mat(b.adjoint())));  // b+ a
    jo.c_dag = jo.c.adjoint();
    jo.n_c = jo.c_dag * jo.c;

    const int K = levels.K();
    jo.psi_c = one_body_config(basis, sp_transition(basis.atoms, 1, 0, SpatialFactor(cplx{1, 0}, +K)));
    jo.psi_c_minus =
        one_body_config(basis, sp_transition(basis.atoms, 1, 0, SpatialFactor(cplx{1, 0}, -K)));

    jo.Omega = effective_two_photon_omega(levels, cps);
    jo.Lambda = effective_two_photon_lambda(levels, cps);
    return jo;
}

ReducedHamiltonian build_reduced(const LevelScheme& levels, const CouplingSet& cps,
                                 const CompositeBasis& basis, bool rwa) {
    require_two_level_ladder(basis);
    const auto& atoms = basis.atoms;
    const int D = basis.dim();

    ReducedHamiltonian red;
    red.rwa = rwa;
    red.joint = make_joint_operators(levels, cps, basis);

    // Diagonal block: light field + per-particle energies (kinetic, internal, shift).
    red.H0_2 = Mat::Zero(D, D);
    const double q = atoms.base_momentum;
    for (int c = 0; c < basis.n_configs(); ++c)
        for (int na = 0; na <= basis.ladder_a.n_max; ++na)
            for (int nb = 0; nb <= basis.ladder_b.n_max; ++nb) {
                double E = levels.Omega_a * (na + 0.5) + levels.Omega_b * (nb + 0.5);
                for (int i = 0; i < atoms.n_sp(); ++i) {
                    const int occ = basis.configs[c][i];
                    if (occ == 0) continue;
                    const auto& sm = atoms.sp[i];
                    const double p = q * atoms.modes[sm.level][sm.ext].kappa;
                    E += occ * (p * p / (2.0 * levels.mass) +
                                level_shift_energy(levels, cps, sm.level, na, nb, rwa));
                }
                const int idx = basis.index(c, na, nb);
                red.H0_2(idx, idx) = HBAR * E;
            }

    // Off-diagonal block: two-photon transfer terms.
    red.V = Mat::Zero(D, D);
    {
        const Mat co = red.joint.Omega * Mat(kron(red.joint.psi_c,
                                                  Mat::Identity(basis.photon_dim(),
                                                                basis.photon_dim()))) *
                       red.joint.c;
        red.V += HBAR * (co + co.adjoint());
        if (!rwa) {
            const Mat ct = red.joint.Lambda *
                           Mat(kron(red.joint.psi_c_minus,
                                    Mat::Identity(basis.photon_dim(), basis.photon_dim()))) *
                           red.joint.c_dag;
            red.V += HBAR * (ct + ct.adjoint());
        }
    }

    red.H_R = red.H0_2 + red.V;
    return red;
}

Mat build_V2_full(const ReducedHamiltonian& red) { return red.V * red.V; }

Mat build_V2_approx(ReducedHamiltonian& red) {
    // Term matrices: TOm = hbar Omega psi_c c, TLa = hbar Lambda psi_c^- c+.
    const Mat ic = Mat::Identity(red.joint.c.rows() / red.joint.psi_c.rows(),
                                 red.joint.c.rows() / red.joint.psi_c.rows());
    const Mat TOm =
        HBAR * red.joint.Omega * Mat(kron(red.joint.psi_c, ic)) * red.joint.c;
    const Mat TLa = red.rwa ? Mat(Mat::Zero(red.V.rows(), red.V.cols()))
                            : Mat(HBAR * red.joint.Lambda *
                                  Mat(kron(red.joint.psi_c_minus, ic)) * red.joint.c_dag);
    const Mat TOmD = TOm.adjoint();
    const Mat TLaD = TLa.adjoint();

    const Mat kept = TOm * TOm + TOm * TOmD + TOmD * TOm + TOmD * TOmD + TLa * TLaD + TLaD * TLa;
    const Mat cross = TOm * TLa + TLa * TOm + TOm * TLaD + TLaD * TOm + TOmD * TLa +
                      TLa * TOmD + TOmD * TLaD + TLaD * TOmD;
    const Mat pairs = TLa * TLa + TLaD * TLaD;

    red.drop_record.push_back("dropped Omega-Lambda cross terms, norm " +
                              std::to_string(cross.cwiseAbs().maxCoeff()));
    red.drop_record.push_back("dropped Lambda-Lambda two-photon-pair terms, norm " +
                              std::to_string(pairs.cwiseAbs().maxCoeff()));
    return kept;
}

Mat rabi_operator(const Mat& V2) {
    if (hermiticity_defect(V2) > 1e-10)
        throw std::domain_error("rabi_operator: V2 not hermitian");
    Eigen::SelfAdjointEigenSolver<Mat> es(Mat(0.5 * (V2 + V2.adjoint())));
    const double scale = std::max(1.0, V2.cwiseAbs().maxCoeff());
    RVec ev = es.eigenvalues();
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (ev(i) < -1e-8 * scale)
            throw std::domain_error("rabi_operator: V2 has a significantly negative eigenvalue");
        ev(i) = std::sqrt(std::max(ev(i), 0.0)) / HBAR;
    }
    return es.eigenvectors() * ev.asDiagonal().toDenseMatrix().cast<cplx>() *
           es.eigenvectors().adjoint();
}

PulsePropagator make_propagator(ReducedHamiltonian& red) {
    const Mat V2 = build_V2_approx(red);
    if (hermiticity_defect(V2) > 1e-10)
        throw std::domain_error("make_propagator: V2 not hermitian");
    Eigen::SelfAdjointEigenSolver<Mat> es(Mat(0.5 * (V2 + V2.adjoint())));
    const double scale = std::max(1.0, V2.cwiseAbs().maxCoeff());

    PulsePropagator prop;
    prop.evals = es.eigenvalues();
    for (Eigen::Index i = 0; i < prop.evals.size(); ++i) {
        if (prop.evals(i) < -1e-8 * scale)
            throw std::domain_error(
                "make_propagator: V2 has a significantly negative eigenvalue");
        prop.evals(i) = std::sqrt(std::max(prop.evals(i), 0.0)) / HBAR;
    }
    prop.evecs = es.eigenvectors();
    prop.V = red.V;

    Eigen::SelfAdjointEigenSolver<Mat> h0(Mat(0.5 * (red.H0_2 + red.H0_2.adjoint())));
    prop.h0_evals = h0.eigenvalues();
    prop.h0_evecs = h0.eigenvectors();
    return prop;
}

Vec PulsePropagator::apply(double theta, const Vec& psi) const {
    // Free propagation U0 = exp(-i theta H0_2).
    Vec x = h0_evecs.adjoint() * psi;
    for (Eigen::Index i = 0; i < x.size(); ++i)
        x(i) *= std::exp(-I * theta * h0_evals(i) / HBAR);
    const Vec psi1 = h0_evecs * x;

    // Trigonometric part in the Rabi-operator eigenbasis.
    Vec u = evecs.adjoint() * psi1;
    Vec w = evecs.adjoint() * (V * psi1);
    for (Eigen::Index i = 0; i < u.size(); ++i) {
        const double om = evals(i);
        u(i) *= std::cos(theta * om);
        const double sinc = (om == 0.0) ? theta : std::sin(theta * om) / om;
        w(i) *= sinc / HBAR;
    }
    return evecs * u - I * (evecs * w);
}

Mat PulsePropagator::unitary(double theta) const {
    const Eigen::Index D = V.rows();
    Mat U0 = Mat::Zero(D, D);
    {
        Vec ph(D);
        for (Eigen::Index i = 0; i < D; ++i)
            ph(i) = std::exp(-I * theta * h0_evals(i) / HBAR);
        U0 = h0_evecs * ph.asDiagonal() * h0_evecs.adjoint();
    }
    Vec c(D), s(D);
    for (Eigen::Index i = 0; i < D; ++i) {
        const double om = evals(i);
        c(i) = std::cos(theta * om);
        s(i) = (om == 0.0) ? theta : std::sin(theta * om) / om;
    }
    const Mat cosm = evecs * c.asDiagonal() * evecs.adjoint();
    const Mat sincm = evecs * s.asDiagonal() * evecs.adjoint();
    return (cosm - I * (sincm * V) / HBAR) * U0;
}

Mat delta_pulse_U(const PulseSpec& pulse, ReducedHamiltonian& red) {
    if (pulse.strength <= 0 || pulse.theta() < 0)
        throw std::invalid_argument("delta_pulse_U: require Gamma > 0 and theta >= 0");
    return make_propagator(red).unitary(pulse.theta());
}

cplx phase_factor_C(int n_a, int n_b, PhotonMode alpha, const GaussianAmplitude& amp, double R,
                    const LevelScheme& levels, const CouplingSet& cps, bool rwa) {
    const int level = (alpha == PhotonMode::a) ? 0 : 1;
    const double field = levels.Omega_a * (n_a + 0.5) + levels.Omega_b * (n_b + 0.5);
    const double internal = level_shift_energy(levels, cps, level, n_a, n_b, rwa);
    return gaussian_com_energy(amp, R, levels.mass) + HBAR * (field + internal);
}

}  // namespace cavsim
