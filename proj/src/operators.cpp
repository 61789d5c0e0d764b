#include "cavsim/operators.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace cavsim {

Mat build_annihilation(const PhotonLadder& ladder) {
    if (ladder.n_max < 1) throw std::invalid_argument("build_annihilation: n_max must be >= 1");
    const int d = ladder.dim();
    Mat a = Mat::Zero(d, d);
    for (int n = 1; n < d; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return a;
}

Mat kron(const Mat& A, const Mat& B) {
    Mat out(A.rows() * B.rows(), A.cols() * B.cols());
    for (Eigen::Index i = 0; i < A.rows(); ++i)
        for (Eigen::Index j = 0; j < A.cols(); ++j)
            out.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
    return out;
}

Mat photon_embed(const CompositeBasis& basis, PhotonMode mode, const Mat& local) {
    const Mat ia = Mat::Identity(basis.ladder_a.dim(), basis.ladder_a.dim());
    const Mat ib = Mat::Identity(basis.ladder_b.dim(), basis.ladder_b.dim());
    Mat pair = (mode == PhotonMode::a) ? kron(local, ib) : kron(ia, local);
    return photon_pair_embed(basis, pair);
}

Mat photon_pair_embed(const CompositeBasis& basis, const Mat& pair_op) {
    if (pair_op.rows() != basis.photon_dim())
        throw std::invalid_argument("photon_pair_embed: dimension mismatch");
    const Mat ic = Mat::Identity(basis.n_configs(), basis.n_configs());
    return kron(ic, pair_op);
}

Mat atomic_embed(const CompositeBasis& basis, const Mat& config_op) {
    if (config_op.rows() != basis.n_configs())
        throw std::invalid_argument("atomic_embed: dimension mismatch");
    const Mat ip = Mat::Identity(basis.photon_dim(), basis.photon_dim());
    return kron(config_op, ip);
}

namespace {
/** Annihilation of sp mode m in configuration space. */
Mat config_annihilation(const CompositeBasis& basis, int m) {
    const int nc = basis.n_configs();
    Mat out = Mat::Zero(nc, nc);
    for (int c = 0; c < nc; ++c) {
        const auto& occ = basis.configs[c];
        if (occ[m] == 0) continue;
        std::vector<int> tgt = occ;
        tgt[m] -= 1;
        const int ct = basis.config_of(tgt);
        if (ct >= 0) out(ct, c) = std::sqrt(static_cast<double>(occ[m]));
    }
    return out;
}
}  // namespace

Mat build_field_op(const CompositeBasis& basis, int level, int ext, LadderKind kind) {
    const int m = basis.atoms.sp_index(level, ext);
    if (m < 0) throw std::domain_error("build_field_op: unknown (level, ext) mode");
    Mat a = config_annihilation(basis, m);
    if (kind == LadderKind::create) a = a.adjoint().eval();
    return atomic_embed(basis, a);
}

Mat one_body_config(const CompositeBasis& basis, const Mat& T) {
    const int M = basis.atoms.n_sp();
    if (T.rows() != M || T.cols() != M)
        throw std::invalid_argument("one_body_config: T dimension mismatch");
    const int nc = basis.n_configs();
    Mat out = Mat::Zero(nc, nc);
    for (int c = 0; c < nc; ++c) {
        const auto& occ = basis.configs[c];
        for (int m = 0; m < M; ++m) {
            if (occ[m] == 0) continue;
            for (int mp = 0; mp < M; ++mp) {
                const cplx t = T(mp, m);
                if (t == cplx{0, 0}) continue;
                std::vector<int> tgt = occ;
                tgt[m] -= 1;
                const double amp_down = std::sqrt(static_cast<double>(occ[m]));
                const double amp_up = std::sqrt(static_cast<double>(tgt[mp] + 1));
                tgt[mp] += 1;
                const int ct = basis.config_of(tgt);
                if (ct >= 0) out(ct, c) += t * amp_down * amp_up;
            }
        }
    }
    return out;
}

SpatialFactor operator*(const SpatialFactor& f, const SpatialFactor& g) {
    SpatialFactor out;
    out.amp = f.amp * g.amp;
    out.shift = f.shift + g.shift;
    if (f.samples.size() && g.samples.size())
        out.samples = f.samples.cwiseProduct(g.samples);
    else if (f.samples.size())
        out.samples = f.samples;
    else if (g.samples.size())
        out.samples = g.samples;
    return out;
}

SpatialFactor conj(const SpatialFactor& f) {
    SpatialFactor out;
    out.amp = std::conj(f.amp);
    out.shift = -f.shift;
    if (f.samples.size()) out.samples = f.samples.conjugate();
    return out;
}

Mat sp_transition(const AtomicModeSet& atoms, int level_to, int level_from,
                  const SpatialFactor& f) {
    const int M = atoms.n_sp();
    Mat T = Mat::Zero(M, M);
    if (atoms.backend == SpatialBackend::ladder) {
        const auto& from_modes = atoms.modes[level_from];
        for (int e = 0; e < static_cast<int>(from_modes.size()); ++e) {
            const int tgt = atoms.find_kappa(level_to, from_modes[e].kappa + f.shift);
            if (tgt < 0) continue;  // off the momentum ladder: dropped
            T(atoms.sp_index(level_to, tgt), atoms.sp_index(level_from, e)) = f.amp;
        }
    } else {
        const auto& g = atoms.grid;
        Vec weight = Vec::Constant(g.points.size(), f.amp);
        if (f.samples.size()) weight = weight.cwiseProduct(f.samples);
        const auto& fm = atoms.modes[level_from];
        const auto& tm = atoms.modes[level_to];
        for (int et = 0; et < static_cast<int>(tm.size()); ++et)
            for (int ef = 0; ef < static_cast<int>(fm.size()); ++ef) {
                cplx acc = 0;
                for (Eigen::Index i = 0; i < g.points.size(); ++i)
                    acc += std::conj(tm[et].profile(i)) * weight(i) * fm[ef].profile(i) *
                           g.weights(i);
                T(atoms.sp_index(level_to, et), atoms.sp_index(level_from, ef)) = acc;
            }
    }
    return T;
}

namespace {
Eigen::SelfAdjointEigenSolver<Mat> checked_eigensolver(const Mat& herm) {
    if (hermiticity_defect(herm) > 1e-10)
        throw std::domain_error("matrix_function: input not hermitian");
    Eigen::SelfAdjointEigenSolver<Mat> es((herm + herm.adjoint()) / 2.0);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("matrix_function: eigensolver failed");
    return es;
}
}  // namespace

Mat matrix_function(const Mat& herm, const std::function<double(double)>& f) {
    auto es = checked_eigensolver(herm);
    Vec d(es.eigenvalues().size());
    for (Eigen::Index i = 0; i < d.size(); ++i) d(i) = f(es.eigenvalues()(i));
    return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().adjoint();
}

Mat matrix_function_c(const Mat& herm, const std::function<cplx(double)>& f) {
    auto es = checked_eigensolver(herm);
    Vec d(es.eigenvalues().size());
    for (Eigen::Index i = 0; i < d.size(); ++i) d(i) = f(es.eigenvalues()(i));
    return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().adjoint();
}

cplx inner_product(const Vec& x, const Vec& y) { return x.dot(y); }

Vec normalize(const Vec& x) {
    const double n = x.norm();
    if (n == 0.0) throw std::domain_error("normalize: zero vector");
    return x / n;
}

double hermiticity_defect(const Mat& m) {
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    return (m - m.adjoint()).cwiseAbs().maxCoeff() / scale;
}

}  // namespace cavsim
