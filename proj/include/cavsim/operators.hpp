#pragma once

#include <functional>

#include "cavsim/basis.hpp"
#include "cavsim/types.hpp"

namespace cavsim {

/** Dense operator over a CompositeBasis with a hermiticity tag. */
struct OperatorMatrix {
    Mat m;
    bool hermitian = false;
    OperatorMatrix() = default;
    OperatorMatrix(Mat mm, bool h = false) : m(std::move(mm)), hermitian(h) {}
};

/** State over a CompositeBasis. */
struct StateVector {
    Vec v;
    double norm() const { return v.norm(); }
};

enum class LadderKind { annihilate, create };

/** Local (n_max+1)^2 annihilation matrix: <n-1|a|n> = sqrt(n). */
Mat build_annihilation(const PhotonLadder& ladder);

/** Kronecker product with our row-major composite index convention. */
Mat kron(const Mat& A, const Mat& B);

/** Embed an operator acting on one photon ladder into the composite basis. */
Mat photon_embed(const CompositeBasis& basis, PhotonMode mode, const Mat& local);

/** Embed an operator acting on the photon-pair space (dim photon_dim) into the composite basis. */
Mat photon_pair_embed(const CompositeBasis& basis, const Mat& pair_op);

/** Embed an operator acting on the atomic configuration space into the composite basis. */
Mat atomic_embed(const CompositeBasis& basis, const Mat& config_op);

/** Bosonic atomic field operator psi^(dagger)_{level,ext} over the composite basis. */
Mat build_field_op(const CompositeBasis& basis, int level, int ext, LadderKind kind);

/**
 * Second-quantized one-body operator sum_{m',m} T(m',m) psi+_{m'} psi_m built directly
 * in the atomic configuration space (exact within each atom-number sector).
 */
Mat one_body_config(const CompositeBasis& basis, const Mat& T);

/**
 * Spatial weight attached to a coupling: constant complex amplitude, plus either an
 * integer momentum shift (ladder backend; plane waves act as exact shift operators)
 * or point samples f(R_i) (grid backend, multiplication operator).
 */
struct SpatialFactor {
    cplx amp{1.0, 0.0};
    int shift = 0;
    Vec samples;  // empty => spatially constant

    SpatialFactor() = default;
    explicit SpatialFactor(cplx a, int s = 0) : amp(a), shift(s) {}
};

SpatialFactor operator*(const SpatialFactor& f, const SpatialFactor& g);
SpatialFactor conj(const SpatialFactor& f);

/**
 * One-body transition matrix T over flattened sp modes for level_from -> level_to,
 * weighted by the spatial factor. Ladder backend: kappa -> kappa + shift, with
 * off-ladder targets mapped to zero. Grid backend: quadrature of phi'* f phi.
 */
Mat sp_transition(const AtomicModeSet& atoms, int level_to, int level_from,
                  const SpatialFactor& f);

/** Apply a real scalar function to a hermitian matrix via spectral decomposition. */
Mat matrix_function(const Mat& herm, const std::function<double(double)>& f);
/** Same with a complex-valued function of the (real) eigenvalues, e.g. exp(-i t x). */
Mat matrix_function_c(const Mat& herm, const std::function<cplx(double)>& f);

cplx inner_product(const Vec& x, const Vec& y);
Vec normalize(const Vec& x);

double hermiticity_defect(const Mat& m);  // max|M - M^+| / max(1, max|M|)

}  // namespace cavsim
