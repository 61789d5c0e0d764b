#include "cavsim/kernels.hpp"

#include <algorithm>
#include <cstdlib>

#ifdef CAVSIM_HAVE_OPENMP
#include <omp.h>
#endif

namespace cavsim::kernels {

int max_threads() {
#ifdef CAVSIM_HAVE_OPENMP
    int n = omp_get_max_threads();
#else
    int n = 1;
#endif
    if (const char* env = std::getenv("SIM_THREADS")) {
        const int cap = std::atoi(env);
        if (cap >= 1) n = std::min(n, cap);
    }
    return n;
}

Vec matvec_serial(const Mat& M, const Vec& x) {
    Vec y(M.rows());
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        cplx acc = 0;
        for (Eigen::Index j = 0; j < M.cols(); ++j) acc += M(i, j) * x(j);
        y(i) = acc;
    }
    return y;
}

Vec matvec(const Mat& M, const Vec& x) {
#ifdef CAVSIM_HAVE_OPENMP
    Vec y(M.rows());
    const int nt = max_threads();
#pragma omp parallel for schedule(static) num_threads(nt)
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        cplx acc = 0;
        for (Eigen::Index j = 0; j < M.cols(); ++j) acc += M(i, j) * x(j);
        y(i) = acc;
    }
    return y;
#else
    return matvec_serial(M, x);
#endif
}

std::vector<double> expectation_series_serial(const Mat& O, const std::vector<Vec>& traj) {
    std::vector<double> out(traj.size());
    for (size_t k = 0; k < traj.size(); ++k)
        out[k] = traj[k].dot(matvec_serial(O, traj[k])).real();
    return out;
}

std::vector<double> expectation_series(const Mat& O, const std::vector<Vec>& traj) {
#ifdef CAVSIM_HAVE_OPENMP
    std::vector<double> out(traj.size());
    const int nt = max_threads();
#pragma omp parallel for schedule(static) num_threads(nt)
    for (size_t k = 0; k < traj.size(); ++k)
        out[k] = traj[k].dot(matvec_serial(O, traj[k])).real();
    return out;
#else
    return expectation_series_serial(O, traj);
#endif
}

}  // namespace cavsim::kernels
