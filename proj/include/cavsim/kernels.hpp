#pragma once

#include <vector>

#include "cavsim/types.hpp"

namespace cavsim::kernels {

/** Thread cap: min(SIM_THREADS env if set, OpenMP max threads); 1 without OpenMP. */
int max_threads();

/** y = M x, straightforward serial loop (reference implementation). */
Vec matvec_serial(const Mat& M, const Vec& x);

/** y = M x, OpenMP-parallel over rows; falls back to serial without OpenMP. */
Vec matvec(const Mat& M, const Vec& x);

/** <psi_k|O|psi_k> for a trajectory, serial reference. */
std::vector<double> expectation_series_serial(const Mat& O, const std::vector<Vec>& traj);

/** Same, OpenMP-parallel over trajectory points. */
std::vector<double> expectation_series(const Mat& O, const std::vector<Vec>& traj);

}  // namespace cavsim::kernels
