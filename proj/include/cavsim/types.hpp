#pragma once

#include <complex>
#include <Eigen/Dense>

namespace cavsim {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;

inline constexpr cplx I{0.0, 1.0};

// Working units: hbar = 1, all frequencies in one common dimensionless unit.
inline constexpr double HBAR = 1.0;

}  // namespace cavsim
