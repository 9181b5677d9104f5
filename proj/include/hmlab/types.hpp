#pragma once

#include <Eigen/Dense>
#include <complex>

namespace hmlab {

using cplx = std::complex<double>;
// Small dense n x n complex matrices (n <= 8); row-major so matrix fields can
// map their per-node storage directly.
using Mat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

}  // namespace hmlab
