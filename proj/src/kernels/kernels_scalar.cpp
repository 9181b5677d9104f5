#include "hmlab/kernels.hpp"

#include <cmath>
#include <vector>

// Reference kernels.  The SIMD variants must reproduce these bit for bit;
// keep the operand pairing explicit (see the pairwise tree in sum_impl) and
// do not "simplify" expressions into forms a vector unit cannot match.

namespace hmlab::kern {
namespace {

void add_impl(double* dst, const double* a, const double* b, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] = a[i] + b[i];
}

void sub_impl(double* dst, const double* a, const double* b, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] = a[i] - b[i];
}

void mul_impl(double* dst, const double* a, const double* b, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] = a[i] * b[i];
}

void scale_impl(double* dst, const double* a, double s, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] = a[i] * s;
}

void axpy_impl(double* y, double a, const double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = y[i] + a * x[i];
}

void cmul_impl(std::complex<double>* dst, const std::complex<double>* a,
               const std::complex<double>* b, std::size_t n) {
  const double* pa = reinterpret_cast<const double*>(a);
  const double* pb = reinterpret_cast<const double*>(b);
  double* pd = reinterpret_cast<double*>(dst);
  for (std::size_t i = 0; i < n; ++i) {
    const double ar = pa[2 * i], ai = pa[2 * i + 1];
    const double br = pb[2 * i], bi = pb[2 * i + 1];
    pd[2 * i] = ar * br - ai * bi;
    pd[2 * i + 1] = ai * br + ar * bi;
  }
}

thread_local std::vector<double> scratch;

// One level of the reduction tree: adjacent pairs, odd tail passes through.
std::size_t pair_level(double* w, std::size_t m) {
  const std::size_t pairs = m / 2;
  for (std::size_t i = 0; i < pairs; ++i) w[i] = w[2 * i] + w[2 * i + 1];
  if (m & 1) {
    w[pairs] = w[m - 1];
    return pairs + 1;
  }
  return pairs;
}

double reduce_tree(double* w, std::size_t m) {
  while (m > 1) m = pair_level(w, m);
  return m ? w[0] : 0.0;
}

double sum_impl(const double* x, std::size_t n) {
  if (n == 0) return 0.0;
  scratch.assign(x, x + n);
  return reduce_tree(scratch.data(), n);
}

double dot_impl(const double* x, const double* y, std::size_t n) {
  if (n == 0) return 0.0;
  scratch.resize(n);
  for (std::size_t i = 0; i < n; ++i) scratch[i] = x[i] * y[i];
  return reduce_tree(scratch.data(), n);
}

double max_abs_impl(const double* x, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = std::fabs(x[i]);
    if (a > m) m = a;
  }
  return m;
}

constexpr Ops table = {
    "scalar",   add_impl, sub_impl, mul_impl,     scale_impl,
    axpy_impl,  cmul_impl, sum_impl, dot_impl,    max_abs_impl,
};

}  // namespace

const Ops& scalar_ops() { return table; }

}  // namespace hmlab::kern
