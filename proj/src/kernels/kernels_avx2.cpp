#include "hmlab/kernels.hpp"

#ifdef HMLAB_HAVE_AVX2

#include <immintrin.h>

#include <cmath>
#include <vector>

// AVX2 variants.  Contract: bit-identical output to the scalar reference.
// All arithmetic uses explicit mul/add intrinsics (never FMA) and the
// reductions reproduce the scalar adjacent-pair tree exactly.

namespace hmlab::kern {
namespace {

void add_impl(double* dst, const double* a, const double* b, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(dst + i, _mm256_add_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  for (; i < n; ++i) dst[i] = a[i] + b[i];
}

void sub_impl(double* dst, const double* a, const double* b, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(dst + i, _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  for (; i < n; ++i) dst[i] = a[i] - b[i];
}

void mul_impl(double* dst, const double* a, const double* b, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(dst + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  for (; i < n; ++i) dst[i] = a[i] * b[i];
}

void scale_impl(double* dst, const double* a, double s, std::size_t n) {
  const __m256d vs = _mm256_set1_pd(s);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(dst + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), vs));
  for (; i < n; ++i) dst[i] = a[i] * s;
}

void axpy_impl(double* y, double a, const double* x, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d prod = _mm256_mul_pd(va, _mm256_loadu_pd(x + i));
    _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), prod));
  }
  for (; i < n; ++i) y[i] = y[i] + a * x[i];
}

void cmul_impl(std::complex<double>* dst, const std::complex<double>* a,
               const std::complex<double>* b, std::size_t n) {
  const double* pa = reinterpret_cast<const double*>(a);
  const double* pb = reinterpret_cast<const double*>(b);
  double* pd = reinterpret_cast<double*>(dst);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d va = _mm256_loadu_pd(pa + 2 * i);
    const __m256d vb = _mm256_loadu_pd(pb + 2 * i);
    const __m256d br = _mm256_movedup_pd(vb);        // [br0, br0, br1, br1]
    const __m256d bi = _mm256_permute_pd(vb, 0xF);   // [bi0, bi0, bi1, bi1]
    const __m256d as = _mm256_permute_pd(va, 0x5);   // [ai0, ar0, ai1, ar1]
    const __m256d t0 = _mm256_mul_pd(va, br);        // [ar*br, ai*br, ...]
    const __m256d t1 = _mm256_mul_pd(as, bi);        // [ai*bi, ar*bi, ...]
    _mm256_storeu_pd(pd + 2 * i, _mm256_addsub_pd(t0, t1));
  }
  for (; i < n; ++i) {
    const double ar = pa[2 * i], ai = pa[2 * i + 1];
    const double br = pb[2 * i], bi = pb[2 * i + 1];
    pd[2 * i] = ar * br - ai * bi;
    pd[2 * i + 1] = ai * br + ar * bi;
  }
}

thread_local std::vector<double> scratch;

// w[i] = w[2i] + w[2i+1]: same pairing as the scalar tree.
std::size_t pair_level(double* w, std::size_t m) {
  const std::size_t pairs = m / 2;
  std::size_t i = 0;
  for (; i + 4 <= pairs; i += 4) {
    const __m256d v0 = _mm256_loadu_pd(w + 2 * i);
    const __m256d v1 = _mm256_loadu_pd(w + 2 * i + 4);
    // hadd yields [p0, p2, p1, p3]; restore index order.
    const __m256d h = _mm256_hadd_pd(v0, v1);
    _mm256_storeu_pd(w + i, _mm256_permute4x64_pd(h, 0xD8));
  }
  for (; i < pairs; ++i) w[i] = w[2 * i] + w[2 * i + 1];
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
  mul_impl(scratch.data(), x, y, n);
  return reduce_tree(scratch.data(), n);
}

double max_abs_impl(const double* x, std::size_t n) {
  const __m256d sign_mask = _mm256_set1_pd(-0.0);
  __m256d vm = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    vm = _mm256_max_pd(vm, _mm256_andnot_pd(sign_mask, _mm256_loadu_pd(x + i)));
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, vm);
  double m = lanes[0];
  for (int k = 1; k < 4; ++k)
    if (lanes[k] > m) m = lanes[k];
  for (; i < n; ++i) {
    const double a = std::fabs(x[i]);
    if (a > m) m = a;
  }
  return m;
}

constexpr Ops table = {
    "avx2",    add_impl, sub_impl, mul_impl,  scale_impl,
    axpy_impl, cmul_impl, sum_impl, dot_impl, max_abs_impl,
};

}  // namespace

const Ops* avx2_ops() { return &table; }

}  // namespace hmlab::kern

#else

namespace hmlab::kern {
const Ops* avx2_ops() { return nullptr; }
}  // namespace hmlab::kern

#endif
