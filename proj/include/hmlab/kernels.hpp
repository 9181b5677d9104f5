#pragma once

#include <complex>
#include <cstddef>

namespace hmlab::kern {

// Data-parallel array primitives behind the field arithmetic and the
// deterministic reductions.  Every entry has a scalar reference
// implementation and, on x86-64 hardware with AVX2, a vectorized variant.
// The two variants are bit-identical by construction: same IEEE-754
// operations, same association order, no FMA contraction.  Reductions use a
// fixed adjacent-pair tree (odd tail carried through unchanged), so the
// result does not depend on the active variant or the thread count.
struct Ops {
  const char* name;

  void (*add)(double* dst, const double* a, const double* b, std::size_t n);
  void (*sub)(double* dst, const double* a, const double* b, std::size_t n);
  void (*mul)(double* dst, const double* a, const double* b, std::size_t n);
  void (*scale)(double* dst, const double* a, double s, std::size_t n);
  // y[i] += a * x[i]
  void (*axpy)(double* y, double a, const double* x, std::size_t n);
  // dst[i] = a[i] * b[i] over interleaved (re, im) complex doubles
  void (*cmul)(std::complex<double>* dst, const std::complex<double>* a,
               const std::complex<double>* b, std::size_t n);

  double (*sum)(const double* x, std::size_t n);
  double (*dot)(const double* x, const double* y, std::size_t n);
  double (*max_abs)(const double* x, std::size_t n);
};

// Active table.  Selection happens once: AVX2 when the CPU supports it,
// overridable with HMLAB_KERNELS=scalar|avx2.
const Ops& ops();

const Ops& scalar_ops();
// nullptr when the binary or CPU lacks AVX2.
const Ops* avx2_ops();

inline void add(double* d, const double* a, const double* b, std::size_t n) { ops().add(d, a, b, n); }
inline void sub(double* d, const double* a, const double* b, std::size_t n) { ops().sub(d, a, b, n); }
inline void mul(double* d, const double* a, const double* b, std::size_t n) { ops().mul(d, a, b, n); }
inline void scale(double* d, const double* a, double s, std::size_t n) { ops().scale(d, a, s, n); }
inline void axpy(double* y, double a, const double* x, std::size_t n) { ops().axpy(y, a, x, n); }
inline void cmul(std::complex<double>* d, const std::complex<double>* a,
                 const std::complex<double>* b, std::size_t n) { ops().cmul(d, a, b, n); }
inline double sum(const double* x, std::size_t n) { return ops().sum(x, n); }
inline double dot(const double* x, const double* y, std::size_t n) { return ops().dot(x, y, n); }
inline double max_abs(const double* x, std::size_t n) { return ops().max_abs(x, n); }

}  // namespace hmlab::kern
