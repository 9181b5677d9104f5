#include "hmlab/domain.hpp"

#include <stdexcept>

#include "hmlab/kernels.hpp"

namespace hmlab {
namespace {

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

SurfaceDomain SurfaceDomain::torus(int N, cplx tau) {
  if (N < 16 || !power_of_two(N))
    throw std::invalid_argument("torus: N must be a power of two >= 16");
  if (!(tau.imag() > 0.0)) throw std::invalid_argument("torus: Im(tau) must be positive");
  SurfaceDomain d;
  d.kind = Kind::Torus;
  d.N = N;
  d.tau = tau;
  return d;
}

SurfaceDomain SurfaceDomain::patch(int N, double L) {
  if (N < 16) throw std::invalid_argument("patch: N must be >= 16");
  if (!(L > 0.0)) throw std::invalid_argument("patch: half-width L must be positive");
  SurfaceDomain d;
  d.kind = Kind::Patch;
  d.N = N;
  d.L = L;
  return d;
}

cplx SurfaceDomain::z_at(int ix, int iy) const {
  if (kind == Kind::Torus) {
    const double s = static_cast<double>(ix) / N;
    const double t = static_cast<double>(iy) / N;
    return cplx(s, 0.0) + tau * t;
  }
  return cplx(-L + ix * step_x(), -L + iy * step_y());
}

double sup_abs(const RealField& f) { return kern::max_abs(f.v.data(), f.v.size()); }

double sup_abs(const ScalarField& f) {
  double m = 0.0;
  for (const cplx& z : f.v) m = std::max(m, std::abs(z));
  return m;
}

double sup_abs(const MatrixField& f) {
  double m = 0.0;
  for (const cplx& z : f.v) m = std::max(m, std::abs(z));
  return m;
}

double sup_abs_diff(const MatrixField& a, const MatrixField& b) {
  if (a.v.size() != b.v.size()) throw std::invalid_argument("sup_abs_diff: size mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.v.size(); ++i) m = std::max(m, std::abs(a.v[i] - b.v[i]));
  return m;
}

RealField real_part(const ScalarField& f) {
  RealField r(f.dom);
  for (std::size_t i = 0; i < f.v.size(); ++i) r.v[i] = f.v[i].real();
  return r;
}

RealField abs_field(const ScalarField& f) {
  RealField r(f.dom);
  for (std::size_t i = 0; i < f.v.size(); ++i) r.v[i] = std::abs(f.v[i]);
  return r;
}

}  // namespace hmlab
