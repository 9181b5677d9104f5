#pragma once

#include <cstddef>
#include <vector>

#include "hmlab/types.hpp"

namespace hmlab {

// Discretized coordinate domain.  Two backends:
//  - Torus: the quotient C / (Z + tau Z), sampled at (s + tau t) with
//    s, t = j/N; doubly periodic, N a power of two.  Differentiation is
//    spectral.
//  - Patch: the square [-L, L]^2 with (N+1)^2 nodes including the boundary
//    ring; 4th-order finite differences.
struct SurfaceDomain {
  enum class Kind { Torus, Patch };

  Kind kind = Kind::Torus;
  int N = 64;
  cplx tau{0.0, 1.0};
  double L = 1.0;

  static SurfaceDomain torus(int N, cplx tau = cplx(0.0, 1.0));
  static SurfaceDomain patch(int N, double L);

  int axis_nodes() const { return kind == Kind::Torus ? N : N + 1; }
  std::size_t size() const {
    const std::size_t a = static_cast<std::size_t>(axis_nodes());
    return a * a;
  }
  // Coordinate steps: torus works in lattice coordinates (s, t) in [0,1)^2,
  // patch in (x, y).
  double step_x() const { return kind == Kind::Torus ? 1.0 / N : 2.0 * L / N; }
  double step_y() const { return step_x(); }
  double flat_area() const { return kind == Kind::Torus ? tau.imag() : 4.0 * L * L; }

  std::size_t index(int ix, int iy) const {
    return static_cast<std::size_t>(iy) * axis_nodes() + ix;
  }
  cplx z_at(int ix, int iy) const;
  bool is_boundary(int ix, int iy) const {
    if (kind == Kind::Torus) return false;
    return ix == 0 || iy == 0 || ix == N || iy == N;
  }
  bool is_boundary(std::size_t node) const {
    const int a = axis_nodes();
    return is_boundary(static_cast<int>(node % a), static_cast<int>(node / a));
  }

  bool operator==(const SurfaceDomain& o) const {
    return kind == o.kind && N == o.N && tau == o.tau && L == o.L;
  }
};

struct RealField {
  SurfaceDomain dom;
  std::vector<double> v;

  RealField() = default;
  explicit RealField(const SurfaceDomain& d, double fill = 0.0) : dom(d), v(d.size(), fill) {}
  double& at(int ix, int iy) { return v[dom.index(ix, iy)]; }
  double at(int ix, int iy) const { return v[dom.index(ix, iy)]; }
  std::size_t size() const { return v.size(); }
};

struct ScalarField {
  SurfaceDomain dom;
  std::vector<cplx> v;

  ScalarField() = default;
  explicit ScalarField(const SurfaceDomain& d, cplx fill = cplx(0.0, 0.0))
      : dom(d), v(d.size(), fill) {}
  cplx& at(int ix, int iy) { return v[dom.index(ix, iy)]; }
  cplx at(int ix, int iy) const { return v[dom.index(ix, iy)]; }
  std::size_t size() const { return v.size(); }
};

// One d x d complex matrix per node, row-major blocks.
struct MatrixField {
  SurfaceDomain dom;
  int dim = 0;
  std::vector<cplx> v;

  MatrixField() = default;
  MatrixField(const SurfaceDomain& d, int matrix_dim)
      : dom(d), dim(matrix_dim), v(d.size() * matrix_dim * matrix_dim, cplx(0.0, 0.0)) {}

  std::size_t nodes() const { return dom.size(); }
  Eigen::Map<Mat> at(std::size_t node) {
    return Eigen::Map<Mat>(&v[node * dim * dim], dim, dim);
  }
  Eigen::Map<const Mat> at(std::size_t node) const {
    return Eigen::Map<const Mat>(&v[node * dim * dim], dim, dim);
  }
};

// Sup norms and field sums (deterministic reductions).
double sup_abs(const RealField& f);
double sup_abs(const ScalarField& f);
double sup_abs(const MatrixField& f);
double sup_abs_diff(const MatrixField& a, const MatrixField& b);

RealField real_part(const ScalarField& f);
RealField abs_field(const ScalarField& f);

}  // namespace hmlab
