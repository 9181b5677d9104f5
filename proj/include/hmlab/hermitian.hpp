#pragma once

#include <vector>

#include "hmlab/domain.hpp"

namespace hmlab {

// Positive-definite Hermitian metric field with det H = 1 at every node.
// Diagonal representation: H = diag(exp(2 u_1), ..., exp(2 u_n)) with
// sum_j u_j = 0 pointwise.  Full representation: H = exp(S) with S Hermitian
// traceless.
struct HermitianMetricField {
  enum class Rep { Diagonal, Full };

  Rep rep = Rep::Diagonal;
  SurfaceDomain dom;
  int dim = 0;
  std::vector<RealField> u;  // Diagonal
  MatrixField S;             // Full

  static HermitianMetricField identity(const SurfaceDomain& dom, int n);
  static HermitianMetricField diagonal(const SurfaceDomain& dom, std::vector<RealField> u);
  static HermitianMetricField full(MatrixField S);

  std::size_t nodes() const { return dom.size(); }

  // Materialized per-node matrices.
  MatrixField matrix() const;
  MatrixField matrix_inv() const;
  MatrixField matrix_sqrt() const;
  MatrixField matrix_inv_sqrt() const;

  // Enforce the gauge: project u (or S) to trace zero, re-hermitize S.
  void project_gauge();
};

// Pointwise Hermitian matrix functions (self-adjoint eigendecomposition).
Mat hermitian_exp(const Mat& s);
Mat hermitian_sqrt(const Mat& h);
Mat hermitian_inv_sqrt(const Mat& h);

struct HiggsField;  // higgs.hpp

// Coefficient of dz^dzbar of the Chern curvature F(nabla^H) in the global
// trivialization: F = -dzbar(H^{-1} dz H).  The sign is the one for which the
// n = 2 constant oracle is a residual zero with a stable linearization; it is
// asserted by a startup self-test in the solver.
MatrixField chern_curvature(const HermitianMetricField& H);

// R = F(nabla^H) + [phi, phi^{*H}] as the dz^dzbar coefficient.  R is
// traceless and H-self-adjoint (H^{-1} R^dagger H = R); the anti-Hermitian
// object is the dx^dy coefficient -2i R.
struct ResidualField {
  MatrixField R;
  double sup = 0.0;  // patch: interior nodes only
  double l2 = 0.0;   // RMS over the same node set
  MatrixField dxdy_coefficient() const;
};

ResidualField residual(const HermitianMetricField& H, const HiggsField& phi);

}  // namespace hmlab
