#pragma once

#include <vector>

#include "hmlab/domain.hpp"
#include "hmlab/hermitian.hpp"
#include "hmlab/lie.hpp"

namespace hmlab {

// alpha_k, a section of K^{m_k+1}.  Holomorphic representatives are complex
// constants (torus) and polynomials in z of degree <= 8 (patch).  Sampled
// data is accepted as labeled synthetic input; it need not be holomorphic.
struct Differential {
  enum class Rep { Constant, Poly, Sampled };

  int k = 1;
  Rep rep = Rep::Constant;
  cplx constant{0.0, 0.0};
  std::vector<cplx> coeffs;  // poly, c0 + c1 z + ...
  ScalarField samples;

  static Differential make_constant(int k, cplx c);
  static Differential make_poly(int k, std::vector<cplx> coeffs);
  static Differential make_sampled(int k, ScalarField f);

  cplx eval(cplx z) const;
};

ScalarField sample_differential(const Differential& a, const SurfaceDomain& dom);

// phi = e_{-1} + sum_k alpha_k e_k sampled on the domain.  The e_{-1}
// component has coefficient exactly 1 at every node.
struct HiggsField {
  LieBasis basis;
  std::vector<Differential> alphas;
  SurfaceDomain dom;
  MatrixField phi;

  int n() const { return basis.n; }
  // alpha_k samples, zero field when the index is absent.
  ScalarField alpha_samples(int k) const;
  bool is_cyclic() const;  // only alpha_{n-1} nonzero (n = 2 is always cyclic)
};

// Throws on duplicate or out-of-range differential indices.
HiggsField build_hitchin_higgs(const LieBasis& basis, const std::vector<Differential>& alphas,
                               const SurfaceDomain& dom);

// kappa * tr(phi phi) per node; equals hopf_constant * alpha_1 pointwise on
// Hitchin sections.
ScalarField hopf_differential(const HiggsField& phi, double kappa = 1.0);
cplx hopf_constant(const LieBasis& basis, double kappa = 1.0);  // 2 kappa tr(em1 e1)

// phi^{*H} = H^{-1} phi^dagger H per node.  The raw overload verifies
// positive definiteness and reports the first offending node.
MatrixField adjoint_star(const MatrixField& phi, const MatrixField& H);
MatrixField adjoint_star(const HiggsField& phi, const HermitianMetricField& H);

// e^{i theta} phi as a raw matrix field (not in Hitchin normal form).
MatrixField circle_action(const HiggsField& phi, double theta);
// Normal-form action alpha_k -> e^{i (m_k + 1) theta} alpha_k.
HiggsField circle_action_normal_form(const HiggsField& phi, double theta);

// Pointwise diagonal solution of the commutator projection of
// [phi, phi^{*H}] = 0; exact closed form in the cyclic case.  Nodes with no
// positive solution (zeros of the top differential) are filled by smooth
// interpolation from neighbors and reported in `flagged`.  `defined` is false
// when no node admitted a solution (then callers fall back to the identity).
struct FiducialMetric {
  HermitianMetricField H;
  std::vector<std::size_t> flagged;
  bool defined = false;
};
FiducialMetric fiducial_metric(const HiggsField& phi);

// sup norm of dzbar applied to each alpha sample field.
double harmonicity_defect(const HiggsField& phi);

}  // namespace hmlab
