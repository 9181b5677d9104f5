#pragma once

#include <cstdint>
#include <vector>

#include "hmlab/higgs.hpp"

namespace hmlab {

// Harmonic-map geometry extracted from (phi, H) in the pointwise frame where
// the metric is the identity и tangent vectors are Hermitian matrices:
//   xi_1 = phihat + phihat^dagger,  xi_2 = i(phihat - phihat^dagger),
//   g_ab = kappa Re tr(xi_a xi_b^dagger).
struct PullbackMetric {
  RealField g11, g12, g22, detg;
};

// phihat = H^{1/2} phi H^{-1/2} per node.
MatrixField gauge_normalize(const HiggsField& phi, const HermitianMetricField& H);

PullbackMetric pullback_metric(const MatrixField& phi_hat, double kappa);

// Nodes with detg <= rel_tol * max detg (patch boundary ring excluded: it
// carries prescribed Dirichlet data, not solved geometry).  Empty for
// immersed Hitchin-section runs.
std::vector<std::size_t> immersion_certificate(const RealField& detg, double rel_tol = 1e-10);

RealField energy_density_field(const PullbackMetric& g);

// Induced curvature K_g.  Conformal metrics use K = -laplacian(psi)/e^{2 psi}
// with e^{2 psi} = g11; the general path is the Brioschi formula.  `valid`
// marks nodes where K was evaluated (non-degenerate, off the patch ring).
RealField induced_curvature(const PullbackMetric& g, bool conformal,
                            std::vector<std::uint8_t>& valid);

// Sectional curvature of the tangent two-plane in the ambient symmetric
// space: Sec = -kappa tr([xi1, xi2][xi1, xi2]^dagger) / detg <= 0.
RealField ambient_sectional(const MatrixField& phi_hat, const RealField& detg, double kappa,
                            const std::vector<std::uint8_t>& valid);

// Gauss equation for minimal immersions: ||B||^2 = 2 (Sec - K_g); values in
// [-1e-8, 0) clip to zero, anything below -1e-6 throws (sign convention or
// solver failure).
RealField second_fundamental_norm(const RealField& K, const RealField& Sec,
                                  const std::vector<std::uint8_t>& valid);

struct GeometryReport {
  SurfaceDomain dom;
  double kappa = 1.0;

  PullbackMetric g;
  ScalarField hopf;
  RealField energy_density;
  RealField K;
  RealField Sec;
  RealField Bsq;
  RealField conformal_factor;  // = g11, meaningful when `conformal`
  std::vector<std::uint8_t> curvature_valid;
  std::vector<std::size_t> branch_nodes;

  bool conformal = false;
  bool gauss_valid = false;  // Bsq computed (requires a conformal/minimal run)
  bool degenerate = false;   // no valid curvature nodes (rank < 2 everywhere)
  double total_energy = 0.0;
  double min_detg = 0.0;
  double max_detg = 0.0;
  double harmonicity = 0.0;
  // Ratio between the map-based Hopf coefficient (g11 - g22 - 2i g12) and
  // kappa tr(phi^2); reported, not assumed (it is 4 for this normalization).
  double hopf_map_ratio = 0.0;
  std::size_t valid_count = 0;
};

GeometryReport compute_geometry(const HiggsField& phi, const HermitianMetricField& H,
                                double kappa = 1.0);

// Same extraction from a materialized Hermitian matrix field (the snapshot
// form); solve-time and report-time pipelines share this route so reports
// recompute bit-identically.
GeometryReport compute_geometry(const HiggsField& phi, const MatrixField& H_matrix,
                                double kappa = 1.0);

}  // namespace hmlab
