#pragma once

#include <string>
#include <utility>
#include <vector>

#include "hmlab/higgs.hpp"

namespace hmlab {

struct SolveParams {
  double tol = 1e-8;
  int max_iter = 2000;
  double dt = 1.0;
  enum class Method { Auto, Relax, Newton } method = Method::Auto;
  // Representation path; Auto picks Diagonal for cyclic fields and n = 2,
  // Full otherwise.
  enum class Path { Auto, Diagonal, Full } path = Path::Auto;
  double divergence_bound = 50.0;
};

struct SolveOutcome {
  enum class Status { Converged, Diverged, Obstructed, MaxIter };
  Status status = Status::MaxIter;
  int iterations = 0;
  double resid_sup = 0.0;
  double resid_l2 = 0.0;
  double wall_seconds = 0.0;
  std::string note;
  std::vector<double> l2_history;
};

const char* to_string(SolveOutcome::Status s);

// Default initialization: fiducial metric where defined, identity otherwise.
// On the patch this also supplies the Dirichlet boundary ring.
HermitianMetricField default_initial_metric(const HiggsField& phi);

// Solve F(nabla^H) + [phi, phi^{*H}] = 0 for H with det H = 1.
// Torus: periodic problem, with an obstruction test for configurations whose
// commutator diagonal has a fixed sign (the Fuchsian point).  Patch:
// Dirichlet problem with the boundary ring of `init` held fixed.
std::pair<HermitianMetricField, SolveOutcome> solve_harmonic_metric(const HiggsField& phi,
                                                                    const HermitianMetricField& init,
                                                                    const SolveParams& params);

// A_z = H^{-1} dz H + phi,  A_zbar = phi^{*H}.  Requires the self-duality
// residual sup-norm below 1e-6.
std::pair<MatrixField, MatrixField> assemble_flat_connection(const HermitianMetricField& H,
                                                             const HiggsField& phi);

// dz^dzbar coefficient of the curvature of B = nabla^H + phi + phi^{*H},
// evaluated through the algebraic expansion R + H^{-1}(dzbar phi)^dagger H
// - dzbar phi (discretely consistent with the residual).
MatrixField flat_connection_curvature(const HermitianMetricField& H, const HiggsField& phi);

// Direct assembly d A_zbar - dbar A_z + [A_z, A_zbar]; carries the
// product-rule discretization floor of the grid, kept as a cross-check.
MatrixField flat_connection_curvature_direct(const MatrixField& Az, const MatrixField& Azbar);

}  // namespace hmlab
