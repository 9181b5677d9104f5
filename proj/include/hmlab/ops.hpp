#pragma once

#include "hmlab/domain.hpp"

namespace hmlab {

// Coordinate differential operators.  Torus: spectral, exact on trigonometric
// polynomials below the Nyquist band (Nyquist modes of first derivatives are
// zeroed).  Patch: 4th-order centered differences, one-sided at the boundary.
// The isothermal coordinate is z = s + tau*t on the torus and z = x + iy on
// the patch.
ScalarField d_dz(const ScalarField& f);
ScalarField d_dzbar(const ScalarField& f);

// Flat Laplacian, defined as 4 * d_dz d_dzbar.  On the torus the identity is
// exact by construction; on the patch dedicated second-derivative stencils
// are used.
ScalarField laplacian(const ScalarField& f);
RealField laplacian(const RealField& f);

// Real-frame derivatives d/dx = dz + dzbar, d/dy = i(dz - dzbar).
ScalarField dx(const ScalarField& f);
ScalarField dy(const ScalarField& f);
RealField dx(const RealField& f);
RealField dy(const RealField& f);

// Entrywise operators on matrix fields.
MatrixField d_dz(const MatrixField& f);
MatrixField d_dzbar(const MatrixField& f);

// Quadrature: deterministic pairwise reductions.  The torus rule is the
// plain mean times the lattice area Im(tau); the patch rule is the tensor
// trapezoid rule on [-L, L]^2.
RealField quadrature_weights(const SurfaceDomain& dom);
double integrate(const RealField& f);
double integrate(const RealField& f, const RealField& dV);

// Inverse flat Laplacian, used as the solver preconditioner.  Torus: exact
// spectral inverse on the mean-zero part (the mean of the result is zero).
// Patch: 5-point homogeneous-Dirichlet solve on the interior via DST-I;
// boundary entries of the result are zero.
RealField inverse_laplacian(const RealField& f);

// (-Delta/2 + mu)^{-1} with the same boundary conventions; mu > 0.
RealField inverse_helmholtz(const RealField& f, double mu);

}  // namespace hmlab
