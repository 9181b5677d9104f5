#include "hmlab/geometry.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "hmlab/ops.hpp"
#include "hmlab/parallel.hpp"

namespace hmlab {

MatrixField gauge_normalize(const HiggsField& phi, const HermitianMetricField& H) {
  if (!(phi.dom == H.dom) || phi.n() != H.dim)
    throw std::invalid_argument("gauge_normalize: dimension mismatch");
  MatrixField out(phi.dom, phi.n());
  if (H.rep == HermitianMetricField::Rep::Diagonal) {
    const int n = H.dim;
    parallel_for(out.nodes(), [&](std::size_t nd) {
      const auto p = phi.phi.at(nd);
      auto o = out.at(nd);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          o(i, j) = p(i, j) * std::exp(H.u[i].v[nd] - H.u[j].v[nd]);
    });
    return out;
  }
  const MatrixField hs = H.matrix_sqrt();
  const MatrixField hi = H.matrix_inv_sqrt();
  parallel_for(out.nodes(), [&](std::size_t nd) {
    out.at(nd) = hs.at(nd) * phi.phi.at(nd) * hi.at(nd);
  });
  return out;
}

PullbackMetric pullback_metric(const MatrixField& phi_hat, double kappa) {
  PullbackMetric g;
  g.g11 = RealField(phi_hat.dom);
  g.g12 = RealField(phi_hat.dom);
  g.g22 = RealField(phi_hat.dom);
  g.detg = RealField(phi_hat.dom);
  const int n = phi_hat.dim;
  parallel_for(phi_hat.nodes(), [&](std::size_t nd) {
    const auto p = phi_hat.at(nd);
    // T = tr(p p^dagger), Omega = tr(p^2); then
    //   g11 = 2k(T + Re O), g22 = 2k(T - Re O), g12 = -2k Im O,
    //   detg = 4 k^2 (T^2 - |O|^2)  (the stable form of g11 g22 - g12^2).
    double T = 0.0;
    cplx O(0.0, 0.0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        T += std::norm(p(i, j));
        O += p(i, j) * p(j, i);
      }
    g.g11.v[nd] = 2.0 * kappa * (T + O.real());
    g.g22.v[nd] = 2.0 * kappa * (T - O.real());
    g.g12.v[nd] = -2.0 * kappa * O.imag();
    g.detg.v[nd] = 4.0 * kappa * kappa * (T * T - std::norm(O));
  });
  return g;
}

std::vector<std::size_t> immersion_certificate(const RealField& detg, double rel_tol) {
  double mx = 0.0;
  for (std::size_t nd = 0; nd < detg.size(); ++nd) {
    if (detg.dom.is_boundary(nd)) continue;
    mx = std::max(mx, detg.v[nd]);
  }
  const double eps = rel_tol * mx;
  std::vector<std::size_t> flagged;
  for (std::size_t nd = 0; nd < detg.size(); ++nd) {
    if (detg.dom.is_boundary(nd)) continue;
    if (detg.v[nd] <= eps) flagged.push_back(nd);
  }
  return flagged;
}

RealField energy_density_field(const PullbackMetric& g) {
  RealField e(g.g11.dom);
  for (std::size_t nd = 0; nd < e.size(); ++nd) e.v[nd] = 0.5 * (g.g11.v[nd] + g.g22.v[nd]);
  return e;
}

RealField induced_curvature(const PullbackMetric& g, bool conformal,
                            std::vector<std::uint8_t>& valid) {
  const SurfaceDomain& dom = g.g11.dom;
  RealField K(dom);
  double mx = 0.0;
  for (std::size_t nd = 0; nd < g.detg.size(); ++nd)
    if (!dom.is_boundary(nd)) mx = std::max(mx, g.detg.v[nd]);
  const double eps = 1e-10 * mx;
  valid.assign(dom.size(), 0);
  const int a = dom.axis_nodes();
  for (std::size_t nd = 0; nd < dom.size(); ++nd) {
    bool inside = !dom.is_boundary(nd);
    if (dom.kind == SurfaceDomain::Kind::Patch) {
      // Curvature only where every stencil is centered: the two outermost
      // rings combine one-sided differences with the near-degenerate
      // Dirichlet data and the 1/detg^2 quotient amplifies their error.
      const int ix = static_cast<int>(nd % a), iy = static_cast<int>(nd / a);
      inside = std::min({ix, iy, dom.N - ix, dom.N - iy}) >= 2;
    }
    valid[nd] = (inside && g.detg.v[nd] > eps && g.detg.v[nd] > 0.0) ? 1 : 0;
  }

  if (conformal) {
    RealField psi(dom);
    for (std::size_t nd = 0; nd < dom.size(); ++nd)
      psi.v[nd] = g.g11.v[nd] > 0.0 ? 0.5 * std::log(g.g11.v[nd]) : 0.0;
    const RealField lp = laplacian(psi);
    for (std::size_t nd = 0; nd < dom.size(); ++nd)
      K.v[nd] = valid[nd] ? -lp.v[nd] / g.g11.v[nd] : 0.0;
    return K;
  }

  // Brioschi formula with the 4th-order frame derivatives.
  const RealField& E = g.g11;
  const RealField& F = g.g12;
  const RealField& G = g.g22;
  const RealField Ex = dx(E), Ey = dy(E);
  const RealField Fx = dx(F), Fy = dy(F);
  const RealField Gx = dx(G), Gy = dy(G);
  const RealField Eyy = dy(Ey), Gxx = dx(Gx), Fxy = dy(Fx);
  for (std::size_t nd = 0; nd < dom.size(); ++nd) {
    if (!valid[nd]) {
      K.v[nd] = 0.0;
      continue;
    }
    Eigen::Matrix3d m1, m2;
    m1 << -0.5 * Eyy.v[nd] + Fxy.v[nd] - 0.5 * Gxx.v[nd], 0.5 * Ex.v[nd],
        Fx.v[nd] - 0.5 * Ey.v[nd], Fy.v[nd] - 0.5 * Gx.v[nd], E.v[nd], F.v[nd],
        0.5 * Gy.v[nd], F.v[nd], G.v[nd];
    m2 << 0.0, 0.5 * Ey.v[nd], 0.5 * Gx.v[nd], 0.5 * Ey.v[nd], E.v[nd], F.v[nd],
        0.5 * Gx.v[nd], F.v[nd], G.v[nd];
    K.v[nd] = (m1.determinant() - m2.determinant()) / (g.detg.v[nd] * g.detg.v[nd]);
  }
  return K;
}

RealField ambient_sectional(const MatrixField& phi_hat, const RealField& detg, double kappa,
                            const std::vector<std::uint8_t>& valid) {
  RealField sec(phi_hat.dom);
  parallel_for(phi_hat.nodes(), [&](std::size_t nd) {
    if (!valid[nd]) {
      sec.v[nd] = 0.0;
      return;
    }
    const Mat p = phi_hat.at(nd);
    const Mat pd = p.adjoint();
    // [xi1, xi2] = -2i [p, p^dagger]; norm^2 = 4 ||[p, p^dagger]||_F^2.
    const Mat c = p * pd - pd * p;
    sec.v[nd] = -4.0 * kappa * c.squaredNorm() / detg.v[nd];
  });
  return sec;
}

RealField second_fundamental_norm(const RealField& K, const RealField& Sec,
                                  const std::vector<std::uint8_t>& valid) {
  RealField b(K.dom);
  for (std::size_t nd = 0; nd < K.size(); ++nd) {
    if (!valid[nd]) {
      b.v[nd] = 0.0;
      continue;
    }
    double v = 2.0 * (Sec.v[nd] - K.v[nd]);
    if (v < -1e-6)
      throw std::runtime_error("second_fundamental_norm: ||B||^2 = " + std::to_string(v) +
                               " at node " + std::to_string(nd) +
                               " (sign convention or solver failure)");
    if (v < 0.0 && v >= -1e-8) v = 0.0;
    b.v[nd] = v;
  }
  return b;
}

namespace {

GeometryReport geometry_from_phihat(const HiggsField& phi, const MatrixField& phi_hat,
                                    double kappa);

}  // namespace

GeometryReport compute_geometry(const HiggsField& phi, const HermitianMetricField& H,
                                double kappa) {
  return geometry_from_phihat(phi, gauge_normalize(phi, H), kappa);
}

GeometryReport compute_geometry(const HiggsField& phi, const MatrixField& H_matrix,
                                double kappa) {
  if (!(phi.dom == H_matrix.dom) || phi.n() != H_matrix.dim)
    throw std::invalid_argument("compute_geometry: dimension mismatch");
  MatrixField phi_hat(phi.dom, phi.n());
  parallel_for(phi_hat.nodes(), [&](std::size_t nd) {
    const Mat h = H_matrix.at(nd);
    phi_hat.at(nd) = hermitian_sqrt(h) * phi.phi.at(nd) * hermitian_inv_sqrt(h);
  });
  return geometry_from_phihat(phi, phi_hat, kappa);
}

namespace {

GeometryReport geometry_from_phihat(const HiggsField& phi, const MatrixField& phi_hat,
                                    double kappa) {
  GeometryReport rep;
  rep.dom = phi.dom;
  rep.kappa = kappa;

  rep.g = pullback_metric(phi_hat, kappa);
  rep.hopf = hopf_differential(phi, kappa);
  rep.energy_density = energy_density_field(rep.g);
  rep.total_energy = integrate(rep.energy_density);
  rep.harmonicity = harmonicity_defect(phi);
  rep.branch_nodes = immersion_certificate(rep.g.detg);

  double mn = std::numeric_limits<double>::infinity(), mx = -mn;
  for (std::size_t nd = 0; nd < rep.g.detg.size(); ++nd) {
    if (rep.dom.is_boundary(nd)) continue;
    mn = std::min(mn, rep.g.detg.v[nd]);
    mx = std::max(mx, rep.g.detg.v[nd]);
  }
  rep.min_detg = mn;
  rep.max_detg = mx;

  // Conformality: g11 - g22 and g12 both vanish iff hopf does.
  double aniso = 0.0, gmax = 0.0;
  for (std::size_t nd = 0; nd < rep.g.g11.size(); ++nd) {
    aniso = std::max(aniso,
                     std::abs(rep.g.g11.v[nd] - rep.g.g22.v[nd]) + std::abs(rep.g.g12.v[nd]));
    gmax = std::max(gmax, rep.g.g11.v[nd]);
  }
  rep.conformal = aniso < 1e-8 * gmax;
  rep.conformal_factor = rep.g.g11;

  rep.K = induced_curvature(rep.g, rep.conformal, rep.curvature_valid);
  rep.Sec = ambient_sectional(phi_hat, rep.g.detg, kappa, rep.curvature_valid);
  // The Gauss identity ||B||^2 = 2(Sec - K) presumes minimality, i.e. a
  // conformal run; otherwise the field stays empty.
  rep.gauss_valid = rep.conformal;
  rep.Bsq = rep.gauss_valid ? second_fundamental_norm(rep.K, rep.Sec, rep.curvature_valid)
                            : RealField(rep.dom);

  rep.valid_count = 0;
  for (auto b : rep.curvature_valid) rep.valid_count += b;
  rep.degenerate = rep.valid_count == 0;

  // Map-based Hopf coefficient vs kappa tr(phi^2), reported where nonzero.
  double num = 0.0, den = 0.0;
  for (std::size_t nd = 0; nd < rep.hopf.size(); ++nd) {
    num += std::abs(cplx(rep.g.g11.v[nd] - rep.g.g22.v[nd], -2.0 * rep.g.g12.v[nd]));
    den += std::abs(rep.hopf.v[nd]);
  }
  rep.hopf_map_ratio = den > 0.0 ? num / den : 0.0;
  return rep;
}

}  // namespace

}  // namespace hmlab
