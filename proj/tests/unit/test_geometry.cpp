#include <doctest.h>

#include <cmath>
#include <numbers>

#include "hmlab/geometry.hpp"
#include "hmlab/ops.hpp"
#include "hmlab/solver.hpp"

using namespace hmlab;

namespace {
constexpr double pi = std::numbers::pi;

double sup(const Mat& m) {
  double r = 0;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) r = std::max(r, std::abs(m(i, j)));
  return r;
}
}  // namespace

TEST_CASE("gauge normalization") {
  const SurfaceDomain torus = SurfaceDomain::torus(16);
  const LieBasis b2 = construct_principal_sl2(2);
  const HiggsField phi =
      build_hitchin_higgs(b2, {Differential::make_constant(1, cplx(1.0, 0.5))}, torus);

  SUBCASE("identity metric is a fixed point") {
    const HermitianMetricField id = HermitianMetricField::identity(torus, 2);
    CHECK(sup_abs_diff(gauge_normalize(phi, id), phi.phi) < 1e-15);
  }

  SUBCASE("conjugation identity for the adjoint") {
    std::vector<RealField> u(2, RealField(torus));
    for (std::size_t i = 0; i < u[0].v.size(); ++i) {
      u[0].v[i] = 0.3 + 0.1 * std::sin(2.0 * pi * (i % torus.N) / torus.N);
      u[1].v[i] = -u[0].v[i];
    }
    const HermitianMetricField H = HermitianMetricField::diagonal(torus, u);
    const MatrixField ph = gauge_normalize(phi, H);
    // adjoint of phihat w.r.t. identity equals the conjugated H-adjoint of phi.
    const MatrixField starH = adjoint_star(phi, H);
    const MatrixField hs = H.matrix_sqrt();
    const MatrixField hi = H.matrix_inv_sqrt();
    for (std::size_t nd = 0; nd < ph.nodes(); ++nd) {
      const Mat lhs = Mat(ph.at(nd)).adjoint();
      const Mat rhs = Mat(hs.at(nd)) * Mat(starH.at(nd)) * Mat(hi.at(nd));
      CHECK(sup(lhs - rhs) < 1e-12);
    }
  }
}

TEST_CASE("pullback metric") {
  const SurfaceDomain torus = SurfaceDomain::torus(16);

  SUBCASE("fuchsian point in identity gauge") {
    // phihat = E_21: g = diag(2, 2) kappa, g12 = 0, detg = 4 kappa^2.
    MatrixField ph(torus, 2);
    for (std::size_t nd = 0; nd < ph.nodes(); ++nd) ph.at(nd)(1, 0) = 1.0;
    for (double kappa : {1.0, 2.5}) {
      const PullbackMetric g = pullback_metric(ph, kappa);
      for (std::size_t nd = 0; nd < torus.size(); ++nd) {
        CHECK(g.g11.v[nd] == doctest::Approx(2.0 * kappa).epsilon(1e-15));
        CHECK(g.g22.v[nd] == doctest::Approx(2.0 * kappa).epsilon(1e-15));
        CHECK(g.g12.v[nd] == 0.0);
        CHECK(g.detg.v[nd] == doctest::Approx(4.0 * kappa * kappa).epsilon(1e-15));
      }
    }
  }

  SUBCASE("zero field is degenerate and flagged, not an error") {
    const MatrixField zero(torus, 2);
    const PullbackMetric g = pullback_metric(zero, 1.0);
    CHECK(sup_abs(g.detg) == 0.0);
    const auto flags = immersion_certificate(g.detg);
    CHECK(flags.size() == torus.size());
  }

  SUBCASE("circle action leaves detg and the energy trace invariant") {
    const LieBasis b3 = construct_principal_sl2(3);
    const HiggsField phi = build_hitchin_higgs(
        b3,
        {Differential::make_constant(1, cplx(0.4, -0.3)), Differential::make_constant(2, 1.0)},
        torus);
    const PullbackMetric g0 = pullback_metric(phi.phi, 1.0);
    MatrixField rot = circle_action(phi, pi / 3.0);
    const PullbackMetric g1 = pullback_metric(rot, 1.0);
    for (std::size_t nd = 0; nd < torus.size(); ++nd) {
      CHECK(std::abs(g1.detg.v[nd] - g0.detg.v[nd]) < 1e-12 * (1.0 + std::abs(g0.detg.v[nd])));
      CHECK(std::abs((g1.g11.v[nd] + g1.g22.v[nd]) - (g0.g11.v[nd] + g0.g22.v[nd])) < 1e-12);
    }
  }
}

TEST_CASE("immersion certificate localizes synthetic zeros") {
  const SurfaceDomain patch = SurfaceDomain::patch(16, 1.0);
  // alpha-only field (no e_{-1}): phihat = q(z) E_12 with q(0) = 0.
  MatrixField ph(patch, 2);
  for (int iy = 0; iy <= patch.N; ++iy)
    for (int ix = 0; ix <= patch.N; ++ix)
      ph.at(patch.index(ix, iy))(0, 1) = patch.z_at(ix, iy);
  const PullbackMetric g = pullback_metric(ph, 1.0);
  const auto flags = immersion_certificate(g.detg);
  // z = 0 is the center node (N even).
  const std::size_t center = patch.index(patch.N / 2, patch.N / 2);
  CHECK(std::find(flags.begin(), flags.end(), center) != flags.end());
  // But not, say, a generic off-center node.
  CHECK(std::find(flags.begin(), flags.end(), patch.index(3, 4)) == flags.end());
}

TEST_CASE("energy density") {
  const SurfaceDomain torus = SurfaceDomain::torus(16);
  SUBCASE("fuchsian density is 2 kappa") {
    MatrixField ph(torus, 2);
    for (std::size_t nd = 0; nd < ph.nodes(); ++nd) ph.at(nd)(1, 0) = 1.0;
    const double kappa = 1.5;
    const RealField e = energy_density_field(pullback_metric(ph, kappa));
    for (double v : e.v) CHECK(v == doctest::Approx(2.0 * kappa).epsilon(1e-15));
  }
  SUBCASE("zero map has zero energy") {
    const RealField e = energy_density_field(pullback_metric(MatrixField(torus, 2), 1.0));
    CHECK(sup_abs(e) == 0.0);
  }
  SUBCASE("circle action preserves the total energy") {
    const LieBasis b3 = construct_principal_sl2(3);
    const HiggsField phi = build_hitchin_higgs(
        b3, {Differential::make_constant(2, cplx(1.0, 0.7))}, torus);
    const RealField e0 = energy_density_field(pullback_metric(phi.phi, 1.0));
    const RealField e1 =
        energy_density_field(pullback_metric(circle_action(phi, pi / 3.0), 1.0));
    CHECK(std::abs(integrate(e0) - integrate(e1)) < 1e-12 * std::abs(integrate(e0)));
  }
}

TEST_CASE("induced curvature") {
  SUBCASE("synthetic round conformal factor on a patch, both formulas") {
    // psi = -log(1 + |z|^2) has K = +4 for the metric e^{2 psi} |dz|^2.
    const SurfaceDomain patch = SurfaceDomain::patch(128, 1.0);
    PullbackMetric g;
    g.g11 = RealField(patch);
    g.g12 = RealField(patch);
    g.g22 = RealField(patch);
    g.detg = RealField(patch);
    for (int iy = 0; iy <= patch.N; ++iy)
      for (int ix = 0; ix <= patch.N; ++ix) {
        const double r2 = std::norm(patch.z_at(ix, iy));
        const double e2psi = 1.0 / ((1.0 + r2) * (1.0 + r2));
        const std::size_t nd = patch.index(ix, iy);
        g.g11.v[nd] = g.g22.v[nd] = e2psi;
        g.detg.v[nd] = e2psi * e2psi;
      }
    std::vector<std::uint8_t> valid;
    const RealField Kc = induced_curvature(g, true, valid);
    double worst_c = 0;
    for (std::size_t nd = 0; nd < patch.size(); ++nd)
      if (valid[nd]) worst_c = std::max(worst_c, std::abs(Kc.v[nd] - 4.0));
    CHECK(worst_c < 1e-6);

    // Brioschi converges at 4th order; its error peaks at the metric's
    // curvature maximum, so it needs the finer grid for the same tolerance.
    const SurfaceDomain fine = SurfaceDomain::patch(256, 1.0);
    PullbackMetric gf;
    gf.g11 = RealField(fine);
    gf.g12 = RealField(fine);
    gf.g22 = RealField(fine);
    gf.detg = RealField(fine);
    for (int iy = 0; iy <= fine.N; ++iy)
      for (int ix = 0; ix <= fine.N; ++ix) {
        const double r2 = std::norm(fine.z_at(ix, iy));
        const double e2psi = 1.0 / ((1.0 + r2) * (1.0 + r2));
        const std::size_t nd = fine.index(ix, iy);
        gf.g11.v[nd] = gf.g22.v[nd] = e2psi;
        gf.detg.v[nd] = e2psi * e2psi;
      }
    const RealField Kb = induced_curvature(gf, false, valid);
    double worst_b = 0;
    for (int iy = 4; iy <= fine.N - 4; ++iy)
      for (int ix = 4; ix <= fine.N - 4; ++ix)
        worst_b = std::max(worst_b, std::abs(Kb.at(ix, iy) - 4.0));
    CHECK(worst_b < 1e-6);
  }

  SUBCASE("Brioschi on a spectral torus metric is near-exact") {
    const SurfaceDomain torus = SurfaceDomain::torus(64);
    PullbackMetric g;
    g.g11 = RealField(torus);
    g.g12 = RealField(torus, 0.0);
    g.g22 = RealField(torus);
    g.detg = RealField(torus);
    RealField psi(torus);
    for (int iy = 0; iy < torus.N; ++iy)
      for (int ix = 0; ix < torus.N; ++ix) {
        psi.at(ix, iy) =
            0.2 * std::cos(2.0 * pi * ix / torus.N) * std::cos(2.0 * pi * iy / torus.N);
        const double e2psi = std::exp(2.0 * psi.at(ix, iy));
        const std::size_t nd = torus.index(ix, iy);
        g.g11.v[nd] = g.g22.v[nd] = e2psi;
        g.detg.v[nd] = e2psi * e2psi;
      }
    std::vector<std::uint8_t> valid;
    const RealField Kb = induced_curvature(g, false, valid);
    // Analytic: K = -e^{-2 psi} (Delta psi), Delta cos cos = -8 pi^2 cos cos.
    double worst = 0;
    for (int iy = 0; iy < torus.N; ++iy)
      for (int ix = 0; ix < torus.N; ++ix) {
        const double analytic = 8.0 * pi * pi * psi.at(ix, iy) * std::exp(-2.0 * psi.at(ix, iy));
        worst = std::max(worst, std::abs(Kb.at(ix, iy) - analytic));
      }
    CHECK(worst < 1e-8);
  }

  SUBCASE("flat identity metric has zero curvature via Brioschi") {
    const SurfaceDomain patch = SurfaceDomain::patch(32, 1.0);
    PullbackMetric g;
    g.g11 = RealField(patch, 1.0);
    g.g12 = RealField(patch, 0.0);
    g.g22 = RealField(patch, 1.0);
    g.detg = RealField(patch, 1.0);
    std::vector<std::uint8_t> valid;
    const RealField K = induced_curvature(g, false, valid);
    CHECK(sup_abs(K) < 1e-10);
  }
}

TEST_CASE("ambient sectional curvature") {
  const SurfaceDomain torus = SurfaceDomain::torus(16);

  SUBCASE("fuchsian value -2 at kappa = 1") {
    MatrixField ph(torus, 2);
    for (std::size_t nd = 0; nd < ph.nodes(); ++nd) ph.at(nd)(1, 0) = 1.0;
    const PullbackMetric g = pullback_metric(ph, 1.0);
    std::vector<std::uint8_t> valid(torus.size(), 1);
    const RealField sec = ambient_sectional(ph, g.detg, 1.0, valid);
    for (double v : sec.v) CHECK(v == doctest::Approx(-2.0).epsilon(1e-14));
  }

  SUBCASE("collinear tangent plane is excluded as degenerate") {
    // Hermitian phihat makes xi_2 = 0: no two-plane, detg = 0.
    MatrixField ph(torus, 2);
    for (std::size_t nd = 0; nd < ph.nodes(); ++nd) {
      ph.at(nd)(0, 1) = 1.0;
      ph.at(nd)(1, 0) = 1.0;
    }
    const PullbackMetric g = pullback_metric(ph, 1.0);
    std::vector<std::uint8_t> valid;
    induced_curvature(g, true, valid);
    for (auto b : valid) CHECK(b == 0);
  }

  SUBCASE("n = 3 cyclic constant solve: Sec constant and zero (semiflat)") {
    const LieBasis b3 = construct_principal_sl2(3);
    const HiggsField phi =
        build_hitchin_higgs(b3, {Differential::make_constant(2, 1.0)}, torus);
    SolveParams prm;
    prm.tol = 1e-11;
    const auto [H, out] = solve_harmonic_metric(phi, default_initial_metric(phi), prm);
    REQUIRE(out.status == SolveOutcome::Status::Converged);
    const GeometryReport rep = compute_geometry(phi, H, 1.0);
    REQUIRE(rep.valid_count == torus.size());
    double lo = 1e300, hi = -1e300;
    for (std::size_t nd = 0; nd < torus.size(); ++nd) {
      lo = std::min(lo, rep.Sec.v[nd]);
      hi = std::max(hi, rep.Sec.v[nd]);
    }
    CHECK(hi - lo < 1e-10);          // equal across nodes
    CHECK(std::abs(hi) < 1e-10);     // the constant solution is flat
    CHECK(rep.min_detg > 0.1);       // and immersed
    CHECK(rep.branch_nodes.empty());
  }
}

TEST_CASE("second fundamental form norm") {
  const SurfaceDomain torus = SurfaceDomain::torus(16);
  std::vector<std::uint8_t> valid(torus.size(), 1);

  SUBCASE("gauss arithmetic with clipping") {
    RealField K(torus, -2.0), sec(torus, -2.0 + 4e-9);
    const RealField b = second_fundamental_norm(K, sec, valid);
    for (double v : b.v) CHECK(v == doctest::Approx(8e-9).epsilon(1e-6));
    RealField sec_low(torus, -2.0 - 4e-9);
    const RealField b2 = second_fundamental_norm(K, sec_low, valid);
    for (double v : b2.v) CHECK(v == 0.0);  // clipped noise
  }

  SUBCASE("inconsistent inputs are an error") {
    RealField K(torus, -1.0), sec(torus, -1.5);
    CHECK_THROWS_AS(second_fundamental_norm(K, sec, valid), std::runtime_error);
  }
}

TEST_CASE("fuchsian patch run is totally geodesic") {
  const SurfaceDomain patch = SurfaceDomain::patch(48, 1.0);
  const LieBasis b2 = construct_principal_sl2(2);
  const HiggsField phi = build_hitchin_higgs(b2, {}, patch);
  SolveParams prm;
  prm.tol = 1e-10;
  prm.max_iter = 800;
  const auto [H, out] = solve_harmonic_metric(phi, default_initial_metric(phi), prm);
  REQUIRE(out.status == SolveOutcome::Status::Converged);
  const GeometryReport rep = compute_geometry(phi, H, 1.0);
  CHECK(rep.conformal);
  CHECK(rep.branch_nodes.empty());
  CHECK(rep.min_detg > 0.0);
  double worst_b = 0, worst_kgap = 0, worst_sec = 0;
  for (std::size_t nd = 0; nd < patch.size(); ++nd) {
    if (!rep.curvature_valid[nd]) continue;
    worst_b = std::max(worst_b, std::abs(rep.Bsq.v[nd]));
    worst_kgap = std::max(worst_kgap, std::abs(rep.K.v[nd] - rep.Sec.v[nd]));
    worst_sec = std::max(worst_sec, std::abs(rep.Sec.v[nd] + 2.0));
  }
  CHECK(worst_b < 1e-6);
  CHECK(worst_kgap < 1e-6);
  CHECK(worst_sec < 1e-8);  // Sec = -2 for n = 2, kappa = 1
}

TEST_CASE("n = 3 cubic-differential patch run") {
  const SurfaceDomain patch = SurfaceDomain::patch(48, 1.2);
  const LieBasis b3 = construct_principal_sl2(3);
  const HiggsField phi = build_hitchin_higgs(
      b3, {Differential::make_poly(2, {cplx(0, 0), cplx(1, 0)})}, patch);
  SolveParams prm;
  prm.tol = 1e-9;
  prm.max_iter = 800;
  const auto [H, out] = solve_harmonic_metric(phi, default_initial_metric(phi), prm);
  REQUIRE(out.status == SolveOutcome::Status::Converged);
  const GeometryReport rep = compute_geometry(phi, H, 1.0);
  CHECK(rep.conformal);
  CHECK(rep.branch_nodes.empty());
  CHECK(rep.min_detg > 0.0);

  // Curvature sandwich K <= Sec <= 0 and ||B||^2 >= 0; ||B||^2 peaks near the
  // zero of the differential.
  double bmax = -1;
  std::size_t argmax = 0;
  for (std::size_t nd = 0; nd < patch.size(); ++nd) {
    if (!rep.curvature_valid[nd]) continue;
    CHECK(rep.Sec.v[nd] <= 1e-10);
    CHECK(rep.K.v[nd] <= rep.Sec.v[nd] + 1e-8);
    CHECK(rep.Bsq.v[nd] >= 0.0);
    if (rep.Bsq.v[nd] > bmax) {
      bmax = rep.Bsq.v[nd];
      argmax = nd;
    }
  }
  CHECK(bmax > 0.1);
  CHECK(std::abs(patch.z_at(static_cast<int>(argmax % (patch.N + 1)),
                            static_cast<int>(argmax / (patch.N + 1)))) < 0.2);
}

TEST_CASE("kappa scaling laws") {
  const SurfaceDomain patch = SurfaceDomain::patch(32, 1.0);
  const LieBasis b2 = construct_principal_sl2(2);
  const HiggsField phi = build_hitchin_higgs(
      b2, {Differential::make_poly(1, {cplx(0.4, 0), cplx(1, 0)})}, patch);
  SolveParams prm;
  prm.tol = 1e-10;
  prm.max_iter = 600;
  const auto [H, out] = solve_harmonic_metric(phi, default_initial_metric(phi), prm);
  REQUIRE(out.status == SolveOutcome::Status::Converged);
  const GeometryReport r1 = compute_geometry(phi, H, 1.0);
  const GeometryReport r2 = compute_geometry(phi, H, 2.0);
  double worst = 0;
  for (std::size_t nd = 0; nd < patch.size(); ++nd) {
    worst = std::max(worst, std::abs(r2.g.g11.v[nd] - 2.0 * r1.g.g11.v[nd]));
    worst = std::max(worst, std::abs(r2.g.g12.v[nd] - 2.0 * r1.g.g12.v[nd]));
    worst = std::max(worst, std::abs(r2.g.detg.v[nd] - 4.0 * r1.g.detg.v[nd]));
    if (r1.curvature_valid[nd] && r2.curvature_valid[nd]) {
      worst = std::max(worst, std::abs(r2.Sec.v[nd] - 0.5 * r1.Sec.v[nd]));
      worst = std::max(worst, std::abs(r2.K.v[nd] - 0.5 * r1.K.v[nd]));
    }
  }
  CHECK(worst < 1e-12);
  // The map-based Hopf coefficient is 4x the trace form for any kappa.
  CHECK(r1.hopf_map_ratio == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(r2.hopf_map_ratio == doctest::Approx(4.0).epsilon(1e-12));
}
