#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "hmlab/entropy.hpp"
#include "hmlab/snapshot.hpp"
#include "hmlab/solver.hpp"

using namespace hmlab;

namespace {
constexpr double pi = std::numbers::pi;

std::filesystem::path temp_dir() {
  auto p = std::filesystem::temp_directory_path() / "hmlab_entropy_test";
  std::filesystem::create_directories(p);
  return p;
}
}  // namespace

TEST_CASE("manning bound arithmetic") {
  const SurfaceDomain dom = SurfaceDomain::torus(32);

  SUBCASE("constant curvature -1 gives bound 1") {
    const EntropyReport r = manning_bound(RealField(dom, -1.0), RealField(dom, 4.0 * pi));
    CHECK(r.bound == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(r.volume == doctest::Approx(4.0 * pi).epsilon(1e-13));
  }

  SUBCASE("flat data gives bound 0") {
    const EntropyReport r = manning_bound(RealField(dom, 0.0), RealField(dom, 1.0));
    CHECK(r.bound == 0.0);
  }

  SUBCASE("piecewise {-1, -4} on equal areas gives 3/2") {
    RealField K(dom);
    for (int iy = 0; iy < dom.N; ++iy)
      for (int ix = 0; ix < dom.N; ++ix) K.at(ix, iy) = ix < dom.N / 2 ? -1.0 : -4.0;
    const EntropyReport r = manning_bound(K, RealField(dom, 1.0));
    CHECK(r.bound == doctest::Approx(1.5).epsilon(1e-13));
  }

  SUBCASE("positive curvature beyond tolerance is rejected") {
    RealField K(dom, 0.0);
    K.v[5] = 1e-3;
    CHECK_THROWS_AS(manning_bound(K, RealField(dom, 1.0)), std::invalid_argument);
  }

  SUBCASE("tiny positive curvature is clipped, not rejected") {
    RealField K(dom, -1.0);
    K.v[7] = 5e-11;
    const EntropyReport r = manning_bound(K, RealField(dom, 1.0));
    CHECK(r.bound < 1.0);
    CHECK(r.bound > 0.99);
  }

  SUBCASE("scale law: g -> lambda^2 g divides the bound by lambda") {
    RealField K(dom);
    RealField dV(dom);
    for (int iy = 0; iy < dom.N; ++iy)
      for (int ix = 0; ix < dom.N; ++ix) {
        K.at(ix, iy) = -1.0 - 0.5 * std::pow(std::sin(2.0 * pi * ix / dom.N), 2);
        dV.at(ix, iy) = 1.0 + 0.25 * std::cos(2.0 * pi * iy / dom.N);
      }
    const double lambda = 2.0;
    RealField K2 = K, dV2 = dV;
    for (double& v : K2.v) v /= lambda * lambda;
    for (double& v : dV2.v) v *= lambda * lambda;
    const EntropyReport a = manning_bound(K, dV);
    const EntropyReport b = manning_bound(K2, dV2);
    CHECK(b.bound == doctest::Approx(a.bound / lambda).epsilon(1e-14));
  }
}

TEST_CASE("gauss-bonnet check") {
  const SurfaceDomain dom = SurfaceDomain::torus(32);
  SUBCASE("hyperbolic genus 2 closes to chi = -2") {
    CHECK(gauss_bonnet_defect(RealField(dom, -1.0), RealField(dom, 4.0 * pi), -2) < 1e-12);
  }
  SUBCASE("inconsistent data reports a positive defect, no error") {
    const double d = gauss_bonnet_defect(RealField(dom, -1.0), RealField(dom, 4.0 * pi), 0);
    CHECK(d == doctest::Approx(4.0 * pi).epsilon(1e-12));
  }
  SUBCASE("patch data rejected: not compact") {
    const SurfaceDomain patch = SurfaceDomain::patch(16, 1.0);
    CHECK_THROWS_AS(gauss_bonnet_defect(RealField(patch, -1.0), RealField(patch, 1.0), -2),
                    std::invalid_argument);
  }
}

TEST_CASE("synthetic metric loader") {
  const auto dir = temp_dir();
  const SurfaceDomain dom = SurfaceDomain::torus(16);

  SUBCASE("round trip with a manifest") {
    save_fld(dir / "K.fld", RealField(dom, -1.0));
    save_fld(dir / "dV.fld", RealField(dom, 4.0 * pi));
    std::ofstream(dir / "m.json")
        << R"({"format":"hmlab-synth-v1","chi":-2,"K":"K.fld","dV":"dV.fld"})";
    const SyntheticMetric m = load_synthetic_metric(dir / "m.json");
    CHECK(m.chi == -2);
    const EntropyReport r = entropy_from_synthetic(m);
    CHECK(r.bound == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.gauss_bonnet_defect < 1e-12);
  }

  SUBCASE("truncated payload names the byte counts") {
    save_fld(dir / "trunc.fld", RealField(dom, -1.0));
    const auto full = std::filesystem::file_size(dir / "trunc.fld");
    std::filesystem::resize_file(dir / "trunc.fld", full - 64);
    CHECK_THROWS_WITH_AS(load_real_fld(dir / "trunc.fld"), doctest::Contains("expected"),
                         std::runtime_error);
  }

  SUBCASE("header/grid mismatch names both shapes") {
    // Declare N = 32 but store a 16^2 payload.
    std::ofstream out(dir / "mismatch.fld", std::ios::binary);
    out << R"({"format":"hmlab-fld-v1","kind":"torus","N":32,"tau":[0.0,1.0],"value":"scalar","dim":1})"
        << "\n";
    std::vector<cplx> payload(16 * 16, cplx(-1.0, 0.0));
    out.write(reinterpret_cast<const char*>(payload.data()),
              static_cast<std::streamsize>(payload.size() * sizeof(cplx)));
    out.close();
    CHECK_THROWS_WITH_AS(load_real_fld(dir / "mismatch.fld"), doctest::Contains("1024"),
                         std::runtime_error);
  }

  SUBCASE("non-positive dV rejected") {
    save_fld(dir / "K2.fld", RealField(dom, -1.0));
    save_fld(dir / "dV2.fld", RealField(dom, 0.0));
    std::ofstream(dir / "m2.json")
        << R"({"format":"hmlab-synth-v1","chi":-2,"K":"K2.fld","dV":"dV2.fld"})";
    CHECK_THROWS_WITH_AS(load_synthetic_metric(dir / "m2.json"), doctest::Contains("positive"),
                         std::runtime_error);
  }
}

TEST_CASE("entropy from solved runs") {
  SUBCASE("flat cyclic torus run: bound 0, gauss-bonnet defect ~ 0, chi = 0") {
    const SurfaceDomain torus = SurfaceDomain::torus(32);
    const LieBasis b3 = construct_principal_sl2(3);
    const HiggsField phi =
        build_hitchin_higgs(b3, {Differential::make_constant(2, 1.0)}, torus);
    SolveParams prm;
    prm.tol = 1e-11;
    const auto [H, out] = solve_harmonic_metric(phi, default_initial_metric(phi), prm);
    REQUIRE(out.status == SolveOutcome::Status::Converged);
    const GeometryReport geo = compute_geometry(phi, H, 1.0);
    const EntropyReport ent = entropy_from_geometry(geo);
    CHECK(ent.compact);
    CHECK_FALSE(ent.degenerate);
    CHECK(std::abs(ent.bound) < 1e-9);
    CHECK(ent.has_gauss_bonnet);
    CHECK(ent.gauss_bonnet_defect < 1e-9);
    CHECK(ent.has_cross_check);
    CHECK(ent.cross_check_gap < 1e-8);
  }

  SUBCASE("non-flat patch run reports a positive local statistic") {
    const SurfaceDomain patch = SurfaceDomain::patch(48, 1.2);
    const LieBasis b3 = construct_principal_sl2(3);
    const HiggsField phi = build_hitchin_higgs(
        b3, {Differential::make_poly(2, {cplx(0, 0), cplx(1, 0)})}, patch);
    SolveParams prm;
    prm.tol = 1e-9;
    prm.max_iter = 1500;
    const auto [H, out] = solve_harmonic_metric(phi, default_initial_metric(phi), prm);
    REQUIRE(out.status == SolveOutcome::Status::Converged);
    const GeometryReport geo = compute_geometry(phi, H, 1.0);
    const EntropyReport ent = entropy_from_geometry(geo);
    CHECK_FALSE(ent.compact);  // local statistic, not an entropy bound
    CHECK(ent.bound > 0.0);
    CHECK(ent.has_cross_check);
    CHECK(ent.cross_check_gap < 1e-8);
  }

  SUBCASE("window stats on a patch run") {
    const SurfaceDomain patch = SurfaceDomain::patch(32, 1.0);
    const LieBasis b2 = construct_principal_sl2(2);
    const HiggsField phi = build_hitchin_higgs(b2, {}, patch);  // fuchsian
    SolveParams prm;
    prm.tol = 1e-9;
    prm.max_iter = 1000;
    const auto [H, out] = solve_harmonic_metric(phi, default_initial_metric(phi), prm);
    REQUIRE(out.status == SolveOutcome::Status::Converged);
    const GeometryReport geo = compute_geometry(phi, H, 1.0);
    const WindowStats w = window_stats(geo);
    CHECK(w.nodes > 0);
    CHECK(w.mean_abs_K == doctest::Approx(2.0).epsilon(1e-4));
    CHECK(w.mean_integrand == doctest::Approx(std::sqrt(2.0)).epsilon(1e-4));
  }
}
