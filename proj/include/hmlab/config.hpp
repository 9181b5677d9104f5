#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "hmlab/higgs.hpp"
#include "hmlab/solver.hpp"

namespace hmlab {

// Plain-text run configuration, `key = value` per line, '#' comments.
// Keys: group.n; surface.kind/N/tau/L; alpha.<k> (complex constant or
// `poly (re,im) ...`); solver.tol/max_iter/dt/method; metric.kappa;
// output.dir; sweep.t.  Unknown keys are rejected.
struct RunConfig {
  int n = 2;
  SurfaceDomain::Kind kind = SurfaceDomain::Kind::Torus;
  int N = 64;
  cplx tau{0.0, 1.0};
  double L = 1.0;
  std::vector<Differential> alphas;
  double tol = 1e-8;
  int max_iter = 2000;
  double dt = 1.0;
  SolveParams::Method method = SolveParams::Method::Auto;
  double kappa = 1.0;
  std::string output_dir;
  std::vector<double> sweep_t;

  SurfaceDomain domain() const;
  SolveParams solver_params() const;
  // Canonical echo text (fixed key order), reparseable.
  std::string canonical() const;

  static RunConfig parse_string(const std::string& text, const std::string& origin = "<config>");
  static RunConfig parse_file(const std::filesystem::path& path);
};

}  // namespace hmlab
