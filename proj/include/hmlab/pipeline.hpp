#pragma once

#include <filesystem>
#include <optional>

#include "hmlab/config.hpp"
#include "hmlab/entropy.hpp"

namespace hmlab {

struct RunResult {
  SolveOutcome outcome;
  bool solved = false;
  bool synthetic = false;  // harmonicity defect above tolerance
  std::size_t fiducial_flagged = 0;
  GeometryReport geometry;
  EntropyReport entropy;
  double flat_curvature_sup = 0.0;
};

// build -> solve -> geometry -> entropy, in memory.
RunResult execute_solve(const RunConfig& cfg);

// Everything cmd_solve writes: config echo, outcome/timing JSON, phi / H
// snapshots, geometry and entropy reports, CSV.  timing.json is the one
// non-deterministic artifact (wall time); all other files are byte-stable.
void write_run_outputs(const RunConfig& cfg, const RunResult& res,
                       const std::filesystem::path& dir);

// Exit-code contract: 0 converged, 2 usage/config/IO, 3 solver failure.
int cmd_solve(const RunConfig& cfg, const std::filesystem::path& outdir);

// Recompute geometry/entropy from a run directory's snapshots; byte-identical
// output for an identical config.  `kappa_override` rescales the geometry.
int cmd_report(const std::filesystem::path& rundir, const std::filesystem::path& outdir,
               std::optional<double> kappa_override);

// Entropy report for a synthetic-metric manifest (.json).
int cmd_synthetic_report(const std::filesystem::path& manifest,
                         const std::filesystem::path& outdir);

int cmd_sweep(const RunConfig& cfg, const std::filesystem::path& outdir);

int cmd_lie_check(int n);

int cmd_oracle(int n, cplx c, double kappa);

}  // namespace hmlab
