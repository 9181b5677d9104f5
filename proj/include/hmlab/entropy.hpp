#pragma once

#include <filesystem>

#include "hmlab/geometry.hpp"

namespace hmlab {

struct EntropyReport {
  enum class Source { SolvedRun, SyntheticMetric };
  Source source = Source::SolvedRun;
  // Compact data (torus runs, synthetic metrics) yields an entropy lower
  // bound; patch runs only a local integrand statistic (no compact quotient).
  bool compact = true;
  bool degenerate = false;  // metric collapsed: no bound
  double volume = 0.0;
  double bound = 0.0;  // (1/Vol) integral of sqrt(max(0, -K)) dV
  int chi = 0;
  bool has_gauss_bonnet = false;
  double gauss_bonnet_defect = 0.0;  // |∫ K dV - 2 pi chi|
  double integrand_min = 0.0, integrand_mean = 0.0, integrand_max = 0.0;
  // Agreement between the K-form and the Gauss-form sqrt(-Sec + ||B||^2/2)
  // of the integrand, when the run is minimal.
  bool has_cross_check = false;
  double cross_check_gap = 0.0;
};

// Core bound arithmetic on explicit (K, dV) data; `mask` restricts the node
// set (empty means all nodes).  dV is the area density per node with respect
// to the domain's flat quadrature.  Throws when K exceeds +1e-6 somewhere in
// the evaluation set (non-positive curvature hypothesis violated).
EntropyReport manning_bound(const RealField& K, const RealField& dV,
                            const std::vector<std::uint8_t>& mask = {});

double gauss_bonnet_defect(const RealField& K, const RealField& dV, int chi,
                           const std::vector<std::uint8_t>& mask = {});

// Full entropy stage for a solved run: dV = sqrt(detg), evaluation on the
// curvature-valid set, Gauss cross-check on minimal runs, Gauss-Bonnet with
// chi = 0 on the torus.  Degenerate geometry yields a degenerate report.
EntropyReport entropy_from_geometry(const GeometryReport& geo);

struct SyntheticMetric {
  RealField K;
  RealField dV;
  int chi = 0;
};

// Manifest: {"format":"hmlab-synth-v1","chi":-2,"K":"...fld","dV":"...fld"},
// fld paths relative to the manifest.  Validates finiteness and dV > 0.
SyntheticMetric load_synthetic_metric(const std::filesystem::path& manifest);

EntropyReport entropy_from_synthetic(const SyntheticMetric& m);

// Window statistics for the flatness sweep: mean/sup of |K| and ||B||^2 and
// the mean Manning integrand over the centered half-patch window.
struct WindowStats {
  double mean_abs_K = 0.0, sup_abs_K = 0.0;
  double mean_Bsq = 0.0, sup_Bsq = 0.0;
  double mean_integrand = 0.0;
  std::size_t nodes = 0;
};
WindowStats window_stats(const GeometryReport& geo);

}  // namespace hmlab
