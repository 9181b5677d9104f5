#include "hmlab/entropy.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include <json.hpp>

#include "hmlab/ops.hpp"
#include "hmlab/snapshot.hpp"

namespace hmlab {
namespace {

constexpr double pi = std::numbers::pi;

RealField masked(const RealField& f, const std::vector<std::uint8_t>& mask) {
  if (mask.empty()) return f;
  RealField out = f;
  for (std::size_t i = 0; i < out.v.size(); ++i)
    if (!mask[i]) out.v[i] = 0.0;
  return out;
}

}  // namespace

EntropyReport manning_bound(const RealField& K, const RealField& dV,
                            const std::vector<std::uint8_t>& mask) {
  if (!(K.dom == dV.dom)) throw std::invalid_argument("manning_bound: mismatched domains");
  EntropyReport rep;
  RealField integrand(K.dom);
  double imin = std::numeric_limits<double>::infinity(), imax = 0.0, isum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < K.size(); ++i) {
    if (!mask.empty() && !mask[i]) continue;
    if (K.v[i] > 1e-6)
      throw std::invalid_argument("manning_bound: K = " + std::to_string(K.v[i]) + " at node " +
                                  std::to_string(i) + " violates non-positive curvature");
    integrand.v[i] = std::sqrt(std::max(0.0, -K.v[i]));
    imin = std::min(imin, integrand.v[i]);
    imax = std::max(imax, integrand.v[i]);
    isum += integrand.v[i];
    ++count;
  }
  const RealField dvm = masked(dV, mask);
  rep.volume = integrate(RealField(K.dom, 1.0), dvm);
  const double total = integrate(integrand, dvm);
  if (!(rep.volume > 0.0)) {
    rep.degenerate = true;
    rep.bound = 0.0;
    return rep;
  }
  rep.bound = total / rep.volume;
  rep.integrand_min = count ? imin : 0.0;
  rep.integrand_max = imax;
  rep.integrand_mean = count ? isum / static_cast<double>(count) : 0.0;
  return rep;
}

double gauss_bonnet_defect(const RealField& K, const RealField& dV, int chi,
                           const std::vector<std::uint8_t>& mask) {
  if (K.dom.kind == SurfaceDomain::Kind::Patch)
    throw std::invalid_argument("gauss_bonnet_defect: patch data is not compact");
  const RealField km = masked(K, mask);
  const double total = integrate(km, masked(dV, mask));
  return std::abs(total - 2.0 * pi * chi);
}

EntropyReport entropy_from_geometry(const GeometryReport& geo) {
  EntropyReport rep;
  rep.source = EntropyReport::Source::SolvedRun;
  rep.compact = geo.dom.kind == SurfaceDomain::Kind::Torus;
  rep.chi = 0;
  if (geo.degenerate) {
    rep.degenerate = true;
    return rep;
  }
  RealField dV(geo.dom);
  for (std::size_t i = 0; i < dV.size(); ++i)
    dV.v[i] = geo.g.detg.v[i] > 0.0 ? std::sqrt(geo.g.detg.v[i]) : 0.0;

  rep = manning_bound(geo.K, dV, geo.curvature_valid);
  rep.source = EntropyReport::Source::SolvedRun;
  rep.compact = geo.dom.kind == SurfaceDomain::Kind::Torus;
  rep.chi = 0;
  if (rep.degenerate) return rep;

  if (rep.compact) {
    rep.has_gauss_bonnet = true;
    rep.gauss_bonnet_defect = gauss_bonnet_defect(geo.K, dV, 0, geo.curvature_valid);
  }

  if (geo.gauss_valid) {
    // Same bound through the Gauss identity sqrt(-Sec + ||B||^2 / 2).
    RealField integrand(geo.dom);
    for (std::size_t i = 0; i < integrand.size(); ++i) {
      if (!geo.curvature_valid[i]) continue;
      integrand.v[i] = std::sqrt(std::max(0.0, -geo.Sec.v[i] + 0.5 * geo.Bsq.v[i]));
    }
    const RealField dvm = masked(dV, geo.curvature_valid);
    const double alt = integrate(integrand, dvm) / rep.volume;
    rep.has_cross_check = true;
    rep.cross_check_gap = std::abs(alt - rep.bound);
  }
  return rep;
}

SyntheticMetric load_synthetic_metric(const std::filesystem::path& manifest) {
  std::ifstream in(manifest);
  if (!in) throw std::runtime_error("cannot open " + manifest.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw std::runtime_error(manifest.string() + ": bad manifest: " + e.what());
  }
  if (j.value("format", "") != std::string("hmlab-synth-v1"))
    throw std::runtime_error(manifest.string() + ": unknown format");
  SyntheticMetric m;
  m.chi = j.at("chi");
  const auto dir = manifest.parent_path();
  m.K = load_real_fld(dir / j.at("K").get<std::string>());
  m.dV = load_real_fld(dir / j.at("dV").get<std::string>());
  if (!(m.K.dom == m.dV.dom))
    throw std::runtime_error(manifest.string() + ": K and dV live on different grids");
  for (double v : m.dV.v)
    if (!(v > 0.0)) throw std::runtime_error(manifest.string() + ": dV must be positive");
  return m;
}

EntropyReport entropy_from_synthetic(const SyntheticMetric& m) {
  EntropyReport rep = manning_bound(m.K, m.dV);
  rep.source = EntropyReport::Source::SyntheticMetric;
  rep.compact = true;
  rep.chi = m.chi;
  rep.has_gauss_bonnet = true;
  rep.gauss_bonnet_defect = gauss_bonnet_defect(m.K, m.dV, m.chi);
  return rep;
}

WindowStats window_stats(const GeometryReport& geo) {
  WindowStats w;
  const SurfaceDomain& dom = geo.dom;
  const int a = dom.axis_nodes();
  double sum_k = 0.0, sum_b = 0.0, sum_i = 0.0;
  for (int iy = 0; iy < a; ++iy)
    for (int ix = 0; ix < a; ++ix) {
      const std::size_t nd = dom.index(ix, iy);
      if (!geo.curvature_valid[nd]) continue;
      if (dom.kind == SurfaceDomain::Kind::Patch) {
        const cplx z = dom.z_at(ix, iy);
        if (std::abs(z.real()) > 0.5 * dom.L || std::abs(z.imag()) > 0.5 * dom.L) continue;
      }
      ++w.nodes;
      const double ak = std::abs(geo.K.v[nd]);
      sum_k += ak;
      w.sup_abs_K = std::max(w.sup_abs_K, ak);
      if (geo.gauss_valid) {
        sum_b += geo.Bsq.v[nd];
        w.sup_Bsq = std::max(w.sup_Bsq, geo.Bsq.v[nd]);
      }
      sum_i += std::sqrt(std::max(0.0, -geo.K.v[nd]));
    }
  if (w.nodes) {
    w.mean_abs_K = sum_k / static_cast<double>(w.nodes);
    w.mean_Bsq = sum_b / static_cast<double>(w.nodes);
    w.mean_integrand = sum_i / static_cast<double>(w.nodes);
  }
  return w;
}

}  // namespace hmlab
