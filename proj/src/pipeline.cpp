#include "hmlab/pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "hmlab/ops.hpp"
#include "hmlab/snapshot.hpp"

namespace hmlab {
namespace {

using ordered_json = nlohmann::ordered_json;

constexpr double synthetic_tol = 1e-6;

void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

void write_json(const std::filesystem::path& p, const ordered_json& j) {
  write_text(p, j.dump(2) + "\n");
}

ordered_json stats_over_valid(const RealField& f, const std::vector<std::uint8_t>& valid) {
  double mn = std::numeric_limits<double>::infinity(), mx = -mn, sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < f.v.size(); ++i) {
    if (!valid[i]) continue;
    mn = std::min(mn, f.v[i]);
    mx = std::max(mx, f.v[i]);
    sum += f.v[i];
    ++count;
  }
  if (count == 0) return nullptr;
  ordered_json j;
  j["min"] = mn;
  j["mean"] = sum / static_cast<double>(count);
  j["max"] = mx;
  return j;
}

ordered_json geometry_json(const GeometryReport& g, const LieBasis& basis) {
  ordered_json j;
  j["format"] = "hmlab-geometry-v1";
  j["kappa"] = g.kappa;
  j["conformal"] = g.conformal;
  j["gauss_valid"] = g.gauss_valid;
  j["degenerate"] = g.degenerate;
  j["harmonicity_defect"] = g.harmonicity;
  j["total_energy"] = g.total_energy;
  j["min_detg"] = g.min_detg;
  j["max_detg"] = g.max_detg;
  const cplx cn = hopf_constant(basis, g.kappa);
  j["hopf_constant"] = {cn.real(), cn.imag()};
  j["hopf_map_ratio"] = g.hopf_map_ratio;
  j["valid_nodes"] = g.valid_count;
  j["branch_count"] = g.branch_nodes.size();
  j["branch_nodes"] = g.branch_nodes;
  j["K"] = stats_over_valid(g.K, g.curvature_valid);
  j["Sec"] = stats_over_valid(g.Sec, g.curvature_valid);
  j["Bsq"] = g.gauss_valid ? stats_over_valid(g.Bsq, g.curvature_valid) : ordered_json(nullptr);
  return j;
}

ordered_json entropy_json(const EntropyReport& e) {
  ordered_json j;
  j["format"] = "hmlab-entropy-v1";
  j["source"] =
      e.source == EntropyReport::Source::SolvedRun ? "solved_run" : "synthetic_metric";
  j["compact"] = e.compact;
  j["degenerate"] = e.degenerate;
  j["chi"] = e.chi;
  if (e.degenerate) {
    j["volume"] = 0.0;
    j["bound"] = nullptr;
    j["gauss_bonnet_defect"] = nullptr;
    return j;
  }
  j["volume"] = e.volume;
  // A patch run has no compact quotient: the same number is only a local
  // integrand statistic, and the key name says so.
  j[e.compact ? "bound" : "local_statistic"] = e.bound;
  j["gauss_bonnet_defect"] = e.has_gauss_bonnet ? ordered_json(e.gauss_bonnet_defect)
                                                : ordered_json(nullptr);
  ordered_json stats;
  stats["min"] = e.integrand_min;
  stats["mean"] = e.integrand_mean;
  stats["max"] = e.integrand_max;
  j["integrand"] = stats;
  j["cross_check_gap"] =
      e.has_cross_check ? ordered_json(e.cross_check_gap) : ordered_json(nullptr);
  return j;
}

std::string csv_num(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string geometry_csv(const GeometryReport& g) {
  std::string out = "# hmlab-geometry-csv-v1\nx,y,K,Sec,Bnormsq,detg\n";
  const int a = g.dom.axis_nodes();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (int iy = 0; iy < a; ++iy)
    for (int ix = 0; ix < a; ++ix) {
      const std::size_t nd = g.dom.index(ix, iy);
      const cplx z = g.dom.z_at(ix, iy);
      const bool ok = g.curvature_valid[nd];
      out += csv_num(z.real());
      out += ',';
      out += csv_num(z.imag());
      out += ',';
      out += csv_num(ok ? g.K.v[nd] : nan);
      out += ',';
      out += csv_num(ok ? g.Sec.v[nd] : nan);
      out += ',';
      out += csv_num(ok && g.gauss_valid ? g.Bsq.v[nd] : nan);
      out += ',';
      out += csv_num(g.g.detg.v[nd]);
      out += '\n';
    }
  return out;
}

ordered_json outcome_json(const RunResult& res) {
  ordered_json j;
  j["format"] = "hmlab-outcome-v1";
  j["status"] = to_string(res.outcome.status);
  j["iterations"] = res.outcome.iterations;
  j["residual_sup"] = res.outcome.resid_sup;
  j["residual_l2"] = res.outcome.resid_l2;
  j["note"] = res.outcome.note;
  j["synthetic"] = res.synthetic;
  j["fiducial_flagged"] = res.fiducial_flagged;
  j["flat_curvature_sup"] =
      res.solved ? ordered_json(res.flat_curvature_sup) : ordered_json(nullptr);
  return j;
}

struct BuiltRun {
  LieBasis basis;
  SurfaceDomain dom;
  HiggsField phi;
};

BuiltRun build_run(const RunConfig& cfg) {
  BuiltRun b;
  b.basis = construct_principal_sl2(cfg.n);
  b.dom = cfg.domain();
  b.phi = build_hitchin_higgs(b.basis, cfg.alphas, b.dom);
  return b;
}

RunResult solve_built(const BuiltRun& run, const RunConfig& cfg,
                      HermitianMetricField* H_out = nullptr) {
  RunResult res;
  const FiducialMetric fid = fiducial_metric(run.phi);
  res.fiducial_flagged = fid.flagged.size();
  const HermitianMetricField init =
      fid.defined ? fid.H : HermitianMetricField::identity(run.dom, cfg.n);

  auto [H, outcome] = solve_harmonic_metric(run.phi, init, cfg.solver_params());
  res.outcome = outcome;
  res.solved = outcome.status == SolveOutcome::Status::Converged;
  res.synthetic = harmonicity_defect(run.phi) > synthetic_tol;
  if (res.solved) {
    const MatrixField Hm = H.matrix();
    res.geometry = compute_geometry(run.phi, Hm, cfg.kappa);
    res.entropy = entropy_from_geometry(res.geometry);
    const MatrixField curv = flat_connection_curvature(H, run.phi);
    double sup = 0.0;
    for (std::size_t nd = 0; nd < curv.nodes(); ++nd) {
      if (run.dom.is_boundary(nd)) continue;
      const auto m = curv.at(nd);
      for (int i = 0; i < curv.dim; ++i)
        for (int jj = 0; jj < curv.dim; ++jj) sup = std::max(sup, std::abs(m(i, jj)));
    }
    res.flat_curvature_sup = sup;
    if (H_out) *H_out = H;
  }
  return res;
}

}  // namespace

RunResult execute_solve(const RunConfig& cfg) {
  const BuiltRun run = build_run(cfg);
  return solve_built(run, cfg);
}

void write_run_outputs(const RunConfig& cfg, const RunResult& res,
                       const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_text(dir / "config.echo.cfg", cfg.canonical());
  write_json(dir / "outcome.json", outcome_json(res));
  ordered_json timing;
  timing["format"] = "hmlab-timing-v1";
  timing["wall_seconds"] = res.outcome.wall_seconds;
  write_json(dir / "timing.json", timing);
}

int cmd_solve(const RunConfig& cfg, const std::filesystem::path& outdir) {
  const BuiltRun run = build_run(cfg);
  HermitianMetricField H;
  const RunResult res = solve_built(run, cfg, &H);

  std::filesystem::create_directories(outdir);
  write_run_outputs(cfg, res, outdir);
  save_fld(outdir / "phi.fld", run.phi.phi);
  if (res.solved) {
    save_fld(outdir / "H.fld", H.matrix());
    write_json(outdir / "geometry.json", geometry_json(res.geometry, run.basis));
    write_json(outdir / "entropy.json", entropy_json(res.entropy));
    write_text(outdir / "geometry.csv", geometry_csv(res.geometry));
    std::filesystem::create_directories(outdir / "fields");
    save_fld(outdir / "fields" / "detg.fld", res.geometry.g.detg);
    save_fld(outdir / "fields" / "g11.fld", res.geometry.g.g11);
    save_fld(outdir / "fields" / "g12.fld", res.geometry.g.g12);
    save_fld(outdir / "fields" / "g22.fld", res.geometry.g.g22);
    save_fld(outdir / "fields" / "K.fld", res.geometry.K);
    save_fld(outdir / "fields" / "Sec.fld", res.geometry.Sec);
    save_fld(outdir / "fields" / "Bnormsq.fld", res.geometry.Bsq);
    save_fld(outdir / "fields" / "energy_density.fld", res.geometry.energy_density);
    save_fld(outdir / "fields" / "hopf.fld", res.geometry.hopf);
  }
  std::cout << "status: " << to_string(res.outcome.status)
            << "  iterations: " << res.outcome.iterations
            << "  residual_sup: " << res.outcome.resid_sup << "\n";
  if (!res.outcome.note.empty()) std::cout << "note: " << res.outcome.note << "\n";
  std::cout << "outputs: " << outdir.string() << "\n";
  return res.solved ? 0 : 3;
}

int cmd_report(const std::filesystem::path& rundir, const std::filesystem::path& outdir,
               std::optional<double> kappa_override) {
  RunConfig cfg = RunConfig::parse_file(rundir / "config.echo.cfg");
  if (kappa_override) cfg.kappa = *kappa_override;
  const BuiltRun run = build_run(cfg);

  const MatrixField phi_loaded = load_matrix_fld(rundir / "phi.fld");
  if (!(phi_loaded.dom == run.dom) || phi_loaded.dim != cfg.n ||
      sup_abs_diff(phi_loaded, run.phi.phi) != 0.0)
    throw std::runtime_error(rundir.string() +
                             ": phi.fld does not match the echoed configuration");
  const MatrixField Hm = load_matrix_fld(rundir / "H.fld");
  if (!(Hm.dom == run.dom) || Hm.dim != cfg.n)
    throw std::runtime_error(rundir.string() + ": H.fld does not match the configuration");

  const GeometryReport geo = compute_geometry(run.phi, Hm, cfg.kappa);
  const EntropyReport ent = entropy_from_geometry(geo);

  std::filesystem::create_directories(outdir);
  write_json(outdir / "geometry.json", geometry_json(geo, run.basis));
  write_json(outdir / "entropy.json", entropy_json(ent));
  write_text(outdir / "geometry.csv", geometry_csv(geo));
  std::cout << "report written to " << outdir.string() << "\n";
  return 0;
}

int cmd_synthetic_report(const std::filesystem::path& manifest,
                         const std::filesystem::path& outdir) {
  const SyntheticMetric m = load_synthetic_metric(manifest);
  const EntropyReport ent = entropy_from_synthetic(m);
  std::filesystem::create_directories(outdir);
  write_json(outdir / "entropy.json", entropy_json(ent));
  std::cout << "volume: " << ent.volume << "\nbound: " << ent.bound
            << "\ngauss_bonnet_defect: " << ent.gauss_bonnet_defect << "\n";
  return 0;
}

int cmd_sweep(const RunConfig& cfg, const std::filesystem::path& outdir) {
  if (cfg.sweep_t.empty()) throw std::invalid_argument("sweep: config has no sweep.t values");
  const int top = cfg.n - 1;
  bool has_top = false;
  for (const auto& a : cfg.alphas) has_top = has_top || a.k == top;
  if (!has_top)
    throw std::invalid_argument("sweep: base configuration must set the top differential alpha." +
                                std::to_string(top));

  std::filesystem::create_directories(outdir);
  write_text(outdir / "config.echo.cfg", cfg.canonical());

  std::string csv = "# hmlab-sweep-csv-v1\nt,status,mean_absK,sup_absK,mean_Bsq,sup_Bsq,mean_integrand\n";
  for (double t : cfg.sweep_t) {
    RunConfig member = cfg;
    member.sweep_t.clear();
    for (auto& a : member.alphas) {
      if (a.k != top) continue;
      if (a.rep == Differential::Rep::Constant) a.constant *= t;
      if (a.rep == Differential::Rep::Poly)
        for (cplx& c : a.coeffs) c *= t;
    }
    RunResult res;
    std::string status;
    try {
      res = execute_solve(member);
      status = to_string(res.outcome.status);
    } catch (const std::exception& e) {
      status = "Error";
      std::cerr << "sweep t = " << t << ": " << e.what() << "\n";
    }
    csv += csv_num(t);
    csv += ',';
    csv += status;
    if (res.solved) {
      const WindowStats w = window_stats(res.geometry);
      csv += ',' + csv_num(w.mean_abs_K) + ',' + csv_num(w.sup_abs_K) + ',' +
             csv_num(w.mean_Bsq) + ',' + csv_num(w.sup_Bsq) + ',' + csv_num(w.mean_integrand);
    } else {
      csv += ",nan,nan,nan,nan,nan";
    }
    csv += '\n';
  }
  write_text(outdir / "sweep.csv", csv);
  std::cout << "sweep table: " << (outdir / "sweep.csv").string() << "\n";
  return 0;
}

int cmd_lie_check(int n) {
  const LieBasis basis = construct_principal_sl2(n);
  const LieCheck chk = lie_invariant_residuals(basis);
  std::printf("%-28s %s\n", "invariant", "residual");
  for (const auto& [name, r] : chk.residuals) std::printf("%-28s %.3e\n", name.c_str(), r);
  std::printf("%-28s %.3e\n", "max", chk.max_residual);
  return chk.max_residual < 1e-12 ? 0 : 1;
}

int cmd_oracle(int n, cplx c, double kappa) {
  const LieBasis basis = construct_principal_sl2(n);
  const SurfaceDomain dom = SurfaceDomain::torus(16);
  const HiggsField phi =
      build_hitchin_higgs(basis, {Differential::make_constant(n - 1, c)}, dom);
  const cplx w = phi.phi.at(0)(0, n - 1);
  std::printf("constant cyclic data for n = %d, c = (%.17g, %.17g), kappa = %.17g\n", n, c.real(),
              c.imag(), kappa);
  std::printf("corner entry w = alpha_{n-1} * (e1^{n-1})_{1,n} = (%.17g, %.17g)\n", w.real(),
              w.imag());
  if (std::abs(w) == 0.0) {
    std::printf("top coefficient vanishes: Fuchsian point, no fiducial metric\n");
    return 0;
  }
  const double r = std::pow(std::abs(w), 2.0 / n);
  std::printf("eta ratio r = |w|^(2/n) = %.17g\n", r);
  const FiducialMetric fid = fiducial_metric(phi);
  for (int j = 0; j < n; ++j) std::printf("u_%d = %.17g\n", j + 1, fid.H.u[j].v[0]);
  const ResidualField rf = residual(fid.H, phi);
  std::printf("residual sup at the fiducial metric: %.3e\n", rf.sup);
  const GeometryReport geo = compute_geometry(phi, fid.H, kappa);
  std::printf("energy density: %.17g\n", geo.energy_density.v[0]);
  std::printf("detg: %.17g\n", geo.g.detg.v[0]);
  if (n == 2) {
    std::printf("note: for n = 2 the constant solution is rank one (detg = 0); the\n");
    std::printf("harmonic map collapses onto a geodesic and curvature reports are empty\n");
    return 0;
  }
  std::printf("Sec: %.17g\n", geo.Sec.v[0]);
  std::printf("K: %.17g\n", geo.K.v[0]);
  const EntropyReport ent = entropy_from_geometry(geo);
  std::printf("entropy bound: %.17g\n", ent.bound);
  return 0;
}

}  // namespace hmlab
