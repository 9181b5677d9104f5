#include <CLI11.hpp>

#include <cmath>
#include <iostream>

#include "hmlab/parallel.hpp"
#include "hmlab/pipeline.hpp"

using namespace hmlab;

int main(int argc, char** argv) {
  CLI::App app{"hmlab: Hitchin-section Higgs fields, harmonic metrics, and the induced geometry"};
  app.require_subcommand(1);

  int threads = 1;
  app.add_option("--threads", threads, "worker threads for node-parallel maps")
      ->capture_default_str();

  auto* lie = app.add_subcommand("lie-check", "verify the principal sl(2) data for sl(n)");
  int lie_n = 2;
  lie->add_option("n", lie_n, "rank parameter, 2..8")->required();

  auto* solve = app.add_subcommand("solve", "run build -> solve -> geometry -> entropy");
  std::string solve_cfg, solve_out, solve_method;
  double solve_tol = 0, solve_dt = 0, solve_kappa = 0;
  int solve_maxit = 0;
  solve->add_option("config", solve_cfg, "run configuration file")->required();
  solve->add_option("--output", solve_out, "output directory (overrides output.dir)");
  auto* opt_tol = solve->add_option("--tol", solve_tol, "residual sup-norm tolerance");
  auto* opt_maxit = solve->add_option("--max-iter", solve_maxit, "iteration cap");
  auto* opt_dt = solve->add_option("--dt", solve_dt, "relaxation step");
  auto* opt_method = solve->add_option("--method", solve_method, "auto | relax | newton");
  auto* opt_kappa = solve->add_option("--kappa", solve_kappa, "trace-form scale");

  auto* report = app.add_subcommand(
      "report", "recompute geometry/entropy from a run directory (or a synthetic manifest)");
  std::string rep_path, rep_out;
  double rep_kappa = 0;
  report->add_option("path", rep_path, "run directory or synthetic-metric .json manifest")
      ->required();
  report->add_option("--out", rep_out, "where to write the recomputed reports");
  auto* rep_opt_kappa = report->add_option("--kappa", rep_kappa, "override the trace-form scale");

  auto* sweep = app.add_subcommand("sweep", "flatness sweep over sweep.t multipliers");
  std::string sweep_cfg, sweep_out;
  sweep->add_option("config", sweep_cfg, "base configuration with sweep.t")->required();
  sweep->add_option("--output", sweep_out, "output directory (overrides output.dir)");

  auto* oracle =
      app.add_subcommand("oracle", "closed-form constant cyclic solution data for (n, c)");
  int orc_n = 3;
  double orc_re = 1.0, orc_im = 0.0, orc_kappa = 1.0;
  oracle->add_option("--n", orc_n, "rank parameter, 2..8")->required();
  oracle->add_option("--c-re", orc_re, "Re of the constant top differential");
  oracle->add_option("--c-im", orc_im, "Im of the constant top differential");
  oracle->add_option("--kappa", orc_kappa, "trace-form scale");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  set_max_threads(threads);

  try {
    if (*lie) return cmd_lie_check(lie_n);

    if (*solve) {
      RunConfig cfg = RunConfig::parse_file(solve_cfg);
      if (opt_tol->count()) cfg.tol = solve_tol;
      if (opt_maxit->count()) cfg.max_iter = solve_maxit;
      if (opt_dt->count()) cfg.dt = solve_dt;
      if (opt_kappa->count()) cfg.kappa = solve_kappa;
      if (opt_method->count()) {
        if (solve_method == "auto")
          cfg.method = SolveParams::Method::Auto;
        else if (solve_method == "relax")
          cfg.method = SolveParams::Method::Relax;
        else if (solve_method == "newton")
          cfg.method = SolveParams::Method::Newton;
        else
          throw std::invalid_argument("--method must be auto, relax or newton");
      }
      std::filesystem::path out = solve_out.empty() ? cfg.output_dir : solve_out;
      if (out.empty()) throw std::invalid_argument("no output directory (output.dir or --output)");
      return cmd_solve(cfg, out);
    }

    if (*report) {
      const std::filesystem::path p = rep_path;
      if (std::filesystem::is_regular_file(p) && p.extension() == ".json") {
        const std::filesystem::path out = rep_out.empty() ? p.parent_path() / "report" : std::filesystem::path(rep_out);
        return cmd_synthetic_report(p, out);
      }
      const std::filesystem::path out = rep_out.empty() ? p / "report" : std::filesystem::path(rep_out);
      return cmd_report(p, out,
                        rep_opt_kappa->count() ? std::optional<double>(rep_kappa) : std::nullopt);
    }

    if (*sweep) {
      const RunConfig cfg = RunConfig::parse_file(sweep_cfg);
      std::filesystem::path out = sweep_out.empty() ? cfg.output_dir : sweep_out;
      if (out.empty()) throw std::invalid_argument("no output directory (output.dir or --output)");
      return cmd_sweep(cfg, out);
    }

    if (*oracle) return cmd_oracle(orc_n, cplx(orc_re, orc_im), orc_kappa);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
