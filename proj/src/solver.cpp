#include "hmlab/solver.hpp"

#include <chrono>
#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include "hmlab/kernels.hpp"
#include "hmlab/ops.hpp"
#include "hmlab/parallel.hpp"

namespace hmlab {
namespace {

constexpr double pi = std::numbers::pi;

using Clock = std::chrono::steady_clock;

// The dz^dzbar orientation is fixed operationally: the n = 2 constant oracle
// must be a residual zero and the linearization there must be stable for the
// descent flow.  Cheap one-time assertion.
void verify_sign_convention() {
  static std::once_flag flag;
  std::call_once(flag, [] {
    const SurfaceDomain dom = SurfaceDomain::torus(16);
    const LieBasis basis = construct_principal_sl2(2);
    const HiggsField phi =
        build_hitchin_higgs(basis, {Differential::make_constant(1, cplx(2.0, 0.0))}, dom);
    const HermitianMetricField id = HermitianMetricField::identity(dom, 2);
    if (residual(id, phi).sup > 1e-10)
      throw std::logic_error("sign self-test: constant oracle is not a residual zero");

    HermitianMetricField pert = id;
    const double eps = 1e-5;
    for (int iy = 0; iy < dom.N; ++iy)
      for (int ix = 0; ix < dom.N; ++ix) {
        const double c = eps * std::cos(2.0 * pi * ix / dom.N);
        pert.u[0].at(ix, iy) = c;
        pert.u[1].at(ix, iy) = -c;
      }
    const ResidualField r = residual(pert, phi);
    double inner = 0.0;
    for (int iy = 0; iy < dom.N; ++iy)
      for (int ix = 0; ix < dom.N; ++ix)
        inner += r.R.at(dom.index(ix, iy))(0, 0).real() * std::cos(2.0 * pi * ix / dom.N);
    if (!(inner > 0.0))
      throw std::logic_error("sign self-test: linearization at the constant oracle is unstable");
  });
}

// Structural torus obstruction: a diagonal commutator entry whose positive
// part (row power) or negative part (column power) vanishes identically has a
// fixed sign for every metric, so its mean can never reach zero.
bool torus_obstructed(const HiggsField& phi, const HermitianMetricField& init, std::string& note) {
  if (phi.dom.kind != SurfaceDomain::Kind::Torus) return false;
  const int n = phi.n();
  const std::size_t nodes = phi.dom.size();
  std::vector<double> rowp(n, 0.0), colp(n, 0.0);
  for (std::size_t nd = 0; nd < nodes; ++nd) {
    const auto p = phi.phi.at(nd);
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) {
        const double a = std::norm(p(i, k));
        rowp[i] += a;
        colp[k] += a;
      }
  }
  // "Identically zero" is meant exactly: for Hitchin sections a vanishing row
  // comes from alpha fields that are exactly zero.
  for (int i = 0; i < n; ++i) {
    const bool row0 = rowp[i] == 0.0, col0 = colp[i] == 0.0;
    if (row0 == col0) continue;
    const ResidualField r0 = residual(init, phi);
    RealField diag(phi.dom);
    for (std::size_t nd = 0; nd < nodes; ++nd) diag.v[nd] = r0.R.at(nd)(i, i).real();
    const double mean = integrate(diag) / phi.dom.flat_area();
    note = "diagonal entry " + std::to_string(i + 1) + ": commutator term has a fixed sign (" +
           (row0 ? "zero row" : "zero column") + " power); mean residual " +
           std::to_string(mean) + " cannot reach zero on the torus";
    return true;
  }
  return false;
}

struct DiagWork {
  std::vector<RealField> r;  // diagonal residual entries
};

void diag_residual(const HermitianMetricField& H, const HiggsField& phi, ResidualField& rf,
                   DiagWork& w) {
  rf = residual(H, phi);
  const int n = H.dim;
  if (w.r.size() != static_cast<std::size_t>(n)) w.r.assign(n, RealField(H.dom));
  for (int i = 0; i < n; ++i)
    for (std::size_t nd = 0; nd < H.dom.size(); ++nd) w.r[i].v[nd] = rf.R.at(nd)(i, i).real();
}

// Mean over nodes of d C_ii / d u_j at the current metric (torus mean-mode
// Newton matrix).
Eigen::MatrixXd mean_jacobian(const HermitianMetricField& H, const HiggsField& phi) {
  const int n = H.dim;
  const std::size_t nodes = H.dom.size();
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t nd = 0; nd < nodes; ++nd) {
    const auto p = phi.phi.at(nd);
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) {
        if (i == k) continue;
        const double up = std::norm(p(i, k)) * std::exp(2.0 * (H.u[i].v[nd] - H.u[k].v[nd]));
        const double dn = std::norm(p(k, i)) * std::exp(2.0 * (H.u[k].v[nd] - H.u[i].v[nd]));
        J(i, i) += 2.0 * (up + dn);
        J(i, k) -= 2.0 * (up + dn);
      }
  }
  J /= static_cast<double>(nodes);
  return J;
}

double sup_u(const HermitianMetricField& H) {
  double m = 0.0;
  for (const auto& f : H.u) m = std::max(m, sup_abs(f));
  return m;
}

SolveOutcome::Status diagonal_relax(const HiggsField& phi, HermitianMetricField& H,
                                    const SolveParams& prm, SolveOutcome& out) {
  const int n = H.dim;
  const SurfaceDomain& dom = H.dom;
  const bool torus = dom.kind == SurfaceDomain::Kind::Torus;

  DiagWork w;
  ResidualField rf;
  diag_residual(H, phi, rf, w);
  out.l2_history.push_back(rf.l2);
  double dt = prm.dt;

  for (int iter = 0; iter < prm.max_iter; ++iter) {
    out.iterations = iter;
    out.resid_sup = rf.sup;
    out.resid_l2 = rf.l2;
    if (rf.sup < prm.tol) return SolveOutcome::Status::Converged;
    if (sup_u(H) > prm.divergence_bound) {
      out.note = "metric exponent exceeded bound " + std::to_string(prm.divergence_bound);
      return SolveOutcome::Status::Diverged;
    }

    // Preconditioned direction: inverse flat Laplacian on the mean-zero part,
    // dense Newton on the torus means.
    std::vector<RealField> du(n, RealField(dom));
    std::vector<double> dmu(n, 0.0);
    if (torus) {
      Eigen::VectorXd means(n);
      for (int i = 0; i < n; ++i) {
        means[i] = kern::sum(w.r[i].v.data(), w.r[i].v.size()) / static_cast<double>(dom.size());
        RealField shifted = w.r[i];
        for (double& x : shifted.v) x -= means[i];
        du[i] = inverse_laplacian(shifted);
      }
      Eigen::MatrixXd J = mean_jacobian(H, phi);
      J.array() += 1.0 / n;
      const Eigen::VectorXd dm = J.fullPivLu().solve(-means);
      for (int i = 0; i < n; ++i) dmu[i] = dm.allFinite() ? dm[i] : 0.0;
    } else {
      for (int i = 0; i < n; ++i) du[i] = inverse_laplacian(w.r[i]);
    }

    // Backtracking on the residual L2 norm.
    const double l2_0 = rf.l2;
    bool accepted = false;
    double theta = 1.0;
    HermitianMetricField trial = H;
    for (int ls = 0; ls < 30; ++ls) {
      trial = H;
      for (int i = 0; i < n; ++i) {
        kern::axpy(trial.u[i].v.data(), theta * dt, du[i].v.data(), trial.u[i].v.size());
        if (torus && dmu[i] != 0.0)
          for (double& x : trial.u[i].v) x += theta * dmu[i];
      }
      trial.project_gauge();
      ResidualField rt;
      diag_residual(trial, phi, rt, w);
      if (rt.l2 <= l2_0 * (1.0 - 1e-4 * theta) || rt.sup < prm.tol) {
        H = std::move(trial);
        rf = std::move(rt);
        accepted = true;
        break;
      }
      theta *= 0.5;
    }
    if (!accepted) {
      // Re-evaluate the residual of H itself (w holds trial data now).
      diag_residual(H, phi, rf, w);
      out.resid_sup = rf.sup;
      out.resid_l2 = rf.l2;
      if (rf.sup < prm.tol) {
        out.iterations = iter + 1;
        return SolveOutcome::Status::Converged;
      }
      out.note = "line search stalled; residual does not decrease";
      return SolveOutcome::Status::Diverged;
    }
    out.l2_history.push_back(rf.l2);
    dt = std::min(prm.dt, dt * (theta == 1.0 ? 1.2 : theta));
    dt = std::max(dt, 1e-4 * prm.dt);
  }
  out.resid_sup = rf.sup;
  out.resid_l2 = rf.l2;
  out.iterations = prm.max_iter;
  return rf.sup < prm.tol ? SolveOutcome::Status::Converged : SolveOutcome::Status::MaxIter;
}

// ---- Full path -------------------------------------------------------------

// Gauge-normalized residual: rhat = H^{1/2} R H^{-1/2}, Hermitian traceless.
MatrixField normalized_residual(const HermitianMetricField& H, const HiggsField& phi,
                                ResidualField& rf) {
  rf = residual(H, phi);
  const MatrixField hs = H.matrix_sqrt();
  const MatrixField hi = H.matrix_inv_sqrt();
  MatrixField out(H.dom, H.dim);
  parallel_for(out.nodes(), [&](std::size_t nd) {
    Mat m = hs.at(nd) * rf.R.at(nd) * hi.at(nd);
    m = 0.5 * (m + Mat(m.adjoint()));
    out.at(nd) = m;
  });
  // Frozen Dirichlet ring carries no residual.
  if (H.dom.kind == SurfaceDomain::Kind::Patch) {
    const int dd = H.dim * H.dim;
    for (std::size_t nd = 0; nd < out.nodes(); ++nd)
      if (H.dom.is_boundary(nd))
        for (int e = 0; e < dd; ++e) out.v[nd * dd + e] = 0.0;
  }
  return out;
}

// Entrywise (-Delta/2 + mu)^{-1} on a Hermitian matrix field.
MatrixField precondition_field(const MatrixField& r, double mu) {
  const int d = r.dim, dd = d * d;
  MatrixField out(r.dom, d);
  RealField re(r.dom), im(r.dom);
  for (int e = 0; e < dd; ++e) {
    for (std::size_t nd = 0; nd < r.nodes(); ++nd) {
      re.v[nd] = r.v[nd * dd + e].real();
      im.v[nd] = r.v[nd * dd + e].imag();
    }
    const RealField pre = inverse_helmholtz(re, mu);
    const RealField pim = inverse_helmholtz(im, mu);
    for (std::size_t nd = 0; nd < r.nodes(); ++nd)
      out.v[nd * dd + e] = cplx(pre.v[nd], pim.v[nd]);
  }
  return out;
}

double field_norm(const MatrixField& f) {
  const double* p = reinterpret_cast<const double*>(f.v.data());
  return std::sqrt(kern::dot(p, p, 2 * f.v.size()));
}

void field_axpy(MatrixField& y, double a, const MatrixField& x) {
  kern::axpy(reinterpret_cast<double*>(y.v.data()), a,
             reinterpret_cast<const double*>(x.v.data()), 2 * y.v.size());
}

double commutator_scale(const HiggsField& phi) {
  double acc = 0.0;
  for (std::size_t nd = 0; nd < phi.phi.nodes(); ++nd)
    acc += phi.phi.at(nd).squaredNorm();
  return acc / static_cast<double>(phi.phi.nodes());
}

struct FullProblem {
  const HiggsField* phi = nullptr;
  double mu = 1.0;

  MatrixField eval(const HermitianMetricField& H, ResidualField& rf) const {
    return normalized_residual(H, *phi, rf);
  }
};

// Matrix-free restarted GMRES on the flattened field, right-preconditioned by
// the entrywise Helmholtz inverse.  Directional derivatives by finite
// differences around S.
MatrixField newton_direction(const FullProblem& fp, const HermitianMetricField& H,
                             const MatrixField& r0, int restart, int max_inner, double rel_tol) {
  const SurfaceDomain& dom = H.dom;
  const int dim = H.dim;
  const double r0n = field_norm(r0);
  MatrixField x(dom, dim);  // solution accumulator (S-direction)
  if (r0n == 0.0) return x;

  auto apply_J = [&](const MatrixField& v) -> MatrixField {
    const double vn = field_norm(v);
    if (vn == 0.0) return MatrixField(dom, dim);
    double sn = field_norm(H.S);
    const double eps = 1e-7 * (1.0 + sn) / vn;
    HermitianMetricField Hp = H;
    field_axpy(Hp.S, eps, v);
    Hp.project_gauge();
    ResidualField rf;
    MatrixField rp = fp.eval(Hp, rf);
    // (r(S + eps v) - r0) / eps
    field_axpy(rp, -1.0, r0);
    kern::scale(reinterpret_cast<double*>(rp.v.data()),
                reinterpret_cast<const double*>(rp.v.data()), 1.0 / eps, 2 * rp.v.size());
    return rp;
  };

  MatrixField b = r0;
  kern::scale(reinterpret_cast<double*>(b.v.data()), reinterpret_cast<const double*>(b.v.data()),
              -1.0, 2 * b.v.size());

  int inner_total = 0;
  MatrixField res = b;  // residual of the linear system (x = 0 start)
  while (inner_total < max_inner) {
    const double beta = field_norm(res);
    if (beta <= rel_tol * r0n) break;
    std::vector<MatrixField> V;
    V.push_back(res);
    kern::scale(reinterpret_cast<double*>(V[0].v.data()),
                reinterpret_cast<const double*>(V[0].v.data()), 1.0 / beta, 2 * V[0].v.size());
    std::vector<MatrixField> Z;
    Eigen::MatrixXd Hs = Eigen::MatrixXd::Zero(restart + 1, restart);
    Eigen::VectorXd g = Eigen::VectorXd::Zero(restart + 1);
    g[0] = beta;
    std::vector<double> cs(restart, 0.0), sn(restart, 0.0);
    int k = 0;
    for (; k < restart && inner_total < max_inner; ++k, ++inner_total) {
      Z.push_back(precondition_field(V[k], fp.mu));
      MatrixField wv = apply_J(Z[k]);
      for (int j = 0; j <= k; ++j) {
        const double hij = kern::dot(reinterpret_cast<const double*>(wv.v.data()),
                                     reinterpret_cast<const double*>(V[j].v.data()),
                                     2 * wv.v.size());
        Hs(j, k) = hij;
        field_axpy(wv, -hij, V[j]);
      }
      const double hkk = field_norm(wv);
      Hs(k + 1, k) = hkk;
      // Givens update of the small system
      for (int j = 0; j < k; ++j) {
        const double t = cs[j] * Hs(j, k) + sn[j] * Hs(j + 1, k);
        Hs(j + 1, k) = -sn[j] * Hs(j, k) + cs[j] * Hs(j + 1, k);
        Hs(j, k) = t;
      }
      const double denom = std::hypot(Hs(k, k), Hs(k + 1, k));
      cs[k] = denom == 0.0 ? 1.0 : Hs(k, k) / denom;
      sn[k] = denom == 0.0 ? 0.0 : Hs(k + 1, k) / denom;
      Hs(k, k) = denom;
      Hs(k + 1, k) = 0.0;
      g[k + 1] = -sn[k] * g[k];
      g[k] = cs[k] * g[k];
      if (hkk == 0.0) {
        ++k;
        break;
      }
      kern::scale(reinterpret_cast<double*>(wv.v.data()),
                  reinterpret_cast<const double*>(wv.v.data()), 1.0 / hkk, 2 * wv.v.size());
      V.push_back(std::move(wv));
      if (std::abs(g[k + 1]) <= rel_tol * r0n) {
        ++k;
        break;
      }
    }
    if (k == 0) break;
    Eigen::VectorXd y = Hs.topLeftCorner(k, k).triangularView<Eigen::Upper>().solve(g.head(k));
    for (int j = 0; j < k; ++j) field_axpy(x, y[j], Z[j]);
    // Recompute the linear residual for the restart test.
    MatrixField jx = apply_J(x);
    res = b;
    field_axpy(res, -1.0, jx);
  }
  return x;
}

SolveOutcome::Status full_solve(const HiggsField& phi, HermitianMetricField& H,
                                const SolveParams& prm, SolveOutcome& out) {
  FullProblem fp;
  fp.phi = &phi;
  fp.mu = 1.0 + 2.0 * commutator_scale(phi);

  ResidualField rf;
  MatrixField r = normalized_residual(H, phi, rf);
  out.l2_history.push_back(rf.l2);
  const double l2_start = rf.l2;
  double dt = prm.dt;
  const bool allow_newton = prm.method != SolveParams::Method::Relax;
  const bool relax_first = prm.method != SolveParams::Method::Newton;

  auto try_direction = [&](const MatrixField& dir) -> bool {
    const double l2_0 = rf.l2;
    double theta = 1.0;
    for (int ls = 0; ls < 30; ++ls) {
      HermitianMetricField trial = H;
      field_axpy(trial.S, theta, dir);
      trial.project_gauge();
      ResidualField rt;
      MatrixField rtrial = normalized_residual(trial, phi, rt);
      if (rt.l2 <= l2_0 * (1.0 - 1e-4 * theta) || rt.sup < prm.tol) {
        H = std::move(trial);
        rf = rt;
        r = std::move(rtrial);
        return true;
      }
      theta *= 0.5;
    }
    return false;
  };

  for (int iter = 0; iter < prm.max_iter; ++iter) {
    out.iterations = iter;
    out.resid_sup = rf.sup;
    out.resid_l2 = rf.l2;
    if (rf.sup < prm.tol) return SolveOutcome::Status::Converged;
    if (sup_abs(H.S) > 2.0 * prm.divergence_bound) {
      out.note = "metric exponent exceeded bound";
      return SolveOutcome::Status::Diverged;
    }

    // Relaxation is robust far from the solution; the inexact Newton-Krylov
    // finisher takes over once the residual has dropped.
    const bool newton_phase =
        allow_newton && (!relax_first || rf.l2 < 0.05 * l2_start || iter >= 25);
    bool accepted = false;
    if (newton_phase) accepted = try_direction(newton_direction(fp, H, r, 30, 90, 1e-2));
    if (!accepted) {
      MatrixField dir = precondition_field(r, fp.mu);
      kern::scale(reinterpret_cast<double*>(dir.v.data()),
                  reinterpret_cast<const double*>(dir.v.data()), -dt, 2 * dir.v.size());
      accepted = try_direction(dir);
      if (accepted) dt = std::min(prm.dt, dt * 1.2);
    }
    if (!accepted) {
      out.note = "line search stalled; residual does not decrease";
      out.resid_sup = rf.sup;
      out.resid_l2 = rf.l2;
      return SolveOutcome::Status::Diverged;
    }
    out.l2_history.push_back(rf.l2);
  }
  out.resid_sup = rf.sup;
  out.resid_l2 = rf.l2;
  out.iterations = prm.max_iter;
  return rf.sup < prm.tol ? SolveOutcome::Status::Converged : SolveOutcome::Status::MaxIter;
}

HermitianMetricField to_full(const HermitianMetricField& diag) {
  MatrixField S(diag.dom, diag.dim);
  for (std::size_t nd = 0; nd < S.nodes(); ++nd)
    for (int j = 0; j < diag.dim; ++j) S.at(nd)(j, j) = 2.0 * diag.u[j].v[nd];
  return HermitianMetricField::full(std::move(S));
}

}  // namespace

const char* to_string(SolveOutcome::Status s) {
  switch (s) {
    case SolveOutcome::Status::Converged: return "Converged";
    case SolveOutcome::Status::Diverged: return "Diverged";
    case SolveOutcome::Status::Obstructed: return "Obstructed";
    default: return "MaxIter";
  }
}

HermitianMetricField default_initial_metric(const HiggsField& phi) {
  FiducialMetric fid = fiducial_metric(phi);
  if (!fid.defined) return HermitianMetricField::identity(phi.dom, phi.n());
  return fid.H;
}

std::pair<HermitianMetricField, SolveOutcome> solve_harmonic_metric(
    const HiggsField& phi, const HermitianMetricField& init, const SolveParams& params) {
  verify_sign_convention();
  const auto t0 = Clock::now();
  SolveOutcome out;

  std::string note;
  if (torus_obstructed(phi, init, note)) {
    out.status = SolveOutcome::Status::Obstructed;
    out.note = note;
    const ResidualField rf = residual(init, phi);
    out.resid_sup = rf.sup;
    out.resid_l2 = rf.l2;
    out.wall_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    return {init, out};
  }

  const bool want_diag =
      params.path == SolveParams::Path::Diagonal ||
      (params.path == SolveParams::Path::Auto && (phi.n() == 2 || phi.is_cyclic()));

  HermitianMetricField H = init;
  if (want_diag && init.rep == HermitianMetricField::Rep::Diagonal) {
    out.status = diagonal_relax(phi, H, params, out);
  } else {
    if (H.rep == HermitianMetricField::Rep::Diagonal) H = to_full(H);
    out.status = full_solve(phi, H, params, out);
  }
  out.wall_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  return {H, out};
}

std::pair<MatrixField, MatrixField> assemble_flat_connection(const HermitianMetricField& H,
                                                             const HiggsField& phi) {
  const ResidualField rf = residual(H, phi);
  if (rf.sup >= 1e-6)
    throw std::invalid_argument("assemble_flat_connection: self-duality residual " +
                                std::to_string(rf.sup) + " >= 1e-6");
  const MatrixField h = H.matrix();
  const MatrixField hinv = H.matrix_inv();
  const MatrixField dh = d_dz(h);
  MatrixField Az(H.dom, H.dim);
  parallel_for(Az.nodes(), [&](std::size_t nd) {
    Az.at(nd) = hinv.at(nd) * dh.at(nd) + phi.phi.at(nd);
  });
  MatrixField Azbar = adjoint_star(phi, H);
  return {std::move(Az), std::move(Azbar)};
}

MatrixField flat_connection_curvature(const HermitianMetricField& H, const HiggsField& phi) {
  const ResidualField rf = residual(H, phi);
  const MatrixField h = H.matrix();
  const MatrixField hinv = H.matrix_inv();
  const MatrixField dbar_phi = d_dzbar(phi.phi);
  MatrixField out = rf.R;
  parallel_for(out.nodes(), [&](std::size_t nd) {
    const Mat db = dbar_phi.at(nd);
    out.at(nd) += hinv.at(nd) * db.adjoint() * h.at(nd) - db;
  });
  return out;
}

MatrixField flat_connection_curvature_direct(const MatrixField& Az, const MatrixField& Azbar) {
  const MatrixField dAzbar = d_dz(Azbar);
  const MatrixField dbarAz = d_dzbar(Az);
  MatrixField out(Az.dom, Az.dim);
  parallel_for(out.nodes(), [&](std::size_t nd) {
    const Mat a = Az.at(nd), b = Azbar.at(nd);
    out.at(nd) = dAzbar.at(nd) - dbarAz.at(nd) + a * b - b * a;
  });
  return out;
}

}  // namespace hmlab
