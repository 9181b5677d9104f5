#include "hmlab/higgs.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "hmlab/ops.hpp"
#include "hmlab/parallel.hpp"

namespace hmlab {

Differential Differential::make_constant(int k, cplx c) {
  Differential d;
  d.k = k;
  d.rep = Rep::Constant;
  d.constant = c;
  return d;
}

Differential Differential::make_poly(int k, std::vector<cplx> coeffs) {
  if (coeffs.size() > 9) throw std::invalid_argument("differential: polynomial degree > 8");
  Differential d;
  d.k = k;
  d.rep = Rep::Poly;
  d.coeffs = std::move(coeffs);
  return d;
}

Differential Differential::make_sampled(int k, ScalarField f) {
  Differential d;
  d.k = k;
  d.rep = Rep::Sampled;
  d.samples = std::move(f);
  return d;
}

cplx Differential::eval(cplx z) const {
  switch (rep) {
    case Rep::Constant:
      return constant;
    case Rep::Poly: {
      cplx acc(0.0, 0.0);
      for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * z + *it;
      return acc;
    }
    default:
      throw std::logic_error("eval: sampled differentials are grid data");
  }
}

ScalarField sample_differential(const Differential& a, const SurfaceDomain& dom) {
  if (a.rep == Differential::Rep::Sampled) {
    if (!(a.samples.dom == dom))
      throw std::invalid_argument("sampled differential lives on a different domain");
    return a.samples;
  }
  ScalarField f(dom);
  const int axis = dom.axis_nodes();
  for (int iy = 0; iy < axis; ++iy)
    for (int ix = 0; ix < axis; ++ix) f.at(ix, iy) = a.eval(dom.z_at(ix, iy));
  return f;
}

ScalarField HiggsField::alpha_samples(int k) const {
  for (const auto& a : alphas)
    if (a.k == k) return sample_differential(a, dom);
  return ScalarField(dom);
}

bool HiggsField::is_cyclic() const {
  for (const auto& a : alphas) {
    if (a.k == n() - 1) continue;
    if (sup_abs(sample_differential(a, dom)) > 0.0) return false;
  }
  return true;
}

HiggsField build_hitchin_higgs(const LieBasis& basis, const std::vector<Differential>& alphas,
                               const SurfaceDomain& dom) {
  std::set<int> seen;
  for (const auto& a : alphas) {
    if (a.k < 1 || a.k > basis.n - 1)
      throw std::invalid_argument("differential index k = " + std::to_string(a.k) +
                                  " out of range 1.." + std::to_string(basis.n - 1));
    if (!seen.insert(a.k).second)
      throw std::invalid_argument("duplicate differential index k = " + std::to_string(a.k));
  }

  HiggsField h;
  h.basis = basis;
  h.alphas = alphas;
  h.dom = dom;
  h.phi = MatrixField(dom, basis.n);

  std::vector<ScalarField> samples;
  samples.reserve(alphas.size());
  for (const auto& a : alphas) samples.push_back(sample_differential(a, dom));

  for (std::size_t nd = 0; nd < h.phi.nodes(); ++nd) {
    Mat m = basis.em1;
    for (std::size_t j = 0; j < alphas.size(); ++j)
      m += samples[j].v[nd] * basis.hw[alphas[j].k - 1];
    h.phi.at(nd) = m;
  }
  return h;
}

cplx hopf_constant(const LieBasis& basis, double kappa) {
  return 2.0 * trace_form(basis.em1, basis.e1, kappa);
}

ScalarField hopf_differential(const HiggsField& phi, double kappa) {
  ScalarField h(phi.dom);
  const int n = phi.n();
  for (std::size_t nd = 0; nd < phi.phi.nodes(); ++nd) {
    const auto m = phi.phi.at(nd);
    cplx tr(0.0, 0.0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) tr += m(i, j) * m(j, i);
    h.v[nd] = kappa * tr;
  }
  return h;
}

MatrixField adjoint_star(const MatrixField& phi, const MatrixField& H) {
  if (!(phi.dom == H.dom) || phi.dim != H.dim)
    throw std::invalid_argument("adjoint_star: dimension mismatch");
  MatrixField out(phi.dom, phi.dim);
  for (std::size_t nd = 0; nd < phi.nodes(); ++nd) {
    Eigen::SelfAdjointEigenSolver<Mat> es{Mat(H.at(nd))};
    if (es.eigenvalues().minCoeff() <= 0.0)
      throw std::invalid_argument("adjoint_star: H not positive definite at node " +
                                  std::to_string(nd));
    out.at(nd) = Mat(H.at(nd)).inverse() * phi.at(nd).adjoint() * H.at(nd);
  }
  return out;
}

MatrixField adjoint_star(const HiggsField& phi, const HermitianMetricField& H) {
  if (!(phi.dom == H.dom) || phi.n() != H.dim)
    throw std::invalid_argument("adjoint_star: dimension mismatch");
  const int n = H.dim;
  MatrixField out(phi.dom, n);
  if (H.rep == HermitianMetricField::Rep::Diagonal) {
    parallel_for(out.nodes(), [&](std::size_t nd) {
      const auto p = phi.phi.at(nd);
      auto o = out.at(nd);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          o(i, j) = std::conj(p(j, i)) * std::exp(2.0 * (H.u[j].v[nd] - H.u[i].v[nd]));
    });
    return out;
  }
  const MatrixField h = H.matrix();
  const MatrixField hinv = H.matrix_inv();
  parallel_for(out.nodes(), [&](std::size_t nd) {
    out.at(nd) = hinv.at(nd) * phi.phi.at(nd).adjoint() * h.at(nd);
  });
  return out;
}

MatrixField circle_action(const HiggsField& phi, double theta) {
  MatrixField out = phi.phi;
  const cplx ph = std::polar(1.0, theta);
  for (cplx& z : out.v) z *= ph;
  return out;
}

HiggsField circle_action_normal_form(const HiggsField& phi, double theta) {
  std::vector<Differential> rotated = phi.alphas;
  for (auto& a : rotated) {
    const cplx ph = std::polar(1.0, (a.k + 1) * theta);
    switch (a.rep) {
      case Differential::Rep::Constant:
        a.constant *= ph;
        break;
      case Differential::Rep::Poly:
        for (cplx& c : a.coeffs) c *= ph;
        break;
      case Differential::Rep::Sampled:
        for (cplx& s : a.samples.v) s *= ph;
        break;
    }
  }
  return build_hitchin_higgs(phi.basis, rotated, phi.dom);
}

namespace {

// Fill flagged nodes of each u field by repeated neighbor averaging;
// deterministic fixed-order sweeps.
void interpolate_flagged(std::vector<RealField>& u, const std::vector<std::size_t>& flagged) {
  if (flagged.empty()) return;
  const SurfaceDomain& dom = u[0].dom;
  const int a = dom.axis_nodes();
  const bool wrap = dom.kind == SurfaceDomain::Kind::Torus;
  auto neighbor = [&](int ix, int iy, int dx_, int dy_) -> std::size_t {
    int nx = ix + dx_, ny = iy + dy_;
    if (wrap) {
      nx = (nx + a) % a;
      ny = (ny + a) % a;
    } else {
      nx = std::clamp(nx, 0, a - 1);
      ny = std::clamp(ny, 0, a - 1);
    }
    return dom.index(nx, ny);
  };
  for (auto& field : u) {
    for (int pass = 0; pass < 4000; ++pass) {
      double change = 0.0;
      for (std::size_t nd : flagged) {
        const int ix = static_cast<int>(nd % a), iy = static_cast<int>(nd / a);
        const double avg = 0.25 * (field.v[neighbor(ix, iy, 1, 0)] + field.v[neighbor(ix, iy, -1, 0)] +
                                   field.v[neighbor(ix, iy, 0, 1)] + field.v[neighbor(ix, iy, 0, -1)]);
        change = std::max(change, std::abs(field.v[nd] - avg));
        field.v[nd] = avg;
      }
      if (change < 1e-13) break;
    }
  }
}

// Newton solve of the diagonal commutator projection at one node.
// Unknowns t_i = 2 u_i; residual g_i = sum_k A_ik e^{t_i-t_k} - A_ki e^{t_k-t_i}.
bool fiducial_newton(const Mat& p, Eigen::VectorXd& t) {
  const int n = static_cast<int>(p.rows());
  Eigen::MatrixXd A(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) A(i, j) = std::norm(p(i, j));
  const double scale = std::max(1.0, A.sum());

  t.setZero(n);
  Eigen::VectorXd g(n), dt(n);
  Eigen::MatrixXd J(n, n);
  auto eval_g = [&](const Eigen::VectorXd& tv, Eigen::VectorXd& gv) {
    for (int i = 0; i < n; ++i) {
      double acc = 0.0;
      for (int k = 0; k < n; ++k) {
        if (k == i) continue;
        acc += A(i, k) * std::exp(tv[i] - tv[k]) - A(k, i) * std::exp(tv[k] - tv[i]);
      }
      gv[i] = acc;
    }
  };

  for (int iter = 0; iter < 120; ++iter) {
    eval_g(t, g);
    if (g.lpNorm<Eigen::Infinity>() < 1e-13 * scale) return true;
    for (int i = 0; i < n; ++i) {
      double diag = 0.0;
      for (int k = 0; k < n; ++k) {
        if (k == i) continue;
        const double up = A(i, k) * std::exp(t[i] - t[k]);
        const double dn = A(k, i) * std::exp(t[k] - t[i]);
        diag += up + dn;
        J(i, k) = -up - dn;
      }
      J(i, i) = diag;
    }
    // J annihilates constants; pin that direction (g sums to zero as well).
    J.array() += 1.0 / n;
    dt = J.fullPivLu().solve(-g);
    if (!dt.allFinite()) return false;
    double step = 1.0;
    const double g0 = g.norm();
    for (int ls = 0; ls < 40; ++ls) {
      Eigen::VectorXd trial = t + step * dt;
      trial.array() -= trial.mean();
      eval_g(trial, g);
      if (g.norm() < g0 || g.lpNorm<Eigen::Infinity>() < 1e-13 * scale) {
        t = trial;
        break;
      }
      step *= 0.5;
      if (ls == 39) return false;
    }
    if (t.lpNorm<Eigen::Infinity>() > 80.0) return false;
  }
  eval_g(t, g);
  return g.lpNorm<Eigen::Infinity>() < 1e-10 * scale;
}

}  // namespace

FiducialMetric fiducial_metric(const HiggsField& phi) {
  const int n = phi.n();
  const SurfaceDomain& dom = phi.dom;
  FiducialMetric out;
  out.H = HermitianMetricField::identity(dom, n);
  std::vector<std::size_t> flagged;

  if (phi.is_cyclic()) {
    // Closed form: all eta ratios equal r with r^n = |w|^2, w the corner
    // entry; det 1 fixes the ladder.
    for (std::size_t nd = 0; nd < dom.size(); ++nd) {
      const cplx w = phi.phi.at(nd)(0, n - 1);
      const double aw = std::abs(w);
      const double logr = aw > 0.0 ? (2.0 / n) * std::log(aw) : 0.0;
      const double umax = 0.25 * (n - 1) * std::abs(logr);
      if (aw == 0.0 || umax > 20.0) {
        flagged.push_back(nd);
        continue;
      }
      for (int i = 0; i < n; ++i)
        out.H.u[i].v[nd] = 0.5 * ((i - 0.5 * (n - 1)) * logr);
    }
  } else {
    Eigen::VectorXd t;
    for (std::size_t nd = 0; nd < dom.size(); ++nd) {
      if (fiducial_newton(Mat(phi.phi.at(nd)), t) && t.lpNorm<Eigen::Infinity>() <= 40.0) {
        for (int i = 0; i < n; ++i) out.H.u[i].v[nd] = 0.5 * t[i];
      } else {
        flagged.push_back(nd);
      }
    }
  }

  out.defined = flagged.size() < dom.size();
  if (out.defined) interpolate_flagged(out.H.u, flagged);
  out.H.project_gauge();
  out.flagged = std::move(flagged);
  return out;
}

double harmonicity_defect(const HiggsField& phi) {
  double worst = 0.0;
  for (const auto& a : phi.alphas) {
    const ScalarField s = sample_differential(a, phi.dom);
    worst = std::max(worst, sup_abs(d_dzbar(s)));
  }
  return worst;
}

}  // namespace hmlab
