#include "hmlab/hermitian.hpp"

#include <stdexcept>

#include "hmlab/higgs.hpp"
#include "hmlab/kernels.hpp"
#include "hmlab/ops.hpp"
#include "hmlab/parallel.hpp"

namespace hmlab {

HermitianMetricField HermitianMetricField::identity(const SurfaceDomain& dom, int n) {
  HermitianMetricField h;
  h.rep = Rep::Diagonal;
  h.dom = dom;
  h.dim = n;
  h.u.assign(n, RealField(dom));
  return h;
}

HermitianMetricField HermitianMetricField::diagonal(const SurfaceDomain& dom,
                                                    std::vector<RealField> u) {
  HermitianMetricField h;
  h.rep = Rep::Diagonal;
  h.dom = dom;
  h.dim = static_cast<int>(u.size());
  h.u = std::move(u);
  h.project_gauge();
  return h;
}

HermitianMetricField HermitianMetricField::full(MatrixField S) {
  HermitianMetricField h;
  h.rep = Rep::Full;
  h.dom = S.dom;
  h.dim = S.dim;
  h.S = std::move(S);
  h.project_gauge();
  return h;
}

void HermitianMetricField::project_gauge() {
  if (rep == Rep::Diagonal) {
    const std::size_t m = dom.size();
    for (std::size_t i = 0; i < m; ++i) {
      double mean = 0.0;
      for (int j = 0; j < dim; ++j) mean += u[j].v[i];
      mean /= dim;
      for (int j = 0; j < dim; ++j) u[j].v[i] -= mean;
    }
    return;
  }
  parallel_for(S.nodes(), [&](std::size_t nd) {
    Mat s = S.at(nd);
    s = 0.5 * (s + Mat(s.adjoint()));
    const cplx tr = s.trace() / static_cast<double>(dim);
    for (int j = 0; j < dim; ++j) s(j, j) -= tr;
    S.at(nd) = s;
  });
}

Mat hermitian_exp(const Mat& s) {
  Eigen::SelfAdjointEigenSolver<Mat> es(s);
  return es.eigenvectors() * es.eigenvalues().array().exp().matrix().asDiagonal() *
         es.eigenvectors().adjoint();
}

Mat hermitian_sqrt(const Mat& h) {
  Eigen::SelfAdjointEigenSolver<Mat> es(h);
  return es.eigenvectors() * es.eigenvalues().array().sqrt().matrix().asDiagonal() *
         es.eigenvectors().adjoint();
}

Mat hermitian_inv_sqrt(const Mat& h) {
  Eigen::SelfAdjointEigenSolver<Mat> es(h);
  return es.eigenvectors() * es.eigenvalues().array().rsqrt().matrix().asDiagonal() *
         es.eigenvectors().adjoint();
}

namespace {

enum class Func { Plain, Inv, Sqrt, InvSqrt };

MatrixField materialize(const HermitianMetricField& hm, Func f) {
  MatrixField out(hm.dom, hm.dim);
  if (hm.rep == HermitianMetricField::Rep::Diagonal) {
    parallel_for(out.nodes(), [&](std::size_t nd) {
      auto m = out.at(nd);
      for (int j = 0; j < hm.dim; ++j) {
        double e = 2.0 * hm.u[j].v[nd];
        if (f == Func::Inv) e = -e;
        if (f == Func::Sqrt) e = 0.5 * e;
        if (f == Func::InvSqrt) e = -0.5 * e;
        m(j, j) = std::exp(e);
      }
    });
    return out;
  }
  parallel_for(out.nodes(), [&](std::size_t nd) {
    Eigen::SelfAdjointEigenSolver<Mat> es(Mat(hm.S.at(nd)));
    Eigen::ArrayXd lam = es.eigenvalues().array();
    if (f == Func::Inv) lam = -lam;
    if (f == Func::Sqrt) lam = 0.5 * lam;
    if (f == Func::InvSqrt) lam = -0.5 * lam;
    out.at(nd) =
        es.eigenvectors() * lam.exp().matrix().asDiagonal() * es.eigenvectors().adjoint();
  });
  return out;
}

}  // namespace

MatrixField HermitianMetricField::matrix() const { return materialize(*this, Func::Plain); }
MatrixField HermitianMetricField::matrix_inv() const { return materialize(*this, Func::Inv); }
MatrixField HermitianMetricField::matrix_sqrt() const { return materialize(*this, Func::Sqrt); }
MatrixField HermitianMetricField::matrix_inv_sqrt() const {
  return materialize(*this, Func::InvSqrt);
}

MatrixField chern_curvature(const HermitianMetricField& H) {
  if (H.rep == HermitianMetricField::Rep::Diagonal) {
    // Per diagonal entry: F_jj = -2 dzbar dz u_j = -laplacian(u_j)/2.
    MatrixField out(H.dom, H.dim);
    for (int j = 0; j < H.dim; ++j) {
      RealField l = laplacian(H.u[j]);
      for (std::size_t nd = 0; nd < out.nodes(); ++nd) out.at(nd)(j, j) = -0.5 * l.v[nd];
    }
    return out;
  }
  const MatrixField h = H.matrix();
  const MatrixField hinv = H.matrix_inv();
  const MatrixField dh = d_dz(h);
  MatrixField a(H.dom, H.dim);
  parallel_for(a.nodes(), [&](std::size_t nd) { a.at(nd) = hinv.at(nd) * dh.at(nd); });
  MatrixField f = d_dzbar(a);
  const int n = H.dim;
  // In the continuum F is H-self-adjoint and traceless (det H = 1); the
  // discrete composition violates both at truncation order, which would make
  // the full system unsolvable.  Build the identities into the operator.
  parallel_for(f.nodes(), [&](std::size_t nd) {
    Mat m = -Mat(f.at(nd));
    m = 0.5 * (m + Mat(hinv.at(nd)) * m.adjoint() * Mat(h.at(nd)));
    const cplx tr = m.trace() / static_cast<double>(n);
    for (int j = 0; j < n; ++j) m(j, j) -= tr;
    f.at(nd) = m;
  });
  return f;
}

MatrixField ResidualField::dxdy_coefficient() const {
  MatrixField out = R;
  for (cplx& z : out.v) z *= cplx(0.0, -2.0);
  return out;
}

ResidualField residual(const HermitianMetricField& H, const HiggsField& phi) {
  if (!(H.dom == phi.dom) || H.dim != phi.n())
    throw std::invalid_argument("residual: incompatible metric and Higgs field");
  ResidualField out;
  out.R = chern_curvature(H);
  const MatrixField star = adjoint_star(phi, H);
  MatrixField& R = out.R;
  parallel_for(R.nodes(), [&](std::size_t nd) {
    const Mat p = phi.phi.at(nd);
    const Mat s = star.at(nd);
    R.at(nd) += p * s - s * p;
  });

  // Norms over the nodes the solver owns (the patch boundary ring carries
  // Dirichlet data, not unknowns).
  const int dd = H.dim * H.dim;
  double sup = 0.0;
  std::size_t count = 0;
  std::vector<double> sq;
  sq.reserve(R.nodes() * dd * 2);
  for (std::size_t nd = 0; nd < R.nodes(); ++nd) {
    if (R.dom.is_boundary(nd)) continue;
    ++count;
    for (int e = 0; e < dd; ++e) {
      const cplx z = R.v[nd * dd + e];
      sup = std::max(sup, std::abs(z));
      sq.push_back(z.real());
      sq.push_back(z.imag());
    }
  }
  const double acc2 = kern::dot(sq.data(), sq.data(), sq.size());
  out.sup = sup;
  out.l2 = count ? std::sqrt(acc2 / static_cast<double>(count)) : 0.0;
  return out;
}

}  // namespace hmlab
