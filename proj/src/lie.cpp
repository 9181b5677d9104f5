#include "hmlab/lie.hpp"

#include <stdexcept>

namespace hmlab {
namespace {

double sup_abs(const Mat& m) {
  double r = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) r = std::max(r, std::abs(m(i, j)));
  return r;
}

}  // namespace

LieBasis construct_principal_sl2(int n) {
  if (n < 2 || n > 8)
    throw std::invalid_argument("construct_principal_sl2: n must be in [2, 8], got " +
                                std::to_string(n));
  LieBasis b;
  b.n = n;
  b.x = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i) b.x(i, i) = 0.5 * (n - 1 - 2 * i);

  b.em1 = Mat::Zero(n, n);
  for (int i = 0; i + 1 < n; ++i) b.em1(i + 1, i) = 1.0;

  // [em1, e1] = x forces a_k = -(sum of the first k diagonal entries of x)
  // = -k(n-k)/2.
  b.e1 = Mat::Zero(n, n);
  for (int k = 1; k < n; ++k) b.e1(k - 1, k) = -0.5 * k * (n - k);

  Mat p = b.e1;
  for (int k = 1; k < n; ++k) {
    b.hw.push_back(p);
    b.exponents.push_back(k);
    p = p * b.e1;
  }

  b.weight_spaces = weight_decomposition(b);
  return b;
}

std::vector<Mat> highest_weight_vectors(const LieBasis& basis) { return basis.hw; }

std::map<int, std::vector<Mat>> weight_decomposition(const LieBasis& basis) {
  const int n = basis.n;
  std::map<int, std::vector<Mat>> spaces;
  // ad(x) E_{ij} = (j - i) E_{ij}; the traceless diagonal part has weight 0.
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      Mat e = Mat::Zero(n, n);
      e(i, j) = 1.0;
      spaces[j - i].push_back(std::move(e));
    }
  for (int i = 0; i + 1 < n; ++i) {
    Mat h = Mat::Zero(n, n);
    h(i, i) = 1.0;
    h(i + 1, i + 1) = -1.0;
    spaces[0].push_back(std::move(h));
  }
  return spaces;
}

cplx trace_form(const Mat& a, const Mat& b, double kappa) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows())
    throw std::invalid_argument("trace_form: matrices must be square and of equal size");
  return kappa * (a * b).trace();
}

cplx hermitian_pairing(const Mat& a, const Mat& b, double kappa) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows())
    throw std::invalid_argument("hermitian_pairing: matrices must be square and of equal size");
  return kappa * (a * b.adjoint()).trace();
}

LieCheck lie_invariant_residuals(const LieBasis& b) {
  LieCheck out;
  auto push = [&](const std::string& name, double r) {
    out.residuals.emplace_back(name, r);
    out.max_residual = std::max(out.max_residual, r);
  };

  push("[x,em1]+em1", sup_abs(bracket(b.x, b.em1) + b.em1));
  push("[x,e1]-e1", sup_abs(bracket(b.x, b.e1) - b.e1));
  push("[em1,e1]-x", sup_abs(bracket(b.em1, b.e1) - b.x));
  push("tr(x)", std::abs(b.x.trace()));
  push("tr(e1)", std::abs(b.e1.trace()));
  push("tr(em1)", std::abs(b.em1.trace()));

  for (std::size_t k = 0; k < b.hw.size(); ++k) {
    const int m = b.exponents[k];
    push("[e1,e_" + std::to_string(m) + "]", sup_abs(bracket(b.e1, b.hw[k])));
    push("[x,e_" + std::to_string(m) + "]-" + std::to_string(m) + "e_" + std::to_string(m),
         sup_abs(bracket(b.x, b.hw[k]) - cplx(m) * b.hw[k]));
    push("tr(e_" + std::to_string(m) + ")", std::abs(b.hw[k].trace()));
  }

  // dim span{e_1..e_{n-1}} = n-1: the e_k live on distinct superdiagonals, so
  // rank equals the count of nonzero members.
  {
    int nonzero = 0;
    for (const auto& e : b.hw)
      if (sup_abs(e) > 0.0) ++nonzero;
    push("hw count", std::abs(nonzero - (b.n - 1)));
  }

  // Weight-space dimensions: sum n^2 - 1, and dim g_i = n - |i| for i != 0,
  // n - 1 for i = 0.
  {
    int total = 0;
    double worst = 0.0;
    for (const auto& [w, basis_w] : b.weight_spaces) {
      total += static_cast<int>(basis_w.size());
      const int expect = (w == 0) ? b.n - 1 : b.n - std::abs(w);
      worst = std::max(worst, std::abs(static_cast<double>(basis_w.size()) - expect));
      for (const auto& e : basis_w)
        worst = std::max(worst, sup_abs(bracket(b.x, e) - cplx(w) * e));
    }
    push("weight dims", worst);
    push("dim sum", std::abs(total - (b.n * b.n - 1)));
  }

  return out;
}

}  // namespace hmlab
