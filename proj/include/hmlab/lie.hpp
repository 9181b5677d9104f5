#pragma once

#include <map>
#include <string>
#include <vector>

#include "hmlab/types.hpp"

namespace hmlab {

// Principal sl(2) data for g = sl(n, C) in the vector representation,
// normalized so that
//   [x, e_{-1}] = -e_{-1},   [x, e_1] = e_1,   [e_{-1}, e_1] = x.
// With this bracket convention the superdiagonal entries of e1 come out
// negative: e1 = sum_k a_k E_{k,k+1} with a_k = -k(n-k)/2.
struct LieBasis {
  int n = 0;
  Mat x;    // diag((n-1)/2, (n-3)/2, ..., -(n-1)/2)
  Mat e1;   // raising element
  Mat em1;  // lowering element, ones on the subdiagonal
  // Highest-weight vectors e_k = e1^k for k = 1..n-1; hw[0] is e1 itself.
  std::vector<Mat> hw;
  std::vector<int> exponents;  // 1, 2, ..., n-1
  // Basis of g_i for each ad(x)-weight i in [-(n-1), n-1].
  std::map<int, std::vector<Mat>> weight_spaces;
};

inline Mat bracket(const Mat& a, const Mat& b) { return a * b - b * a; }

// Throws std::invalid_argument unless 2 <= n <= 8.
LieBasis construct_principal_sl2(int n);

std::vector<Mat> highest_weight_vectors(const LieBasis& basis);
std::map<int, std::vector<Mat>> weight_decomposition(const LieBasis& basis);

// kappa * tr(A B) and the Hermitian pairing kappa * tr(A B^dagger).
// Throws std::invalid_argument on dimension mismatch.
cplx trace_form(const Mat& a, const Mat& b, double kappa = 1.0);
cplx hermitian_pairing(const Mat& a, const Mat& b, double kappa = 1.0);

// Residuals of every LieBasis invariant, for tests and the lie-check CLI.
struct LieCheck {
  std::vector<std::pair<std::string, double>> residuals;
  double max_residual = 0.0;
};
LieCheck lie_invariant_residuals(const LieBasis& basis);

}  // namespace hmlab
