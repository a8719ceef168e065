#pragma once

// Detection matrices and the pairwise max-weighted-path algorithms.
//
// From a margin-standardized sample the five matrices are, per ordered pair
// (i,m):
//   C1  calibrated transform constant, truncated to [0.1, 0.8]
//   D1  scaled-maximum contrast ((sigma^2_{M_{i,am}} - sigma^2_{M_im} - a^2 + 1)/(a^2-1))
//   D2  two-step dependence of the transformed pair at c1 = C1
//   D3  stability gap between c1' = 0.1 c1 and c1
//   D4  sigma^2_{M_im} at the second-stage threshold

#include "rmlm/common.hpp"
#include "rmlm/estimation.hpp"
#include "rmlm/parallel.hpp"

#include <limits>

namespace rmlm {

struct ThresholdPlan {
  Index k1 = 500;
  Index k2 = 200;
};

inline void validate(const ThresholdPlan& plan, Index n) {
  require(plan.k2 >= 1 && plan.k2 <= plan.k1 && plan.k1 <= n,
          "need 1 <= k2 <= k1 <= n");
}

struct EpsilonConfig {
  double eps1 = 0.25;
  double eps2 = 0.01;
  double eps3 = 0.07;
  double eps4 = 0.01;
  double eps5 = 0.07;
  double eps6 = 0.2;
  double a = 1.0001;
};

inline void validate(const EpsilonConfig& eps) {
  require(eps.a > 1.0, "a must exceed 1");
  require(eps.eps1 >= 0 && eps.eps2 >= 0 && eps.eps3 >= 0 && eps.eps4 >= 0 &&
              eps.eps5 >= 0 && eps.eps6 >= 0,
          "epsilons must be nonnegative");
}

struct DetectionMatrices {
  Matrix C1, D1, D2, D3, D4;  // d x d, diagonal entries unused (NaN)
  struct Diagnostic {
    Index i, m;
    std::string message;
  };
  std::vector<Diagnostic> diagnostics;
};

inline DetectionMatrices build_detection_matrices(
    const Matrix& data, const ThresholdPlan& plan, double a,
    unsigned threads = default_threads()) {
  const Index d = data.cols();
  require(d >= 2, "need at least two columns");
  validate(plan, data.rows());
  require(a > 1.0, "a must exceed 1");

  DetectionMatrices out;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  out.C1 = Matrix::Constant(d, d, nan);
  out.D1 = Matrix::Constant(d, d, nan);
  out.D2 = Matrix::Constant(d, d, nan);
  out.D3 = Matrix::Constant(d, d, nan);
  out.D4 = Matrix::Constant(d, d, nan);

  std::vector<std::pair<Index, Index>> pairs;
  for (Index i = 0; i < d; ++i)
    for (Index m = 0; m < d; ++m)
      if (i != m) pairs.emplace_back(i, m);
  std::vector<std::vector<DetectionMatrices::Diagnostic>> diag(pairs.size());

  parallel_for(pairs.size(), threads, [&](std::size_t p) {
    const auto [i, m] = pairs[p];
    try {
      Matrix pair_cols(data.rows(), 2);
      pair_cols.col(0) = data.col(i);
      pair_cols.col(1) = data.col(m);
      const AngularSample s = angular(pair_cols);

      const double sigma_i = estimate_sigma_univ(s, 0, plan.k1);
      const double sigma_m = estimate_sigma_univ(s, 1, plan.k1);
      const double sigma_max_k1 = estimate_sigma_max_pair(s, plan.k1);
      const double radicand =
          std::max(0.0, sigma_i + sigma_m - sigma_max_k1);
      const double c1 = std::min(0.1 + std::sqrt(radicand), 0.8);
      out.C1(i, m) = c1;

      const double sigma_max_k2 = estimate_sigma_max_pair(s, plan.k2);
      const double sigma_scaled =
          estimate_sigma_max_scaled(pair_cols, a, plan.k2);
      out.D1(i, m) =
          (sigma_scaled - sigma_max_k2 - a * a + 1.0) / (a * a - 1.0);
      out.D4(i, m) = sigma_max_k2;

      const double c2 = 1.0 / c1;
      bool degenerate = false;
      const Matrix t = transform_T(pair_cols, c1, c2, plan.k1);
      out.D2(i, m) = estimate_sigma_T(t, plan.k2, &degenerate);
      if (degenerate)
        diag[p].push_back({i, m, "constant T column; D2 set to 0"});
      const Matrix t_prime = transform_T(pair_cols, 0.1 * c1, c2, plan.k1);
      bool degenerate_prime = false;
      out.D3(i, m) =
          estimate_sigma_T(t_prime, plan.k2, &degenerate_prime) - out.D2(i, m);
      if (degenerate_prime)
        diag[p].push_back({i, m, "constant T' column; estimate set to 0"});
    } catch (const std::exception& e) {
      diag[p].push_back({i, m, e.what()});
    }
  });

  for (auto& dv : diag)
    for (auto& v : dv) out.diagnostics.push_back(std::move(v));
  return out;
}

// Algorithm "identification of MWP pairs": intersection of the four
// screening sets.  NaN entries fail every comparison, so pairs with
// estimator diagnostics are never reported.
inline BoolMatrix algorithm_mwp(const DetectionMatrices& m,
                                const EpsilonConfig& eps) {
  validate(eps);
  const Index d = m.C1.rows();
  BoolMatrix p_hat = BoolMatrix::Constant(d, d, false);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j) {
      if (i == j) continue;
      const bool s1 = m.D1(i, j) >= -eps.eps1 &&
                      m.D1(i, j) - m.D1(j, i) >= -eps.eps2;
      const bool s2 = m.D2(i, j) > 1.0 - eps.eps3;
      const bool s3 = m.D2(i, j) > m.D2(j, i) + eps.eps4;
      const bool s4 = m.D3(i, j) < eps.eps5 * m.C1(i, j);
      p_hat(i, j) = s1 && s2 && s3 && s4;
    }
  return p_hat;
}

// Extended variant: pairs failing the intersection are flagged as
// indistinguishable when their pairwise maximum scaling stays below 1 +
// eps6 (strong symmetric extreme dependence).
inline std::pair<BoolMatrix, BoolMatrix> algorithm_mwp_indist(
    const DetectionMatrices& m, const EpsilonConfig& eps) {
  const BoolMatrix p_hat = algorithm_mwp(m, eps);
  const Index d = m.C1.rows();
  BoolMatrix p_star = BoolMatrix::Constant(d, d, false);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j)
      if (i != j && !p_hat(i, j))
        p_star(i, j) = m.D4(i, j) < 1.0 + eps.eps6;
  return {p_hat, p_star};
}

}  // namespace rmlm
