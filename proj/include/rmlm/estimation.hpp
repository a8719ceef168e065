#pragma once

// Empirical pipeline: rank-based margin standardization, radial/angular
// decomposition, thresholded scaling estimators, the pair transformation and
// the two-step (intermediate threshold) dependence estimator.

#include "rmlm/common.hpp"

#include <numeric>

namespace rmlm {

// Empirical integral transform to pseudo-Frechet(2) margins:
// x -> (-log(rank/(n+1)))^{-1/2}, rank = count of column values <= x.
inline Matrix frechet2_transform(const Matrix& raw) {
  const Index n = raw.rows();
  require(n >= 2, "need at least two observations");
  Matrix out(n, raw.cols());
  std::vector<double> sorted(static_cast<size_t>(n));
  for (Index c = 0; c < raw.cols(); ++c) {
    for (Index r = 0; r < n; ++r) sorted[static_cast<size_t>(r)] = raw(r, c);
    std::sort(sorted.begin(), sorted.end());
    for (Index r = 0; r < n; ++r) {
      const auto rank = std::upper_bound(sorted.begin(), sorted.end(),
                                         raw(r, c)) -
                        sorted.begin();
      out(r, c) = 1.0 / std::sqrt(-std::log(static_cast<double>(rank) /
                                            static_cast<double>(n + 1)));
    }
  }
  return out;
}

// Componentwise rank transform to standard Pareto(2):
// value = (1 - rank/(N+1))^{-1/2}; ties broken by stable input order.
inline Matrix pareto2_transform(const Matrix& pairs) {
  const Index n = pairs.rows();
  require(n >= 2, "need at least two rows");
  Matrix out(n, pairs.cols());
  std::vector<Index> idx(static_cast<size_t>(n));
  for (Index c = 0; c < pairs.cols(); ++c) {
    std::iota(idx.begin(), idx.end(), Index{0});
    std::stable_sort(idx.begin(), idx.end(), [&](Index x, Index y) {
      return pairs(x, c) < pairs(y, c);
    });
    for (Index r = 0; r < n; ++r) {
      const double rank = static_cast<double>(r + 1);
      out(idx[static_cast<size_t>(r)], c) =
          1.0 / std::sqrt(1.0 - rank / static_cast<double>(n + 1));
    }
  }
  return out;
}

struct AngularSample {
  Vector radii;   // Euclidean row norms
  Matrix angles;  // unit rows
};

inline AngularSample angular(const Matrix& pairs) {
  AngularSample s;
  s.radii.resize(pairs.rows());
  s.angles.resize(pairs.rows(), pairs.cols());
  for (Index r = 0; r < pairs.rows(); ++r) {
    const double norm = pairs.row(r).norm();
    require(norm > 0.0, "zero row has no direction");
    s.radii(r) = norm;
    s.angles.row(r) = pairs.row(r) / norm;
  }
  return s;
}

// k-th largest radius (the order-statistic threshold R^{(k)}).
inline double radius_order_statistic(const Vector& radii, Index k) {
  require(k >= 1 && k <= radii.size(), "k out of range");
  std::vector<double> r(radii.data(), radii.data() + radii.size());
  std::nth_element(r.begin(), r.begin() + (k - 1), r.end(),
                   std::greater<>());
  return r[static_cast<size_t>(k - 1)];
}

namespace detail {

// (weight/k) * sum of f(angle row) over observations with R >= R^{(k)}.
template <typename F>
double threshold_mean(const AngularSample& s, Index k, double weight, F&& f) {
  const double threshold = radius_order_statistic(s.radii, k);
  double total = 0.0;
  for (Index r = 0; r < s.radii.size(); ++r)
    if (s.radii(r) >= threshold) total += f(s.angles.row(r));
  return weight * total / static_cast<double>(k);
}

}  // namespace detail

// (2/k) sum over the k largest radii of max_j omega_j^2.
inline double estimate_sigma_max_pair(const AngularSample& s, Index k) {
  return detail::threshold_mean(s, k, 2.0, [](const auto& w) {
    return w.cwiseAbs2().maxCoeff();
  });
}

// Univariate scaling of one coordinate inside the pair's decomposition:
// (2/k) sum of omega_i^2.
inline double estimate_sigma_univ(const AngularSample& s, Index coordinate,
                                  Index k) {
  require(coordinate >= 0 && coordinate < s.angles.cols(),
          "coordinate out of range");
  return detail::threshold_mean(s, k, 2.0, [&](const auto& w) {
    return w(coordinate) * w(coordinate);
  });
}

// (2/k) sum of omega_1 * omega_2 (the direct dependence estimator).
inline double estimate_sigma_dep(const AngularSample& s, Index k) {
  return detail::threshold_mean(s, k, 2.0,
                                [](const auto& w) { return w(0) * w(1); });
}

// Scaling of max(X_i, a X_m); the (a^2+1) factor restores the total
// spectral mass of the scaled pair.
inline double estimate_sigma_max_scaled(const Matrix& pairs, double a,
                                        Index k2) {
  require(a >= 1.0, "a must be at least 1");
  require(pairs.cols() == 2, "expected a two-column matrix");
  Matrix scaled = pairs;
  scaled.col(1) *= a;
  const AngularSample s = angular(scaled);
  return detail::threshold_mean(s, k2, a * a + 1.0, [](const auto& w) {
    return w.cwiseAbs2().maxCoeff();
  });
}

// First-stage threshold plus the (c1, c2) pair transformation:
// keep the k1 rows with largest radius, then map (x_i, x_m) to
// (max(c1 x_i, x_m) - c1 x_i, (1+c2) x_m + c2 x_i - c2 max(x_i, x_m)).
inline Matrix transform_T(const Matrix& pairs, double c1, double c2,
                          Index k1) {
  require(c1 > 0.0 && c1 <= 1.0, "c1 must lie in (0, 1]");
  require(c2 > 0.0, "c2 must be positive");
  require(pairs.cols() == 2, "expected a two-column matrix");
  require(k1 >= 1 && k1 <= pairs.rows(), "k1 out of range");
  const AngularSample s = angular(pairs);
  const double threshold = radius_order_statistic(s.radii, k1);
  std::vector<Index> keep;
  for (Index r = 0; r < pairs.rows(); ++r)
    if (s.radii(r) >= threshold) keep.push_back(r);
  Matrix out(static_cast<Index>(keep.size()), 2);
  for (Index r = 0; r < out.rows(); ++r) {
    const double xi = pairs(keep[static_cast<size_t>(r)], 0);
    const double xm = pairs(keep[static_cast<size_t>(r)], 1);
    out(r, 0) = std::max(c1 * xi, xm) - c1 * xi;
    out(r, 1) = (1.0 + c2) * xm + c2 * xi - c2 * std::max(xi, xm);
  }
  return out;
}

// Two-step dependence estimate on the transformed pair: Pareto(2)
// standardize both columns, angular-decompose, and average omega_1 omega_2
// over the top (k2 ∧ N_n) radii.  A constant T column makes the estimate
// meaningless; the independence-boundary value 0 is returned and flagged.
inline double estimate_sigma_T(const Matrix& t, Index k2,
                               bool* degenerate = nullptr) {
  require(t.rows() >= 2, "need at least two retained rows");
  require(t.cols() == 2, "expected a two-column matrix");
  if (degenerate != nullptr) *degenerate = false;
  for (Index c = 0; c < 2; ++c)
    if (t.col(c).maxCoeff() == t.col(c).minCoeff()) {
      if (degenerate != nullptr) *degenerate = true;
      return 0.0;
    }
  const Matrix std_t = pareto2_transform(t);
  const AngularSample s = angular(std_t);
  const Index k = std::min<Index>(k2, t.rows());
  const double threshold = radius_order_statistic(s.radii, k);
  double total = 0.0;
  for (Index r = 0; r < s.radii.size(); ++r)
    if (s.radii(r) >= threshold) total += s.angles(r, 0) * s.angles(r, 1);
  return 2.0 * total / static_cast<double>(k2);
}

// Conditioned transform: subtract the collective maximum over O_kappa,
// then apply the (c1, c2) transformation.  The first-stage threshold uses
// the radius of (X_i, X_m, X_{O_kappa}).
inline Matrix transform_T_kappa(const Matrix& data, Index i, Index m,
                                const IndexSet& o_kappa, double c1, double c2,
                                Index k1) {
  require(i != m && i >= 0 && m >= 0 && i < data.cols() && m < data.cols(),
          "invalid pair");
  for (Index k : o_kappa)
    require(k != i && k != m && k >= 0 && k < data.cols(),
            "O_kappa overlaps the pair");
  require(k1 >= 1 && k1 <= data.rows(), "k1 out of range");
  const Index n = data.rows();
  Vector radius(n);
  Matrix t3(n, 2);
  for (Index r = 0; r < n; ++r) {
    double m_kappa = 0.0;
    double ss = data(r, i) * data(r, i) + data(r, m) * data(r, m);
    for (Index k : o_kappa) {
      m_kappa = std::max(m_kappa, data(r, k));
      ss += data(r, k) * data(r, k);
    }
    radius(r) = std::sqrt(ss);
    t3(r, 0) = std::max(m_kappa, data(r, i)) - m_kappa;
    t3(r, 1) = std::max(m_kappa, data(r, m)) - m_kappa;
  }
  std::vector<double> rs(radius.data(), radius.data() + n);
  std::nth_element(rs.begin(), rs.begin() + (k1 - 1), rs.end(),
                   std::greater<>());
  const double threshold = rs[static_cast<size_t>(k1 - 1)];
  std::vector<Index> keep;
  for (Index r = 0; r < n; ++r)
    if (radius(r) >= threshold) keep.push_back(r);
  Matrix out(static_cast<Index>(keep.size()), 2);
  for (Index r = 0; r < out.rows(); ++r) {
    const double t1 = t3(keep[static_cast<size_t>(r)], 0);
    const double t2 = t3(keep[static_cast<size_t>(r)], 1);
    out(r, 0) = std::max(c1 * t1, t2) - c1 * t1;
    out(r, 1) = (1.0 + c2) * t2 + c2 * t1 - c2 * std::max(t1, t2);
  }
  return out;
}

}  // namespace rmlm
