#pragma once

// Shared scalar types and tolerance conventions.
//
// All equality/strictness decisions between path products, scalings and
// other O(1) model quantities go through the two comparators below with a
// single default relative tolerance.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace rmlm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using BoolMatrix = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;
using Index = Eigen::Index;
using IndexSet = std::vector<Index>;

inline constexpr double kRelTol = 1e-9;

inline double comparison_scale(double x, double y) {
  return std::max({1.0, std::abs(x), std::abs(y)});
}

// |x - y| <= tol * max(1, |x|, |y|)
inline bool approx_equal(double x, double y, double tol = kRelTol) {
  return std::abs(x - y) <= tol * comparison_scale(x, y);
}

// x exceeds y by more than the tolerance margin.
inline bool strictly_greater(double x, double y, double tol = kRelTol) {
  return x - y > tol * comparison_scale(x, y);
}

struct InvalidInput : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DegenerateValue : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& what) {
  if (!cond) throw InvalidInput(what);
}

inline bool contains(const IndexSet& s, Index v) {
  return std::find(s.begin(), s.end(), v) != s.end();
}

}  // namespace rmlm
