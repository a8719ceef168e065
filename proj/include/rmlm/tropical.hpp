#pragma once

// Max-times semiring algebra and the ML coefficient matrix.
//
// The ML matrix A of a weighted DAG collects maximal path weights:
// a_ij = max over paths j ~> i of c_jj * (product of edge weights), a_ii =
// c_ii, and a_ij = 0 whenever j is not an ancestor of i.  Ancestry is
// therefore recoverable from the support of A, which is how the functions
// below query it.

#include "rmlm/common.hpp"
#include "rmlm/graph.hpp"

namespace rmlm {

// (A x_max B)_ij = max_k a_ik * b_kj.
template <typename DerivedA, typename DerivedB>
Matrix max_times_product(const Eigen::MatrixBase<DerivedA>& a,
                         const Eigen::MatrixBase<DerivedB>& b) {
  require(a.cols() == b.rows(), "inner dimensions disagree");
  require((a.derived().array() >= 0.0).all() &&
              (b.derived().array() >= 0.0).all(),
          "max-times product requires nonnegative entries");
  Matrix out = Matrix::Zero(a.rows(), b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index k = 0; k < a.cols(); ++k) {
      const double aik = a.derived()(i, k);
      if (aik == 0.0) continue;
      for (Index j = 0; j < b.cols(); ++j)
        out(i, j) = std::max(out(i, j), aik * b.derived()(k, j));
    }
  return out;
}

struct MlMatrix {
  Matrix coeff;  // D x D, support equals inclusive ancestry

  Index size() const { return coeff.rows(); }

  // an(i) from the support of A.
  IndexSet ancestors(Index i) const {
    IndexSet out;
    for (Index j = 0; j < size(); ++j)
      if (j != i && coeff(i, j) > 0.0) out.push_back(j);
    return out;
  }

  IndexSet descendants(Index j) const {
    IndexSet out;
    for (Index i = 0; i < size(); ++i)
      if (i != j && coeff(i, j) > 0.0) out.push_back(i);
    return out;
  }

  bool is_ancestor(Index j, Index i) const {  // j in An(i)
    return coeff(i, j) > 0.0;
  }

  bool shares_ancestry(Index i, Index m) const {  // An(i) ∩ An(m) != ∅
    for (Index k = 0; k < size(); ++k)
      if (coeff(i, k) > 0.0 && coeff(m, k) > 0.0) return true;
    return false;
  }
};

// Tropical closure by dynamic programming in topological order: each node
// combines its parents' completed rows.
inline MlMatrix ml_matrix(const EdgeWeightDag& dag) {
  validate(dag);
  const Index d = dag.size();
  Matrix a = Matrix::Zero(d, d);
  for (Index i : topological_order(dag)) {
    a(i, i) = dag.weights(i, i);
    for (Index k : parents(dag, i)) {
      const double cik = dag.weights(i, k);
      for (Index j = 0; j < d; ++j)
        a(i, j) = std::max(a(i, j), cik * a(k, j));
    }
  }
  return {std::move(a)};
}

// Rows divided by their Euclidean norms (the alpha = 2 standardization).
template <typename Derived>
Matrix standardize_rows(const Eigen::MatrixBase<Derived>& a) {
  Matrix out(a.rows(), a.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    const double norm = a.derived().row(i).norm();
    require(norm > 0.0, "cannot standardize a zero row");
    out.row(i) = a.derived().row(i) / norm;
  }
  return out;
}

inline MlMatrix standardize(const MlMatrix& a) {
  return {standardize_rows(a.coeff)};
}

// Minimum max-linear DAG: edge (k,i) survives iff no intermediate node ell
// realizes the same coefficient, i.e. a_ik exceeds every a_il * a_lk / a_ll
// with ell in de(k) ∩ pa(i).
inline std::vector<std::pair<Index, Index>> minimum_ml_dag(
    const MlMatrix& a, const EdgeWeightDag& dag, double tol = kRelTol) {
  require(a.size() == dag.size(), "matrix/DAG size mismatch");
  std::vector<std::pair<Index, Index>> edges;
  for (Index i = 0; i < dag.size(); ++i) {
    const IndexSet pa = parents(dag, i);
    for (Index k : pa) {
      double competitor = 0.0;
      for (Index l : a.descendants(k))
        if (l != i && contains(pa, l))
          competitor = std::max(
              competitor, a.coeff(i, l) * a.coeff(l, k) / a.coeff(l, l));
      if (strictly_greater(a.coeff(i, k), competitor, tol))
        edges.emplace_back(k, i);
    }
  }
  return edges;
}

// Path k ~> m ~> i is max-weighted iff a_mm * a_iu = a_mu * a_im.
inline bool is_max_weighted(const MlMatrix& a, Index u, Index m, Index i,
                            double tol = kRelTol) {
  require(a.is_ancestor(u, m), "u must be in An(m)");
  require(m != i && a.is_ancestor(m, i), "m must be in an(i)");
  return approx_equal(a.coeff(m, m) * a.coeff(i, u),
                      a.coeff(m, u) * a.coeff(i, m), tol);
}

// Entry (i,m) = 1 iff the pair shares ancestry and every common ancestor u
// reaches i through m along max-weighted paths.  Ancestrally disjoint pairs
// are excluded (they are treated as independent, not as degenerate MWP).
inline BoolMatrix mwp_ground_truth(const MlMatrix& a, double tol = kRelTol) {
  const Index d = a.size();
  BoolMatrix out = BoolMatrix::Constant(d, d, false);
  for (Index i = 0; i < d; ++i)
    for (Index m = 0; m < d; ++m) {
      if (i == m) continue;
      if (!a.is_ancestor(m, i)) continue;  // a common ancestor u with
                                           // a_im = 0 would already fail
      bool all_max_weighted = true;
      for (Index u = 0; u < d && all_max_weighted; ++u)
        if (a.is_ancestor(u, i) && a.is_ancestor(u, m))
          all_max_weighted = is_max_weighted(a, u, m, i, tol);
      out(i, m) = all_max_weighted;
    }
  return out;
}

}  // namespace rmlm
