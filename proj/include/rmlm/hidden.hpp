#pragma once

// Observed-subvector theory: lowest observed/hidden ancestors, the
// representability test for the observed marginal, and the reduced
// upper-triangular ML matrix on the observed nodes.
//
// The observed set O is a sorted list of global node indices.  The induced
// order of O is inherited from the global well-order, so with parents on
// larger labels the reduced matrix comes out upper triangular.

#include "rmlm/common.hpp"
#include "rmlm/tropical.hpp"

#include <optional>

namespace rmlm {

namespace detail {

inline std::vector<char> membership(Index d, const IndexSet& s) {
  std::vector<char> in(static_cast<size_t>(d), 0);
  for (Index v : s) {
    require(v >= 0 && v < d, "node index out of range");
    in[static_cast<size_t>(v)] = 1;
  }
  return in;
}

// Shared core of the lowest-ancestor sets: keep j from the candidate pool
// iff a_ij strictly exceeds every observed two-hop bound a_ik a_kj / a_kk
// with k observed, k in an(i) ∩ de(j).
inline IndexSet lowest_ancestors_from(const MlMatrix& a,
                                      const std::vector<char>& observed,
                                      Index i, bool pool_observed,
                                      double tol) {
  IndexSet out;
  for (Index j : a.ancestors(i)) {
    const bool j_observed = observed[static_cast<size_t>(j)] != 0;
    if (j_observed != pool_observed) continue;
    double bound = 0.0;
    for (Index k : a.descendants(j))
      if (k != i && observed[static_cast<size_t>(k)] && a.is_ancestor(k, i))
        bound = std::max(bound,
                         a.coeff(i, k) * a.coeff(k, j) / a.coeff(k, k));
    if (strictly_greater(a.coeff(i, j), bound, tol)) out.push_back(j);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace detail

// An^O(i): lowest max-weighted observed ancestors of i.
inline IndexSet lowest_observed_ancestors(const MlMatrix& a, const IndexSet& o,
                                          Index i, double tol = kRelTol) {
  const auto in_o = detail::membership(a.size(), o);
  require(in_o[static_cast<size_t>(i)] != 0, "i must be observed");
  return detail::lowest_ancestors_from(a, in_o, i, /*pool_observed=*/true, tol);
}

// An^{O^c}(i) = {i} ∪ lowest hidden ancestors of i.
inline IndexSet lowest_hidden_ancestors(const MlMatrix& a, const IndexSet& o,
                                        Index i, double tol = kRelTol) {
  const auto in_o = detail::membership(a.size(), o);
  require(i >= 0 && i < a.size(), "node index out of range");
  IndexSet out =
      detail::lowest_ancestors_from(a, in_o, i, /*pool_observed=*/false, tol);
  out.push_back(i);
  std::sort(out.begin(), out.end());
  return out;
}

struct ObservableReport {
  struct Violation {
    std::string clause;  // "(i)(a)", "(i)(b)", "(ii)(a)", "(ii)(b)"
    IndexSet nodes;      // the nodes witnessing the failed clause
  };
  bool representable = false;
  IndexSet v0;  // certified observed source set V_0^O
  std::vector<Violation> violations;
};

// Representability of the observed marginal as a recursive max-linear model
// on its observed DAG.  Violations are collected exhaustively rather than
// fail-fast so callers can explain a refusal.
inline ObservableReport check_observable(const MlMatrix& a, const IndexSet& o,
                                         double tol = kRelTol) {
  require(!o.empty(), "observed set must be nonempty");
  const Index d = a.size();
  const auto in_o = detail::membership(d, o);
  ObservableReport report;

  auto mw = [&](Index u, Index mid, Index i) {
    return is_max_weighted(a, u, mid, i, tol);
  };

  // Condition (i): observed nodes without observed ancestors.
  IndexSet candidates;
  for (Index l : o) {
    bool has_observed_ancestor = false;
    for (Index j : a.ancestors(l))
      if (in_o[static_cast<size_t>(j)]) has_observed_ancestor = true;
    if (!has_observed_ancestor) candidates.push_back(l);
  }
  for (Index l : candidates) {
    bool ok = true;
    // (i)(a): an(l) disjoint from an(j) for observed j outside De(l).
    for (Index j : o) {
      if (j == l || a.is_ancestor(l, j)) continue;
      for (Index u : a.ancestors(l))
        if (a.is_ancestor(u, j)) {
          report.violations.push_back({"(i)(a)", {l, j, u}});
          ok = false;
          break;
        }
    }
    // (i)(b): hidden ancestors reach observed descendants through l along
    // max-weighted paths.
    for (Index i : o) {
      if (i == l || !a.is_ancestor(l, i)) continue;
      for (Index u : a.ancestors(l))
        if (!in_o[static_cast<size_t>(u)] && !mw(u, l, i)) {
          report.violations.push_back({"(i)(b)", {u, l, i}});
          ok = false;
        }
    }
    if (ok) report.v0.push_back(l);
  }

  // Condition (ii): hidden nodes not feeding the certified sources.
  std::vector<char> in_an_v0(static_cast<size_t>(d), 0);
  for (Index l : report.v0) {
    in_an_v0[static_cast<size_t>(l)] = 1;
    for (Index u : a.ancestors(l)) in_an_v0[static_cast<size_t>(u)] = 1;
  }
  for (Index u = 0; u < d; ++u) {
    if (in_o[static_cast<size_t>(u)] || in_an_v0[static_cast<size_t>(u)])
      continue;
    for (Index i : o) {
      if (!a.is_ancestor(u, i) || u == i) continue;
      for (Index j : o) {
        if (j <= i || !a.is_ancestor(u, j) || u == j) continue;
        // Unordered pair {i,j} sharing the hidden ancestor u.
        Index lo = i, hi = j;
        const bool hi_anc_lo = a.is_ancestor(hi, lo);
        const bool lo_anc_hi = a.is_ancestor(lo, hi);
        auto common_observed_relay = [&](Index x, Index y) {
          for (Index k : o)
            if (k != x && k != y && a.is_ancestor(k, x) &&
                a.is_ancestor(k, y) && a.is_ancestor(u, k) && u != k &&
                mw(u, k, x) && mw(u, k, y))
              return true;
          return false;
        };
        if (hi_anc_lo || lo_anc_hi) {
          // (ii)(a): with j in an(i), either u ~> j ~> i max-weighted or a
          // common observed relay k handles both.
          const Index anc = hi_anc_lo ? hi : lo;
          const Index dsc = hi_anc_lo ? lo : hi;
          if (!mw(u, anc, dsc) && !common_observed_relay(dsc, anc))
            report.violations.push_back({"(ii)(a)", {u, anc, dsc}});
        } else {
          // (ii)(b): incomparable pair needs a common observed relay.
          if (!common_observed_relay(lo, hi))
            report.violations.push_back({"(ii)(b)", {u, lo, hi}});
        }
      }
    }
  }

  std::sort(report.v0.begin(), report.v0.end());
  report.representable = report.violations.empty();
  return report;
}

struct ObservedModel {
  IndexSet observed;                    // sorted global indices of O
  Matrix reduced;                       // d x d upper triangular A_O*
  std::vector<IndexSet> hidden_innovations;  // An^{O^c}(i) per observed i
};

// Reduced ML coefficient matrix of the observed marginal (valid only when
// check_observable passes): a*_ii collects the hidden innovations reaching i
// lowest, a*_ij chains through the lowest observed ancestors.
inline ObservedModel reduced_matrix(const MlMatrix& a, const IndexSet& o,
                                    double tol = kRelTol) {
  const ObservableReport report = check_observable(a, o, tol);
  if (!report.representable)
    throw DegenerateValue("observed marginal is not representable; refusing");

  IndexSet obs = o;
  std::sort(obs.begin(), obs.end());
  const Index d = static_cast<Index>(obs.size());
  std::vector<Index> pos(static_cast<size_t>(a.size()), -1);
  for (Index p = 0; p < d; ++p) pos[static_cast<size_t>(obs[p])] = p;

  // Process ancestors before descendants so a*_kj is ready when chained.
  IndexSet order;
  std::vector<char> placed(static_cast<size_t>(a.size()), 0);
  while (static_cast<Index>(order.size()) < d) {
    for (Index v : obs) {
      if (placed[static_cast<size_t>(v)]) continue;
      bool ready = true;
      for (Index j : a.ancestors(v))
        if (pos[static_cast<size_t>(j)] >= 0 && !placed[static_cast<size_t>(j)])
          ready = false;
      if (ready) {
        placed[static_cast<size_t>(v)] = 1;
        order.push_back(v);
      }
    }
  }

  ObservedModel model;
  model.observed = obs;
  model.reduced = Matrix::Zero(d, d);
  model.hidden_innovations.resize(static_cast<size_t>(d));

  for (Index v : order) {
    const Index i = pos[static_cast<size_t>(v)];
    const IndexSet hidden = lowest_hidden_ancestors(a, obs, v, tol);
    model.hidden_innovations[static_cast<size_t>(i)] = hidden;
    double ss = 0.0;
    for (Index k : hidden) ss += a.coeff(v, k) * a.coeff(v, k);
    model.reduced(i, i) = std::sqrt(ss);
    const IndexSet low_obs = lowest_observed_ancestors(a, obs, v, tol);
    for (Index w : obs) {
      if (w == v) continue;
      const Index j = pos[static_cast<size_t>(w)];
      double best = 0.0;
      for (Index k : low_obs)  // k in De(w) ∩ An^O(v), including k = w
        if (k == w || a.is_ancestor(w, k))
          best = std::max(best, a.coeff(v, k) / a.coeff(k, k) *
                                    model.reduced(pos[static_cast<size_t>(k)], j));
      if (best > 0.0) model.reduced(i, j) = best;
    }
  }
  return model;
}

}  // namespace rmlm
