#pragma once

// DAG with positive edge weights c_ik (edge k -> i) and diagonal c_ii.
//
// Convention: weights(i, k) = c_ik is the weight on the edge from parent k
// into child i; the diagonal holds the innovation coefficients c_ii.  In a
// well-ordered DAG every parent carries a larger label than its child.
//
// Node indices are 0-based throughout the C++ API; file formats and printed
// labels are 1-based.

#include "rmlm/common.hpp"

#include <numeric>
#include <queue>

namespace rmlm {

struct EdgeWeightDag {
  Matrix weights;  // D x D; weights(i,k) > 0 iff k in pa(i) for k != i

  Index size() const { return weights.rows(); }

  bool has_edge(Index from, Index to) const {
    return from != to && weights(to, from) > 0.0;
  }
};

inline IndexSet parents(const EdgeWeightDag& dag, Index i) {
  require(i >= 0 && i < dag.size(), "node index out of range");
  IndexSet out;
  for (Index k = 0; k < dag.size(); ++k)
    if (k != i && dag.weights(i, k) > 0.0) out.push_back(k);
  return out;
}

inline IndexSet children(const EdgeWeightDag& dag, Index k) {
  require(k >= 0 && k < dag.size(), "node index out of range");
  IndexSet out;
  for (Index i = 0; i < dag.size(); ++i)
    if (i != k && dag.weights(i, k) > 0.0) out.push_back(i);
  return out;
}

namespace detail {

// Reachability closure from i following the given neighbor relation.
template <typename Neighbors>
IndexSet closure(Index d, Index i, Neighbors&& nbrs) {
  std::vector<char> seen(static_cast<size_t>(d), 0);
  std::vector<Index> stack{i};
  while (!stack.empty()) {
    Index v = stack.back();
    stack.pop_back();
    for (Index w : nbrs(v))
      if (!seen[static_cast<size_t>(w)]) {
        seen[static_cast<size_t>(w)] = 1;
        stack.push_back(w);
      }
  }
  IndexSet out;
  for (Index v = 0; v < d; ++v)
    if (seen[static_cast<size_t>(v)] && v != i) out.push_back(v);
  return out;
}

}  // namespace detail

// an(i): strict ancestors, all j with a directed path j ~> i.
inline IndexSet ancestors(const EdgeWeightDag& dag, Index i) {
  require(i >= 0 && i < dag.size(), "node index out of range");
  return detail::closure(dag.size(), i, [&](Index v) { return parents(dag, v); });
}

// de(j): strict descendants.
inline IndexSet descendants(const EdgeWeightDag& dag, Index j) {
  require(j >= 0 && j < dag.size(), "node index out of range");
  return detail::closure(dag.size(), j, [&](Index v) { return children(dag, v); });
}

// An(i) = an(i) ∪ {i}, returned sorted.
inline IndexSet ancestors_inclusive(const EdgeWeightDag& dag, Index i) {
  IndexSet out = ancestors(dag, i);
  out.push_back(i);
  std::sort(out.begin(), out.end());
  return out;
}

// An(U) = ∪_{i∈U} An(i).
inline IndexSet ancestors_inclusive(const EdgeWeightDag& dag, const IndexSet& u) {
  std::vector<char> in(static_cast<size_t>(dag.size()), 0);
  for (Index i : u)
    for (Index j : ancestors_inclusive(dag, i)) in[static_cast<size_t>(j)] = 1;
  IndexSet out;
  for (Index v = 0; v < dag.size(); ++v)
    if (in[static_cast<size_t>(v)]) out.push_back(v);
  return out;
}

// Topological order with ancestors first (sources before sinks).
// Deterministic: among ready nodes the smallest index is emitted first.
// Throws on cycles.
inline IndexSet topological_order(const EdgeWeightDag& dag) {
  const Index d = dag.size();
  std::vector<Index> unprocessed_parents(static_cast<size_t>(d), 0);
  for (Index i = 0; i < d; ++i)
    unprocessed_parents[static_cast<size_t>(i)] =
        static_cast<Index>(parents(dag, i).size());
  std::priority_queue<Index, std::vector<Index>, std::greater<>> ready;
  for (Index i = 0; i < d; ++i)
    if (unprocessed_parents[static_cast<size_t>(i)] == 0) ready.push(i);
  IndexSet order;
  while (!ready.empty()) {
    Index v = ready.top();
    ready.pop();
    order.push_back(v);
    for (Index w : children(dag, v))
      if (--unprocessed_parents[static_cast<size_t>(w)] == 0) ready.push(w);
  }
  require(static_cast<Index>(order.size()) == d, "cycle detected");
  return order;
}

inline void validate(const EdgeWeightDag& dag) {
  require(dag.weights.rows() == dag.weights.cols(), "weight matrix not square");
  require((dag.weights.array() >= 0.0).all(), "negative edge weight");
  for (Index i = 0; i < dag.size(); ++i)
    require(dag.weights(i, i) > 0.0, "diagonal c_ii must be positive");
  topological_order(dag);  // throws on cycles
}

inline bool is_well_ordered(const EdgeWeightDag& dag) {
  for (Index i = 0; i < dag.size(); ++i)
    for (Index k : parents(dag, i))
      if (k < i) return false;
  return true;
}

struct WellOrdering {
  IndexSet perm;  // perm[old] = new label
  EdgeWeightDag dag;
};

// Relabels so that every node's parents carry larger labels.  Labels are
// assigned from the sink side upward; among the nodes whose children are all
// labeled, the smallest original label goes first.  This makes the result
// deterministic and the identity on inputs that are already well-ordered.
inline WellOrdering well_order(const EdgeWeightDag& dag) {
  const Index d = dag.size();
  validate(dag);
  std::vector<Index> unlabeled_children(static_cast<size_t>(d), 0);
  for (Index k = 0; k < d; ++k)
    unlabeled_children[static_cast<size_t>(k)] =
        static_cast<Index>(children(dag, k).size());
  std::priority_queue<Index, std::vector<Index>, std::greater<>> ready;
  for (Index k = 0; k < d; ++k)
    if (unlabeled_children[static_cast<size_t>(k)] == 0) ready.push(k);
  IndexSet perm(static_cast<size_t>(d), 0);
  Index next = 0;
  while (!ready.empty()) {
    Index v = ready.top();
    ready.pop();
    perm[static_cast<size_t>(v)] = next++;
    for (Index p : parents(dag, v))
      if (--unlabeled_children[static_cast<size_t>(p)] == 0) ready.push(p);
  }
  EdgeWeightDag out{Matrix::Zero(d, d)};
  for (Index i = 0; i < d; ++i)
    for (Index k = 0; k < d; ++k)
      out.weights(perm[static_cast<size_t>(i)], perm[static_cast<size_t>(k)]) =
          dag.weights(i, k);
  return {std::move(perm), std::move(out)};
}

}  // namespace rmlm
