#pragma once

// Shared three-node fixtures and the 12-node hidden-confounder example.
//
// Three-node DAGs (0-based labels; parents carry larger labels):
//   D1  chain 2 -> 1 -> 0
//   D2  chain plus direct edge 2 -> 0
//   D3  pure confounder: 2 -> 1 and 2 -> 0, no edge 1 -> 0

#include "rmlm/graph.hpp"
#include "rmlm/tropical.hpp"

#include <array>
#include <initializer_list>

namespace fixtures {

using rmlm::EdgeWeightDag;
using rmlm::Index;
using rmlm::Matrix;

inline EdgeWeightDag make_dag(Index d,
                              std::initializer_list<std::array<double, 3>>
                                  edges) {  // {from, to, weight}
  EdgeWeightDag dag{Matrix::Zero(d, d)};
  dag.weights.diagonal().setOnes();
  for (const auto& e : edges)
    dag.weights(static_cast<Index>(e[1]), static_cast<Index>(e[0])) = e[2];
  return dag;
}

inline EdgeWeightDag d1() {
  return make_dag(3, {{2, 1, 0.5}, {1, 0, 0.8}});
}

// Chain dominates the direct edge, so 2 ~> 1 ~> 0 is max-weighted.
inline EdgeWeightDag d2_mwp() {
  return make_dag(3, {{2, 1, 0.9}, {1, 0, 0.9}, {2, 0, 0.5}});
}

// Direct edge dominates: the pair (0, 1) is not MWP.
inline EdgeWeightDag d2_direct() {
  return make_dag(3, {{2, 1, 0.9}, {1, 0, 0.9}, {2, 0, 0.95}});
}

inline EdgeWeightDag d3() {
  return make_dag(3, {{2, 1, 0.8}, {2, 0, 0.6}});
}

// 12-node DAG (0-based: 1-based labels minus one).  Hidden nodes are
// {4, 6, 10, 11}; observed O = {0, 1, 2, 3, 5, 7, 8, 9}.
inline EdgeWeightDag twelve_node(bool with_node_11 = true) {
  EdgeWeightDag dag{Matrix::Zero(12, 12)};
  dag.weights.diagonal().setOnes();
  auto edge = [&](Index from, Index to, double w) {
    dag.weights(to - 1, from - 1) = w;  // 1-based arguments
  };
  edge(7, 4, 0.9);
  edge(4, 1, 0.9);
  edge(4, 2, 0.9);
  edge(7, 1, 0.5);
  edge(7, 2, 0.5);
  edge(12, 10, 0.9);
  edge(10, 6, 0.9);
  edge(12, 6, 0.5);
  edge(10, 5, 0.8);
  edge(5, 3, 0.8);
  edge(6, 3, 0.8);
  edge(9, 5, 0.8);
  edge(9, 7, 0.8);
  edge(8, 7, 0.8);
  if (with_node_11) {
    edge(11, 8, 0.7);
    edge(11, 9, 0.7);
  }
  return dag;
}

inline rmlm::IndexSet twelve_node_observed() {
  return {0, 1, 2, 3, 5, 7, 8, 9};
}

}  // namespace fixtures
