#pragma once

#include <Eigen/Core>

#include <utility>
#include <vector>

#include "osag/contracts.hpp"
#include "osag/risk.hpp"

namespace osag {

// Undirected contract adjacency with precomputed all-pairs hop distances.
struct ContractGraph {
  static constexpr int kUnreachable = -1;

  int num_nodes = 0;
  std::vector<std::pair<int, int>> edges;  // u < v, deduplicated, sorted
  Eigen::MatrixXi dist;                    // hop counts; kUnreachable if disconnected
  int diameter = 0;                        // max finite distance
  bool connected = true;
};

struct AdjacencyRule {
  enum class Kind { SharedPrefix, Complete, Explicit };

  Kind kind = Kind::SharedPrefix;
  // SharedPrefix: contracts whose first `prefix_length` key parts agree are
  // adjacent. -1 means all key parts except the last (the rare flag), which
  // links contracts that differ only in rarity.
  int prefix_length = -1;
  std::vector<std::pair<int, int>> explicit_edges;

  static AdjacencyRule shared_prefix(int k) { return {Kind::SharedPrefix, k, {}}; }
  static AdjacencyRule complete() { return {Kind::Complete, 0, {}}; }
  static AdjacencyRule from_edges(std::vector<std::pair<int, int>> edges) {
    return {Kind::Explicit, 0, std::move(edges)};
  }
};

// Distances via breadth-first search from every node.
ContractGraph build_graph(int num_nodes, std::vector<std::pair<int, int>> edges);
ContractGraph build_graph(const ContractSet& set, const AdjacencyRule& rule);

// Minimal beta with |losses[u] - losses[v]| <= beta * dist(u,v) over all
// connected pairs; per component (max reported) when disconnected; 0 for a
// single node.
double lipschitz_beta(const ContractGraph& graph, const ContractLossVector& lv);

// Bounds tied to graph structure: the loss-range bound
//   max_c loss[c] <= loss[c_star] + beta * diam
// (c_star the argmin, lowest index on ties) and the induced risk bound
//   |R(q) - R(q_tilde)| <= (loss[c_star] + beta * diam) * ||q - q_tilde||_1.
struct GraphBoundReport {
  int c_star = 0;
  double beta = 0.0;
  int diameter = 0;
  double max_loss_lhs = 0.0;
  double max_loss_rhs = 0.0;
  double risk_lhs = 0.0;
  double risk_rhs = 0.0;
  bool max_loss_holds = false;
  bool risk_holds = false;
  bool holds = false;
};

// Requires a connected graph (finite diameter); beta is computed minimally.
GraphBoundReport graph_risk_bounds(const ContractGraph& graph,
                                   const ContractLossVector& lv,
                                   const Eigen::Ref<const Eigen::VectorXd>& q,
                                   const Eigen::Ref<const Eigen::VectorXd>& q_tilde);

// Edge list as "u v" lines.
std::string edge_list_text(const ContractGraph& graph);

}  // namespace osag
