#include "osag/graph.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>
#include <sstream>

#include "osag/coverage.hpp"
#include "osag/errors.hpp"

namespace osag {

ContractGraph build_graph(int num_nodes, std::vector<std::pair<int, int>> edges) {
  if (num_nodes < 1) throw input_error("graph: need at least one node");
  std::set<std::pair<int, int>> unique_edges;
  for (auto [u, v] : edges) {
    if (u < 0 || u >= num_nodes || v < 0 || v >= num_nodes)
      throw input_error("graph: edge references unknown node " +
                        std::to_string(u < 0 || u >= num_nodes ? u : v));
    if (u == v) throw input_error("graph: self edge on node " + std::to_string(u));
    unique_edges.emplace(std::min(u, v), std::max(u, v));
  }

  ContractGraph g;
  g.num_nodes = num_nodes;
  g.edges.assign(unique_edges.begin(), unique_edges.end());

  std::vector<std::vector<int>> adjacency(static_cast<std::size_t>(num_nodes));
  for (auto [u, v] : g.edges) {
    adjacency[static_cast<std::size_t>(u)].push_back(v);
    adjacency[static_cast<std::size_t>(v)].push_back(u);
  }

  g.dist = Eigen::MatrixXi::Constant(num_nodes, num_nodes, ContractGraph::kUnreachable);
  for (int source = 0; source < num_nodes; ++source) {
    g.dist(source, source) = 0;
    std::queue<int> frontier;
    frontier.push(source);
    while (!frontier.empty()) {
      const int u = frontier.front();
      frontier.pop();
      for (const int v : adjacency[static_cast<std::size_t>(u)]) {
        if (g.dist(source, v) != ContractGraph::kUnreachable) continue;
        g.dist(source, v) = g.dist(source, u) + 1;
        frontier.push(v);
      }
    }
  }

  g.diameter = 0;
  g.connected = true;
  for (int u = 0; u < num_nodes; ++u)
    for (int v = 0; v < num_nodes; ++v) {
      if (g.dist(u, v) == ContractGraph::kUnreachable)
        g.connected = false;
      else
        g.diameter = std::max(g.diameter, g.dist(u, v));
    }
  return g;
}

ContractGraph build_graph(const ContractSet& set, const AdjacencyRule& rule) {
  const int m = set.size();
  if (m < 1) throw input_error("graph: empty contract set");
  std::vector<std::pair<int, int>> edges;
  switch (rule.kind) {
    case AdjacencyRule::Kind::Complete:
      for (int u = 0; u < m; ++u)
        for (int v = u + 1; v < m; ++v) edges.emplace_back(u, v);
      break;
    case AdjacencyRule::Kind::Explicit:
      edges = rule.explicit_edges;
      break;
    case AdjacencyRule::Kind::SharedPrefix: {
      const auto key_len = set.contracts.front().key.size();
      const std::size_t k = rule.prefix_length < 0
                                ? (key_len == 0 ? 0 : key_len - 1)
                                : static_cast<std::size_t>(rule.prefix_length);
      for (int u = 0; u < m; ++u)
        for (int v = u + 1; v < m; ++v) {
          const auto& ku = set.contracts[static_cast<std::size_t>(u)].key;
          const auto& kv = set.contracts[static_cast<std::size_t>(v)].key;
          if (k > ku.size() || k > kv.size()) continue;
          if (std::equal(ku.begin(), ku.begin() + static_cast<long>(k), kv.begin()))
            edges.emplace_back(u, v);
        }
      break;
    }
  }
  return build_graph(m, std::move(edges));
}

double lipschitz_beta(const ContractGraph& graph, const ContractLossVector& lv) {
  if (lv.losses.size() != graph.num_nodes)
    throw shape_error("lipschitz_beta: loss vector length does not match node count");
  if (graph.num_nodes == 1) return 0.0;
  double beta = 0.0;
  for (int u = 0; u < graph.num_nodes; ++u)
    for (int v = u + 1; v < graph.num_nodes; ++v) {
      const int d = graph.dist(u, v);
      if (d == ContractGraph::kUnreachable) continue;  // per-component maximum
      beta = std::max(beta, std::abs(lv.losses[u] - lv.losses[v]) / d);
    }
  return beta;
}

GraphBoundReport graph_risk_bounds(const ContractGraph& graph,
                                   const ContractLossVector& lv,
                                   const Eigen::Ref<const Eigen::VectorXd>& q,
                                   const Eigen::Ref<const Eigen::VectorXd>& q_tilde) {
  if (!graph.connected)
    throw input_error("graph bounds: diameter undefined on a disconnected graph");
  if (lv.losses.size() != graph.num_nodes)
    throw shape_error("graph bounds: loss vector length does not match node count");
  validate_distribution(q, graph.num_nodes);
  validate_distribution(q_tilde, graph.num_nodes);

  GraphBoundReport report;
  report.beta = lipschitz_beta(graph, lv);
  report.diameter = graph.diameter;
  Eigen::Index c_star = 0;
  lv.losses.minCoeff(&c_star);  // lowest index on ties
  report.c_star = static_cast<int>(c_star);

  report.max_loss_lhs = lv.losses.maxCoeff();
  report.max_loss_rhs = lv.losses[report.c_star] + report.beta * graph.diameter;
  report.max_loss_holds = report.max_loss_lhs <= report.max_loss_rhs + 1e-12;

  report.risk_lhs = std::abs(service_risk(lv, q) - service_risk(lv, q_tilde));
  report.risk_rhs = report.max_loss_rhs * l1_deviation(q, q_tilde);
  report.risk_holds = report.risk_lhs <= report.risk_rhs + 1e-12;

  report.holds = report.max_loss_holds && report.risk_holds;
  return report;
}

std::string edge_list_text(const ContractGraph& graph) {
  std::ostringstream out;
  for (auto [u, v] : graph.edges) out << u << ' ' << v << '\n';
  return out.str();
}

}  // namespace osag
