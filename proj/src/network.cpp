#include "dsproj/network.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "dsproj/error.hpp"

namespace dsproj {

namespace {

// Nodes not reachable from node 0, empty when connected.
std::vector<int> unreachable_from_first(int n, const std::vector<std::vector<int>>& adj) {
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    for (int v : adj[static_cast<std::size_t>(u)]) {
      if (!seen[static_cast<std::size_t>(v)]) {
        seen[static_cast<std::size_t>(v)] = 1;
        stack.push_back(v);
      }
    }
  }
  std::vector<int> missing;
  for (int i = 0; i < n; ++i)
    if (!seen[static_cast<std::size_t>(i)]) missing.push_back(i);
  return missing;
}

}  // namespace

Graph::Graph(int nodes, std::vector<Edge> edges) : nodes_(nodes), adjacency_(static_cast<std::size_t>(std::max(nodes, 0))) {
  if (nodes < 1) throw ValidationError("graph.nodes", "a graph needs at least one node");
  std::set<Edge> seen;
  for (auto [i, j] : edges) {
    if (i < 0 || j < 0 || i >= nodes || j >= nodes) {
      throw ValidationError("graph.edges", fmt::format("edge ({},{}) references a node outside 0..{}", i, j, nodes - 1));
    }
    if (i == j) throw ValidationError("graph.edges", fmt::format("self-loop at node {}", i));
    const Edge key{std::min(i, j), std::max(i, j)};
    if (!seen.insert(key).second) throw ValidationError("graph.edges", fmt::format("duplicate edge ({},{})", i, j));
    edges_.push_back(key);
    adjacency_[static_cast<std::size_t>(i)].push_back(j);
    adjacency_[static_cast<std::size_t>(j)].push_back(i);
  }
  for (auto& a : adjacency_) std::sort(a.begin(), a.end());
  if (auto missing = unreachable_from_first(nodes, adjacency_); !missing.empty()) {
    throw ValidationError("graph.edges",
                          fmt::format("graph is disconnected: nodes {} are unreachable from node 0", missing));
  }
}

Graph Graph::ring(int nodes) {
  if (nodes < 3) return path(nodes);
  std::vector<Edge> e;
  for (int i = 0; i < nodes; ++i) e.emplace_back(i, (i + 1) % nodes);
  return Graph(nodes, std::move(e));
}

Graph Graph::path(int nodes) {
  std::vector<Edge> e;
  for (int i = 0; i + 1 < nodes; ++i) e.emplace_back(i, i + 1);
  return Graph(nodes, std::move(e));
}

Graph Graph::complete(int nodes) {
  std::vector<Edge> e;
  for (int i = 0; i < nodes; ++i)
    for (int j = i + 1; j < nodes; ++j) e.emplace_back(i, j);
  return Graph(nodes, std::move(e));
}

Graph Graph::paper10() {
  // 1-based: (1,2),(1,8),(1,10),(2,3),(3,4),(4,5),(5,6),(6,7),(7,8),(8,9),(9,10)
  return Graph(10, {{0, 1}, {0, 7}, {0, 9}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 6}, {6, 7}, {7, 8}, {8, 9}});
}

Graph Graph::named(std::string_view name, int nodes) {
  if (name == "paper10") {
    if (nodes != 10 && nodes != 0) {
      throw ValidationError("graph.topology", fmt::format("paper10 has 10 nodes, {} requested", nodes));
    }
    return paper10();
  }
  if (name == "ring") return ring(nodes);
  if (name == "path") return path(nodes);
  if (name == "complete") return complete(nodes);
  throw ValidationError("graph.topology", fmt::format("unknown topology '{}'", name));
}

GossipMatrix::GossipMatrix(Mat entries) : entries_(std::move(entries)) {
  const auto n = entries_.rows();
  if (n < 1 || entries_.cols() != n) throw ValidationError("gossip", "weight matrix must be square and nonempty");
  if (!entries_.allFinite()) throw ValidationError("gossip", "weight matrix has non-finite entries");
  if ((entries_.array() < 0.0).any()) throw ValidationError("gossip", "weight matrix has negative entries");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(entries_.row(i).sum() - 1.0) > 1e-12)
      throw ValidationError("gossip", fmt::format("row {} sums to {:.17g}, not 1", i, entries_.row(i).sum()));
    if (std::abs(entries_.col(i).sum() - 1.0) > 1e-12)
      throw ValidationError("gossip", fmt::format("column {} sums to {:.17g}, not 1", i, entries_.col(i).sum()));
  }
  if (!(entries_.diagonal().array() > 0.0).any())
    throw ValidationError("gossip", "aperiodicity requires at least one positive diagonal entry");

  rows_.resize(static_cast<std::size_t>(n));
  std::vector<std::vector<int>> support(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i != j && entries_(i, j) > 0.0) {
        rows_[static_cast<std::size_t>(i)].push_back({static_cast<int>(j), entries_(i, j)});
        support[static_cast<std::size_t>(i)].push_back(static_cast<int>(j));
        support[static_cast<std::size_t>(j)].push_back(static_cast<int>(i));
      }
    }
  }
  if (auto missing = unreachable_from_first(static_cast<int>(n), support); !missing.empty()) {
    throw ValidationError("gossip", fmt::format("weight matrix is reducible: nodes {} unreachable from node 0", missing));
  }
  gamma_ = dsproj::spectral_gap(entries_);
  if (!(gamma_ < 1.0)) throw ValidationError("gossip", fmt::format("spectral gap {:.17g} is not below 1", gamma_));
}

GossipMatrix::GossipMatrix(Mat entries, const Graph& graph) : GossipMatrix(std::move(entries)) {
  if (graph.nodes() != nodes()) throw ValidationError("gossip", "graph and weight matrix sizes differ");
  for (int i = 0; i < nodes(); ++i) {
    std::vector<int> cols;
    for (const auto& w : off_diagonal(i)) cols.push_back(w.node);
    if (cols != graph.neighbors(i)) {
      throw ValidationError("gossip", fmt::format("row {} support does not match the graph neighbours of node {}", i, i));
    }
  }
}

GossipMatrix metropolis_weights(const Graph& graph) {
  const int n = graph.nodes();
  Mat q = Mat::Zero(n, n);
  for (auto [i, j] : graph.edges()) {
    const double w = 1.0 / (1.0 + std::max(graph.degree(i), graph.degree(j)));
    q(i, j) = w;
    q(j, i) = w;
  }
  for (int i = 0; i < n; ++i) {
    double off = 0.0;
    for (int j = 0; j < n; ++j)
      if (j != i) off += q(i, j);
    q(i, i) = 1.0 - off;
  }
  return GossipMatrix(std::move(q), graph);
}

double spectral_gap(const Mat& q) {
  const auto n = q.rows();
  const Mat dev = q - Mat::Constant(n, n, 1.0 / static_cast<double>(n));
  const Mat gram = dev.transpose() * dev;
  if (gram.norm() == 0.0) return 0.0;

  // Fixed, generic start vector so results are reproducible.
  Vec v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = 1.0 + std::sin(1.0 + 2.7182818 * static_cast<double>(i));
  v.normalize();
  double lambda = 0.0;
  for (int it = 0; it < 100000; ++it) {
    Vec w = gram * v;
    const double next = w.norm();
    if (next == 0.0) return 0.0;
    v = w / next;
    if (it > 0 && std::abs(next - lambda) <= 1e-10 * next) return std::sqrt(v.dot(gram * v));
    lambda = next;
  }
  throw NumericalError("spectral_gap: power iteration stagnated after 1e5 iterations");
}

}  // namespace dsproj
