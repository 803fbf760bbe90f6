#pragma once

#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dsproj/types.hpp"

namespace dsproj {

using Edge = std::pair<int, int>;

/// Static undirected communication graph on nodes 0..N-1. Construction
/// rejects self-loops, duplicate edges and disconnected graphs.
class Graph {
 public:
  Graph(int nodes, std::vector<Edge> edges);

  static Graph ring(int nodes);
  static Graph path(int nodes);
  static Graph complete(int nodes);
  /// The 10-node ring with the extra chord between nodes 0 and 7 (0-based)
  /// used in the stochastic utility study.
  static Graph paper10();
  /// "ring", "path", "complete" (any N) or "paper10" (N must be 10).
  static Graph named(std::string_view name, int nodes);

  int nodes() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<int>& neighbors(int i) const { return adjacency_[static_cast<std::size_t>(i)]; }
  int degree(int i) const { return static_cast<int>(neighbors(i).size()); }

 private:
  int nodes_;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> adjacency_;
};

/// Doubly stochastic, irreducible, aperiodic weight matrix Q with its
/// spectral gap gamma = |Q - 11^T/N|_2 < 1.
class GossipMatrix {
 public:
  struct Weight {
    int node;
    double value;
  };

  /// Validates nonnegativity, unit row and column sums (to 1e-12),
  /// irreducibility of the support, a positive diagonal entry, and gamma < 1.
  explicit GossipMatrix(Mat entries);
  /// As above, and additionally requires q_ij > 0 exactly on the edges of `graph`.
  GossipMatrix(Mat entries, const Graph& graph);

  int nodes() const { return static_cast<int>(entries_.rows()); }
  const Mat& entries() const { return entries_; }
  double operator()(int i, int j) const { return entries_(i, j); }
  double spectral_gap() const { return gamma_; }

  /// Nonzero off-diagonal entries of row i, in increasing column order.
  std::span<const Weight> off_diagonal(int i) const { return rows_[static_cast<std::size_t>(i)]; }

 private:
  Mat entries_;
  std::vector<std::vector<Weight>> rows_;
  double gamma_ = 0.0;
};

/// q_ij = 1/(1 + max(deg_i, deg_j)) on edges, q_ii = 1 - sum_{j != i} q_ij.
GossipMatrix metropolis_weights(const Graph& graph);

/// |Q - 11^T/N|_2 by power iteration on (Q - Q*)^T (Q - Q*), relative
/// tolerance 1e-10. Throws NumericalError after 1e5 iterations.
double spectral_gap(const Mat& q);

}  // namespace dsproj
