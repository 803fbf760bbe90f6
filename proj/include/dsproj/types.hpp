#pragma once

#include <cassert>
#include <cstdint>

#include <Eigen/Dense>

namespace dsproj {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Membership tolerance used wherever a caller does not supply one.
inline constexpr double kDefaultTol = 1e-9;

/// Per-node vectors of a network, stored back to back: block i holds node i's
/// point in R^n and occupies [i*n, (i+1)*n) of the flat buffer.
class Stacked {
 public:
  Stacked() = default;
  Stacked(int nodes, int dim) : nodes_(nodes), dim_(dim), data_(Vec::Zero(Eigen::Index{nodes} * dim)) {}

  int nodes() const { return nodes_; }
  int dim() const { return dim_; }

  auto block(int i) { return data_.segment(Eigen::Index{i} * dim_, dim_); }
  auto block(int i) const { return data_.segment(Eigen::Index{i} * dim_, dim_); }

  static Stacked replicate(int nodes, const Vec& v) {
    Stacked s(nodes, static_cast<int>(v.size()));
    for (int i = 0; i < nodes; ++i) s.block(i) = v;
    return s;
  }

  Vec& flat() { return data_; }
  const Vec& flat() const { return data_; }

  /// Blockwise average <v> = (1/N) sum_i v^i.
  Vec average() const {
    Vec avg = Vec::Zero(dim_);
    for (int i = 0; i < nodes_; ++i) avg += block(i);
    return avg / static_cast<double>(nodes_);
  }

  double norm() const { return data_.norm(); }

  bool same_shape(const Stacked& o) const { return nodes_ == o.nodes_ && dim_ == o.dim_; }

  friend bool operator==(const Stacked& a, const Stacked& b) {
    return a.same_shape(b) && a.data_ == b.data_;
  }

 private:
  int nodes_ = 0;
  int dim_ = 0;
  Vec data_;
};

}  // namespace dsproj
