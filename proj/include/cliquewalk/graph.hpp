#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "cliquewalk/common.hpp"

namespace cliquewalk {

class ParseError : public Error {
 public:
  using Error::Error;
};
class DisconnectedError : public Error {
 public:
  using Error::Error;
};
class SelfLoopError : public Error {
 public:
  using Error::Error;
};
class DuplicateEdgeError : public Error {
 public:
  using Error::Error;
};

/// Undirected edge with positive integer weight. Endpoints are 0-based and
/// normalized u < v. Text formats are 1-based; conversion happens at parse
/// and print boundaries only.
struct Edge {
  int u = 0;
  int v = 0;
  int64_t w = 1;
};

/// Simple connected undirected graph with positive integer weights.
/// Immutable after construction; safe to share across threads.
class Graph {
 public:
  /// Validates simplicity, weight positivity and connectivity.
  static Graph from_edges(int n, std::vector<Edge> edges);

  int n() const { return n_; }
  const std::vector<Edge>& edges() const { return edges_; }
  int64_t weight_bound() const { return weight_bound_; }
  bool unweighted() const { return weight_bound_ == 1; }

  /// Neighbors of u as (vertex, weight), sorted by vertex.
  const std::vector<std::pair<int, int64_t>>& neighbors(int u) const {
    return adj_[u];
  }
  int64_t weighted_degree(int u) const { return wdeg_[u]; }
  /// 0 when {u,v} is not an edge.
  int64_t edge_weight(int u, int v) const { return wmat_[static_cast<size_t>(u) * n_ + v]; }
  bool has_edge(int u, int v) const { return edge_weight(u, v) > 0; }

  /// Exact transition probability u->v as a reduced fraction.
  std::pair<int64_t, int64_t> transition_entry_rational(int u, int v) const;

  /// Sum of weights from u into the vertex set `inside` (indicator by vertex).
  int64_t weighted_degree_into(int u, const std::vector<char>& inside) const;

 private:
  int n_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<std::pair<int, int64_t>>> adj_;
  std::vector<int64_t> wdeg_;
  std::vector<int64_t> wmat_;
  int64_t weight_bound_ = 1;
};

/// Parses an edge-list document: one "u v [w]" per line, 1-based ids,
/// blank lines and '#' comments allowed.
Graph load_graph(const std::string& text);
Graph load_graph_file(const std::string& path);

/// Renders the graph back to the edge-list format (1-based, sorted edges).
std::string to_edge_list(const Graph& g);

// ---------------------------------------------------------------------------

/// Dense row-major double matrix. The row stride is padded to a multiple of
/// four with zeros so kernel code can run full-width lanes over rows.
class Mat {
 public:
  Mat() = default;
  Mat(int rows, int cols)
      : rows_(rows), cols_(cols), stride_((static_cast<size_t>(cols) + 3) & ~size_t{3}),
        d_(static_cast<size_t>(rows) * stride_, 0.0) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  size_t stride() const { return stride_; }
  double& at(int i, int j) { return d_[static_cast<size_t>(i) * stride_ + j]; }
  double at(int i, int j) const { return d_[static_cast<size_t>(i) * stride_ + j]; }
  double* row(int i) { return d_.data() + static_cast<size_t>(i) * stride_; }
  const double* row(int i) const { return d_.data() + static_cast<size_t>(i) * stride_; }
  double* data() { return d_.data(); }
  const double* data() const { return d_.data(); }

 private:
  int rows_ = 0;
  int cols_ = 0;
  size_t stride_ = 0;
  std::vector<double> d_;
};

/// Row-stochastic matrix with an explicit subtractive error budget: every
/// entry is an under-approximation of the exact value, each by at most
/// error_budget, so row sums lie in [1 - n*error_budget, 1].
struct TransitionMatrix {
  Mat p;
  double error_budget = 0.0;
  uint64_t power = 1;

  int n() const { return p.rows(); }
  double row_sum(int i) const;
};

TransitionMatrix transition_matrix(const Graph& g);

/// Symmetric integer Laplacian: diagonal holds weighted degrees,
/// off-diagonal entries are -w(e).
struct Laplacian {
  int n = 0;
  std::vector<int64_t> m;

  int64_t at(int i, int j) const { return m[static_cast<size_t>(i) * n + j]; }
};

Laplacian laplacian(const Graph& g);

// ---------------------------------------------------------------------------
// Bundled corpus of named small graphs.

namespace corpus {

const std::vector<std::string>& names();
Graph get(const std::string& name);
std::string edge_list_text(const std::string& name);

}  // namespace corpus

}  // namespace cliquewalk
