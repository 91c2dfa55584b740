#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <span>
#include <vector>

#include "graphflow/common.hpp"

namespace graphflow {

/// n x d matrix of per-node feature vectors.
using NodeField = Eigen::MatrixXd;
using SparseMat = Eigen::SparseMatrix<double>;

/// One undirected edge in canonical form (u < v, w > 0).
struct WeightedEdge {
  int u = 0;
  int v = 0;
  double w = 1.0;
};

/// Half-edge as seen from one endpoint: the neighbor, the canonical edge
/// index, and whether this endpoint is the first node of the canonical pair.
struct Incidence {
  int neighbor = 0;
  int edge = 0;
  bool first = false;
};

/// Undirected weighted graph. Immutable after construction; one stored
/// record per unordered pair, so weight symmetry holds structurally.
class Graph {
 public:
  Graph() = default;

  int node_count() const { return n_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  const std::vector<WeightedEdge>& edges() const { return edges_; }
  const Eigen::VectorXd& degrees() const { return degree_; }
  double degree(int v) const { return degree_(v); }
  double min_degree() const {
    return n_ == 0 ? 0.0 : degree_.minCoeff();
  }
  double mean_weight() const;

  /// Symmetric sparse adjacency W with W(u,v) = w for every stored edge.
  const SparseMat& adjacency() const { return adjacency_; }

  /// Half-edges incident to v.
  std::span<const Incidence> incident(int v) const {
    return {incidence_.data() + incidence_offsets_[v],
            incidence_.data() + incidence_offsets_[v + 1]};
  }

  bool has_edge(int u, int v) const;
  bool connected() const;

  friend Graph build_graph(int n, const std::vector<WeightedEdge>& edges);

 private:
  int n_ = 0;
  std::vector<WeightedEdge> edges_;
  Eigen::VectorXd degree_;
  SparseMat adjacency_;
  std::vector<Incidence> incidence_;
  std::vector<int> incidence_offsets_;
};

/// Validates and canonicalizes an edge list into a Graph. Isolated nodes are
/// allowed (degree 0); self-loops, duplicate pairs, non-positive weights and
/// out-of-range indices are rejected.
Graph build_graph(int n, const std::vector<WeightedEdge>& edges);

/// Same, with n inferred as max node index + 1.
Graph build_graph(const std::vector<WeightedEdge>& edges);

/// D^{-1/2} (D - W) D^{-1/2}. Symmetric positive semidefinite with
/// eigenvalues in [0, 2]; kernel contains D^{1/2} 1. Rejects graphs with a
/// zero-degree node since the normalization divides by the degree.
SparseMat normalized_laplacian(const Graph& g);

/// Dense variant for eigendecompositions; requires n <= kDenseLimit.
Eigen::MatrixXd normalized_laplacian_dense(const Graph& g);

}  // namespace graphflow
