#pragma once

#include "graphflow/graph.hpp"

namespace graphflow {

/// Values on ordered node pairs. For every stored edge e = (u, v) with u < v,
/// row 2e holds the value for the ordered pair [u, v] and row 2e+1 the value
/// for [v, u]; the two orientations need not agree. Columns are feature
/// channels.
class EdgeField {
 public:
  EdgeField() = default;
  EdgeField(int edge_count, int dim)
      : values(Eigen::MatrixXd::Zero(2 * edge_count, dim)) {}

  int edge_count() const { return static_cast<int>(values.rows() / 2); }
  int dim() const { return static_cast<int>(values.cols()); }

  /// Row index of the ordered pair whose source is the canonical pair's
  /// first node (source_is_first = true) or second node.
  static int row(int edge, bool source_is_first) {
    return 2 * edge + (source_is_first ? 0 : 1);
  }

  Eigen::MatrixXd values;
};

/// grad f([u,v]) = sqrt(w/h(v)) f(v) - sqrt(w/h(u)) f(u), per channel.
EdgeField gradient(const Graph& g, const NodeField& f);

/// (div psi)(v) = sum over edges [u,v] of sqrt(w/h(v)) (psi([v,u]) - psi([u,v])).
NodeField divergence(const Graph& g, const EdgeField& psi);

/// -1/2 div(grad f); equals normalized_laplacian(g) * f.
NodeField laplacian_apply(const Graph& g, const NodeField& f);

/// Per node u: max(delta, sqrt(sum over incident pairs [u,v] and channels of
/// grad f([u,v])^2)). The floor keeps downstream reciprocals finite.
Eigen::VectorXd gradient_norm(const Graph& g, const NodeField& f, double delta);
Eigen::VectorXd gradient_norm(const Graph& g, const EdgeField& grad,
                              double delta);

/// 1/2 div(|grad f|^{p-2} grad f), the per-source-node scaling using the node
/// gradient norm; p = 2 yields -laplacian_apply exactly.
NodeField p_laplacian_apply(const Graph& g, const NodeField& f, double p,
                            double delta);

/// Inner product on edge functions: sum over both orientations of every edge.
double edge_inner(const EdgeField& a, const EdgeField& b);

/// Inner product on node functions.
double node_inner(const NodeField& a, const NodeField& b);

}  // namespace graphflow
