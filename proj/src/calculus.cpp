#include "graphflow/calculus.hpp"

#include <cmath>
#include <string>

namespace graphflow {

namespace {

void check_node_field(const Graph& g, const NodeField& f, const char* op) {
  if (f.rows() != g.node_count()) {
    fail(errc::dimension_mismatch,
         std::string(op) + ": field has " + std::to_string(f.rows()) +
             " rows for " + std::to_string(g.node_count()) + " nodes");
  }
}

void check_edge_degrees(const Graph& g, const char* op) {
  for (const auto& e : g.edges()) {
    if (!(g.degree(e.u) > 0.0) || !(g.degree(e.v) > 0.0)) {
      fail(errc::zero_degree_node,
           std::string(op) + ": edge touches a zero-degree node");
    }
  }
}

}  // namespace

EdgeField gradient(const Graph& g, const NodeField& f) {
  check_node_field(g, f, "gradient");
  check_edge_degrees(g, "gradient");
  const auto& h = g.degrees();
  EdgeField grad(g.edge_count(), static_cast<int>(f.cols()));
  for (int e = 0; e < g.edge_count(); ++e) {
    const auto& edge = g.edges()[e];
    const double su = std::sqrt(edge.w / h(edge.u));
    const double sv = std::sqrt(edge.w / h(edge.v));
    // pair [u,v]: source u, target v
    grad.values.row(EdgeField::row(e, true)) =
        sv * f.row(edge.v) - su * f.row(edge.u);
    grad.values.row(EdgeField::row(e, false)) =
        su * f.row(edge.u) - sv * f.row(edge.v);
  }
  return grad;
}

NodeField divergence(const Graph& g, const EdgeField& psi) {
  if (psi.edge_count() != g.edge_count()) {
    fail(errc::missing_orientation,
         "divergence: field covers " + std::to_string(psi.edge_count()) +
             " edges, graph has " + std::to_string(g.edge_count()));
  }
  const auto& h = g.degrees();
  NodeField out = NodeField::Zero(g.node_count(), psi.dim());
  for (int e = 0; e < g.edge_count(); ++e) {
    const auto& edge = g.edges()[e];
    const auto in_uv = psi.values.row(EdgeField::row(e, true));   // [u,v]
    const auto in_vu = psi.values.row(EdgeField::row(e, false));  // [v,u]
    // at v the incident pair is written [u,v]; at u it is [v,u]
    out.row(edge.v) += std::sqrt(edge.w / h(edge.v)) * (in_vu - in_uv);
    out.row(edge.u) += std::sqrt(edge.w / h(edge.u)) * (in_uv - in_vu);
  }
  return out;
}

NodeField laplacian_apply(const Graph& g, const NodeField& f) {
  check_node_field(g, f, "laplacian_apply");
  if (g.node_count() > 0 && !(g.min_degree() > 0.0)) {
    fail(errc::zero_degree_node, "laplacian_apply: zero-degree node");
  }
  return -0.5 * divergence(g, gradient(g, f));
}

Eigen::VectorXd gradient_norm(const Graph& g, const EdgeField& grad,
                              double delta) {
  if (!(delta > 0.0)) {
    fail(errc::config_error, "gradient_norm: delta must be positive");
  }
  Eigen::VectorXd sq = Eigen::VectorXd::Zero(g.node_count());
  for (int e = 0; e < g.edge_count(); ++e) {
    const auto& edge = g.edges()[e];
    sq(edge.u) += grad.values.row(EdgeField::row(e, true)).squaredNorm();
    sq(edge.v) += grad.values.row(EdgeField::row(e, false)).squaredNorm();
  }
  return sq.array().sqrt().max(delta);
}

Eigen::VectorXd gradient_norm(const Graph& g, const NodeField& f,
                              double delta) {
  return gradient_norm(g, gradient(g, f), delta);
}

NodeField p_laplacian_apply(const Graph& g, const NodeField& f, double p,
                            double delta) {
  if (!(p >= 1.0)) fail(errc::config_error, "p_laplacian_apply: p must be >= 1");
  const EdgeField grad = gradient(g, f);
  if (p == 2.0) return 0.5 * divergence(g, grad);
  const Eigen::VectorXd norms = gradient_norm(g, grad, delta);
  EdgeField scaled(g.edge_count(), grad.dim());
  for (int e = 0; e < g.edge_count(); ++e) {
    const auto& edge = g.edges()[e];
    scaled.values.row(EdgeField::row(e, true)) =
        std::pow(norms(edge.u), p - 2.0) *
        grad.values.row(EdgeField::row(e, true));
    scaled.values.row(EdgeField::row(e, false)) =
        std::pow(norms(edge.v), p - 2.0) *
        grad.values.row(EdgeField::row(e, false));
  }
  return 0.5 * divergence(g, scaled);
}

double edge_inner(const EdgeField& a, const EdgeField& b) {
  if (a.values.rows() != b.values.rows() || a.dim() != b.dim()) {
    fail(errc::dimension_mismatch, "edge_inner: shape mismatch");
  }
  return a.values.cwiseProduct(b.values).sum();
}

double node_inner(const NodeField& a, const NodeField& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    fail(errc::dimension_mismatch, "node_inner: shape mismatch");
  }
  return a.cwiseProduct(b).sum();
}

}  // namespace graphflow
