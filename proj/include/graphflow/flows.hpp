#pragma once

#include <optional>
#include <string>

#include "graphflow/attention.hpp"
#include "graphflow/graph.hpp"

namespace graphflow {

enum class FlowKind {
  heat,
  attention_heat,
  mean_curvature,
  beltrami,
  p_laplacian,
};

const char* flow_kind_name(FlowKind kind) noexcept;
FlowKind parse_flow_kind(const std::string& name);

/// Which diffusion right-hand side to build, plus its parameters.
struct FlowSpec {
  FlowKind kind = FlowKind::heat;
  double diffusivity = 1.0;  // heat only; scalar thermal diffusivity
  double p = 2.0;            // p_laplacian only
  double delta = 1e-6;       // gradient-norm floor
  // Recompute coefficients from the current state at every evaluation
  // instead of freezing them at the initial state.
  bool time_dependent_attention = false;

  void validate() const;
};

/// dZ/dt = F(Z) for one diffusion scheme on one graph.
///
/// Coefficient-frozen schemes (the default for the attention flows) lock
/// their attention/smoothness matrices at the first evaluated state; call
/// prepare() to pick the freezing state explicitly. A prepared operator is
/// safe to evaluate concurrently.
class FlowOperator {
 public:
  FlowOperator(Graph g, FlowSpec spec, std::optional<AttentionParams> params);

  NodeField evaluate(double t, const NodeField& z) const;

  FlowKind kind() const { return spec_.kind; }
  const FlowSpec& spec() const { return spec_; }
  const Graph& graph() const { return graph_; }

  /// Whether evaluate() is linear in Z (heat, p = 2, or frozen coefficients).
  bool linear() const;

  void prepare(const NodeField& z0) const;
  bool prepared() const;

  /// The matrix Q with dZ/dt = Q Z, valid for linear operators
  /// (heat: -diffusivity * Laplacian; frozen attention flows: A - I or
  /// A.B - Psi). Requires prepare() first for the frozen schemes.
  SparseMat coefficient_matrix() const;

 private:
  Graph graph_;
  FlowSpec spec_;
  std::optional<AttentionParams> params_;
  SparseMat laplacian_;  // heat
  mutable bool frozen_ready_ = false;
  mutable SparseMat frozen_q_;
};

FlowOperator build_rhs(const Graph& g, const FlowSpec& spec,
                       std::optional<AttentionParams> params = std::nullopt);

/// Coefficient matrix of an attention flow at state z: A - I for
/// attention_heat; A.B - Psi for mean_curvature/beltrami, where B is the
/// row-wise softmax of the smoothness scores and Psi(u,u) = sum_v (A.B)(u,v).
SparseMat flow_matrix(const Graph& g, const NodeField& z,
                      const AttentionParams& params, FlowKind kind,
                      double delta);

/// Same, with the attention matrix and per-node gradient norms prescribed.
SparseMat flow_matrix_from_norms(const Graph& g, const AttentionMatrix& a,
                                 const Eigen::VectorXd& norms, FlowKind kind);

/// Pre-softmax smoothness score of the ordered pair [u,v] given the two node
/// gradient norms.
double smoothness_score(FlowKind kind, double norm_u, double norm_v);

struct FlowDiagnostics {
  double dirichlet_energy = 0.0;  // sum over channels of z^T Laplacian z
  Eigen::VectorXd channel_mean;
  double rhs_norm = 0.0;
};

FlowDiagnostics conservation_diagnostics(const FlowOperator& op,
                                         const NodeField& z);

}  // namespace graphflow
