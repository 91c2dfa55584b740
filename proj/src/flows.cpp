#include "graphflow/flows.hpp"

#include <cmath>
#include <string>

#include "graphflow/calculus.hpp"

namespace graphflow {

const char* flow_kind_name(FlowKind kind) noexcept {
  switch (kind) {
    case FlowKind::heat: return "heat";
    case FlowKind::attention_heat: return "attention_heat";
    case FlowKind::mean_curvature: return "mean_curvature";
    case FlowKind::beltrami: return "beltrami";
    case FlowKind::p_laplacian: return "p_laplacian";
  }
  return "heat";
}

FlowKind parse_flow_kind(const std::string& name) {
  if (name == "heat") return FlowKind::heat;
  if (name == "attention_heat" || name == "attention-heat" || name == "grand")
    return FlowKind::attention_heat;
  if (name == "mean_curvature" || name == "mean-curvature")
    return FlowKind::mean_curvature;
  if (name == "beltrami") return FlowKind::beltrami;
  if (name == "p_laplacian" || name == "p-laplacian")
    return FlowKind::p_laplacian;
  fail(errc::config_error, "unknown flow kind '" + name + "'");
}

void FlowSpec::validate() const {
  if (!(diffusivity > 0.0)) fail(errc::config_error, "diffusivity must be > 0");
  if (!(delta > 0.0)) fail(errc::config_error, "delta must be > 0");
  if (kind == FlowKind::p_laplacian && !(p >= 1.0)) {
    fail(errc::config_error, "p must be >= 1");
  }
}

double smoothness_score(FlowKind kind, double norm_u, double norm_v) {
  switch (kind) {
    case FlowKind::mean_curvature:
      return 1.0 / norm_u + 1.0 / norm_v;
    case FlowKind::beltrami:
      return 1.0 / (norm_u * norm_u) + 1.0 / (norm_u * norm_v);
    default:
      fail(errc::config_error, "smoothness_score: flow has no B matrix");
  }
}

SparseMat flow_matrix_from_norms(const Graph& g, const AttentionMatrix& a,
                                 const Eigen::VectorXd& norms, FlowKind kind) {
  const int n = g.node_count();
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(2 * g.edge_count() + n));

  if (kind == FlowKind::attention_heat) {
    for (int u = 0; u < n; ++u) {
      for (AttentionMatrix::InnerIterator it(a, u); it; ++it) {
        triplets.emplace_back(u, static_cast<int>(it.col()), it.value());
      }
      triplets.emplace_back(u, u, -1.0);
    }
  } else {
    for (int u = 0; u < n; ++u) {
      const auto incident = g.incident(u);
      Eigen::VectorXd scores(static_cast<int>(incident.size()));
      for (int i = 0; i < scores.size(); ++i) {
        scores(i) =
            smoothness_score(kind, norms(u), norms(incident[i].neighbor));
      }
      softmax_inplace(scores);
      double total = 0.0;
      for (int i = 0; i < scores.size(); ++i) {
        const int v = incident[i].neighbor;
        const double coupled = a.coeff(u, v) * scores(i);
        triplets.emplace_back(u, v, coupled);
        total += coupled;
      }
      triplets.emplace_back(u, u, -total);  // Psi(u,u)
    }
  }
  SparseMat q(n, n);
  q.setFromTriplets(triplets.begin(), triplets.end());
  return q;
}

SparseMat flow_matrix(const Graph& g, const NodeField& z,
                      const AttentionParams& params, FlowKind kind,
                      double delta) {
  const AttentionMatrix a = attention_weights(g, z, params);
  if (kind == FlowKind::attention_heat) {
    return flow_matrix_from_norms(g, a, Eigen::VectorXd(), kind);
  }
  return flow_matrix_from_norms(g, a, gradient_norm(g, z, delta), kind);
}

FlowOperator::FlowOperator(Graph g, FlowSpec spec,
                           std::optional<AttentionParams> params)
    : graph_(std::move(g)), spec_(spec), params_(std::move(params)) {
  spec_.validate();
  const bool needs_attention = spec_.kind == FlowKind::attention_heat ||
                               spec_.kind == FlowKind::mean_curvature ||
                               spec_.kind == FlowKind::beltrami;
  if (needs_attention && !params_.has_value()) {
    fail(errc::missing_attention_params,
         std::string(flow_kind_name(spec_.kind)) +
             " flow requires attention parameters");
  }
  if (spec_.kind == FlowKind::heat) {
    laplacian_ = normalized_laplacian(graph_);
  }
}

bool FlowOperator::linear() const {
  switch (spec_.kind) {
    case FlowKind::heat: return true;
    case FlowKind::p_laplacian: return spec_.p == 2.0;
    default: return !spec_.time_dependent_attention;
  }
}

bool FlowOperator::prepared() const {
  switch (spec_.kind) {
    case FlowKind::heat:
    case FlowKind::p_laplacian: return true;
    default: return spec_.time_dependent_attention || frozen_ready_;
  }
}

void FlowOperator::prepare(const NodeField& z0) const {
  if (prepared()) return;
  frozen_q_ = flow_matrix(graph_, z0, *params_, spec_.kind, spec_.delta);
  frozen_ready_ = true;
}

NodeField FlowOperator::evaluate(double /*t*/, const NodeField& z) const {
  if (!z.allFinite()) {
    fail(errc::non_finite_state, "flow evaluated on a non-finite state");
  }
  switch (spec_.kind) {
    case FlowKind::heat:
      return -spec_.diffusivity * (laplacian_ * z);
    case FlowKind::p_laplacian:
      return p_laplacian_apply(graph_, z, spec_.p, spec_.delta);
    default:
      if (spec_.time_dependent_attention) {
        return flow_matrix(graph_, z, *params_, spec_.kind, spec_.delta) * z;
      }
      prepare(z);
      return frozen_q_ * z;
  }
}

SparseMat FlowOperator::coefficient_matrix() const {
  switch (spec_.kind) {
    case FlowKind::heat:
      return -spec_.diffusivity * laplacian_;
    case FlowKind::p_laplacian:
      if (spec_.p == 2.0) return -normalized_laplacian(graph_);
      fail(errc::config_error, "p-Laplacian with p != 2 has no matrix form");
    default:
      if (!prepared() || spec_.time_dependent_attention) {
        fail(errc::config_error,
             "coefficient matrix requires frozen coefficients");
      }
      return frozen_q_;
  }
}

FlowOperator build_rhs(const Graph& g, const FlowSpec& spec,
                       std::optional<AttentionParams> params) {
  return FlowOperator(g, spec, std::move(params));
}

FlowDiagnostics conservation_diagnostics(const FlowOperator& op,
                                         const NodeField& z) {
  FlowDiagnostics diag;
  const SparseMat lap = normalized_laplacian(op.graph());
  diag.dirichlet_energy = (z.transpose() * (lap * z)).trace();
  diag.channel_mean = z.colwise().mean();
  diag.rhs_norm = op.evaluate(0.0, z).norm();
  return diag;
}

}  // namespace graphflow
