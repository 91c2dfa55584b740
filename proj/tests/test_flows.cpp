#include <cmath>

#include "doctest.h"
#include "graphflow/calculus.hpp"
#include "graphflow/flows.hpp"
#include "graphflow/pipeline.hpp"
#include "test_util.hpp"

using namespace graphflow;
namespace gt = graphflow::testing;

namespace {

NodeField constant_columns(int n, double c) {
  return NodeField::Constant(n, 2, c);
}

}  // namespace

TEST_CASE("flows: heat right-hand side on the path") {
  const Graph g = gt::path2();
  NodeField z(2, 1);
  z << 1, 0;
  FlowSpec spec;
  spec.kind = FlowKind::heat;
  const FlowOperator op = build_rhs(g, spec);
  const NodeField rhs = op.evaluate(0.0, z);
  CHECK(rhs(0, 0) == doctest::Approx(-1.0));
  CHECK(rhs(1, 0) == doctest::Approx(1.0));

  FlowSpec doubled = spec;
  doubled.diffusivity = 2.0;
  const NodeField rhs2 = build_rhs(g, doubled).evaluate(0.0, z);
  CHECK((rhs2 - 2.0 * rhs).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("flows: attention heat with uniform coefficients on the triangle") {
  const Graph g = gt::triangle();
  FlowSpec spec;
  spec.kind = FlowKind::attention_heat;
  const auto params = make_attention_params(1, 4, 1, true, 5);
  const FlowOperator op = build_rhs(g, spec, params);
  op.prepare(NodeField::Zero(3, 1));  // zero logits: uniform rows
  NodeField z(3, 1);
  z << 1, 0, 0;
  const NodeField rhs = op.evaluate(0.0, z);
  CHECK(rhs(0, 0) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(rhs(1, 0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(rhs(2, 0) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("flows: constant columns are fixed points of every attention flow") {
  const Graph g = gt::random_connected_graph(18, 0.2, 8);
  const auto params = make_attention_params(2, 8, 1, true, 9);
  for (FlowKind kind : {FlowKind::attention_heat, FlowKind::mean_curvature,
                        FlowKind::beltrami}) {
    FlowSpec spec;
    spec.kind = kind;
    const FlowOperator op = build_rhs(g, spec, params);
    const NodeField fixed = constant_columns(18, 0.7);
    CHECK(op.evaluate(0.0, fixed).norm() <= 1e-10);
  }
}

TEST_CASE("flows: missing attention parameters are rejected") {
  FlowSpec spec;
  spec.kind = FlowKind::beltrami;
  CHECK_THROWS_AS(build_rhs(gt::triangle(), spec), Error);
  try {
    build_rhs(gt::triangle(), spec);
  } catch (const Error& e) {
    CHECK(e.code() == errc::missing_attention_params);
  }
}

TEST_CASE("flows: non-finite states are rejected") {
  FlowSpec spec;
  const FlowOperator op = build_rhs(gt::path2(), spec);
  NodeField bad(2, 1);
  bad << 1.0, std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(op.evaluate(0.0, bad), Error);
}

TEST_CASE("flows: coefficient rows sum to zero") {
  const Graph g = gt::random_connected_graph(16, 0.2, 12);
  const NodeField z = gt::random_field(16, 4, 13);
  const auto params = make_attention_params(4, 8, 1, true, 14);
  for (FlowKind kind : {FlowKind::attention_heat, FlowKind::mean_curvature,
                        FlowKind::beltrami}) {
    const Eigen::MatrixXd q(flow_matrix(g, z, params, kind, 1e-6));
    CHECK(q.rowwise().sum().cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("flows: smoothness scores fall as the source norm grows") {
  for (FlowKind kind : {FlowKind::mean_curvature, FlowKind::beltrami}) {
    double previous = smoothness_score(kind, 0.5, 1.0);
    for (double norm_u : {1.0, 2.0, 4.0, 8.0}) {
      const double score = smoothness_score(kind, norm_u, 1.0);
      CHECK(score < previous);
      previous = score;
    }
  }
}

TEST_CASE("flows: couplings into a rough node shrink as its norm grows") {
  // ceteris paribus: prescribe the norms, raise only node 0's
  const Graph g = gt::triangle();
  const auto params = make_attention_params(3, 8, 1, true, 21);
  const NodeField z = gt::random_field(3, 3, 22);
  const AttentionMatrix a = attention_weights(g, z, params);
  for (FlowKind kind : {FlowKind::mean_curvature, FlowKind::beltrami}) {
    double prev_in_01 = std::numeric_limits<double>::infinity();
    double prev_in_21 = std::numeric_limits<double>::infinity();
    for (double norm0 : {1.0, 2.0, 4.0, 16.0}) {
      Eigen::VectorXd norms(3);
      norms << norm0, 1.0, 1.0;
      const Eigen::MatrixXd q(flow_matrix_from_norms(g, a, norms, kind));
      // normalized coupling of the edges into node 0 from rows 1 and 2
      const double into_from_1 = q(1, 0) / -q(1, 1);
      const double into_from_2 = q(2, 0) / -q(2, 2);
      CHECK(into_from_1 < prev_in_01);
      CHECK(into_from_2 < prev_in_21);
      prev_in_01 = into_from_1;
      prev_in_21 = into_from_2;
    }
  }
}

TEST_CASE("flows: scaling one node's feature suppresses its mean-curvature "
          "couplings") {
  const Graph g = gt::random_connected_graph(10, 0.3, 31);
  const auto params = make_attention_params(2, 8, 1, true, 32);
  NodeField z = gt::random_field(10, 2, 33);
  double previous = std::numeric_limits<double>::infinity();
  for (double scale : {1.0, 4.0, 16.0}) {
    NodeField scaled = z;
    scaled.row(0) *= scale;
    const AttentionMatrix a = attention_weights(g, z, params);  // A held fixed
    const Eigen::MatrixXd q(flow_matrix_from_norms(
        g, a, gradient_norm(g, scaled, 1e-6), FlowKind::mean_curvature));
    double mean_into_0 = 0.0;
    int count = 0;
    for (const auto& inc : g.incident(0)) {
      mean_into_0 += q(inc.neighbor, 0) / -q(inc.neighbor, inc.neighbor);
      ++count;
    }
    mean_into_0 /= count;
    CHECK(mean_into_0 < previous);
    previous = mean_into_0;
  }
}

TEST_CASE("flows: p-Laplacian right-hand side matches the calculus operator") {
  const Graph g = gt::random_connected_graph(12, 0.25, 41);
  const NodeField z = gt::random_field(12, 3, 42);
  FlowSpec spec;
  spec.kind = FlowKind::p_laplacian;
  spec.p = 2.0;
  const NodeField via_flow = build_rhs(g, spec).evaluate(0.0, z);
  const NodeField via_heat = -laplacian_apply(g, z);
  CHECK((via_flow - via_heat).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("flows: frozen and time-dependent coefficients diverge off t=0") {
  const Graph g = gt::random_connected_graph(12, 0.3, 51);
  const NodeField z0 = gt::random_field(12, 3, 52);
  const NodeField z1 = gt::random_field(12, 3, 53);
  const auto params = make_attention_params(3, 8, 1, true, 54);

  FlowSpec frozen;
  frozen.kind = FlowKind::beltrami;
  const FlowOperator op_frozen = build_rhs(g, frozen, params);
  op_frozen.prepare(z0);

  FlowSpec live = frozen;
  live.time_dependent_attention = true;
  const FlowOperator op_live = build_rhs(g, live, params);

  CHECK((op_frozen.evaluate(0.0, z0) - op_live.evaluate(0.0, z0))
            .cwiseAbs()
            .maxCoeff() <= 1e-12);
  CHECK((op_frozen.evaluate(0.0, z1) - op_live.evaluate(0.0, z1))
            .cwiseAbs()
            .maxCoeff() > 1e-8);
  CHECK(op_frozen.linear());
  CHECK_FALSE(op_live.linear());
}

TEST_CASE("flows: diagnostics on the path") {
  const Graph g = gt::path2();
  FlowSpec spec;
  const FlowOperator op = build_rhs(g, spec);
  NodeField z(2, 1);
  z << 1, 0;
  const FlowDiagnostics diag = conservation_diagnostics(op, z);
  CHECK(diag.dirichlet_energy == doctest::Approx(1.0));
  CHECK(diag.channel_mean(0) == doctest::Approx(0.5));

  NodeField harmonic(2, 1);
  harmonic.col(0) = g.degrees().array().sqrt();
  CHECK(conservation_diagnostics(op, harmonic).dirichlet_energy <= 1e-14);
}

TEST_CASE("flows: dirichlet energy against the explicit edge sum") {
  const Graph g = gt::random_connected_graph(20, 0.2, 61, true);
  const NodeField z = gt::random_field(20, 2, 62);
  FlowSpec spec;
  const FlowDiagnostics diag = conservation_diagnostics(build_rhs(g, spec), z);
  // independent route: sum_e w (z_u/sqrt(h_u) - z_v/sqrt(h_v))^2
  double expected = 0.0;
  const auto& h = g.degrees();
  for (const auto& e : g.edges()) {
    expected += e.w * (z.row(e.u) / std::sqrt(h(e.u)) -
                       z.row(e.v) / std::sqrt(h(e.v)))
                          .squaredNorm();
  }
  CHECK(diag.dirichlet_energy == doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("flows: beltrami couples inter-block edges more weakly than "
          "attention heat") {
  SbmSpec sbm;
  sbm.sizes = {40, 40};
  sbm.p_in = 0.15;
  sbm.p_out = 0.02;
  sbm.feature_dim = 8;
  sbm.separation = 1.2;
  sbm.noise_sigma = 0.0;  // block-constant features
  sbm.seed = 71;
  const SbmData data = generate_sbm(sbm);
  const auto params = make_attention_params(8, 8, 1, true, 72);

  const Eigen::MatrixXd q_belt(flow_matrix(
      data.graph, data.features, params, FlowKind::beltrami, 1e-6));
  const Eigen::MatrixXd a(
      attention_weights(data.graph, data.features, params));

  double inter_belt = 0.0, inter_attn = 0.0;
  int count = 0;
  for (const auto& e : data.graph.edges()) {
    if (data.labels[e.u] == data.labels[e.v]) continue;
    inter_belt += q_belt(e.u, e.v) / -q_belt(e.u, e.u);
    inter_belt += q_belt(e.v, e.u) / -q_belt(e.v, e.v);
    inter_attn += a(e.u, e.v) + a(e.v, e.u);
    count += 2;
  }
  REQUIRE(count > 0);
  CHECK(inter_belt / count < inter_attn / count);
}
