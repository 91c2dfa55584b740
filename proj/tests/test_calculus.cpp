#include <cmath>

#include "doctest.h"
#include "graphflow/calculus.hpp"
#include "test_util.hpp"

using namespace graphflow;
namespace gt = graphflow::testing;

namespace {

EdgeField random_edge_field(const Graph& g, int d, std::uint64_t seed) {
  auto rng = make_rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  EdgeField psi(g.edge_count(), d);
  for (int r = 0; r < psi.values.rows(); ++r)
    for (int c = 0; c < d; ++c) psi.values(r, c) = gauss(rng);
  return psi;
}

NodeField sqrt_degree_field(const Graph& g) {
  NodeField f(g.node_count(), 1);
  f.col(0) = g.degrees().array().sqrt();
  return f;
}

}  // namespace

TEST_CASE("calculus: path gradient") {
  const Graph g = gt::path2();
  NodeField f(2, 1);
  f << 1, 0;
  const EdgeField grad = gradient(g, f);
  CHECK(grad.values(EdgeField::row(0, true), 0) == doctest::Approx(-1.0));
  CHECK(grad.values(EdgeField::row(0, false), 0) == doctest::Approx(1.0));
}

TEST_CASE("calculus: gradient of sqrt degrees vanishes") {
  const Graph g = gt::random_connected_graph(30, 0.1, 3, /*weighted=*/true);
  const EdgeField grad = gradient(g, sqrt_degree_field(g));
  CHECK(grad.values.cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("calculus: triangle gradient entry") {
  const Graph g = gt::triangle();
  NodeField f(3, 1);
  f << 1, 0, 0;
  const EdgeField grad = gradient(g, f);
  // edge 0 is (0,1); pair [0,1] = sqrt(1/2)*f(1) - sqrt(1/2)*f(0)
  CHECK(grad.values(EdgeField::row(0, true), 0) ==
        doctest::Approx(-1.0 / std::sqrt(2.0)));
}

TEST_CASE("calculus: path divergence of the gradient") {
  const Graph g = gt::path2();
  NodeField f(2, 1);
  f << 1, 0;
  const NodeField div = divergence(g, gradient(g, f));
  CHECK(div(0, 0) == doctest::Approx(-2.0));  // 2(f(v) - f(u)) at u
  CHECK(div(1, 0) == doctest::Approx(2.0));   // 2(f(u) - f(v)) at v
}

TEST_CASE("calculus: symmetric edge field has zero divergence") {
  const Graph g = gt::random_connected_graph(20, 0.2, 9);
  EdgeField psi = random_edge_field(g, 2, 17);
  for (int e = 0; e < g.edge_count(); ++e) {
    psi.values.row(EdgeField::row(e, false)) =
        psi.values.row(EdgeField::row(e, true));
  }
  CHECK(divergence(g, psi).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("calculus: adjointness on a 5-node graph") {
  const Graph g = gt::random_connected_graph(5, 0.5, 21, /*weighted=*/true);
  const NodeField f = gt::random_field(5, 3, 22);
  const EdgeField psi = random_edge_field(g, 3, 23);
  const double lhs = edge_inner(gradient(g, f), psi);
  const double rhs = node_inner(f, divergence(g, psi));
  CHECK(std::abs(lhs + rhs) <= 1e-12);
}

TEST_CASE("calculus: adjointness property, 100 random draws") {
  for (std::uint64_t trial = 0; trial < 100; ++trial) {
    const int n = 5 + static_cast<int>(trial % 96);
    const Graph g =
        gt::random_connected_graph(n, 0.1, 1000 + trial, trial % 2 == 0);
    const NodeField f = gt::random_field(n, 1 + trial % 4, 2000 + trial);
    const EdgeField psi =
        random_edge_field(g, 1 + static_cast<int>(trial % 4), 3000 + trial);
    const double lhs = edge_inner(gradient(g, f), psi);
    const double rhs = node_inner(f, divergence(g, psi));
    REQUIRE(std::abs(lhs + rhs) <= 1e-10);
  }
}

TEST_CASE("calculus: Laplacian hand values") {
  {
    NodeField f(2, 1);
    f << 1, 0;
    const NodeField lap = laplacian_apply(gt::path2(), f);
    CHECK(lap(0, 0) == doctest::Approx(1.0));
    CHECK(lap(1, 0) == doctest::Approx(-1.0));
  }
  {
    NodeField f(3, 1);
    f << 1, 0, 0;
    const NodeField lap = laplacian_apply(gt::triangle(), f);
    CHECK(lap(0, 0) == doctest::Approx(1.0));
    CHECK(lap(1, 0) == doctest::Approx(-0.5));
    CHECK(lap(2, 0) == doctest::Approx(-0.5));
  }
}

TEST_CASE("calculus: Laplacian kernel") {
  const Graph g = gt::random_connected_graph(25, 0.15, 31, true);
  CHECK(laplacian_apply(g, sqrt_degree_field(g)).cwiseAbs().maxCoeff() <=
        1e-12);
}

TEST_CASE("calculus: -1/2 div grad matches the matrix Laplacian") {
  for (std::uint64_t trial = 0; trial < 25; ++trial) {
    const int n = 10 + static_cast<int>(trial * 3);
    const Graph g =
        gt::random_connected_graph(n, 0.1, 500 + trial, trial % 2 == 1);
    const NodeField f = gt::random_field(n, 4, 600 + trial);
    const NodeField composed = laplacian_apply(g, f);
    const NodeField matrix = normalized_laplacian(g) * f;
    REQUIRE((composed - matrix).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("calculus: gradient norms") {
  {
    NodeField f(2, 1);
    f << 1, 0;
    const Eigen::VectorXd norms = gradient_norm(gt::path2(), f, 1e-6);
    CHECK(norms(0) == doctest::Approx(1.0));
    CHECK(norms(1) == doctest::Approx(1.0));
  }
  {
    const Graph g = gt::triangle();
    NodeField f(3, 1);
    f << 1, 0, 0;
    const Eigen::VectorXd norms = gradient_norm(g, f, 1e-6);
    CHECK(norms(0) == doctest::Approx(1.0));
    CHECK(norms(1) == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(norms(2) == doctest::Approx(1.0 / std::sqrt(2.0)));
  }
}

TEST_CASE("calculus: gradient norm floors at delta on smooth fields") {
  const Graph g = gt::random_connected_graph(12, 0.2, 41, true);
  const Eigen::VectorXd norms =
      gradient_norm(g, sqrt_degree_field(g), 1e-6);
  CHECK((norms.array() == 1e-6).all());
}

TEST_CASE("calculus: gradient norm scales linearly and ignores sign") {
  const Graph g = gt::random_connected_graph(15, 0.2, 43);
  const NodeField f = gt::random_field(15, 2, 44);
  const double delta = 1e-9;
  const Eigen::VectorXd base = gradient_norm(g, f, delta);
  const Eigen::VectorXd negated = gradient_norm(g, NodeField(-f), delta);
  const Eigen::VectorXd scaled = gradient_norm(g, NodeField(2.5 * f), delta);
  CHECK((base - negated).cwiseAbs().maxCoeff() <= 1e-13);
  CHECK((scaled - 2.5 * base).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("calculus: p-Laplacian degenerates to the heat operator at p=2") {
  const Graph g = gt::random_connected_graph(20, 0.15, 51, true);
  const NodeField f = gt::random_field(20, 3, 52);
  const NodeField via_p = p_laplacian_apply(g, f, 2.0, 1e-6);
  const NodeField heat_rhs = -laplacian_apply(g, f);
  CHECK((via_p - heat_rhs).cwiseAbs().maxCoeff() <= 1e-12);
  // exponent zero: no delta dependence
  const NodeField other_delta = p_laplacian_apply(g, f, 2.0, 0.5);
  CHECK((via_p - other_delta).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("calculus: p=1 on the unit path matches p=2") {
  const Graph g = gt::path2();
  NodeField f(2, 1);
  f << 1, 0;
  const NodeField p1 = p_laplacian_apply(g, f, 1.0, 1e-6);
  const NodeField p2 = p_laplacian_apply(g, f, 2.0, 1e-6);
  CHECK((p1 - p2).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("calculus: p=4 on a harmonic field is zero") {
  const Graph g = gt::random_connected_graph(10, 0.3, 61, true);
  const NodeField out = p_laplacian_apply(g, sqrt_degree_field(g), 4.0, 1e-6);
  CHECK(out.cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("calculus: divergence rejects mismatched edge fields") {
  const Graph g = gt::triangle();
  EdgeField psi(1, 1);  // wrong edge count
  CHECK_THROWS_AS(divergence(g, psi), Error);
  try {
    divergence(g, psi);
  } catch (const Error& e) {
    CHECK(e.code() == errc::missing_orientation);
  }
}
