#include <cmath>

#include "doctest.h"
#include "graphflow/solvers.hpp"
#include "graphflow/stability.hpp"
#include "test_util.hpp"

using namespace graphflow;
namespace gt = graphflow::testing;

TEST_CASE("stability: zero epsilon returns the graph unchanged") {
  const Graph g = gt::triangle();
  const Graph same = perturb_adjacency(g, 0.0, PerturbMode::mixed, 1);
  CHECK(Eigen::MatrixXd(same.adjacency())
            .isApprox(Eigen::MatrixXd(g.adjacency())));
}

TEST_CASE("stability: removing weight from one triangle edge, frobenius") {
  const Graph g = gt::triangle();
  const Graph perturbed =
      perturb_adjacency(g, 0.1, PerturbMode::remove, 3, MatrixNorm::frobenius);
  const Eigen::MatrixXd diff = Eigen::MatrixXd(perturbed.adjacency()) -
                               Eigen::MatrixXd(g.adjacency());
  int nonzeros = 0;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (diff(i, j) != 0.0) {
        ++nonzeros;
        CHECK(std::abs(diff(i, j)) ==
              doctest::Approx(0.1 / std::sqrt(2.0)).epsilon(1e-12));
        CHECK(diff(i, j) < 0.0);
      }
    }
  }
  CHECK(nonzeros == 2);  // one unordered edge, both orientations
}

TEST_CASE("stability: measured norm lands within two percent") {
  const Graph g = gt::random_connected_graph(40, 0.12, 7, true);
  for (MatrixNorm norm :
       {MatrixNorm::op2, MatrixNorm::frobenius, MatrixNorm::max_row_sum}) {
    for (PerturbMode mode :
         {PerturbMode::add, PerturbMode::remove, PerturbMode::mixed}) {
      for (double eps : {1e-3, 1e-2, 1e-1}) {
        const Graph perturbed = perturb_adjacency(g, eps, mode, 11, norm);
        const Eigen::MatrixXd diff =
            Eigen::MatrixXd(perturbed.adjacency()) -
            Eigen::MatrixXd(g.adjacency());
        REQUIRE(matrix_norm(diff, norm) ==
                doctest::Approx(eps).epsilon(0.02));
        REQUIRE(perturbed.min_degree() > 0.0);
      }
    }
  }
}

TEST_CASE("stability: same seed scales the perturbation linearly in epsilon") {
  const Graph g = gt::random_connected_graph(30, 0.15, 17, true);
  const Graph p1 = perturb_adjacency(g, 0.01, PerturbMode::mixed, 23);
  const Graph p2 = perturb_adjacency(g, 0.02, PerturbMode::mixed, 23);
  const Eigen::MatrixXd e1 =
      Eigen::MatrixXd(p1.adjacency()) - Eigen::MatrixXd(g.adjacency());
  const Eigen::MatrixXd e2 =
      Eigen::MatrixXd(p2.adjacency()) - Eigen::MatrixXd(g.adjacency());
  CHECK((e2 - 2.0 * e1).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("stability: semigroup gap vanishes for identical graphs and t=0") {
  const Graph g = gt::random_connected_graph(20, 0.2, 31, true);
  const NodeField z0 = gt::random_field(20, 2, 32);
  CHECK(semigroup_gap(g, g, z0, 1.0) == 0.0);
  const Graph perturbed = perturb_adjacency(g, 0.05, PerturbMode::mixed, 33);
  CHECK(semigroup_gap(g, perturbed, z0, 0.0) == 0.0);
}

TEST_CASE("stability: gap on the perturbed 3-path against the Pade route") {
  const Graph g = gt::path3();
  const Graph perturbed =
      build_graph(3, {{0, 1, 1.1}, {1, 2, 1.0}});
  NodeField z0(3, 1);
  z0 << 1, 0, 0;
  const double t = 1.0;
  const double gap = semigroup_gap(g, perturbed, z0, t);
  // independent route: scaling-and-squaring exponentials
  const Eigen::MatrixXd e_clean =
      expm(-t * normalized_laplacian_dense(g));
  const Eigen::MatrixXd e_pert =
      expm(-t * normalized_laplacian_dense(perturbed));
  const double gap_pade = ((e_clean - e_pert) * z0).norm();
  CHECK(gap == doctest::Approx(gap_pade).epsilon(1e-10));
  CHECK(gap > 0.0);
}

TEST_CASE("stability: regular-graph weight invariance on the unit path") {
  // scaling the only edge weight leaves the normalized Laplacian unchanged
  const Graph g = gt::path2();
  const Graph scaled = build_graph(2, {{0, 1, 1.1}});
  NodeField z0(2, 1);
  z0 << 1, 0;
  CHECK(semigroup_gap(g, scaled, z0, 1.0) <= 1e-14);
}

TEST_CASE("stability: slope near one on a mid-sized random graph") {
  const Graph g = gt::random_connected_graph(60, 0.1, 41);
  PerturbationSweep sweep;
  sweep.epsilons = {1e-3, 3e-3, 1e-2, 3e-2, 1e-1};
  sweep.trials = 3;
  sweep.seed = 42;
  const StabilityReport report = stability_slope(g, sweep, 1.0);
  CHECK(report.slope >= 0.8);
  CHECK(report.slope <= 1.2);
  CHECK(report.r_squared >= 0.95);
  CHECK(report.rho_hat > 0.0);
  CHECK(report.eig_min >= -1e-10);
  CHECK(report.eig_max <= 2.0 + 1e-10);
}

TEST_CASE("stability: sweep preconditions") {
  PerturbationSweep sweep;
  sweep.epsilons = {1e-2, 2e-2, 3e-2};  // too few
  CHECK_THROWS_AS(sweep.validate(), Error);
  sweep.epsilons = {1e-2, 2e-2, 3e-2, 4e-2};  // under 1.5 decades
  CHECK_THROWS_AS(sweep.validate(), Error);
  sweep.epsilons = {1e-3, 3e-3, 1e-2, 1e-1};
  CHECK_NOTHROW(sweep.validate());
}

TEST_CASE("stability: deflated gap follows the t e^{-rho t} profile") {
  const Graph g = gt::random_connected_graph(40, 0.15, 51);
  const NodeField z0 = gt::random_field(40, 2, 52);
  const Graph perturbed = perturb_adjacency(g, 0.01, PerturbMode::mixed, 53);
  const SymmetricEigen eig = symmetric_eigen(normalized_laplacian_dense(g));
  const double rho = eig.values(1);
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (double t : {0.1, 0.5, 1.0, 2.0, 5.0}) {
    const double gap = semigroup_gap_deflated(g, perturbed, z0, t);
    const double ratio = gap / (t * std::exp(-rho * t));
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  CHECK(lo > 0.0);
  CHECK(hi / lo <= 50.0);
}

TEST_CASE("stability: single-segment schedule equals the semigroup gap") {
  const Graph g = gt::random_connected_graph(15, 0.25, 61, true);
  const Graph perturbed = perturb_adjacency(g, 0.02, PerturbMode::mixed, 62);
  const NodeField z0 = gt::random_field(15, 2, 63);
  const double direct = semigroup_gap(g, perturbed, z0, 0.7);
  const double via_schedule =
      time_variant_gap({{0.7, g, perturbed}}, z0);
  CHECK(via_schedule == doctest::Approx(direct).epsilon(1e-14));
}

TEST_CASE("stability: two equal segments equal one doubled segment") {
  const Graph g = gt::random_connected_graph(15, 0.25, 71, true);
  const Graph perturbed = perturb_adjacency(g, 0.02, PerturbMode::mixed, 72);
  const NodeField z0 = gt::random_field(15, 2, 73);
  const double split =
      time_variant_gap({{0.5, g, perturbed}, {0.5, g, perturbed}}, z0);
  const double merged = time_variant_gap({{1.0, g, perturbed}}, z0);
  CHECK(std::abs(split - merged) <= 1e-12);
}

TEST_CASE("stability: doubling epsilon on all segments doubles the gap") {
  const Graph g = gt::random_connected_graph(30, 0.15, 81);
  const NodeField z0 = gt::random_field(30, 2, 82);
  auto schedule = [&](double scale) {
    std::vector<Segment> segments;
    for (int s = 0; s < 2; ++s) {
      Segment seg;
      seg.duration = 0.5;
      seg.clean = g;
      seg.perturbed = perturb_adjacency(g, scale * 0.01, PerturbMode::mixed,
                                        900 + static_cast<std::uint64_t>(s));
      segments.push_back(std::move(seg));
    }
    return segments;
  };
  const double base = time_variant_gap(schedule(1.0), z0);
  const double doubled = time_variant_gap(schedule(2.0), z0);
  CHECK(doubled / base >= 1.6);
  CHECK(doubled / base <= 2.4);
}

TEST_CASE("stability: triangle attention-heat spectrum") {
  const Graph g = gt::triangle();
  const auto params = make_attention_params(2, 8, 1, true, 91);
  const auto record = lyapunov_check(g, NodeField::Zero(3, 2), params,
                                     FlowKind::attention_heat);
  // uniform A: spectrum of A - I is {0, -1.5, -1.5}
  CHECK(record.max_real_part == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(record.stable);

  const Eigen::MatrixXd q(flow_matrix(g, NodeField::Zero(3, 2), params,
                                      FlowKind::attention_heat, 1e-6));
  Eigen::EigenSolver<Eigen::MatrixXd> eig(q);
  Eigen::VectorXd reals = eig.eigenvalues().real();
  std::sort(reals.data(), reals.data() + reals.size());
  CHECK(reals(0) == doctest::Approx(-1.5));
  CHECK(reals(1) == doctest::Approx(-1.5));
  CHECK(reals(2) == doctest::Approx(0.0));
}

TEST_CASE("stability: two-node swap spectrum") {
  const Graph g = gt::path2();
  const auto params = make_attention_params(2, 8, 1, true, 92);
  const Eigen::MatrixXd q(flow_matrix(g, NodeField::Zero(2, 2), params,
                                      FlowKind::attention_heat, 1e-6));
  Eigen::EigenSolver<Eigen::MatrixXd> eig(q);
  Eigen::VectorXd reals = eig.eigenvalues().real();
  std::sort(reals.data(), reals.data() + reals.size());
  CHECK(reals(0) == doctest::Approx(-2.0));
  CHECK(reals(1) == doctest::Approx(0.0));
}

TEST_CASE("stability: random beltrami instances are Lyapunov stable") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const int n = 10 + static_cast<int>(seed * 2);
    const Graph g = gt::random_connected_graph(n, 0.2, 100 + seed);
    const NodeField z = gt::random_field(n, 4, 200 + seed);
    const auto params = make_attention_params(4, 8, 1, true, 300 + seed);
    const auto record = lyapunov_check(g, z, params, FlowKind::beltrami);
    REQUIRE(record.max_real_part <= 1e-8);
  }
}

TEST_CASE("stability: report serialization") {
  const Graph g = gt::random_connected_graph(30, 0.2, 111);
  PerturbationSweep sweep;
  sweep.epsilons = {1e-3, 3e-3, 1e-2, 3e-2, 1e-1};
  sweep.trials = 2;
  const StabilityReport report = stability_slope(g, sweep, 1.0);
  const std::string json = report.to_json_string();
  CHECK(json.find("\"slope\"") != std::string::npos);
  CHECK(json.find("\"rho_hat\"") != std::string::npos);
}
