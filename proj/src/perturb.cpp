#include "graphflow/perturb.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "graphflow/rng.hpp"

namespace graphflow {

const char* attack_kind_name(AttackKind kind) noexcept {
  switch (kind) {
    case AttackKind::edge_flip: return "edge_flip";
    case AttackKind::injection: return "injection";
    case AttackKind::feature_noise: return "feature_noise";
  }
  return "edge_flip";
}

AttackKind parse_attack_kind(const std::string& name) {
  if (name == "edge_flip" || name == "flip") return AttackKind::edge_flip;
  if (name == "injection" || name == "inject") return AttackKind::injection;
  if (name == "feature_noise" || name == "feature")
    return AttackKind::feature_noise;
  fail(errc::config_error, "unknown attack kind '" + name + "'");
}

const char* target_policy_name(TargetPolicy policy) noexcept {
  return policy == TargetPolicy::lowest_degree ? "lowest_degree" : "random";
}

TargetPolicy parse_target_policy(const std::string& name) {
  if (name == "lowest_degree") return TargetPolicy::lowest_degree;
  if (name == "random") return TargetPolicy::random;
  fail(errc::config_error, "unknown target policy '" + name + "'");
}

void AttackSpec::validate() const {
  if (budget_nodes < 0 || budget_edges < 0) {
    fail(errc::config_error, "attack budgets must be >= 0");
  }
  if (epsilon_feat < 0.0) {
    fail(errc::config_error, "epsilon_feat must be >= 0");
  }
}

VictimSplit degree_split(const Graph& g, const std::array<double, 3>& fractions,
                         std::uint64_t seed) {
  const int n = g.node_count();
  if (n == 0) fail(errc::empty_graph, "degree_split on an empty graph");
  double total = 0.0;
  for (double f : fractions) {
    if (f < 0.0) fail(errc::config_error, "fractions must be >= 0");
    total += f;
  }
  if (total > 1.0 + 1e-12) fail(errc::config_error, "fractions sum above 1");

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  auto rng = make_rng(mix_seed(seed, 0x51ULL));
  std::shuffle(order.begin(), order.end(), rng);  // tie-break
  std::stable_sort(order.begin(), order.end(), [&g](int a, int b) {
    return g.degree(a) < g.degree(b);
  });

  VictimSplit split;
  const int n_easy = static_cast<int>(std::lround(fractions[0] * n));
  const int n_medium = static_cast<int>(std::lround(fractions[1] * n));
  const int n_hard = static_cast<int>(std::lround(fractions[2] * n));
  if (n_easy + n_medium + n_hard > n) {
    fail(errc::config_error, "fraction bands exceed the node count");
  }
  // quantile bands: easy and medium from the low-degree end, hard from the top
  int cursor = 0;
  auto take = [&](int count) {
    std::vector<int> block;
    for (int i = 0; i < count && cursor < n; ++i) block.push_back(order[cursor++]);
    return block;
  };
  split.easy = take(n_easy);
  split.medium = take(n_medium);
  split.hard.assign(order.end() - n_hard, order.end());
  split.full = split.easy;
  split.full.insert(split.full.end(), split.medium.begin(), split.medium.end());
  split.full.insert(split.full.end(), split.hard.begin(), split.hard.end());

  std::vector<int> rest(order.begin() + cursor, order.end() - n_hard);
  std::shuffle(rest.begin(), rest.end(), rng);
  // 60/10 convention: 6 parts train to 1 part val
  const int n_train = static_cast<int>(std::lround(rest.size() * 6.0 / 7.0));
  split.train.assign(rest.begin(), rest.begin() + n_train);
  split.val.assign(rest.begin() + n_train, rest.end());
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.val.begin(), split.val.end());
  return split;
}

std::pair<Graph, NodeField> inject_nodes(const Graph& g, const NodeField& z,
                                         const AttackSpec& spec) {
  spec.validate();
  if (spec.budget_nodes == 0 || spec.budget_edges == 0) return {g, z};
  const int n = g.node_count();
  const int per_node = static_cast<int>(
      std::ceil(static_cast<double>(spec.budget_edges) / spec.budget_nodes));
  if (per_node > n) {
    fail(errc::budget_exceeds_graph,
         "each injected node needs " + std::to_string(per_node) +
             " distinct victims but the graph has " + std::to_string(n));
  }

  auto rng = make_rng(spec.seed);
  const double added_weight = g.mean_weight();
  std::vector<WeightedEdge> edges = g.edges();
  Eigen::VectorXd working_degree = g.degrees();

  const int d = static_cast<int>(z.cols());
  Eigen::VectorXd lo = z.colwise().minCoeff();
  Eigen::VectorXd hi = z.colwise().maxCoeff();

  NodeField out(n + spec.budget_nodes, d);
  out.topRows(n) = z;

  int edges_left = spec.budget_edges;
  for (int a = 0; a < spec.budget_nodes; ++a) {
    const int injected = n + a;
    const int quota = std::min(per_node, edges_left);
    std::vector<int> victims;
    if (quota > 0) {
      if (spec.target_policy == TargetPolicy::lowest_degree) {
        std::vector<int> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
          return std::tie(working_degree(x), x) <
                 std::tie(working_degree(y), y);
        });
        victims.assign(order.begin(), order.begin() + quota);
      } else {
        std::vector<int> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::shuffle(order.begin(), order.end(), rng);
        victims.assign(order.begin(), order.begin() + quota);
      }
    }
    for (int victim : victims) {
      edges.push_back({victim, injected, added_weight});
      working_degree(victim) += added_weight;
      --edges_left;
    }

    // neighborhood mean over the victims and their neighbors
    Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(d);
    int count = 0;
    for (int victim : victims) {
      mean += z.row(victim);
      ++count;
      for (const auto& inc : g.incident(victim)) {
        mean += z.row(inc.neighbor);
        ++count;
      }
    }
    if (count > 0) mean /= static_cast<double>(count);

    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int c = 0; c < d; ++c) {
      const double draw = lo(c) + (hi(c) - lo(c)) * uni(rng);
      const double target = std::clamp(-mean(c), lo(c), hi(c));
      out(injected, c) = std::clamp(0.25 * draw + 0.75 * target, lo(c), hi(c));
    }
  }
  return {build_graph(n + spec.budget_nodes, edges), std::move(out)};
}

Graph flip_edges(const Graph& g, const AttackSpec& spec) {
  spec.validate();
  if (spec.budget_edges == 0) return g;
  const int n = g.node_count();
  const long total_pairs = static_cast<long>(n) * (n - 1) / 2;
  if (spec.budget_edges > total_pairs) {
    fail(errc::budget_exceeds_graph, "edge budget exceeds available pairs");
  }
  const double added_weight = g.mean_weight();
  const bool was_connected = g.connected();

  const int max_attempts = 200;
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    auto rng =
        make_rng(mix_seed(spec.seed, static_cast<std::uint64_t>(attempt)));
    std::uniform_int_distribution<int> pick(0, n - 1);
    std::set<std::pair<int, int>> flips;
    long guard = 0;
    while (static_cast<int>(flips.size()) < spec.budget_edges) {
      if (++guard > 200L * spec.budget_edges + 10000L) break;
      int u = pick(rng), v = pick(rng);
      if (u == v) continue;
      if (u > v) std::swap(u, v);
      flips.insert({u, v});
    }
    if (static_cast<int>(flips.size()) < spec.budget_edges) continue;

    std::vector<WeightedEdge> edges;
    edges.reserve(g.edges().size() + flips.size());
    for (const auto& e : g.edges()) {
      if (!flips.count({e.u, e.v})) edges.push_back(e);
    }
    for (const auto& pair : flips) {
      if (!g.has_edge(pair.first, pair.second)) {
        edges.push_back({pair.first, pair.second, added_weight});
      }
    }
    Graph flipped = build_graph(n, edges);
    if (was_connected && !flipped.connected()) continue;
    if (g.min_degree() > 0.0 && !(flipped.min_degree() > 0.0)) continue;
    return flipped;
  }
  fail(errc::connectivity_unrepairable,
       "could not keep the graph connected within the flip budget");
}

NodeField perturb_features(const NodeField& z, const AttackSpec& spec,
                           const std::vector<int>& node_subset) {
  spec.validate();
  if (spec.epsilon_feat == 0.0) return z;
  auto rng = make_rng(spec.seed);
  std::uniform_real_distribution<double> uni(-spec.epsilon_feat,
                                             spec.epsilon_feat);
  const Eigen::VectorXd lo = z.colwise().minCoeff();
  const Eigen::VectorXd hi = z.colwise().maxCoeff();
  NodeField out = z;
  for (int v : node_subset) {
    if (v < 0 || v >= z.rows()) {
      fail(errc::index_out_of_range, "perturb_features: bad node index");
    }
    for (int c = 0; c < z.cols(); ++c) {
      out(v, c) = std::clamp(z(v, c) + uni(rng), lo(c), hi(c));
    }
  }
  return out;
}

}  // namespace graphflow
