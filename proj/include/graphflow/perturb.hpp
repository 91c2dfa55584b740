#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "graphflow/flows.hpp"
#include "graphflow/graph.hpp"

namespace graphflow {

enum class AttackKind { edge_flip, injection, feature_noise };
enum class TargetPolicy { lowest_degree, random };

const char* attack_kind_name(AttackKind kind) noexcept;
AttackKind parse_attack_kind(const std::string& name);
const char* target_policy_name(TargetPolicy policy) noexcept;
TargetPolicy parse_target_policy(const std::string& name);

struct AttackSpec {
  AttackKind kind = AttackKind::edge_flip;
  int budget_nodes = 0;
  int budget_edges = 0;
  double epsilon_feat = 0.0;
  TargetPolicy target_policy = TargetPolicy::lowest_degree;
  FlowSpec surrogate;  // transfer source, recorded with the perturbation
  std::uint64_t seed = 0;

  void validate() const;
};

/// Disjoint node pools by ascending degree: easy holds the lowest-degree
/// nodes (the attackable pool), full is the union of the three bands, and
/// the remaining nodes are split 6:1 into train/val.
struct VictimSplit {
  std::vector<int> easy;
  std::vector<int> medium;
  std::vector<int> hard;
  std::vector<int> full;
  std::vector<int> train;
  std::vector<int> val;
};

/// fractions = (easy, medium, hard) shares of all nodes; must sum to <= 1.
/// Degree ties are broken by a seeded shuffle.
VictimSplit degree_split(const Graph& g, const std::array<double, 3>& fractions,
                         std::uint64_t seed);

/// Adds budget_nodes new nodes, each wired to ceil(budget_edges/budget_nodes)
/// victims (total capped at budget_edges). Injected features are drawn from
/// the observed per-channel range and pushed toward the negative of the
/// victim-neighborhood mean. Original edges and features are untouched.
std::pair<Graph, NodeField> inject_nodes(const Graph& g, const NodeField& z,
                                         const AttackSpec& spec);

/// Toggles budget_edges distinct unordered pairs (seeded): existing edges are
/// removed, missing ones added with the mean existing weight. Resamples until
/// the result is as connected as the input.
Graph flip_edges(const Graph& g, const AttackSpec& spec);

/// Adds seeded uniform noise in [-eps, eps] to the given rows, clamped to the
/// observed per-channel range of the input.
NodeField perturb_features(const NodeField& z, const AttackSpec& spec,
                           const std::vector<int>& node_subset);

}  // namespace graphflow
