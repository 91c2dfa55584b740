#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "graphflow/flows.hpp"
#include "graphflow/graph.hpp"
#include "graphflow/perturb.hpp"
#include "graphflow/solvers.hpp"

#include "json.hpp"

namespace graphflow {

/// Planted two-or-more-block benchmark graph: block-diagonal edge
/// probabilities, Gaussian features around per-class means, labels = blocks.
struct SbmSpec {
  int blocks = 2;
  std::vector<int> sizes;  // one entry per block
  double p_in = 0.08;
  double p_out = 0.005;
  int feature_dim = 16;
  double separation = 1.0;   // distance between class means
  double noise_sigma = 0.5;  // per-channel feature noise
  std::uint64_t seed = 0;
  int max_retries = 50;

  int node_count() const;
  void validate() const;
};

struct SbmData {
  Graph graph;
  NodeField features;
  std::vector<int> labels;
};

/// One draw from the block model; may be disconnected.
SbmData generate_sbm_raw(const SbmSpec& spec);

/// Draws until the graph is connected (bumping the seed), then returns it.
SbmData generate_sbm(const SbmSpec& spec);

struct LayerSpec {
  int width = 64;
  bool identity_projection = false;
  FlowSpec flow;
  SolverSpec solver;
  double dropout = 0.5;  // recorded for config fidelity; inert at evaluation
  bool layer_norm = true;
};

/// Layered diffusion network with frozen seeded parameters: per layer a
/// linear projection, then one diffusion solve over [0, t_end].
struct LayerStack {
  std::vector<LayerSpec> layers;
  int attention_heads = 1;
  int attention_key_dim = 8;
  bool normalize_attention = true;
  std::uint64_t seed = 0;
};

NodeField layer_norm_rows(const NodeField& z);

/// Seeded uniform [-1/sqrt(d_in), 1/sqrt(d_in)] projection matrix.
Eigen::MatrixXd make_projection(int d_in, int d_out, std::uint64_t seed);

/// Per layer: layer-norm, project, diffuse. Collects per-layer solve times
/// into `solve_seconds` when given.
NodeField forward(const LayerStack& stack, const Graph& g, const NodeField& z0,
                  std::vector<double>* solve_seconds = nullptr);

/// Closed-form ridge regression of one-hot labels on embedding rows;
/// rejects lambda <= 0.
Eigen::MatrixXd train_readout(const NodeField& embeddings,
                              const std::vector<int>& labels,
                              const std::vector<int>& train_idx,
                              double ridge_lambda);

std::vector<int> predict(const NodeField& embeddings,
                         const Eigen::MatrixXd& readout);

double subset_accuracy(const std::vector<int>& predictions,
                       const std::vector<int>& labels,
                       const std::vector<int>& subset);

/// One attack entry of the experiment configuration. A fractional edge
/// budget (relative to |E|) is resolved against each seed's graph.
struct AttackConfig {
  std::string name;
  AttackSpec spec;
  double budget_edges_fraction = -1.0;  // < 0: use spec.budget_edges
  std::string subset = "easy";          // feature_noise target pool
};

struct ExperimentConfig {
  SbmSpec data;
  std::vector<int> widths = {64, 64, 64};
  bool layer_norm = true;
  double dropout = 0.5;
  bool identity_projection = false;
  int attention_heads = 1;
  int attention_key_dim = 8;
  bool normalize_attention = true;
  std::vector<FlowSpec> flows;
  SolverSpec solver;
  std::vector<AttackConfig> attacks;
  std::vector<std::uint64_t> seeds;
  std::array<double, 3> split_fractions = {0.1, 0.1, 0.1};
  double ridge_lambda = 1e-2;

  void validate() const;
  static ExperimentConfig from_json(const nlohmann::json& doc);
  static ExperimentConfig from_json_file(const std::filesystem::path& path);
  nlohmann::ordered_json to_json() const;
};

struct SeedOutcome {
  std::uint64_t seed = 0;
  double majority_baseline = 0.0;
  // indexed [flow][attack] with attack 0 = clean
  std::vector<std::vector<double>> accuracy;
  std::vector<std::vector<double>> drift;  // vs clean embeddings, Frobenius
  std::vector<std::vector<double>> solve_seconds;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<std::string> flow_names;
  std::vector<std::string> attack_names;  // "clean" first
  std::vector<SeedOutcome> per_seed;
  std::vector<std::vector<double>> accuracy_mean;   // [flow][attack]
  std::vector<std::vector<double>> accuracy_sigma;  // [flow][attack]
  std::vector<std::vector<double>> drop_mean;       // vs clean, [flow][attack]

  /// Canonical report; excludes wall-clock timings so identical configs and
  /// seeds serialize byte-identically.
  std::string to_json_string(int indent = 2) const;
  /// Wall-clock side channel, written separately from the canonical report.
  std::string timings_json_string(int indent = 2) const;
  std::string accuracy_csv() const;
};

ExperimentResult run_robustness_experiment(const ExperimentConfig& config,
                                           int jobs = 1);

// JSON helpers shared by the config file format and the CLI.
FlowSpec flow_spec_from_json(const nlohmann::json& doc);
nlohmann::ordered_json flow_spec_to_json(const FlowSpec& spec);
SolverSpec solver_spec_from_json(const nlohmann::json& doc);
nlohmann::ordered_json solver_spec_to_json(const SolverSpec& spec);
AttackConfig attack_config_from_json(const nlohmann::json& doc);
nlohmann::ordered_json attack_config_to_json(const AttackConfig& config);

}  // namespace graphflow
