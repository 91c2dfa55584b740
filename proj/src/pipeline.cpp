#include "graphflow/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <numeric>

#include "graphflow/rng.hpp"

namespace graphflow {

int SbmSpec::node_count() const {
  return std::accumulate(sizes.begin(), sizes.end(), 0);
}

void SbmSpec::validate() const {
  if (blocks < 1) fail(errc::config_error, "blocks must be >= 1");
  if (static_cast<int>(sizes.size()) != blocks) {
    fail(errc::config_error, "sizes must list one entry per block");
  }
  for (int s : sizes) {
    if (s <= 0) fail(errc::config_error, "block sizes must be positive");
  }
  if (!(p_out >= 0.0 && p_out < p_in && p_in <= 1.0)) {
    fail(errc::config_error, "need 0 <= p_out < p_in <= 1");
  }
  if (feature_dim < 1) fail(errc::config_error, "feature_dim must be >= 1");
  if (noise_sigma < 0.0) fail(errc::config_error, "noise_sigma must be >= 0");
  if (separation < 0.0) fail(errc::config_error, "separation must be >= 0");
}

SbmData generate_sbm_raw(const SbmSpec& spec) {
  spec.validate();
  const int n = spec.node_count();
  auto rng = make_rng(spec.seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  std::vector<int> labels(static_cast<std::size_t>(n));
  {
    int node = 0;
    for (int b = 0; b < spec.blocks; ++b) {
      for (int i = 0; i < spec.sizes[b]; ++i) labels[node++] = b;
    }
  }

  std::vector<WeightedEdge> edges;
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) {
      const double p = labels[u] == labels[v] ? spec.p_in : spec.p_out;
      if (uni(rng) < p) edges.push_back({u, v, 1.0});
    }
  }

  // class means: antipodal for two blocks, random unit directions otherwise
  std::vector<Eigen::RowVectorXd> means(static_cast<std::size_t>(spec.blocks));
  auto unit = [&]() {
    Eigen::RowVectorXd v(spec.feature_dim);
    for (int c = 0; c < spec.feature_dim; ++c) v(c) = gauss(rng);
    v.normalize();
    return v;
  };
  if (spec.blocks == 2) {
    means[0] = 0.5 * spec.separation * unit();
    means[1] = -means[0];
  } else {
    for (auto& m : means) m = 0.5 * spec.separation * unit();
  }

  NodeField features(n, spec.feature_dim);
  for (int v = 0; v < n; ++v) {
    for (int c = 0; c < spec.feature_dim; ++c) {
      features(v, c) = std::clamp(
          means[labels[v]](c) + spec.noise_sigma * gauss(rng), -1.0, 1.0);
    }
  }
  return {build_graph(n, edges), std::move(features), std::move(labels)};
}

SbmData generate_sbm(const SbmSpec& spec) {
  SbmSpec draw = spec;
  for (int attempt = 0; attempt < spec.max_retries; ++attempt) {
    draw.seed = mix_seed(spec.seed, static_cast<std::uint64_t>(attempt));
    SbmData data = generate_sbm_raw(draw);
    if (data.graph.connected() && data.graph.min_degree() > 0.0) return data;
  }
  fail(errc::disconnected_after_retries,
       "no connected draw in " + std::to_string(spec.max_retries) + " tries");
}

// Centered rows scaled to unit length. The unit-norm convention keeps the
// diffusion generators at O(1) magnitude regardless of width, so deeper
// stacks stay in the same dynamic regime at every layer.
NodeField layer_norm_rows(const NodeField& z) {
  NodeField out = z;
  for (int i = 0; i < z.rows(); ++i) {
    const Eigen::RowVectorXd centered =
        z.row(i).array() - z.row(i).mean();
    out.row(i) = centered / (centered.norm() + 1e-8);
  }
  return out;
}

Eigen::MatrixXd make_projection(int d_in, int d_out, std::uint64_t seed) {
  auto rng = make_rng(seed);
  const double bound = 1.0 / std::sqrt(static_cast<double>(d_in));
  std::uniform_real_distribution<double> uni(-bound, bound);
  Eigen::MatrixXd w(d_in, d_out);
  for (int i = 0; i < d_in; ++i)
    for (int j = 0; j < d_out; ++j) w(i, j) = uni(rng);
  return w;
}

NodeField forward(const LayerStack& stack, const Graph& g, const NodeField& z0,
                  std::vector<double>* solve_seconds) {
  if (z0.rows() != g.node_count()) {
    fail(errc::dimension_mismatch, "forward: features do not match the graph");
  }
  NodeField z = z0;
  for (std::size_t l = 0; l < stack.layers.size(); ++l) {
    const LayerSpec& layer = stack.layers[l];
    if (layer.layer_norm) z = layer_norm_rows(z);
    if (!layer.identity_projection) {
      const auto w = make_projection(
          static_cast<int>(z.cols()), layer.width,
          mix_seed(stack.seed, 2 * static_cast<std::uint64_t>(l)));
      z = z * w;
    }
    std::optional<AttentionParams> params;
    if (layer.flow.kind == FlowKind::attention_heat ||
        layer.flow.kind == FlowKind::mean_curvature ||
        layer.flow.kind == FlowKind::beltrami) {
      params = make_attention_params(
          static_cast<int>(z.cols()), stack.attention_key_dim,
          stack.attention_heads, stack.normalize_attention,
          mix_seed(stack.seed, 2 * static_cast<std::uint64_t>(l) + 1));
    }
    FlowOperator op = build_rhs(g, layer.flow, std::move(params));
    op.prepare(z);
    const auto start = std::chrono::steady_clock::now();
    z = integrate(op, z, layer.solver);
    const auto stop = std::chrono::steady_clock::now();
    if (solve_seconds != nullptr) {
      solve_seconds->push_back(
          std::chrono::duration<double>(stop - start).count());
    }
  }
  return z;
}

Eigen::MatrixXd train_readout(const NodeField& embeddings,
                              const std::vector<int>& labels,
                              const std::vector<int>& train_idx,
                              double ridge_lambda) {
  if (train_idx.empty()) {
    fail(errc::config_error, "train_readout: empty train set");
  }
  if (!(ridge_lambda > 0.0)) {
    fail(errc::singular_system, "train_readout: ridge lambda must be > 0");
  }
  const int d = static_cast<int>(embeddings.cols());
  int classes = 0;
  for (int label : labels) classes = std::max(classes, label + 1);

  Eigen::MatrixXd x(train_idx.size(), d);
  Eigen::MatrixXd y = Eigen::MatrixXd::Zero(train_idx.size(), classes);
  for (std::size_t i = 0; i < train_idx.size(); ++i) {
    const int v = train_idx[i];
    if (v < 0 || v >= embeddings.rows()) {
      fail(errc::index_out_of_range, "train_readout: bad train index");
    }
    x.row(static_cast<int>(i)) = embeddings.row(v);
    y(static_cast<int>(i), labels[static_cast<std::size_t>(v)]) = 1.0;
  }
  const Eigen::MatrixXd gram =
      x.transpose() * x + ridge_lambda * Eigen::MatrixXd::Identity(d, d);
  return gram.ldlt().solve(x.transpose() * y);
}

std::vector<int> predict(const NodeField& embeddings,
                         const Eigen::MatrixXd& readout) {
  const Eigen::MatrixXd scores = embeddings * readout;
  std::vector<int> out(static_cast<std::size_t>(scores.rows()));
  for (int i = 0; i < scores.rows(); ++i) {
    int best = 0;
    for (int c = 1; c < scores.cols(); ++c) {
      if (scores(i, c) > scores(i, best)) best = c;  // ties keep lowest class
    }
    out[static_cast<std::size_t>(i)] = best;
  }
  return out;
}

double subset_accuracy(const std::vector<int>& predictions,
                       const std::vector<int>& labels,
                       const std::vector<int>& subset) {
  if (subset.empty()) fail(errc::config_error, "accuracy over empty subset");
  int hits = 0;
  for (int v : subset) {
    if (predictions[static_cast<std::size_t>(v)] ==
        labels[static_cast<std::size_t>(v)]) {
      ++hits;
    }
  }
  return static_cast<double>(hits) / static_cast<double>(subset.size());
}

void ExperimentConfig::validate() const {
  data.validate();
  solver.validate();
  if (widths.empty()) fail(errc::config_error, "stack needs at least 1 layer");
  if (flows.empty()) fail(errc::config_error, "no flows configured");
  for (const auto& flow : flows) flow.validate();
  for (const auto& attack : attacks) attack.spec.validate();
  if (seeds.empty()) fail(errc::config_error, "no seeds configured");
  if (!(ridge_lambda > 0.0)) fail(errc::config_error, "ridge_lambda must be > 0");
  double total = 0.0;
  for (double f : split_fractions) total += f;
  if (total > 1.0) fail(errc::config_error, "split fractions sum above 1");
}

namespace {

std::vector<int> attack_subset(const VictimSplit& split,
                               const std::string& name, int n) {
  if (name == "easy") return split.easy;
  if (name == "full" || name == "test") return split.full;
  if (name == "all") {
    std::vector<int> all(static_cast<std::size_t>(n));
    std::iota(all.begin(), all.end(), 0);
    return all;
  }
  fail(errc::config_error, "unknown attack subset '" + name + "'");
}

SeedOutcome run_one_seed(const ExperimentConfig& config, std::uint64_t seed) {
  SeedOutcome outcome;
  outcome.seed = seed;

  SbmSpec data_spec = config.data;
  data_spec.seed = mix_seed(seed, 0xda7aULL);
  const SbmData data = generate_sbm(data_spec);
  const Graph& g = data.graph;
  const int n = g.node_count();

  const VictimSplit split =
      degree_split(g, config.split_fractions, mix_seed(seed, 0x5411ULL));

  // attacks are generated once per seed and transferred to every flow
  std::vector<std::pair<Graph, NodeField>> attacked;
  for (std::size_t a = 0; a < config.attacks.size(); ++a) {
    AttackConfig attack = config.attacks[a];
    attack.spec.seed = mix_seed(seed, 0xa77aULL + a);
    if (attack.budget_edges_fraction >= 0.0) {
      attack.spec.budget_edges = static_cast<int>(
          std::lround(attack.budget_edges_fraction * g.edge_count()));
    }
    switch (attack.spec.kind) {
      case AttackKind::edge_flip:
        attacked.emplace_back(flip_edges(g, attack.spec), data.features);
        break;
      case AttackKind::injection:
        attacked.push_back(inject_nodes(g, data.features, attack.spec));
        break;
      case AttackKind::feature_noise:
        attacked.emplace_back(
            g, perturb_features(data.features, attack.spec,
                                attack_subset(split, attack.subset, n)));
        break;
    }
  }

  // majority share over the evaluation pool
  {
    std::vector<int> counts;
    for (int v : split.easy) {
      const int label = data.labels[static_cast<std::size_t>(v)];
      if (label >= static_cast<int>(counts.size())) counts.resize(label + 1, 0);
      ++counts[label];
    }
    outcome.majority_baseline =
        counts.empty() ? 0.0
                       : static_cast<double>(
                             *std::max_element(counts.begin(), counts.end())) /
                             static_cast<double>(split.easy.size());
  }

  LayerStack stack;
  stack.attention_heads = config.attention_heads;
  stack.attention_key_dim = config.attention_key_dim;
  stack.normalize_attention = config.normalize_attention;
  stack.seed = mix_seed(seed, 0x57acULL);
  for (int width : config.widths) {
    LayerSpec layer;
    layer.width = width;
    layer.identity_projection = config.identity_projection;
    layer.solver = config.solver;
    layer.dropout = config.dropout;
    layer.layer_norm = config.layer_norm;
    stack.layers.push_back(layer);
  }

  for (const auto& flow : config.flows) {
    LayerStack flow_stack = stack;
    for (auto& layer : flow_stack.layers) layer.flow = flow;

    std::vector<double> acc_row, drift_row, time_row;
    std::vector<double> solve_times;
    const NodeField emb_clean =
        forward(flow_stack, g, data.features, &solve_times);
    if (!emb_clean.allFinite()) {
      fail(errc::non_finite_state, "clean embeddings are not finite");
    }
    time_row.push_back(
        std::accumulate(solve_times.begin(), solve_times.end(), 0.0));

    const Eigen::MatrixXd readout =
        train_readout(emb_clean, data.labels, split.train, config.ridge_lambda);
    acc_row.push_back(
        subset_accuracy(predict(emb_clean, readout), data.labels, split.easy));
    drift_row.push_back(0.0);

    for (const auto& [g_att, z_att] : attacked) {
      solve_times.clear();
      const NodeField emb_att = forward(flow_stack, g_att, z_att, &solve_times);
      if (!emb_att.allFinite()) {
        fail(errc::non_finite_state, "attacked embeddings are not finite");
      }
      time_row.push_back(
          std::accumulate(solve_times.begin(), solve_times.end(), 0.0));
      acc_row.push_back(
          subset_accuracy(predict(emb_att, readout), data.labels, split.easy));
      drift_row.push_back((emb_att.topRows(n) - emb_clean).norm());
    }
    outcome.accuracy.push_back(std::move(acc_row));
    outcome.drift.push_back(std::move(drift_row));
    outcome.solve_seconds.push_back(std::move(time_row));
  }
  return outcome;
}

}  // namespace

ExperimentResult run_robustness_experiment(const ExperimentConfig& config,
                                           int jobs) {
  config.validate();
  ExperimentResult result;
  result.config = config;
  for (const auto& flow : config.flows) {
    result.flow_names.push_back(flow_kind_name(flow.kind));
  }
  // disambiguate repeated kinds (e.g. p_laplacian at several p)
  for (std::size_t i = 0; i < config.flows.size(); ++i) {
    if (config.flows[i].kind == FlowKind::p_laplacian) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "p_laplacian_p%g", config.flows[i].p);
      result.flow_names[i] = buf;
    }
  }
  result.attack_names.push_back("clean");
  for (const auto& attack : config.attacks) {
    result.attack_names.push_back(
        attack.name.empty() ? attack_kind_name(attack.spec.kind) : attack.name);
  }

  result.per_seed.resize(config.seeds.size());
  if (jobs <= 1 || config.seeds.size() <= 1) {
    for (std::size_t i = 0; i < config.seeds.size(); ++i) {
      result.per_seed[i] = run_one_seed(config, config.seeds[i]);
    }
  } else {
    std::vector<std::future<SeedOutcome>> futures(config.seeds.size());
    std::size_t next = 0;
    std::size_t in_flight_start = 0;
    while (in_flight_start < config.seeds.size()) {
      while (next < config.seeds.size() &&
             next - in_flight_start < static_cast<std::size_t>(jobs)) {
        futures[next] = std::async(std::launch::async, run_one_seed,
                                   std::cref(config), config.seeds[next]);
        ++next;
      }
      result.per_seed[in_flight_start] = futures[in_flight_start].get();
      ++in_flight_start;
    }
  }

  const std::size_t flows = config.flows.size();
  const std::size_t cols = config.attacks.size() + 1;
  result.accuracy_mean.assign(flows, std::vector<double>(cols, 0.0));
  result.accuracy_sigma.assign(flows, std::vector<double>(cols, 0.0));
  result.drop_mean.assign(flows, std::vector<double>(cols, 0.0));
  const double count = static_cast<double>(config.seeds.size());
  for (std::size_t f = 0; f < flows; ++f) {
    for (std::size_t a = 0; a < cols; ++a) {
      double mean = 0.0;
      for (const auto& seed_outcome : result.per_seed) {
        mean += seed_outcome.accuracy[f][a];
      }
      mean /= count;
      double var = 0.0;
      double drop = 0.0;
      for (const auto& seed_outcome : result.per_seed) {
        var += (seed_outcome.accuracy[f][a] - mean) *
               (seed_outcome.accuracy[f][a] - mean);
        drop += seed_outcome.accuracy[f][0] - seed_outcome.accuracy[f][a];
      }
      result.accuracy_mean[f][a] = mean;
      result.accuracy_sigma[f][a] = std::sqrt(var / count);
      result.drop_mean[f][a] = drop / count;
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// JSON plumbing

namespace {

double get_or(const nlohmann::json& doc, const char* key, double fallback) {
  return doc.contains(key) ? doc.at(key).get<double>() : fallback;
}

int get_or(const nlohmann::json& doc, const char* key, int fallback) {
  return doc.contains(key) ? doc.at(key).get<int>() : fallback;
}

bool get_or(const nlohmann::json& doc, const char* key, bool fallback) {
  return doc.contains(key) ? doc.at(key).get<bool>() : fallback;
}

}  // namespace

FlowSpec flow_spec_from_json(const nlohmann::json& doc) {
  FlowSpec spec;
  try {
    spec.kind = parse_flow_kind(doc.at("kind").get<std::string>());
    spec.diffusivity = get_or(doc, "diffusivity", spec.diffusivity);
    spec.p = get_or(doc, "p", spec.p);
    spec.delta = get_or(doc, "delta", spec.delta);
    spec.time_dependent_attention = get_or(doc, "time_dependent_attention",
                                           spec.time_dependent_attention);
  } catch (const nlohmann::json::exception& e) {
    fail(errc::config_error, std::string("flow spec: ") + e.what());
  }
  spec.validate();
  return spec;
}

nlohmann::ordered_json flow_spec_to_json(const FlowSpec& spec) {
  nlohmann::ordered_json doc;
  doc["kind"] = flow_kind_name(spec.kind);
  doc["diffusivity"] = spec.diffusivity;
  doc["p"] = spec.p;
  doc["delta"] = spec.delta;
  doc["time_dependent_attention"] = spec.time_dependent_attention;
  return doc;
}

SolverSpec solver_spec_from_json(const nlohmann::json& doc) {
  SolverSpec spec;
  try {
    if (doc.contains("method")) {
      spec.method = parse_solver_method(doc.at("method").get<std::string>());
    }
    spec.step = get_or(doc, "step", spec.step);
    spec.rtol = get_or(doc, "rtol", spec.rtol);
    spec.atol = get_or(doc, "atol", spec.atol);
    spec.max_fp_iters = get_or(doc, "max_fp_iters", spec.max_fp_iters);
    spec.t_end = get_or(doc, "t_end", spec.t_end);
  } catch (const nlohmann::json::exception& e) {
    fail(errc::config_error, std::string("solver spec: ") + e.what());
  }
  spec.validate();
  return spec;
}

nlohmann::ordered_json solver_spec_to_json(const SolverSpec& spec) {
  nlohmann::ordered_json doc;
  doc["method"] = solver_method_name(spec.method);
  doc["step"] = spec.step;
  doc["rtol"] = spec.rtol;
  doc["atol"] = spec.atol;
  doc["max_fp_iters"] = spec.max_fp_iters;
  doc["t_end"] = spec.t_end;
  return doc;
}

AttackConfig attack_config_from_json(const nlohmann::json& doc) {
  AttackConfig config;
  try {
    config.spec.kind = parse_attack_kind(doc.at("kind").get<std::string>());
    config.name = doc.contains("name") ? doc.at("name").get<std::string>()
                                       : attack_kind_name(config.spec.kind);
    config.spec.budget_nodes = get_or(doc, "budget_nodes", 0);
    config.spec.budget_edges = get_or(doc, "budget_edges", 0);
    config.spec.epsilon_feat = get_or(doc, "epsilon_feat", 0.0);
    if (doc.contains("target_policy")) {
      config.spec.target_policy =
          parse_target_policy(doc.at("target_policy").get<std::string>());
    }
    if (doc.contains("surrogate")) {
      config.spec.surrogate = flow_spec_from_json(doc.at("surrogate"));
    }
    config.budget_edges_fraction =
        get_or(doc, "budget_edges_fraction", -1.0);
    if (doc.contains("subset")) {
      config.subset = doc.at("subset").get<std::string>();
    }
  } catch (const nlohmann::json::exception& e) {
    fail(errc::config_error, std::string("attack spec: ") + e.what());
  }
  config.spec.validate();
  return config;
}

nlohmann::ordered_json attack_config_to_json(const AttackConfig& config) {
  nlohmann::ordered_json doc;
  doc["name"] = config.name;
  doc["kind"] = attack_kind_name(config.spec.kind);
  doc["budget_nodes"] = config.spec.budget_nodes;
  doc["budget_edges"] = config.spec.budget_edges;
  if (config.budget_edges_fraction >= 0.0) {
    doc["budget_edges_fraction"] = config.budget_edges_fraction;
  }
  doc["epsilon_feat"] = config.spec.epsilon_feat;
  doc["target_policy"] = target_policy_name(config.spec.target_policy);
  doc["surrogate"] = flow_spec_to_json(config.spec.surrogate);
  doc["subset"] = config.subset;
  return doc;
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& doc) {
  ExperimentConfig config;
  try {
    const auto& data = doc.at("data");
    config.data.blocks = get_or(data, "blocks", config.data.blocks);
    if (data.contains("sizes")) {
      config.data.sizes = data.at("sizes").get<std::vector<int>>();
    } else if (data.contains("n")) {
      const int n = data.at("n").get<int>();
      config.data.sizes.assign(config.data.blocks, n / config.data.blocks);
      config.data.sizes.back() += n % config.data.blocks;
    }
    config.data.p_in = get_or(data, "p_in", config.data.p_in);
    config.data.p_out = get_or(data, "p_out", config.data.p_out);
    config.data.feature_dim = get_or(data, "feature_dim", config.data.feature_dim);
    config.data.separation = get_or(data, "separation", config.data.separation);
    config.data.noise_sigma = get_or(data, "noise_sigma", config.data.noise_sigma);
    config.data.max_retries = get_or(data, "max_retries", config.data.max_retries);

    if (doc.contains("stack")) {
      const auto& stack = doc.at("stack");
      if (stack.contains("widths")) {
        config.widths = stack.at("widths").get<std::vector<int>>();
      }
      config.layer_norm = get_or(stack, "layer_norm", config.layer_norm);
      config.dropout = get_or(stack, "dropout", config.dropout);
      config.identity_projection =
          get_or(stack, "identity_projection", config.identity_projection);
      config.attention_heads = get_or(stack, "heads", config.attention_heads);
      config.attention_key_dim = get_or(stack, "key_dim", config.attention_key_dim);
      config.normalize_attention =
          get_or(stack, "spectral_normalize", config.normalize_attention);
    }

    for (const auto& flow : doc.at("flows")) {
      config.flows.push_back(flow_spec_from_json(flow));
    }
    if (doc.contains("solver")) {
      config.solver = solver_spec_from_json(doc.at("solver"));
    }
    if (doc.contains("attacks")) {
      for (const auto& attack : doc.at("attacks")) {
        config.attacks.push_back(attack_config_from_json(attack));
      }
    }
    config.seeds = doc.at("seeds").get<std::vector<std::uint64_t>>();
    if (doc.contains("split") && doc.at("split").contains("fractions")) {
      const auto fractions =
          doc.at("split").at("fractions").get<std::vector<double>>();
      if (fractions.size() != 3) {
        fail(errc::config_error, "split.fractions needs 3 entries");
      }
      std::copy(fractions.begin(), fractions.end(),
                config.split_fractions.begin());
    }
    if (doc.contains("readout")) {
      config.ridge_lambda =
          get_or(doc.at("readout"), "ridge_lambda", config.ridge_lambda);
    }
  } catch (const nlohmann::json::exception& e) {
    fail(errc::config_error, std::string("experiment config: ") + e.what());
  }
  config.validate();
  return config;
}

ExperimentConfig ExperimentConfig::from_json_file(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(errc::io_error, "cannot open " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    fail(errc::config_error, path.string() + ": " + e.what());
  }
  return from_json(doc);
}

nlohmann::ordered_json ExperimentConfig::to_json() const {
  nlohmann::ordered_json doc;
  auto& data = doc["data"];
  data["blocks"] = this->data.blocks;
  data["sizes"] = this->data.sizes;
  data["p_in"] = this->data.p_in;
  data["p_out"] = this->data.p_out;
  data["feature_dim"] = this->data.feature_dim;
  data["separation"] = this->data.separation;
  data["noise_sigma"] = this->data.noise_sigma;
  data["max_retries"] = this->data.max_retries;
  auto& stack = doc["stack"];
  stack["widths"] = widths;
  stack["layer_norm"] = layer_norm;
  stack["dropout"] = dropout;
  stack["identity_projection"] = identity_projection;
  stack["heads"] = attention_heads;
  stack["key_dim"] = attention_key_dim;
  stack["spectral_normalize"] = normalize_attention;
  auto& flows_doc = doc["flows"] = nlohmann::ordered_json::array();
  for (const auto& flow : flows) flows_doc.push_back(flow_spec_to_json(flow));
  doc["solver"] = solver_spec_to_json(solver);
  auto& attacks_doc = doc["attacks"] = nlohmann::ordered_json::array();
  for (const auto& attack : attacks) {
    attacks_doc.push_back(attack_config_to_json(attack));
  }
  doc["seeds"] = seeds;
  doc["split"]["fractions"] = split_fractions;
  doc["readout"]["ridge_lambda"] = ridge_lambda;
  return doc;
}

std::string ExperimentResult::to_json_string(int indent) const {
  nlohmann::ordered_json doc;
  doc["config"] = config.to_json();
  doc["flows"] = flow_names;
  doc["attacks"] = attack_names;
  auto& seeds_doc = doc["per_seed"] = nlohmann::ordered_json::array();
  for (const auto& outcome : per_seed) {
    nlohmann::ordered_json entry;
    entry["seed"] = outcome.seed;
    entry["majority_baseline"] = outcome.majority_baseline;
    for (std::size_t f = 0; f < flow_names.size(); ++f) {
      for (std::size_t a = 0; a < attack_names.size(); ++a) {
        entry["accuracy"][flow_names[f]][attack_names[a]] =
            outcome.accuracy[f][a];
        entry["drift"][flow_names[f]][attack_names[a]] = outcome.drift[f][a];
      }
    }
    seeds_doc.push_back(entry);
  }
  auto& agg = doc["aggregate"];
  for (std::size_t f = 0; f < flow_names.size(); ++f) {
    for (std::size_t a = 0; a < attack_names.size(); ++a) {
      agg["accuracy_mean"][flow_names[f]][attack_names[a]] =
          accuracy_mean[f][a];
      agg["accuracy_sigma"][flow_names[f]][attack_names[a]] =
          accuracy_sigma[f][a];
      agg["drop_mean"][flow_names[f]][attack_names[a]] = drop_mean[f][a];
    }
  }
  return doc.dump(indent);
}

std::string ExperimentResult::timings_json_string(int indent) const {
  nlohmann::ordered_json doc;
  auto& seeds_doc = doc["per_seed"] = nlohmann::ordered_json::array();
  for (const auto& outcome : per_seed) {
    nlohmann::ordered_json entry;
    entry["seed"] = outcome.seed;
    for (std::size_t f = 0; f < flow_names.size(); ++f) {
      for (std::size_t a = 0; a < attack_names.size(); ++a) {
        entry["diffusion_seconds"][flow_names[f]][attack_names[a]] =
            outcome.solve_seconds[f][a];
      }
    }
    seeds_doc.push_back(entry);
  }
  return doc.dump(indent);
}

std::string ExperimentResult::accuracy_csv() const {
  std::string out = "attack";
  for (const auto& flow : flow_names) out += "," + flow;
  out += "\n";
  char buf[64];
  for (std::size_t a = 0; a < attack_names.size(); ++a) {
    out += attack_names[a];
    for (std::size_t f = 0; f < flow_names.size(); ++f) {
      std::snprintf(buf, sizeof(buf), ",%.4f±%.4f", accuracy_mean[f][a],
                    accuracy_sigma[f][a]);
      out += buf;
    }
    out += "\n";
  }
  return out;
}

}  // namespace graphflow
