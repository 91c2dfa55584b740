#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "graphflow/attention.hpp"
#include "graphflow/io.hpp"
#include "graphflow/pipeline.hpp"
#include "graphflow/rng.hpp"
#include "graphflow/solvers.hpp"
#include "graphflow/stability.hpp"

namespace gf = graphflow;
namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

int exit_code_for(gf::errc code) {
  switch (code) {
    case gf::errc::config_error: return 2;
    case gf::errc::io_error: return 4;
    default: return 3;  // numerical failure
  }
}

void report_error(gf::errc code, const std::string& message) {
  ordered_json doc;
  doc["error"] = gf::errc_name(code);
  doc["message"] = message;
  std::cerr << doc.dump() << "\n";
}

json load_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) gf::fail(gf::errc::io_error, "cannot open " + path.string());
  try {
    json doc;
    in >> doc;
    return doc;
  } catch (const json::exception& e) {
    gf::fail(gf::errc::config_error, path.string() + ": " + e.what());
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) gf::fail(gf::errc::io_error, "cannot write " + path.string());
  out << text;
}

struct DiffuseOptions {
  std::string graph_file, features_file, out_dir;
  std::string flow = "heat";
  std::string solver = "dopri5";
  double step = 0.1, rtol = 1e-6, atol = 1e-9, t_end = 1.0;
  int max_fp_iters = 100;
  double diffusivity = 1.0, p_exponent = 2.0, delta = 1e-6;
  bool time_dependent = false;
  int heads = 1, key_dim = 8;
  bool no_normalize = false;
  std::uint64_t params_seed = 0;
};

std::optional<gf::AttentionParams> params_for(const gf::FlowSpec& spec,
                                              int feature_dim, int key_dim,
                                              int heads, bool normalize,
                                              std::uint64_t seed) {
  if (spec.kind == gf::FlowKind::heat ||
      spec.kind == gf::FlowKind::p_laplacian) {
    return std::nullopt;
  }
  return gf::make_attention_params(feature_dim, key_dim, heads, normalize,
                                   seed);
}

int run_diffuse(const DiffuseOptions& opt) {
  const gf::Graph g = gf::read_edge_list(opt.graph_file);
  const Eigen::MatrixXd z0 = gf::read_csv_matrix(opt.features_file);
  if (z0.rows() != g.node_count()) {
    gf::fail(gf::errc::dimension_mismatch,
             "feature rows do not match the graph node count");
  }

  gf::FlowSpec flow;
  flow.kind = gf::parse_flow_kind(opt.flow);
  flow.diffusivity = opt.diffusivity;
  flow.p = opt.p_exponent;
  flow.delta = opt.delta;
  flow.time_dependent_attention = opt.time_dependent;
  flow.validate();

  gf::SolverSpec solver;
  solver.method = gf::parse_solver_method(opt.solver);
  solver.step = opt.step;
  solver.rtol = opt.rtol;
  solver.atol = opt.atol;
  solver.t_end = opt.t_end;
  solver.max_fp_iters = opt.max_fp_iters;
  solver.validate();

  auto params =
      params_for(flow, static_cast<int>(z0.cols()), opt.key_dim, opt.heads,
                 !opt.no_normalize, opt.params_seed);
  gf::FlowOperator op = gf::build_rhs(g, flow, std::move(params));

  fs::create_directories(opt.out_dir);
  gf::TrajectoryRecorder recorder;
  const gf::NodeField z = gf::integrate(op, z0, solver, recorder.callback());
  recorder.write_csv(fs::path(opt.out_dir) / "trajectory.csv");
  gf::write_csv_matrix(fs::path(opt.out_dir) / "final.csv", z);
  return 0;
}

int run_stability(const std::string& graph_file, const std::string& sweep_file,
                  const std::string& out_dir,
                  std::optional<std::uint64_t> seed_override) {
  const gf::Graph g = gf::read_edge_list(graph_file);
  const json cfg = load_json(sweep_file);

  gf::PerturbationSweep sweep;
  try {
    sweep.epsilons = cfg.at("epsilons").get<std::vector<double>>();
    if (cfg.contains("norm")) {
      sweep.norm = gf::parse_matrix_norm(cfg.at("norm").get<std::string>());
    }
    if (cfg.contains("trials")) sweep.trials = cfg.at("trials").get<int>();
    if (cfg.contains("seed")) sweep.seed = cfg.at("seed").get<std::uint64_t>();
    if (cfg.contains("mode")) {
      sweep.mode = gf::parse_perturb_mode(cfg.at("mode").get<std::string>());
    }
  } catch (const json::exception& e) {
    gf::fail(gf::errc::config_error, std::string("sweep config: ") + e.what());
  }
  if (seed_override) sweep.seed = *seed_override;
  const double t = cfg.contains("t") ? cfg.at("t").get<double>() : 1.0;

  const gf::StabilityReport report = gf::stability_slope(g, sweep, t);

  ordered_json doc;
  doc["slope"] = json::parse(report.to_json_string());

  // Lyapunov section: seeded random features/params on the same graph
  {
    auto& section = doc["lyapunov"] = ordered_json::array();
    const int instances =
        cfg.contains("lyapunov") && cfg.at("lyapunov").contains("instances")
            ? cfg.at("lyapunov").at("instances").get<int>()
            : 3;
    const int feature_dim = 8;
    for (gf::FlowKind kind :
         {gf::FlowKind::attention_heat, gf::FlowKind::mean_curvature,
          gf::FlowKind::beltrami}) {
      for (int i = 0; i < instances; ++i) {
        auto rng = gf::make_rng(gf::mix_seed(sweep.seed, 77 + i));
        std::normal_distribution<double> gauss(0.0, 1.0);
        gf::NodeField z(g.node_count(), feature_dim);
        for (int r = 0; r < z.rows(); ++r)
          for (int c = 0; c < z.cols(); ++c) z(r, c) = gauss(rng);
        const auto params = gf::make_attention_params(
            feature_dim, 8, 1, true, gf::mix_seed(sweep.seed, 177 + i));
        const auto record = gf::lyapunov_check(g, z, params, kind);
        ordered_json entry;
        entry["flow"] = gf::flow_kind_name(kind);
        entry["instance"] = i;
        entry["max_real_part"] = record.max_real_part;
        entry["stable"] = record.stable;
        section.push_back(entry);
      }
    }
  }

  // Time-variant section: two-segment schedule, gap vs doubled epsilon
  {
    const double eps =
        cfg.contains("time_variant") && cfg.at("time_variant").contains("epsilon")
            ? cfg.at("time_variant").at("epsilon").get<double>()
            : 0.01;
    auto rng = gf::make_rng(gf::mix_seed(sweep.seed, 0x7157ULL));
    std::normal_distribution<double> gauss(0.0, 1.0);
    gf::NodeField z0(g.node_count(), 4);
    for (int r = 0; r < z0.rows(); ++r)
      for (int c = 0; c < z0.cols(); ++c) z0(r, c) = gauss(rng);

    auto schedule = [&](double scale) {
      std::vector<gf::Segment> segments;
      for (int s = 0; s < 2; ++s) {
        gf::Segment seg;
        seg.duration = 0.5;
        seg.clean = g;
        seg.perturbed = gf::perturb_adjacency(
            g, scale * eps, sweep.mode, gf::mix_seed(sweep.seed, 900 + s),
            sweep.norm);
        segments.push_back(std::move(seg));
      }
      return segments;
    };
    const double gap1 = gf::time_variant_gap(schedule(1.0), z0);
    const double gap2 = gf::time_variant_gap(schedule(2.0), z0);
    auto& section = doc["time_variant"];
    section["epsilon"] = eps;
    section["gap"] = gap1;
    section["gap_doubled_epsilon"] = gap2;
    section["ratio"] = gap2 / gap1;
  }

  fs::create_directories(out_dir);
  write_text(fs::path(out_dir) / "stability_report.json", doc.dump(2) + "\n");
  report.write_gaps_csv(fs::path(out_dir) / "gaps.csv");
  return 0;
}

int run_attack(const std::string& graph_file, const std::string& features_file,
               const std::string& spec_file, const std::string& out_dir,
               std::optional<std::uint64_t> seed_override) {
  const gf::Graph g = gf::read_edge_list(graph_file);
  const Eigen::MatrixXd z = gf::read_csv_matrix(features_file);
  if (z.rows() != g.node_count()) {
    gf::fail(gf::errc::dimension_mismatch,
             "feature rows do not match the graph node count");
  }
  const json doc = load_json(spec_file);
  gf::AttackConfig attack = gf::attack_config_from_json(doc);
  if (doc.contains("seed")) {
    attack.spec.seed = doc.at("seed").get<std::uint64_t>();
  }
  if (seed_override) attack.spec.seed = *seed_override;
  if (attack.budget_edges_fraction >= 0.0) {
    attack.spec.budget_edges = static_cast<int>(
        std::lround(attack.budget_edges_fraction * g.edge_count()));
  }

  gf::Graph out_graph = g;
  gf::NodeField out_features = z;
  switch (attack.spec.kind) {
    case gf::AttackKind::edge_flip:
      out_graph = gf::flip_edges(g, attack.spec);
      break;
    case gf::AttackKind::injection: {
      auto [pg, pz] = gf::inject_nodes(g, z, attack.spec);
      out_graph = std::move(pg);
      out_features = std::move(pz);
      break;
    }
    case gf::AttackKind::feature_noise: {
      const auto split = gf::degree_split(g, {0.1, 0.1, 0.1}, attack.spec.seed);
      std::vector<int> subset;
      if (attack.subset == "all") {
        subset.resize(g.node_count());
        std::iota(subset.begin(), subset.end(), 0);
      } else if (attack.subset == "easy") {
        subset = split.easy;
      } else {
        subset = split.full;
      }
      out_features = gf::perturb_features(z, attack.spec, subset);
      break;
    }
  }

  fs::create_directories(out_dir);
  gf::write_edge_list(fs::path(out_dir) / "perturbed.edges", out_graph);
  gf::write_csv_matrix(fs::path(out_dir) / "perturbed_features.csv",
                       out_features);
  return 0;
}

int run_bench(const std::string& config_file, const std::string& out_dir,
              std::optional<std::uint64_t> seed_override, int jobs) {
  gf::ExperimentConfig config = gf::ExperimentConfig::from_json_file(config_file);
  if (seed_override) config.seeds = {*seed_override};
  const gf::ExperimentResult result =
      gf::run_robustness_experiment(config, jobs);
  fs::create_directories(out_dir);
  write_text(fs::path(out_dir) / "report.json",
             result.to_json_string() + "\n");
  write_text(fs::path(out_dir) / "accuracy.csv", result.accuracy_csv());
  write_text(fs::path(out_dir) / "timings.json",
             result.timings_json_string() + "\n");
  return 0;
}

int run_export_attention(const std::string& graph_file,
                         const std::string& features_file,
                         std::uint64_t params_seed, int heads, int key_dim,
                         bool no_normalize, const std::string& out_file) {
  const gf::Graph g = gf::read_edge_list(graph_file);
  const Eigen::MatrixXd z = gf::read_csv_matrix(features_file);
  if (z.rows() != g.node_count()) {
    gf::fail(gf::errc::dimension_mismatch,
             "feature rows do not match the graph node count");
  }
  const auto params = gf::make_attention_params(
      static_cast<int>(z.cols()), key_dim, heads, !no_normalize, params_seed);
  const gf::AttentionMatrix a = gf::attention_weights(g, z, params);
  const fs::path path(out_file);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  if (path.extension() == ".json") {
    gf::write_attention_json(path, g, a);
  } else {
    gf::write_attention_dot(path, g, a);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"graphflow: graph diffusion flows, ODE solvers and a "
               "topology-robustness laboratory"};
  app.require_subcommand(1);

  std::optional<std::uint64_t> seed_override;
  app.add_option("--seed", seed_override,
                 "override every configured seed with this value");
  int jobs = static_cast<int>(std::thread::hardware_concurrency());
  app.add_option("--jobs", jobs, "parallel workers for seed sweeps");

  DiffuseOptions diffuse;
  auto* cmd_diffuse =
      app.add_subcommand("diffuse", "run a single diffusion and dump the "
                                    "trajectory and final embedding");
  cmd_diffuse->add_option("--graph", diffuse.graph_file, "edge-list file")
      ->required();
  cmd_diffuse->add_option("--features", diffuse.features_file, "features CSV")
      ->required();
  cmd_diffuse->add_option("--flow", diffuse.flow,
                          "heat|attention_heat|mean_curvature|beltrami|"
                          "p_laplacian");
  cmd_diffuse->add_option("--solver", diffuse.solver,
                          "explicit_euler|rk4|adams_bashforth2|implicit_adams|"
                          "dopri5");
  cmd_diffuse->add_option("--step", diffuse.step, "fixed step size");
  cmd_diffuse->add_option("--rtol", diffuse.rtol, "adaptive relative tolerance");
  cmd_diffuse->add_option("--atol", diffuse.atol, "adaptive absolute tolerance");
  cmd_diffuse->add_option("--t-end", diffuse.t_end, "integration horizon");
  cmd_diffuse->add_option("--max-fp-iters", diffuse.max_fp_iters,
                          "fixed-point cap for the implicit method");
  cmd_diffuse->add_option("--diffusivity", diffuse.diffusivity,
                          "heat diffusivity constant");
  cmd_diffuse->add_option("--p-exponent", diffuse.p_exponent,
                          "p for the p-Laplacian flow");
  cmd_diffuse->add_option("--delta", diffuse.delta, "gradient-norm floor");
  cmd_diffuse->add_flag("--time-dependent-attention", diffuse.time_dependent,
                        "recompute coefficients at every evaluation");
  cmd_diffuse->add_option("--heads", diffuse.heads, "attention heads");
  cmd_diffuse->add_option("--key-dim", diffuse.key_dim, "attention key dim");
  cmd_diffuse->add_option("--params-seed", diffuse.params_seed,
                          "attention parameter seed");
  cmd_diffuse->add_flag("--no-normalize", diffuse.no_normalize,
                        "skip spectral normalization");
  cmd_diffuse->add_option("--out", diffuse.out_dir, "output directory")
      ->required();

  std::string st_graph, st_sweep, st_out;
  auto* cmd_stability = app.add_subcommand(
      "stability", "perturbation sweep, Lyapunov spectra and the "
                   "time-variant consistency check");
  cmd_stability->add_option("--graph", st_graph, "edge-list file")->required();
  cmd_stability->add_option("--sweep", st_sweep, "sweep config JSON")
      ->required();
  cmd_stability->add_option("--out", st_out, "output directory")->required();

  std::string at_graph, at_features, at_spec, at_out;
  auto* cmd_attack = app.add_subcommand(
      "attack", "emit a perturbed graph/features pair in the standard formats");
  cmd_attack->add_option("--graph", at_graph, "edge-list file")->required();
  cmd_attack->add_option("--features", at_features, "features CSV")->required();
  cmd_attack->add_option("--spec", at_spec, "attack spec JSON")->required();
  cmd_attack->add_option("--out", at_out, "output directory")->required();

  std::string be_config, be_out;
  auto* cmd_bench = app.add_subcommand(
      "bench", "full robustness experiment from a config file");
  cmd_bench->add_option("--config", be_config, "experiment config JSON")
      ->required();
  cmd_bench->add_option("--out", be_out, "output directory")->required();

  std::string ex_graph, ex_features, ex_out;
  std::uint64_t ex_seed = 0;
  int ex_heads = 1, ex_key_dim = 8;
  bool ex_no_normalize = false;
  auto* cmd_export = app.add_subcommand(
      "export-attention", "write attention edge weights as DOT or JSON");
  cmd_export->add_option("--graph", ex_graph, "edge-list file")->required();
  cmd_export->add_option("--features", ex_features, "features CSV")->required();
  cmd_export->add_option("--params-seed", ex_seed, "attention parameter seed");
  cmd_export->add_option("--heads", ex_heads, "attention heads");
  cmd_export->add_option("--key-dim", ex_key_dim, "attention key dim");
  cmd_export->add_flag("--no-normalize", ex_no_normalize,
                       "skip spectral normalization");
  cmd_export->add_option("--out", ex_out, "output file (.dot or .json)")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (cmd_diffuse->parsed()) return run_diffuse(diffuse);
    if (cmd_stability->parsed()) {
      return run_stability(st_graph, st_sweep, st_out, seed_override);
    }
    if (cmd_attack->parsed()) {
      return run_attack(at_graph, at_features, at_spec, at_out, seed_override);
    }
    if (cmd_bench->parsed()) {
      return run_bench(be_config, be_out, seed_override, std::max(jobs, 1));
    }
    if (cmd_export->parsed()) {
      return run_export_attention(ex_graph, ex_features, ex_seed, ex_heads,
                                  ex_key_dim, ex_no_normalize, ex_out);
    }
  } catch (const gf::Error& e) {
    report_error(e.code(), e.what());
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    report_error(gf::errc::config_error, e.what());
    return 3;
  }
  return 0;
}
