#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "graphflow/calculus.hpp"
#include "graphflow/io.hpp"
#include "graphflow/pipeline.hpp"
#include "graphflow/solvers.hpp"
#include "graphflow/stability.hpp"

namespace py = pybind11;
namespace gf = graphflow;

namespace {

gf::Graph graph_from_triples(
    int n, const std::vector<std::tuple<int, int, double>>& edges) {
  std::vector<gf::WeightedEdge> list;
  list.reserve(edges.size());
  for (const auto& [u, v, w] : edges) list.push_back({u, v, w});
  return gf::build_graph(n, list);
}

std::vector<std::tuple<int, int, double>> graph_edges(const gf::Graph& g) {
  std::vector<std::tuple<int, int, double>> out;
  out.reserve(g.edges().size());
  for (const auto& e : g.edges()) out.emplace_back(e.u, e.v, e.w);
  return out;
}

gf::FlowSpec flow_spec_from_kwargs(const std::string& kind, double diffusivity,
                                   double p, double delta,
                                   bool time_dependent) {
  gf::FlowSpec spec;
  spec.kind = gf::parse_flow_kind(kind);
  spec.diffusivity = diffusivity;
  spec.p = p;
  spec.delta = delta;
  spec.time_dependent_attention = time_dependent;
  spec.validate();
  return spec;
}

gf::SolverSpec solver_spec_from_kwargs(const std::string& method, double step,
                                       double rtol, double atol, double t_end,
                                       int max_fp_iters) {
  gf::SolverSpec spec;
  spec.method = gf::parse_solver_method(method);
  spec.step = step;
  spec.rtol = rtol;
  spec.atol = atol;
  spec.t_end = t_end;
  spec.max_fp_iters = max_fp_iters;
  spec.validate();
  return spec;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Graph diffusion flows, ODE solvers and robustness tooling";

  py::register_exception<gf::Error>(m, "GraphflowError");

  py::class_<gf::Graph>(m, "Graph")
      .def(py::init(&graph_from_triples), py::arg("n"), py::arg("edges"))
      .def_property_readonly("n", &gf::Graph::node_count)
      .def_property_readonly("m", &gf::Graph::edge_count)
      .def("edges", &graph_edges)
      .def("degrees", [](const gf::Graph& g) { return g.degrees(); })
      .def("adjacency",
           [](const gf::Graph& g) { return Eigen::MatrixXd(g.adjacency()); })
      .def("connected", &gf::Graph::connected)
      .def("__repr__", [](const gf::Graph& g) {
        return "Graph(n=" + std::to_string(g.node_count()) +
               ", m=" + std::to_string(g.edge_count()) + ")";
      });

  m.def("build_graph", &graph_from_triples, py::arg("n"), py::arg("edges"));
  m.def("read_edge_list",
        [](const std::string& path) { return gf::read_edge_list(path); });
  m.def("write_edge_list", [](const std::string& path, const gf::Graph& g) {
    gf::write_edge_list(path, g);
  });
  m.def("read_csv_matrix",
        [](const std::string& path) { return gf::read_csv_matrix(path); });

  m.def(
      "normalized_laplacian",
      [](const gf::Graph& g) { return gf::normalized_laplacian_dense(g); },
      "dense normalized Laplacian D^{-1/2}(D-W)D^{-1/2}");

  m.def("gradient", [](const gf::Graph& g, const Eigen::MatrixXd& f) {
    return gf::gradient(g, f).values;
  });
  m.def("divergence", [](const gf::Graph& g, const Eigen::MatrixXd& values) {
    gf::EdgeField psi;
    psi.values = values;
    return gf::divergence(g, psi);
  });
  m.def("laplacian_apply", &gf::laplacian_apply);
  m.def(
      "gradient_norm",
      [](const gf::Graph& g, const Eigen::MatrixXd& f, double delta) {
        return gf::gradient_norm(g, f, delta);
      },
      py::arg("g"), py::arg("f"), py::arg("delta") = 1e-6);
  m.def("p_laplacian_apply", &gf::p_laplacian_apply, py::arg("g"),
        py::arg("f"), py::arg("p"), py::arg("delta") = 1e-6);

  py::class_<gf::AttentionParams>(m, "AttentionParams")
      .def_readonly("heads", &gf::AttentionParams::heads)
      .def_readonly("key_dim", &gf::AttentionParams::key_dim)
      .def_readonly("feature_dim", &gf::AttentionParams::feature_dim)
      .def_readonly("normalize", &gf::AttentionParams::normalize)
      .def_readonly("key", &gf::AttentionParams::key)
      .def_readonly("query", &gf::AttentionParams::query);

  m.def("make_attention_params", &gf::make_attention_params,
        py::arg("feature_dim"), py::arg("key_dim") = 8, py::arg("heads") = 1,
        py::arg("normalize") = true, py::arg("seed") = 0);
  m.def("spectral_normalize", &gf::spectral_normalize, py::arg("m"),
        py::arg("iters") = 200, py::arg("tol") = 1e-9);
  m.def("attention_weights",
        [](const gf::Graph& g, const Eigen::MatrixXd& z,
           const gf::AttentionParams& params) {
          return Eigen::MatrixXd(gf::attention_weights(g, z, params));
        });
  m.def("flow_matrix",
        [](const gf::Graph& g, const Eigen::MatrixXd& z,
           const gf::AttentionParams& params, const std::string& kind,
           double delta) {
          return Eigen::MatrixXd(
              gf::flow_matrix(g, z, params, gf::parse_flow_kind(kind), delta));
        },
        py::arg("g"), py::arg("z"), py::arg("params"), py::arg("kind"),
        py::arg("delta") = 1e-6);

  m.def(
      "integrate",
      [](const gf::Graph& g, const Eigen::MatrixXd& z0,
         const std::string& flow, const std::string& method, double step,
         double rtol, double atol, double t_end, int max_fp_iters,
         double diffusivity, double p, double delta, bool time_dependent,
         int heads, int key_dim, bool normalize, std::uint64_t params_seed) {
        const gf::FlowSpec spec = flow_spec_from_kwargs(
            flow, diffusivity, p, delta, time_dependent);
        std::optional<gf::AttentionParams> params;
        if (spec.kind != gf::FlowKind::heat &&
            spec.kind != gf::FlowKind::p_laplacian) {
          params = gf::make_attention_params(static_cast<int>(z0.cols()),
                                             key_dim, heads, normalize,
                                             params_seed);
        }
        gf::FlowOperator op = gf::build_rhs(g, spec, std::move(params));
        return gf::integrate(op, z0,
                             solver_spec_from_kwargs(method, step, rtol, atol,
                                                     t_end, max_fp_iters));
      },
      py::arg("g"), py::arg("z0"), py::arg("flow") = "heat",
      py::arg("method") = "dopri5", py::arg("step") = 0.1,
      py::arg("rtol") = 1e-6, py::arg("atol") = 1e-9, py::arg("t_end") = 1.0,
      py::arg("max_fp_iters") = 100, py::arg("diffusivity") = 1.0,
      py::arg("p") = 2.0, py::arg("delta") = 1e-6,
      py::arg("time_dependent_attention") = false, py::arg("heads") = 1,
      py::arg("key_dim") = 8, py::arg("normalize") = true,
      py::arg("params_seed") = 0);

  m.def("linear_exact",
        [](const Eigen::MatrixXd& l, const Eigen::MatrixXd& z0, double t) {
          return gf::linear_exact(l, z0, t);
        });
  m.def("expm", &gf::expm);

  m.def(
      "perturb_adjacency",
      [](const gf::Graph& g, double eps, const std::string& mode,
         std::uint64_t seed, const std::string& norm) {
        return gf::perturb_adjacency(g, eps, gf::parse_perturb_mode(mode),
                                     seed, gf::parse_matrix_norm(norm));
      },
      py::arg("g"), py::arg("epsilon"), py::arg("mode") = "mixed",
      py::arg("seed") = 0, py::arg("norm") = "op2");
  m.def("semigroup_gap", &gf::semigroup_gap);
  m.def(
      "stability_slope",
      [](const gf::Graph& g, const std::vector<double>& epsilons, int trials,
         std::uint64_t seed, double t, const std::string& norm,
         const std::string& mode) {
        gf::PerturbationSweep sweep;
        sweep.epsilons = epsilons;
        sweep.trials = trials;
        sweep.seed = seed;
        sweep.norm = gf::parse_matrix_norm(norm);
        sweep.mode = gf::parse_perturb_mode(mode);
        const auto report = gf::stability_slope(g, sweep, t);
        py::dict out;
        out["slope"] = report.slope;
        out["intercept"] = report.intercept;
        out["r_squared"] = report.r_squared;
        out["rho_hat"] = report.rho_hat;
        out["gap_mean"] = report.gap_mean;
        out["gap_sigma"] = report.gap_sigma;
        return out;
      },
      py::arg("g"), py::arg("epsilons"), py::arg("trials") = 10,
      py::arg("seed") = 0, py::arg("t") = 1.0, py::arg("norm") = "op2",
      py::arg("mode") = "mixed");
  m.def(
      "lyapunov_check",
      [](const gf::Graph& g, const Eigen::MatrixXd& z,
         const gf::AttentionParams& params, const std::string& kind) {
        const auto record =
            gf::lyapunov_check(g, z, params, gf::parse_flow_kind(kind));
        py::dict out;
        out["max_real_part"] = record.max_real_part;
        out["stable"] = record.stable;
        return out;
      });

  m.def(
      "generate_sbm",
      [](int blocks, const std::vector<int>& sizes, double p_in, double p_out,
         int feature_dim, double separation, double noise_sigma,
         std::uint64_t seed) {
        gf::SbmSpec spec;
        spec.blocks = blocks;
        spec.sizes = sizes;
        spec.p_in = p_in;
        spec.p_out = p_out;
        spec.feature_dim = feature_dim;
        spec.separation = separation;
        spec.noise_sigma = noise_sigma;
        spec.seed = seed;
        auto data = gf::generate_sbm(spec);
        return py::make_tuple(data.graph, data.features, data.labels);
      },
      py::arg("blocks") = 2, py::arg("sizes") = std::vector<int>{150, 150},
      py::arg("p_in") = 0.08, py::arg("p_out") = 0.005,
      py::arg("feature_dim") = 16, py::arg("separation") = 1.0,
      py::arg("noise_sigma") = 0.5, py::arg("seed") = 0);

  m.def(
      "degree_split",
      [](const gf::Graph& g, const std::array<double, 3>& fractions,
         std::uint64_t seed) {
        const auto split = gf::degree_split(g, fractions, seed);
        py::dict out;
        out["easy"] = split.easy;
        out["medium"] = split.medium;
        out["hard"] = split.hard;
        out["full"] = split.full;
        out["train"] = split.train;
        out["val"] = split.val;
        return out;
      },
      py::arg("g"), py::arg("fractions") = std::array<double, 3>{0.1, 0.1, 0.1},
      py::arg("seed") = 0);

  m.def(
      "flip_edges",
      [](const gf::Graph& g, int budget_edges, std::uint64_t seed) {
        gf::AttackSpec spec;
        spec.kind = gf::AttackKind::edge_flip;
        spec.budget_edges = budget_edges;
        spec.seed = seed;
        return gf::flip_edges(g, spec);
      },
      py::arg("g"), py::arg("budget_edges"), py::arg("seed") = 0);
  m.def(
      "inject_nodes",
      [](const gf::Graph& g, const Eigen::MatrixXd& z, int budget_nodes,
         int budget_edges, const std::string& policy, std::uint64_t seed) {
        gf::AttackSpec spec;
        spec.kind = gf::AttackKind::injection;
        spec.budget_nodes = budget_nodes;
        spec.budget_edges = budget_edges;
        spec.target_policy = gf::parse_target_policy(policy);
        spec.seed = seed;
        auto [pg, pz] = gf::inject_nodes(g, z, spec);
        return py::make_tuple(pg, pz);
      },
      py::arg("g"), py::arg("z"), py::arg("budget_nodes"),
      py::arg("budget_edges"), py::arg("policy") = "lowest_degree",
      py::arg("seed") = 0);
  m.def(
      "perturb_features",
      [](const Eigen::MatrixXd& z, double eps, const std::vector<int>& subset,
         std::uint64_t seed) {
        gf::AttackSpec spec;
        spec.kind = gf::AttackKind::feature_noise;
        spec.epsilon_feat = eps;
        spec.seed = seed;
        return gf::perturb_features(z, spec, subset);
      },
      py::arg("z"), py::arg("epsilon"), py::arg("subset"), py::arg("seed") = 0);

  m.def("train_readout", &gf::train_readout, py::arg("embeddings"),
        py::arg("labels"), py::arg("train_idx"), py::arg("ridge_lambda"));
  m.def("predict", &gf::predict);

  m.def(
      "run_experiment",
      [](const std::string& config_json, int jobs) {
        const auto config =
            gf::ExperimentConfig::from_json(nlohmann::json::parse(config_json));
        const auto result = gf::run_robustness_experiment(config, jobs);
        return result.to_json_string();
      },
      py::arg("config_json"), py::arg("jobs") = 1,
      "run the robustness experiment; returns the canonical report JSON");
}
