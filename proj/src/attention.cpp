#include "graphflow/attention.hpp"

#include <cmath>
#include <fstream>
#include <string>

#include "graphflow/linalg.hpp"
#include "graphflow/rng.hpp"
#include "json.hpp"

namespace graphflow {

Eigen::MatrixXd spectral_normalize(const Eigen::MatrixXd& m, int iters,
                                   double tol) {
  if (m.size() == 0 || m.norm() == 0.0) {
    fail(errc::zero_matrix, "spectral_normalize: zero matrix");
  }
  return m / sigma_max_power(m, iters, tol);
}

AttentionParams make_attention_params(int feature_dim, int key_dim, int heads,
                                      bool normalize, std::uint64_t seed) {
  if (feature_dim <= 0 || key_dim <= 0 || heads <= 0) {
    fail(errc::config_error, "attention params need positive dimensions");
  }
  AttentionParams params;
  params.heads = heads;
  params.key_dim = key_dim;
  params.feature_dim = feature_dim;
  params.normalize = normalize;
  const double bound = 1.0 / std::sqrt(static_cast<double>(feature_dim));
  for (int h = 0; h < heads; ++h) {
    auto rng = make_rng(mix_seed(seed, static_cast<std::uint64_t>(h)));
    std::uniform_real_distribution<double> uni(-bound, bound);
    Eigen::MatrixXd k(key_dim, feature_dim), q(key_dim, feature_dim);
    for (int i = 0; i < key_dim; ++i)
      for (int j = 0; j < feature_dim; ++j) k(i, j) = uni(rng);
    for (int i = 0; i < key_dim; ++i)
      for (int j = 0; j < feature_dim; ++j) q(i, j) = uni(rng);
    if (normalize) {
      k = spectral_normalize(k);
      q = spectral_normalize(q);
    }
    params.key.push_back(std::move(k));
    params.query.push_back(std::move(q));
  }
  return params;
}

void softmax_inplace(Eigen::VectorXd& logits) {
  if (logits.size() == 0) return;
  const double top = logits.maxCoeff();
  logits = (logits.array() - top).exp();
  logits /= logits.sum();
}

AttentionMatrix attention_weights(const Graph& g, const NodeField& z,
                                  const AttentionParams& params) {
  const int n = g.node_count();
  if (z.rows() != n || z.cols() != params.feature_dim) {
    fail(errc::dimension_mismatch,
         "attention_weights: features are " + std::to_string(z.rows()) + "x" +
             std::to_string(z.cols()) + ", params expect dim " +
             std::to_string(params.feature_dim));
  }
  for (int v = 0; v < n; ++v) {
    if (g.incident(v).empty()) {
      fail(errc::zero_degree_node,
           "attention_weights: node " + std::to_string(v) + " is isolated");
    }
  }

  const double scale = 1.0 / std::sqrt(static_cast<double>(params.key_dim));
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(2 * g.edge_count()));

  std::vector<Eigen::VectorXd> rows(static_cast<std::size_t>(n));
  for (int u = 0; u < n; ++u) {
    rows[u] = Eigen::VectorXd::Zero(static_cast<int>(g.incident(u).size()));
  }

  for (int h = 0; h < params.heads; ++h) {
    const Eigen::MatrixXd keyed = z * params.key[h].transpose();     // n x d_K
    const Eigen::MatrixXd queried = z * params.query[h].transpose(); // n x d_K
    for (int u = 0; u < n; ++u) {
      const auto incident = g.incident(u);
      Eigen::VectorXd logits(static_cast<int>(incident.size()));
      for (int i = 0; i < logits.size(); ++i) {
        logits(i) =
            scale * keyed.row(u).dot(queried.row(incident[i].neighbor));
      }
      softmax_inplace(logits);
      rows[u] += logits;
    }
  }

  const double head_scale = 1.0 / static_cast<double>(params.heads);
  for (int u = 0; u < n; ++u) {
    const auto incident = g.incident(u);
    for (int i = 0; i < static_cast<int>(incident.size()); ++i) {
      triplets.emplace_back(u, incident[i].neighbor,
                            head_scale * rows[u](i));
    }
  }
  AttentionMatrix a(n, n);
  a.setFromTriplets(triplets.begin(), triplets.end());
  return a;
}

void write_attention_dot(const std::filesystem::path& path, const Graph& g,
                         const AttentionMatrix& a) {
  std::ofstream out(path);
  if (!out) fail(errc::io_error, "cannot write " + path.string());
  out << "digraph attention {\n";
  for (int u = 0; u < g.node_count(); ++u) {
    for (AttentionMatrix::InnerIterator it(a, u); it; ++it) {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%.6f", it.value());
      out << "  " << u << " -> " << it.col() << " [weight=" << buf
          << ", label=\"" << buf << "\"];\n";
    }
  }
  out << "}\n";
}

void write_attention_json(const std::filesystem::path& path, const Graph& g,
                          const AttentionMatrix& a) {
  nlohmann::ordered_json doc;
  doc["n"] = g.node_count();
  auto& edges = doc["edges"] = nlohmann::ordered_json::array();
  for (int u = 0; u < g.node_count(); ++u) {
    for (AttentionMatrix::InnerIterator it(a, u); it; ++it) {
      edges.push_back({{"u", u},
                       {"v", static_cast<int>(it.col())},
                       {"w", it.value()}});
    }
  }
  std::ofstream out(path);
  if (!out) fail(errc::io_error, "cannot write " + path.string());
  out << doc.dump(2) << "\n";
}

}  // namespace graphflow
