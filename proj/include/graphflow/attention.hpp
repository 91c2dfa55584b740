#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "graphflow/graph.hpp"

namespace graphflow {

/// Sparse row-stochastic matrix supported on the adjacency: every row sums
/// to 1 and entries are nonnegative.
using AttentionMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Frozen key/query parameters, one pair per head. When normalize is set the
/// stored matrices have largest singular value 1 (within power-iteration
/// accuracy).
struct AttentionParams {
  std::vector<Eigen::MatrixXd> key;    // key_dim x feature_dim, per head
  std::vector<Eigen::MatrixXd> query;  // key_dim x feature_dim, per head
  int heads = 1;
  int key_dim = 8;
  int feature_dim = 0;
  bool normalize = true;
};

/// M / sigma_max(M), sigma estimated by power iteration on M^T M.
Eigen::MatrixXd spectral_normalize(const Eigen::MatrixXd& m, int iters = 200,
                                   double tol = 1e-9);

/// Seeded initialization: entries i.i.d. uniform on [-1/sqrt(d), 1/sqrt(d)],
/// then optional spectral normalization per matrix.
AttentionParams make_attention_params(int feature_dim, int key_dim, int heads,
                                      bool normalize, std::uint64_t seed);

/// Scaled-dot-product weights: per head, logit(u,v) = <K z_u, Q z_v>/sqrt(d_K)
/// for each neighbor v of u, softmax over u's neighborhood, heads averaged.
AttentionMatrix attention_weights(const Graph& g, const NodeField& z,
                                  const AttentionParams& params);

/// Numerically shifted softmax over the coefficients of a vector, in place.
void softmax_inplace(Eigen::VectorXd& logits);

void write_attention_dot(const std::filesystem::path& path, const Graph& g,
                         const AttentionMatrix& a);
void write_attention_json(const std::filesystem::path& path, const Graph& g,
                          const AttentionMatrix& a);

}  // namespace graphflow
