#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "graphflow/graph.hpp"

namespace graphflow {

/// Edge-list text format: one "u v w" per line, whitespace separated, w
/// optional (default 1.0), '#' starts a comment. Node count is inferred as
/// max index + 1 unless n_hint exceeds it.
Graph read_edge_list(const std::filesystem::path& path, int n_hint = 0);
void write_edge_list(const std::filesystem::path& path, const Graph& g);

/// CSV of reals, row i = node i; a leading header row is detected and
/// skipped.
Eigen::MatrixXd read_csv_matrix(const std::filesystem::path& path);
void write_csv_matrix(const std::filesystem::path& path,
                      const Eigen::MatrixXd& m,
                      const std::vector<std::string>& header = {});

/// Single-column CSV of integer labels (header optional).
std::vector<int> read_labels_csv(const std::filesystem::path& path);
void write_labels_csv(const std::filesystem::path& path,
                      const std::vector<int>& labels);

}  // namespace graphflow
