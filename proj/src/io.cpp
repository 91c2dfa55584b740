#include "graphflow/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace graphflow {

namespace {

std::string strip_comment(const std::string& line) {
  const auto pos = line.find('#');
  return pos == std::string::npos ? line : line.substr(0, pos);
}

bool parse_double(const std::string& token, double& out) {
  try {
    std::size_t used = 0;
    out = std::stod(token, &used);
    return used == token.size();
  } catch (const std::exception&) {
    return false;
  }
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) {
    // trim surrounding whitespace
    const auto begin = field.find_first_not_of(" \t\r");
    const auto end = field.find_last_not_of(" \t\r");
    fields.push_back(begin == std::string::npos
                         ? std::string()
                         : field.substr(begin, end - begin + 1));
  }
  return fields;
}

}  // namespace

Graph read_edge_list(const std::filesystem::path& path, int n_hint) {
  std::ifstream in(path);
  if (!in) fail(errc::io_error, "cannot open " + path.string());
  std::vector<WeightedEdge> edges;
  std::string line;
  int line_no = 0;
  int n = n_hint;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream tokens(strip_comment(line));
    long u, v;
    if (!(tokens >> u)) continue;  // blank or comment-only line
    if (!(tokens >> v)) {
      fail(errc::io_error, path.string() + ":" + std::to_string(line_no) +
                               ": expected 'u v [w]'");
    }
    double w = 1.0;
    tokens >> w;
    edges.push_back({static_cast<int>(u), static_cast<int>(v), w});
    n = std::max({n, static_cast<int>(u) + 1, static_cast<int>(v) + 1});
  }
  return build_graph(n, edges);
}

void write_edge_list(const std::filesystem::path& path, const Graph& g) {
  std::ofstream out(path);
  if (!out) fail(errc::io_error, "cannot write " + path.string());
  out << "# " << g.node_count() << " nodes, " << g.edge_count() << " edges\n";
  char buf[32];
  for (const auto& e : g.edges()) {
    std::snprintf(buf, sizeof(buf), "%.17g", e.w);
    out << e.u << " " << e.v << " " << buf << "\n";
  }
}

Eigen::MatrixXd read_csv_matrix(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(errc::io_error, "cannot open " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) {
      continue;
    }
    const auto fields = split_csv(line);
    std::vector<double> row(fields.size());
    bool numeric = true;
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (!parse_double(fields[i], row[i])) {
        numeric = false;
        break;
      }
    }
    if (!numeric) {
      if (first) {
        first = false;
        continue;  // header row
      }
      fail(errc::io_error, path.string() + ": non-numeric row");
    }
    first = false;
    if (!rows.empty() && rows.front().size() != row.size()) {
      fail(errc::io_error, path.string() + ": ragged rows");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) return Eigen::MatrixXd(0, 0);
  Eigen::MatrixXd m(static_cast<int>(rows.size()),
                    static_cast<int>(rows.front().size()));
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
  return m;
}

void write_csv_matrix(const std::filesystem::path& path,
                      const Eigen::MatrixXd& m,
                      const std::vector<std::string>& header) {
  std::ofstream out(path);
  if (!out) fail(errc::io_error, "cannot write " + path.string());
  if (!header.empty()) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      out << (i ? "," : "") << header[i];
    }
    out << "\n";
  }
  char buf[32];
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", m(i, j));
      out << (j ? "," : "") << buf;
    }
    out << "\n";
  }
}

std::vector<int> read_labels_csv(const std::filesystem::path& path) {
  const Eigen::MatrixXd m = read_csv_matrix(path);
  if (m.size() > 0 && m.cols() != 1) {
    fail(errc::io_error, path.string() + ": labels must be a single column");
  }
  std::vector<int> labels(static_cast<std::size_t>(m.rows()));
  for (int i = 0; i < m.rows(); ++i) {
    labels[static_cast<std::size_t>(i)] = static_cast<int>(m(i, 0));
  }
  return labels;
}

void write_labels_csv(const std::filesystem::path& path,
                      const std::vector<int>& labels) {
  std::ofstream out(path);
  if (!out) fail(errc::io_error, "cannot write " + path.string());
  for (int label : labels) out << label << "\n";
}

}  // namespace graphflow
