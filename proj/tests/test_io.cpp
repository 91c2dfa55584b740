#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "graphflow/io.hpp"
#include "test_util.hpp"

using namespace graphflow;
namespace fs = std::filesystem;
namespace gt = graphflow::testing;

namespace {

fs::path temp_file(const char* name) {
  return fs::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("io: edge list parsing with comments and default weights") {
  const auto path = temp_file("gf_io_edges.txt");
  {
    std::ofstream out(path);
    out << "# a comment line\n";
    out << "0 1 2.5\n";
    out << "1 2   # trailing comment, default weight\n";
    out << "\n";
    out << "0 3\n";
  }
  const Graph g = read_edge_list(path);
  CHECK(g.node_count() == 4);
  CHECK(g.edge_count() == 3);
  CHECK(g.degree(0) == doctest::Approx(3.5));
  CHECK(g.degree(2) == doctest::Approx(1.0));
  fs::remove(path);
}

TEST_CASE("io: edge list round trip") {
  const Graph g = gt::random_connected_graph(25, 0.15, 3, /*weighted=*/true);
  const auto path = temp_file("gf_io_roundtrip.txt");
  write_edge_list(path, g);
  const Graph back = read_edge_list(path);
  CHECK(back.node_count() == g.node_count());
  CHECK(back.edge_count() == g.edge_count());
  CHECK((Eigen::MatrixXd(back.adjacency()) - Eigen::MatrixXd(g.adjacency()))
            .cwiseAbs()
            .maxCoeff() == 0.0);
  fs::remove(path);
}

TEST_CASE("io: csv matrix with and without header") {
  const auto path = temp_file("gf_io_features.csv");
  {
    std::ofstream out(path);
    out << "f0,f1\n";
    out << "1.5,-2\n";
    out << "0,3.25\n";
  }
  const Eigen::MatrixXd with_header = read_csv_matrix(path);
  CHECK(with_header.rows() == 2);
  CHECK(with_header.cols() == 2);
  CHECK(with_header(0, 0) == 1.5);
  CHECK(with_header(1, 1) == 3.25);

  {
    std::ofstream out(path);
    out << "1.5,-2\n0,3.25\n";
  }
  const Eigen::MatrixXd without_header = read_csv_matrix(path);
  CHECK(without_header.isApprox(with_header));
  fs::remove(path);
}

TEST_CASE("io: csv round trip keeps full precision") {
  const Eigen::MatrixXd m = gt::random_field(7, 3, 9);
  const auto path = temp_file("gf_io_precision.csv");
  write_csv_matrix(path, m, {"a", "b", "c"});
  const Eigen::MatrixXd back = read_csv_matrix(path);
  CHECK((back - m).cwiseAbs().maxCoeff() == 0.0);
  fs::remove(path);
}

TEST_CASE("io: labels round trip") {
  const std::vector<int> labels = {0, 1, 1, 0, 2};
  const auto path = temp_file("gf_io_labels.csv");
  write_labels_csv(path, labels);
  CHECK(read_labels_csv(path) == labels);
  fs::remove(path);
}

TEST_CASE("io: missing files raise io errors") {
  CHECK_THROWS_AS(read_edge_list("/nonexistent/gf.edges"), Error);
  try {
    read_csv_matrix("/nonexistent/gf.csv");
  } catch (const Error& e) {
    CHECK(e.code() == errc::io_error);
  }
}

TEST_CASE("io: ragged csv is rejected") {
  const auto path = temp_file("gf_io_ragged.csv");
  {
    std::ofstream out(path);
    out << "1,2\n3\n";
  }
  CHECK_THROWS_AS(read_csv_matrix(path), Error);
  fs::remove(path);
}
