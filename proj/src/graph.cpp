#include "graphflow/graph.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <vector>

namespace graphflow {

double Graph::mean_weight() const {
  if (edges_.empty()) return 1.0;
  double total = 0.0;
  for (const auto& e : edges_) total += e.w;
  return total / static_cast<double>(edges_.size());
}

bool Graph::has_edge(int u, int v) const {
  if (u == v) return false;
  for (const auto& inc : incident(u)) {
    if (inc.neighbor == v) return true;
  }
  return false;
}

bool Graph::connected() const {
  if (n_ == 0) return true;
  std::vector<char> seen(n_, 0);
  std::vector<int> stack = {0};
  seen[0] = 1;
  int count = 1;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (const auto& inc : incident(v)) {
      if (!seen[inc.neighbor]) {
        seen[inc.neighbor] = 1;
        ++count;
        stack.push_back(inc.neighbor);
      }
    }
  }
  return count == n_;
}

Graph build_graph(int n, const std::vector<WeightedEdge>& edges) {
  if (n < 0) fail(errc::index_out_of_range, "negative node count");
  Graph g;
  g.n_ = n;
  g.edges_.reserve(edges.size());

  std::set<std::pair<int, int>> seen;
  for (const auto& e : edges) {
    if (e.u < 0 || e.u >= n || e.v < 0 || e.v >= n) {
      fail(errc::index_out_of_range,
           "edge (" + std::to_string(e.u) + "," + std::to_string(e.v) +
               ") outside [0," + std::to_string(n) + ")");
    }
    if (e.u == e.v) {
      fail(errc::self_loop, "self-loop at node " + std::to_string(e.u));
    }
    if (!(e.w > 0.0) || !std::isfinite(e.w)) {
      fail(errc::non_positive_weight,
           "edge (" + std::to_string(e.u) + "," + std::to_string(e.v) +
               ") has weight " + std::to_string(e.w));
    }
    WeightedEdge canon{std::min(e.u, e.v), std::max(e.u, e.v), e.w};
    if (!seen.insert({canon.u, canon.v}).second) {
      fail(errc::duplicate_edge, "duplicate pair (" + std::to_string(canon.u) +
                                     "," + std::to_string(canon.v) + ")");
    }
    g.edges_.push_back(canon);
  }
  std::sort(g.edges_.begin(), g.edges_.end(),
            [](const WeightedEdge& a, const WeightedEdge& b) {
              return std::tie(a.u, a.v) < std::tie(b.u, b.v);
            });

  g.degree_ = Eigen::VectorXd::Zero(n);
  std::vector<int> counts(n + 1, 0);
  for (const auto& e : g.edges_) {
    g.degree_(e.u) += e.w;
    g.degree_(e.v) += e.w;
    ++counts[e.u];
    ++counts[e.v];
  }

  g.incidence_offsets_.assign(n + 1, 0);
  for (int v = 0; v < n; ++v) {
    g.incidence_offsets_[v + 1] = g.incidence_offsets_[v] + counts[v];
  }
  g.incidence_.resize(g.incidence_offsets_[n]);
  std::vector<int> cursor(g.incidence_offsets_.begin(),
                          g.incidence_offsets_.end() - 1);
  for (int e = 0; e < g.edge_count(); ++e) {
    const auto& edge = g.edges_[e];
    g.incidence_[cursor[edge.u]++] = Incidence{edge.v, e, true};
    g.incidence_[cursor[edge.v]++] = Incidence{edge.u, e, false};
  }

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(2 * g.edges_.size());
  for (const auto& e : g.edges_) {
    triplets.emplace_back(e.u, e.v, e.w);
    triplets.emplace_back(e.v, e.u, e.w);
  }
  g.adjacency_.resize(n, n);
  g.adjacency_.setFromTriplets(triplets.begin(), triplets.end());
  return g;
}

Graph build_graph(const std::vector<WeightedEdge>& edges) {
  int n = 0;
  for (const auto& e : edges) n = std::max({n, e.u + 1, e.v + 1});
  return build_graph(n, edges);
}

SparseMat normalized_laplacian(const Graph& g) {
  const int n = g.node_count();
  const auto& h = g.degrees();
  for (int v = 0; v < n; ++v) {
    if (!(h(v) > 0.0)) {
      fail(errc::zero_degree_node,
           "node " + std::to_string(v) + " has zero degree");
    }
  }
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(2 * g.edges().size() + n);
  for (int v = 0; v < n; ++v) triplets.emplace_back(v, v, 1.0);
  for (const auto& e : g.edges()) {
    const double off = -e.w / std::sqrt(h(e.u) * h(e.v));
    triplets.emplace_back(e.u, e.v, off);
    triplets.emplace_back(e.v, e.u, off);
  }
  SparseMat lap(n, n);
  lap.setFromTriplets(triplets.begin(), triplets.end());
  return lap;
}

Eigen::MatrixXd normalized_laplacian_dense(const Graph& g) {
  if (g.node_count() > kDenseLimit) {
    fail(errc::non_symmetric_too_large,
         "dense Laplacian requested for n = " +
             std::to_string(g.node_count()) + " > " +
             std::to_string(kDenseLimit));
  }
  return Eigen::MatrixXd(normalized_laplacian(g));
}

}  // namespace graphflow
