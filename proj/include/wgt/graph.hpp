#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <numeric>
#include <ostream>
#include <queue>
#include <sstream>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "error.hpp"
#include "weights.hpp"

namespace wgt {

using Edge = std::pair<int, int>;

/// Undirected simple graph on nodes 0..n-1.
///
/// Adjacency lists are kept sorted; a hashed edge set answers membership in
/// O(1) for the edge-swap and matrix-assembly paths.
class Graph {
 public:
  Graph() = default;
  explicit Graph(int n) : adj_(static_cast<std::size_t>(n)) {
    if (n < 0) fail(ErrorCode::BadDimensions, "negative node count");
  }

  /// Strict construction: self-loops, duplicates and out-of-range ids throw.
  static Graph from_edges(int n, const std::vector<Edge>& edges) {
    Graph g(n);
    for (auto [u, v] : edges) {
      if (!g.add_edge(u, v)) {
        fail(ErrorCode::BadDimensions,
             "duplicate edge " + std::to_string(u + 1) + "-" + std::to_string(v + 1));
      }
    }
    return g;
  }

  int size() const noexcept { return static_cast<int>(adj_.size()); }
  std::size_t edge_count() const noexcept { return edges_.size(); }

  bool has_edge(int u, int v) const {
    return u != v && in_range(u) && in_range(v) && edges_.count(key(u, v)) != 0;
  }

  /// Adds {u,v}; returns false if it was already present.
  bool add_edge(int u, int v) {
    check_pair(u, v);
    if (!edges_.insert(key(u, v)).second) return false;
    insert_sorted(adj_[u], v);
    insert_sorted(adj_[v], u);
    return true;
  }

  bool remove_edge(int u, int v) {
    if (!has_edge(u, v)) return false;
    edges_.erase(key(u, v));
    erase_sorted(adj_[u], v);
    erase_sorted(adj_[v], u);
    return true;
  }

  const std::vector<int>& neighbors(int i) const { return adj_.at(static_cast<std::size_t>(i)); }
  int degree(int i) const { return static_cast<int>(neighbors(i).size()); }

  std::vector<int> degrees() const {
    std::vector<int> d(adj_.size());
    for (std::size_t i = 0; i < adj_.size(); ++i) d[i] = static_cast<int>(adj_[i].size());
    return d;
  }

  /// Edges as (u, v) with u < v, lexicographically sorted.
  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    out.reserve(edges_.size());
    for (int u = 0; u < size(); ++u) {
      for (int v : adj_[u]) {
        if (u < v) out.emplace_back(u, v);
      }
    }
    return out;
  }

  friend bool operator==(const Graph& a, const Graph& b) { return a.adj_ == b.adj_; }

 private:
  static std::uint64_t key(int u, int v) {
    if (u > v) std::swap(u, v);
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(u)) << 32) |
           static_cast<std::uint32_t>(v);
  }
  bool in_range(int i) const { return i >= 0 && i < size(); }
  void check_pair(int u, int v) const {
    if (!in_range(u) || !in_range(v)) fail(ErrorCode::BadDimensions, "node id out of range");
    if (u == v) fail(ErrorCode::BadDimensions, "self-loop at node " + std::to_string(u + 1));
  }
  static void insert_sorted(std::vector<int>& list, int x) {
    list.insert(std::lower_bound(list.begin(), list.end(), x), x);
  }
  static void erase_sorted(std::vector<int>& list, int x) {
    auto it = std::lower_bound(list.begin(), list.end(), x);
    if (it != list.end() && *it == x) list.erase(it);
  }

  std::vector<std::vector<int>> adj_;
  std::unordered_set<std::uint64_t> edges_;
};

/// Integer target degrees, each in [1, n-1], with an even total.
class DegreeSequence {
 public:
  explicit DegreeSequence(std::vector<int> d) : d_(std::move(d)) {
    const int n = static_cast<int>(d_.size());
    if (n < 2) fail(ErrorCode::TooFewNodes, "degree sequence needs at least 2 entries");
    for (int x : d_) {
      if (x < 1 || x > n - 1) fail(ErrorCode::BadRange, "degree outside [1, n-1]");
    }
    if (total() % 2 != 0) fail(ErrorCode::BadRange, "degree sum is odd");
  }

  std::size_t size() const noexcept { return d_.size(); }
  int operator[](std::size_t i) const { return d_[i]; }
  const std::vector<int>& values() const noexcept { return d_; }
  long total() const { return std::accumulate(d_.begin(), d_.end(), 0L); }

  friend bool operator==(const DegreeSequence&, const DegreeSequence&) = default;

 private:
  std::vector<int> d_;
};

/// Component label per node, labels assigned in order of smallest member.
inline std::vector<int> component_labels(const Graph& g) {
  std::vector<int> label(static_cast<std::size_t>(g.size()), -1);
  int next = 0;
  for (int s = 0; s < g.size(); ++s) {
    if (label[s] >= 0) continue;
    std::queue<int> frontier;
    frontier.push(s);
    label[s] = next;
    while (!frontier.empty()) {
      int x = frontier.front();
      frontier.pop();
      for (int y : g.neighbors(x)) {
        if (label[y] < 0) {
          label[y] = next;
          frontier.push(y);
        }
      }
    }
    ++next;
  }
  return label;
}

inline bool is_connected(const Graph& g) {
  if (g.size() == 0) return true;
  const auto label = component_labels(g);
  return std::all_of(label.begin(), label.end(), [](int c) { return c == 0; });
}

struct GraphStats {
  int min_degree = 0;
  int max_degree = 0;
  double mean_degree = 0.0;
  double c_lambda = 0.0;
  double kappa = 1.0;
};

inline GraphStats graph_stats(const Graph& g, const WeightVector& w) {
  if (static_cast<std::size_t>(g.size()) != w.size()) {
    fail(ErrorCode::DimensionMismatch, "graph and weight vector sizes differ");
  }
  const auto d = g.degrees();
  GraphStats s;
  if (!d.empty()) {
    s.min_degree = *std::min_element(d.begin(), d.end());
    s.max_degree = *std::max_element(d.begin(), d.end());
    s.mean_degree = std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(d.size());
  }
  s.c_lambda = w.c_lambda();
  s.kappa = w.kappa();
  return s;
}

// Edge-list text format: "n <count>" header, then one 1-based "i j" per line.
inline void write_edge_list(std::ostream& out, const Graph& g) {
  out << "n " << g.size() << '\n';
  for (auto [u, v] : g.edges()) out << (u + 1) << ' ' << (v + 1) << '\n';
}

inline Graph read_edge_list(std::istream& in) {
  std::string line;
  int n = -1;
  std::vector<Edge> edges;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ls(line);
    if (n < 0) {
      std::string tag;
      if (!(ls >> tag >> n) || tag != "n" || n < 0) {
        fail(ErrorCode::Parse, "edge list must start with 'n <count>'");
      }
      continue;
    }
    int i = 0, j = 0;
    if (!(ls >> i >> j)) fail(ErrorCode::Parse, "edge list line " + std::to_string(lineno));
    edges.emplace_back(i - 1, j - 1);
  }
  if (n < 0) fail(ErrorCode::Parse, "empty edge list");
  return Graph::from_edges(n, edges);
}

}  // namespace wgt
