#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "error.hpp"
#include "graph.hpp"
#include "rng.hpp"
#include "weights.hpp"

namespace wgt {

inline Graph ring(int n) {
  if (n < 3) fail(ErrorCode::TooFewNodes, "ring needs n >= 3");
  Graph g(n);
  for (int i = 0; i < n; ++i) g.add_edge(i, (i + 1) % n);
  return g;
}

/// rows x cols lattice, node id = r * cols + c. With periodic wrap, duplicate
/// edges on 2-wide dimensions collapse into one.
inline Graph grid(int rows, int cols, bool periodic) {
  if (rows < 2 || cols < 2) fail(ErrorCode::BadDimensions, "grid needs rows, cols >= 2");
  Graph g(rows * cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const int u = r * cols + c;
      if (c + 1 < cols || periodic) g.add_edge(u, r * cols + (c + 1) % cols);
      if (r + 1 < rows || periodic) g.add_edge(u, ((r + 1) % rows) * cols + c);
    }
  }
  return g;
}

/// Links i to (i +- 2^p) mod n for p = 0 .. floor(log2(n/2)).
inline Graph static_exponential(int n) {
  if (n < 3) fail(ErrorCode::TooFewNodes, "static exponential graph needs n >= 3");
  Graph g(n);
  for (int offset = 1; 2 * offset <= n; offset *= 2) {
    for (int i = 0; i < n; ++i) {
      g.add_edge(i, (i + offset) % n);  // the -offset link is the +offset link of i - offset
    }
  }
  return g;
}

/// One uniform draw per pair (i, j), i < j, in lexicographic order.
inline Graph erdos_renyi(int n, double p, std::uint64_t seed) {
  if (n < 2) fail(ErrorCode::TooFewNodes, "Erdos-Renyi graph needs n >= 2");
  if (!(p > 0.0 && p < 1.0)) fail(ErrorCode::BadProbability, "p must lie in (0, 1)");
  Rng rng(seed);
  Graph g(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (rng.uniform01() < p) g.add_edge(i, j);
    }
  }
  return g;
}

/// Points drawn as (x_i, y_i) per node in order; edge iff distance <= r.
inline Graph random_geometric(int n, double r, std::uint64_t seed) {
  if (n < 2) fail(ErrorCode::TooFewNodes, "random geometric graph needs n >= 2");
  if (!(r > 0.0 && r <= std::sqrt(2.0))) fail(ErrorCode::BadRadius, "r must lie in (0, sqrt 2]");
  Rng rng(seed);
  std::vector<double> x(n), y(n);
  for (int i = 0; i < n; ++i) {
    x[i] = rng.uniform01();
    y[i] = rng.uniform01();
  }
  Graph g(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (std::hypot(x[i] - x[j], y[i] - y[j]) <= r) g.add_edge(i, j);
    }
  }
  return g;
}

// ---------------------------------------------------------------------------
// Weight-proportional topology synthesis.

/// Integer degrees proportional to the weights with an even total.
///
/// S is the even integer nearest n * avg_degree, d_i = round(S / sum(w) * w_i)
/// clipped to [1, n-1]; rounding is half away from zero. An odd total is
/// repaired by incrementing the lowest index still below n-1.
inline DegreeSequence scale_to_degrees(const WeightVector& w, double avg_degree) {
  const int n = static_cast<int>(w.size());
  if (!(avg_degree >= 1.0 && avg_degree <= n - 1)) {
    fail(ErrorCode::InfeasibleAverageDegree, "average degree must lie in [1, n-1]");
  }
  const double target = 2.0 * std::round(n * avg_degree / 2.0);
  const auto vals = w.values();
  const double scale = target / std::accumulate(vals.begin(), vals.end(), 0.0);
  std::vector<int> d(static_cast<std::size_t>(n));
  long total = 0;
  for (int i = 0; i < n; ++i) {
    const auto rounded = static_cast<int>(std::round(scale * vals[i]));
    d[i] = std::clamp(rounded, 1, n - 1);
    total += d[i];
  }
  if (total % 2 != 0) {
    auto it = std::find_if(d.begin(), d.end(), [&](int x) { return x < n - 1; });
    if (it == d.end()) {
      fail(ErrorCode::InfeasibleAverageDegree, "every degree clipped to n-1 with an odd total");
    }
    ++*it;
  }
  return DegreeSequence(std::move(d));
}

/// Havel-Hakimi realization. Each round takes the vertex with the largest
/// residual (ties: lower index), removes it from the pool and links it to the
/// next largest-residual pool vertices. Returns nullopt when the sequence is
/// not graphical.
inline std::optional<Graph> havel_hakimi(const DegreeSequence& d) {
  const int n = static_cast<int>(d.size());
  std::vector<int> residual(d.values());
  std::vector<int> pool(static_cast<std::size_t>(n));
  std::iota(pool.begin(), pool.end(), 0);
  Graph g(n);

  auto by_residual = [&](int a, int b) {
    return residual[a] != residual[b] ? residual[a] > residual[b] : a < b;
  };
  while (std::any_of(pool.begin(), pool.end(), [&](int v) { return residual[v] > 0; })) {
    std::sort(pool.begin(), pool.end(), by_residual);
    const int u = pool.front();
    pool.erase(pool.begin());
    const int r = residual[u];
    residual[u] = 0;
    if (r > static_cast<int>(pool.size())) return std::nullopt;
    int linked = 0;
    for (int v : pool) {
      if (linked == r) break;
      if (g.has_edge(u, v)) continue;
      g.add_edge(u, v);
      if (--residual[v] < 0) return std::nullopt;
      ++linked;
    }
    if (linked < r) return std::nullopt;
  }
  return g;
}

/// Degree-preserving edge swaps between the two largest components, at most
/// `budget` iterations. Internal edges are drawn uniformly from the seeded
/// stream. The result may still be disconnected if the budget runs out.
inline Graph make_connected(Graph g, int budget, std::uint64_t seed) {
  Rng rng(seed);
  for (int iter = 0; iter < budget; ++iter) {
    const auto label = component_labels(g);
    const int count = label.empty() ? 0 : *std::max_element(label.begin(), label.end()) + 1;
    if (count <= 1) return g;

    std::vector<int> sizes(static_cast<std::size_t>(count), 0);
    for (int c : label) ++sizes[c];
    std::vector<int> order(static_cast<std::size_t>(count));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return sizes[a] > sizes[b]; });

    std::vector<Edge> first, second;
    for (const auto& e : g.edges()) {
      if (label[e.first] == order[0]) first.push_back(e);
      if (label[e.first] == order[1]) second.push_back(e);
    }
    if (first.empty() || second.empty()) continue;  // an isolated vertex has no edge to swap
    const auto [a, b] = first[rng.index(first.size())];
    const auto [c, dd] = second[rng.index(second.size())];

    const Edge pairings[2][2] = {{{a, c}, {b, dd}}, {{a, dd}, {b, c}}};
    for (const auto& pairing : pairings) {
      const auto& e1 = pairing[0];
      const auto& e2 = pairing[1];
      if (e1.first == e1.second || e2.first == e2.second) continue;
      if (g.has_edge(e1.first, e1.second) || g.has_edge(e2.first, e2.second)) continue;
      g.remove_edge(a, b);
      g.remove_edge(c, dd);
      g.add_edge(e1.first, e1.second);
      g.add_edge(e2.first, e2.second);
      break;
    }
  }
  return g;
}

/// Ring plus greedy chords between the highest-residual non-adjacent pairs
/// (ties: lower index). Always connected; degrees only approximate d.
inline Graph fallback_connected(const DegreeSequence& d) {
  const int n = static_cast<int>(d.size());
  Graph g = ring(n);
  std::vector<int> need(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) need[i] = d[static_cast<std::size_t>(i)] - g.degree(i);

  const long rounds = static_cast<long>(n) * (n - 1) / 2;
  for (long t = 0; t < rounds; ++t) {
    const int u = static_cast<int>(std::max_element(need.begin(), need.end()) - need.begin());
    if (need[u] <= 0) break;
    int v = -1;
    for (int k = 0; k < n; ++k) {
      if (k == u || need[k] <= 0 || g.has_edge(u, k)) continue;
      if (v < 0 || need[k] > need[v]) v = k;
    }
    if (v < 0) break;
    g.add_edge(u, v);
    --need[u];
    --need[v];
  }
  return g;
}

struct WeightedGraphBuild {
  Graph graph;
  DegreeSequence target;
  bool exact_degrees = false;
  bool used_fallback = false;
  int trials = 0;  ///< Havel-Hakimi attempts consumed
};

/// Connected graph with degrees proportional to the weights. Trial k runs
/// Havel-Hakimi then make_connected with seed + k; after `trials` failures
/// the ring-based fallback is returned.
inline WeightedGraphBuild build_graph_from_weights(const WeightVector& w, double avg_degree,
                                                   int trials, std::uint64_t seed) {
  if (trials < 1) fail(ErrorCode::BadRange, "trial budget must be >= 1");
  DegreeSequence d = scale_to_degrees(w, avg_degree);
  for (int k = 0; k < trials; ++k) {
    auto realized = havel_hakimi(d);
    if (!realized) continue;
    Graph g = make_connected(std::move(*realized), trials, seed + static_cast<std::uint64_t>(k));
    if (is_connected(g) && g.degrees() == d.values()) {
      return {std::move(g), std::move(d), true, false, k + 1};
    }
  }
  Graph g = fallback_connected(d);
  const bool exact = g.degrees() == d.values();
  return {std::move(g), std::move(d), exact, true, trials};
}

// ---------------------------------------------------------------------------

enum class TopologyFamily { Ring, Grid, StaticExponential, ErdosRenyi, RandomGeometric, FromWeights };

constexpr std::string_view to_string(TopologyFamily f) {
  switch (f) {
    case TopologyFamily::Ring: return "ring";
    case TopologyFamily::Grid: return "grid";
    case TopologyFamily::StaticExponential: return "exp";
    case TopologyFamily::ErdosRenyi: return "er";
    case TopologyFamily::RandomGeometric: return "rgg";
    case TopologyFamily::FromWeights: return "custom";
  }
  return "?";
}

inline TopologyFamily parse_family(std::string_view s) {
  for (auto f : {TopologyFamily::Ring, TopologyFamily::Grid, TopologyFamily::StaticExponential,
                 TopologyFamily::ErdosRenyi, TopologyFamily::RandomGeometric,
                 TopologyFamily::FromWeights}) {
    if (s == to_string(f)) return f;
  }
  fail(ErrorCode::Parse, "unknown topology family '" + std::string(s) + "'");
}

struct TopologySpec {
  TopologyFamily family = TopologyFamily::Ring;
  int n = 16;
  int rows = 4;
  int cols = 4;
  bool periodic = true;
  double p = 0.4;
  double radius = 0.3;
  double avg_degree = 6.0;
  int trials = 50;
  std::uint64_t seed = 0;

  /// Throws on any parameter outside its family's domain.
  void validate() const {
    if (n < 2) fail(ErrorCode::TooFewNodes, "topology needs n >= 2");
    switch (family) {
      case TopologyFamily::Ring:
      case TopologyFamily::StaticExponential:
        if (n < 3) fail(ErrorCode::TooFewNodes, "family needs n >= 3");
        break;
      case TopologyFamily::Grid:
        if (rows < 2 || cols < 2 || rows * cols != n) {
          fail(ErrorCode::BadDimensions, "grid needs rows * cols == n with both >= 2");
        }
        break;
      case TopologyFamily::ErdosRenyi:
        if (!(p > 0.0 && p < 1.0)) fail(ErrorCode::BadProbability, "p must lie in (0, 1)");
        break;
      case TopologyFamily::RandomGeometric:
        if (!(radius > 0.0 && radius <= std::sqrt(2.0))) fail(ErrorCode::BadRadius, "r out of range");
        break;
      case TopologyFamily::FromWeights:
        if (!(avg_degree >= 1.0 && avg_degree <= n - 1)) {
          fail(ErrorCode::InfeasibleAverageDegree, "average degree must lie in [1, n-1]");
        }
        if (trials < 1) fail(ErrorCode::BadRange, "trial budget must be >= 1");
        break;
    }
  }
};

struct TopologyResult {
  Graph graph;
  bool connected = false;
  std::optional<WeightedGraphBuild> build;  ///< set for FromWeights
};

/// `w` is only consulted by the FromWeights family.
inline TopologyResult make_topology(const TopologySpec& spec, const WeightVector& w) {
  spec.validate();
  TopologyResult out;
  switch (spec.family) {
    case TopologyFamily::Ring: out.graph = ring(spec.n); break;
    case TopologyFamily::Grid: out.graph = grid(spec.rows, spec.cols, spec.periodic); break;
    case TopologyFamily::StaticExponential: out.graph = static_exponential(spec.n); break;
    case TopologyFamily::ErdosRenyi: out.graph = erdos_renyi(spec.n, spec.p, spec.seed); break;
    case TopologyFamily::RandomGeometric:
      out.graph = random_geometric(spec.n, spec.radius, spec.seed);
      break;
    case TopologyFamily::FromWeights: {
      if (w.size() != static_cast<std::size_t>(spec.n)) {
        fail(ErrorCode::DimensionMismatch, "weight vector size differs from n");
      }
      out.build = build_graph_from_weights(w, spec.avg_degree, spec.trials, spec.seed);
      out.graph = out.build->graph;
      break;
    }
  }
  out.connected = is_connected(out.graph);
  return out;
}

}  // namespace wgt
