#include <gtest/gtest.h>

#include <numeric>
#include <sstream>

#include <wgt/graph.hpp>
#include <wgt/rng.hpp>
#include <wgt/topology.hpp>
#include <wgt/weights.hpp>

using namespace wgt;

namespace {

// Independent connectivity oracle.
struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

bool uf_connected(const Graph& g) {
  UnionFind uf(g.size());
  for (auto [u, v] : g.edges()) uf.unite(u, v);
  for (int i = 1; i < g.size(); ++i) {
    if (uf.find(i) != uf.find(0)) return false;
  }
  return true;
}

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no wgt::Error thrown";
  return ErrorCode::Parse;
}

}  // namespace

TEST(Weights, NormalizesToNodeCount) {
  const auto w = make_weights({1.0, 2.0, 3.0, 2.0});
  const auto v = w.values();
  EXPECT_NEAR(std::accumulate(v.begin(), v.end(), 0.0), 4.0, 1e-14);
  EXPECT_DOUBLE_EQ(w[2] / w[0], 3.0);
}

TEST(Weights, Idempotent) {
  const auto w = presets::lambda_b();
  const auto again = make_weights(w.values());
  for (std::size_t i = 0; i < w.size(); ++i) EXPECT_EQ(w[i], again[i]);
}

TEST(Weights, RejectsBadInput) {
  EXPECT_EQ(code_of([] { make_weights({1.0, 0.0, 2.0}); }), ErrorCode::NonPositiveWeight);
  EXPECT_EQ(code_of([] { make_weights({1.0, -1.0}); }), ErrorCode::NonPositiveWeight);
  EXPECT_EQ(code_of([] { make_weights({1.0}); }), ErrorCode::TooFewNodes);
}

TEST(Weights, PresetStatistics) {
  const auto a = presets::lambda_a();
  EXPECT_NEAR(a.c_lambda(), 0.079609375, 1e-15);
  EXPECT_NEAR(a.kappa(), 2.7080128015453204, 1e-14);
  EXPECT_DOUBLE_EQ(a.max(), 2.2);
  const auto b = presets::lambda_b();
  const auto bv = b.values();
  EXPECT_NEAR(std::accumulate(bv.begin(), bv.end(), 0.0), 16.0, 1e-12);
  EXPECT_NEAR(b[1], 2.3 * 16.0 / 17.0, 1e-14);
}

TEST(Weights, UniformHasMinimalCLambda) {
  const auto u = uniform_weights(16);
  EXPECT_TRUE(u.is_uniform());
  EXPECT_DOUBLE_EQ(u.c_lambda(), 1.0 / 16.0);
  EXPECT_DOUBLE_EQ(u.kappa(), 1.0);
  EXPECT_GE(presets::lambda_a().c_lambda(), 1.0 / 16.0);
}

TEST(Weights, FileRoundTrip) {
  std::stringstream ss;
  write_weights(ss, presets::lambda_a());
  const auto back = read_weights(ss);
  for (std::size_t i = 0; i < back.size(); ++i) EXPECT_EQ(back[i], presets::lambda_a()[i]);

  std::istringstream commented("# header\n1\n\n3  # trailing\n");
  const auto w = read_weights(commented);
  ASSERT_EQ(w.size(), 2u);
  EXPECT_DOUBLE_EQ(w[0], 0.5);

  std::istringstream junk("1\nabc\n");
  EXPECT_EQ(code_of([&] { read_weights(junk); }), ErrorCode::Parse);
}

TEST(Rng, DeterministicStreams) {
  Rng a(42), b(42);
  for (int k = 0; k < 100; ++k) EXPECT_EQ(a.normal(), b.normal());
  EXPECT_NE(Rng(42).uniform01(), Rng(43).uniform01());
}

TEST(Rng, MomentsAreStandard) {
  Rng r(7);
  double s = 0.0, s2 = 0.0, u = 0.0;
  const int m = 200000;
  for (int k = 0; k < m; ++k) {
    const double x = r.normal();
    s += x;
    s2 += x * x;
    const double y = r.uniform01();
    ASSERT_GE(y, 0.0);
    ASSERT_LT(y, 1.0);
    u += y;
  }
  EXPECT_NEAR(s / m, 0.0, 0.01);
  EXPECT_NEAR(s2 / m, 1.0, 0.015);
  EXPECT_NEAR(u / m, 0.5, 0.005);
}

TEST(Graph, EdgeBookkeeping) {
  Graph g(4);
  EXPECT_TRUE(g.add_edge(2, 0));
  EXPECT_FALSE(g.add_edge(0, 2));
  EXPECT_TRUE(g.add_edge(1, 2));
  EXPECT_TRUE(g.has_edge(2, 1));
  EXPECT_EQ(g.edge_count(), 2u);
  EXPECT_EQ(g.degrees(), (std::vector<int>{1, 1, 2, 0}));
  EXPECT_EQ(g.edges(), (std::vector<Edge>{{0, 2}, {1, 2}}));
  EXPECT_TRUE(g.remove_edge(0, 2));
  EXPECT_FALSE(g.remove_edge(0, 2));
  EXPECT_EQ(code_of([&] { g.add_edge(3, 3); }), ErrorCode::BadDimensions);
  EXPECT_EQ(code_of([&] { g.add_edge(0, 4); }), ErrorCode::BadDimensions);
  EXPECT_EQ(code_of([] { Graph::from_edges(3, {{0, 1}, {1, 0}}); }), ErrorCode::BadDimensions);
}

TEST(Graph, DegreeSequenceValidation) {
  EXPECT_NO_THROW(DegreeSequence({1, 1}));
  EXPECT_EQ(code_of([] { DegreeSequence({1, 2, 2}); }), ErrorCode::BadRange);  // odd sum
  EXPECT_EQ(code_of([] { DegreeSequence({3, 1, 1, 1, 0}); }), ErrorCode::BadRange);
  EXPECT_EQ(code_of([] { DegreeSequence({4, 2, 2, 2}); }), ErrorCode::BadRange);
  EXPECT_EQ(code_of([] { DegreeSequence({1}); }), ErrorCode::TooFewNodes);
}

TEST(Graph, ConnectivityMatchesUnionFind) {
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    const int n = 2 + static_cast<int>(seed % 11);
    const double p = 0.05 + 0.9 * Rng(seed * 7919).uniform01();
    const auto g = erdos_renyi(n, p, seed);
    ASSERT_EQ(is_connected(g), uf_connected(g)) << "seed " << seed;
    const auto labels = component_labels(g);
    for (auto [u, v] : g.edges()) ASSERT_EQ(labels[u], labels[v]);
  }
}

TEST(Graph, ComponentLabelsOrdered) {
  const auto g = Graph::from_edges(5, {{3, 4}, {1, 2}});
  EXPECT_EQ(component_labels(g), (std::vector<int>{0, 1, 1, 2, 2}));
  EXPECT_FALSE(is_connected(g));
}

TEST(Graph, StatsAndEdgeListRoundTrip) {
  const auto g = static_exponential(16);
  const auto st = graph_stats(g, presets::lambda_a());
  EXPECT_EQ(st.min_degree, 7);
  EXPECT_EQ(st.max_degree, 7);
  EXPECT_DOUBLE_EQ(st.mean_degree, 7.0);
  EXPECT_DOUBLE_EQ(st.c_lambda, presets::lambda_a().c_lambda());
  EXPECT_EQ(code_of([&] { graph_stats(g, uniform_weights(3)); }), ErrorCode::DimensionMismatch);

  std::stringstream ss;
  write_edge_list(ss, g);
  const std::string text = ss.str();
  EXPECT_EQ(text.rfind("n 16\n1 2\n", 0), 0u);  // 1-based ids
  EXPECT_EQ(read_edge_list(ss), g);
}
