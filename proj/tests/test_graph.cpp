#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <queue>
#include <set>
#include <vector>

#include "doctest.h"
#include "qmis/graph.hpp"

using namespace qmis;

namespace {

// Reference BFS distances, kept independent of BallScratch.
std::vector<int> reference_distances(const Graph& g, VertexId src) {
  std::vector<int> dist(g.n(), -1);
  std::queue<VertexId> q;
  dist[src] = 0;
  q.push(src);
  while (!q.empty()) {
    VertexId v = q.front();
    q.pop();
    for (VertexId w : g.neighbors(v))
      if (dist[w] < 0) {
        dist[w] = dist[v] + 1;
        q.push(w);
      }
  }
  return dist;
}

Graph path_graph(VertexId n) {
  std::vector<Edge> edges;
  for (VertexId i = 0; i + 1 < n; ++i) edges.push_back({i, static_cast<VertexId>(i + 1)});
  return Graph(n, std::move(edges));
}

Graph cycle_graph(VertexId n) {
  std::vector<Edge> edges;
  for (VertexId i = 0; i < n; ++i)
    edges.push_back(make_edge(i, static_cast<VertexId>((i + 1) % n)));
  return Graph(n, std::move(edges));
}

}  // namespace

TEST_CASE("n=2 d=1 fixed-edge-count graph is the single edge") {
  for (std::uint64_t seed : {0ULL, 1ULL, 99ULL}) {
    Graph g = sample_graph({2, 1.0, GraphModel::FixedEdgeCount, seed});
    REQUIRE(g.m() == 1);
    CHECK(g.edge_list()[0] == Edge{0, 1});
  }
}

TEST_CASE("fixed-edge-count graphs have exactly round(dn/2) distinct edges") {
  Graph g = sample_graph({1000, 3.0, GraphModel::FixedEdgeCount, 5});
  CHECK(g.m() == 1500);
  CHECK(g.edge_count() == 1500);  // distinct
  for (const Edge& e : g.edge_list()) {
    CHECK(e.u != e.v);
    CHECK(e.u < 1000);
    CHECK(e.v < 1000);
  }
  CHECK(g.validate());
}

TEST_CASE("mean degree matches the degree-sum oracle across seeds") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Graph g = sample_graph({10000, 3.0, GraphModel::FixedEdgeCount, seed});
    std::uint64_t degree_sum = 0;
    for (VertexId v = 0; v < g.n(); ++v) degree_sum += g.degree(v);
    double mean = static_cast<double>(degree_sum) / g.n();
    CHECK(std::abs(mean - 3.0) <= 0.05);
    CHECK(degree_sum == 2 * g.edge_count());
  }
}

TEST_CASE("bernoulli model mean degree lands near d") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Graph g = sample_graph({10000, 3.0, GraphModel::BernoulliEdges, seed});
    double mean = 2.0 * static_cast<double>(g.edge_count()) / g.n();
    CHECK(std::abs(mean - 3.0) <= 0.15);
    CHECK(g.validate());
  }
}

TEST_CASE("sampling is deterministic per seed") {
  Graph a = sample_graph({500, 3.0, GraphModel::FixedEdgeCount, 123});
  Graph b = sample_graph({500, 3.0, GraphModel::FixedEdgeCount, 123});
  CHECK(a.edge_list() == b.edge_list());
}

TEST_CASE("per-pair inclusion frequencies are uniform in both models") {
  // Catches off-by-one bugs in the geometric pair walk: every pair of the
  // upper triangle, including (0,1) and the row boundaries, must appear with
  // the same probability.
  const VertexId n = 12;
  const int trials = 20000;
  const std::size_t pair_count = n * (n - 1) / 2;
  auto pair_index = [n](VertexId i, VertexId j) {
    return static_cast<std::size_t>(i) * n - static_cast<std::size_t>(i) * (i + 1) / 2 +
           (j - i - 1);
  };

  for (GraphModel model : {GraphModel::BernoulliEdges, GraphModel::FixedEdgeCount}) {
    std::vector<std::uint64_t> hits(pair_count, 0);
    for (int t = 0; t < trials; ++t) {
      Graph g = sample_graph({n, 4.0, model, derive_seed(55, t)});
      for (const Edge& e : g.canonical_edges()) ++hits[pair_index(e.u, e.v)];
    }
    double expect = model == GraphModel::BernoulliEdges
                        ? 4.0 / n
                        : 24.0 / static_cast<double>(pair_count);
    double sigma = std::sqrt(expect * (1.0 - expect) / trials);
    for (std::size_t k = 0; k < pair_count; ++k) {
      double freq = static_cast<double>(hits[k]) / trials;
      CHECK(std::abs(freq - expect) <= 5.0 * sigma);
    }
  }
}

TEST_CASE("m beyond the pair count is a parameter error") {
  CHECK_THROWS_AS(sample_graph({4, 4.0, GraphModel::FixedEdgeCount, 0}), parameter_error);
}

TEST_CASE("ball on the path graph") {
  Graph g = path_graph(3);
  NeighborhoodQuery q = ball(g, 1, 1);
  CHECK(q.members == std::vector<VertexId>{0, 1, 2});
}

TEST_CASE("radius-zero ball is the center alone") {
  Graph g = sample_graph({40, 3.0, GraphModel::FixedEdgeCount, 2});
  for (VertexId v : {0u, 7u, 39u}) {
    NeighborhoodQuery q = ball(g, v, 0);
    CHECK(q.members == std::vector<VertexId>{v});
    CHECK(q.member_distance == std::vector<std::uint32_t>{0});
  }
}

TEST_CASE("ball on the 8-cycle matches the hand count") {
  Graph g = cycle_graph(8);
  NeighborhoodQuery q = ball(g, 0, 2);
  CHECK(q.members == std::vector<VertexId>{0, 1, 2, 6, 7});
}

TEST_CASE("ball distances agree with reference BFS and balls are monotone") {
  Graph g = sample_graph({60, 3.0, GraphModel::FixedEdgeCount, 9});
  for (VertexId v = 0; v < g.n(); v += 7) {
    std::vector<int> dist = reference_distances(g, v);
    std::size_t prev = 0;
    for (std::uint32_t r = 0; r <= 5; ++r) {
      NeighborhoodQuery q = ball(g, v, r);
      CHECK(q.members.size() >= prev);
      prev = q.members.size();
      for (std::size_t k = 0; k < q.members.size(); ++k) {
        CHECK(dist[q.members[k]] == static_cast<int>(q.member_distance[k]));
        CHECK(q.member_distance[k] <= r);
      }
      // Nothing within distance r is missing.
      std::size_t expect = 0;
      for (VertexId w = 0; w < g.n(); ++w)
        if (dist[w] >= 0 && dist[w] <= static_cast<int>(r)) ++expect;
      CHECK(q.members.size() == expect);
    }
  }
}

TEST_CASE("far set of an isolated third vertex") {
  Graph g(3, {Edge{0, 1}});
  CHECK(far_set(g, 0, 1, 1) == std::vector<VertexId>{2});
}

TEST_CASE("far set complement law and brute-force distance filter") {
  Graph g = sample_graph({50, 3.0, GraphModel::FixedEdgeCount, 4});
  for (auto [i, j] : std::vector<std::pair<VertexId, VertexId>>{{0, 1}, {3, 40}, {10, 11}}) {
    std::vector<VertexId> far = far_set(g, i, j, 1);
    std::vector<VertexId> near = ball_union(g, i, j, 1);
    CHECK(far.size() + near.size() == g.n());
    for (VertexId v : far) CHECK(!std::binary_search(near.begin(), near.end(), v));
    // Oracle: all-pairs BFS distance filter.
    std::vector<int> di = reference_distances(g, i);
    std::vector<int> dj = reference_distances(g, j);
    std::vector<VertexId> oracle;
    for (VertexId v = 0; v < g.n(); ++v) {
      bool in_i = di[v] >= 0 && di[v] <= 1;
      bool in_j = dj[v] >= 0 && dj[v] <= 1;
      if (!in_i && !in_j) oracle.push_back(v);
    }
    CHECK(far == oracle);
  }
}

TEST_CASE("interpolation endpoints are exact and the splice keeps order") {
  Graph g0 = sample_graph({30, 2.0, GraphModel::FixedEdgeCount, 11});
  Graph gm = sample_graph({30, 2.0, GraphModel::FixedEdgeCount, 12});
  InterpolationPath path(g0, gm);
  REQUIRE(path.steps() == 30);
  CHECK(path.graph_at(0).edge_list() == g0.edge_list());
  CHECK(path.graph_at(30).edge_list() == gm.edge_list());
  Graph mid = path.graph_at(12);
  for (std::size_t k = 0; k < 18; ++k) CHECK(mid.edge_list()[k] == g0.edge_list()[k]);
  for (std::size_t k = 18; k < 30; ++k) CHECK(mid.edge_list()[k] == gm.edge_list()[k]);
  CHECK_THROWS_AS(path.graph_at(31), parameter_error);
}

TEST_CASE("explicit 4-edge splice at t=2") {
  Graph g0(5, {Edge{0, 1}, Edge{1, 2}, Edge{2, 3}, Edge{3, 4}});
  Graph gm(5, {Edge{0, 2}, Edge{1, 3}, Edge{2, 4}, Edge{0, 4}});
  InterpolationPath path(g0, gm);
  Graph g2 = path.graph_at(2);
  CHECK(g2.edge_list() ==
        std::vector<Edge>{Edge{0, 1}, Edge{1, 2}, Edge{2, 4}, Edge{0, 4}});
}

TEST_CASE("adjacent interpolation graphs differ in at most one edge slot") {
  Graph g0 = sample_graph({25, 3.0, GraphModel::FixedEdgeCount, 21});
  Graph gm = sample_graph({25, 3.0, GraphModel::FixedEdgeCount, 22});
  InterpolationPath path(g0, gm);
  for (std::size_t t = 0; t < path.steps(); ++t) {
    auto a = path.graph_at(t).edge_list();
    auto b = path.graph_at(t + 1).edge_list();
    std::size_t diff = 0;
    for (std::size_t k = 0; k < a.size(); ++k)
      if (a[k] != b[k]) ++diff;
    CHECK(diff <= 1);
  }
}

TEST_CASE("splice duplicates stay in the edge list but not the adjacency") {
  // gm's last edge equals g0's first edge, so t=1 creates a repetition.
  Graph g0(4, {Edge{0, 1}, Edge{1, 2}, Edge{2, 3}});
  Graph gm(4, {Edge{0, 2}, Edge{1, 3}, Edge{0, 1}});
  InterpolationPath path(g0, gm);
  Graph g1 = path.graph_at(1);
  CHECK(g1.m() == 3);           // raw list keeps the duplicate
  CHECK(g1.edge_count() == 2);  // adjacency collapses it
  CHECK(g1.neighbors(0).size() == 1);
}

TEST_CASE("greedy on the empty graph takes everything") {
  Graph g(5, {});
  IndependentSet s = greedy_is(g, 3);
  CHECK(s.size == 5);
}

TEST_CASE("greedy on the triangle takes exactly one vertex") {
  Graph g(3, {Edge{0, 1}, Edge{1, 2}, Edge{0, 2}});
  for (std::uint64_t seed = 0; seed < 16; ++seed) {
    IndependentSet s = greedy_is(g, seed);
    CHECK(s.size == 1);
  }
}

TEST_CASE("greedy outputs are always independent") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Graph g = sample_graph({80, 4.0, GraphModel::FixedEdgeCount, seed});
    IndependentSet s = greedy_is(g, seed * 7 + 1);
    CHECK(check_independent(g, s.vertices));
  }
}

TEST_CASE("greedy density sits in the asymptotic band at d=20") {
  double lo = 0.7 * std::log(20.0) / 20.0;
  double hi = 1.3 * std::log(20.0) / 20.0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Graph g = sample_graph({100000, 20.0, GraphModel::FixedEdgeCount, seed});
    IndependentSet s = greedy_is(g, derive_seed(seed, "greedy"));
    double density = static_cast<double>(s.size) / g.n();
    CHECK(density >= lo);
    CHECK(density <= hi);
  }
}

TEST_CASE("check_independent basics and random agreement with an edge scan") {
  Graph empty_edges(4, {});
  CHECK(check_independent(empty_edges, DynamicBitset(4)));
  Graph one_edge(2, {Edge{0, 1}});
  DynamicBitset both(2);
  both.set(0);
  both.set(1);
  CHECK(!check_independent(one_edge, both));

  Graph g = sample_graph({30, 3.0, GraphModel::FixedEdgeCount, 8});
  Rng rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    DynamicBitset s(30);
    for (VertexId v = 0; v < 30; ++v)
      if (rng.bernoulli(0.3)) s.set(v);
    bool oracle = true;
    for (VertexId v = 0; v < 30 && oracle; ++v)
      if (s.test(v))
        for (VertexId w : g.neighbors(v))
          if (w > v && s.test(w)) oracle = false;
    CHECK(check_independent(g, s) == oracle);
  }
}

TEST_CASE("edge list round-trips exactly, including splice duplicates") {
  Graph g0(4, {Edge{0, 1}, Edge{1, 2}, Edge{2, 3}});
  Graph gm(4, {Edge{0, 2}, Edge{1, 3}, Edge{0, 1}});
  Graph g1 = InterpolationPath(g0, gm).graph_at(1);
  std::string path = "roundtrip_test_graph.txt";
  save_edge_list(g1, path);
  Graph back = load_edge_list(path);
  CHECK(back.n() == g1.n());
  CHECK(back.edge_list() == g1.edge_list());
  std::filesystem::remove(path);
}

TEST_CASE("loader rejects malformed files with line numbers") {
  auto write_and_load = [](const std::string& content) {
    std::string path = "malformed_test_graph.txt";
    std::ofstream out(path);
    out << content;
    out.close();
    try {
      load_edge_list(path);
      std::filesystem::remove(path);
      return std::string("no error");
    } catch (const io_error& e) {
      std::filesystem::remove(path);
      return std::string(e.what());
    }
  };
  CHECK(write_and_load("3 2\n0 1\nx 2\n").find(":3:") != std::string::npos);
  CHECK(write_and_load("3 2\n0 1\n").find("expected m=2") != std::string::npos);
  CHECK(write_and_load("3 1\n0 1\n1 2\n").find(":3:") != std::string::npos);
  CHECK(write_and_load("3 1\n0 5\n").find("out of range") != std::string::npos);
  CHECK(write_and_load("3 1\n1 1\n").find("self-loop") != std::string::npos);
  CHECK(write_and_load("3 1\n0 1 9\n").find("trailing") != std::string::npos);
  CHECK(write_and_load("").find("missing header") != std::string::npos);
  CHECK(write_and_load("3 1\n0 1\n") == "no error");
}

TEST_CASE("induced subgraph keeps exactly the internal edges") {
  Graph g = cycle_graph(6);
  std::vector<VertexId> members = {0, 1, 2, 4};
  Graph sub = g.induced_subgraph(members);
  REQUIRE(sub.n() == 4);
  // Edges 0-1 and 1-2 survive (relabeled); vertex 4 is isolated inside.
  CHECK(sub.edge_count() == 2);
  CHECK(sub.has_edge(0, 1));
  CHECK(sub.has_edge(1, 2));
  CHECK(sub.degree(3) == 0);
}

TEST_CASE("graph construction rejects self-loops and bad ranges") {
  CHECK_THROWS_AS(Graph(3, {Edge{1, 1}}), parameter_error);
  CHECK_THROWS_AS(Graph(3, {Edge{0, 3}}), parameter_error);
}
