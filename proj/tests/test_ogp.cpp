#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <bit>
#include <cmath>
#include <set>
#include <vector>

#include "doctest.h"
#include "qmis/ogp.hpp"

using namespace qmis;

namespace {

std::vector<std::uint64_t> adjacency_masks(const Graph& g) {
  std::vector<std::uint64_t> adj(g.n(), 0);
  for (const Edge& e : g.canonical_edges()) {
    adj[e.u] |= std::uint64_t{1} << e.v;
    adj[e.v] |= std::uint64_t{1} << e.u;
  }
  return adj;
}

// 2^n filter oracle: all independent sets with size >= threshold.
std::vector<std::uint64_t> brute_eta_sets(const Graph& g, std::uint32_t threshold) {
  auto adj = adjacency_masks(g);
  std::vector<std::uint64_t> out;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << g.n()); ++mask) {
    if (std::popcount(mask) < static_cast<int>(threshold)) continue;
    bool indep = true;
    for (std::uint32_t v = 0; v < g.n() && indep; ++v)
      if ((mask >> v) & 1ULL)
        if (adj[v] & mask) indep = false;
    if (indep) out.push_back(mask);
  }
  return out;
}

std::int64_t brute_max_cobj(const Graph& g) {
  auto adj = adjacency_masks(g);
  std::int64_t best = 0;
  for (std::uint64_t b = 0; b < (std::uint64_t{1} << g.n()); ++b) {
    std::int64_t pen = 0;
    for (std::uint32_t v = 0; v < g.n(); ++v)
      if ((b >> v) & 1ULL) pen += std::popcount(adj[v] & b);
    best = std::max(best, static_cast<std::int64_t>(std::popcount(b)) - pen / 2);
  }
  return best;
}

}  // namespace

TEST_CASE("exact MIS on the edgeless graph and the 5-clique") {
  Graph edgeless(7, {});
  CHECK(exact_mis(edgeless).size == 7);
  std::vector<Edge> k5;
  for (VertexId i = 0; i < 5; ++i)
    for (VertexId j = i + 1; j < 5; ++j) k5.push_back({i, j});
  CHECK(exact_mis(Graph(5, std::move(k5))).size == 1);
}

TEST_CASE("exact MIS equals the brute-force maximum of C_obj on n=20 graphs") {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    Graph g = sample_graph({20, 3.0, GraphModel::FixedEdgeCount, seed + 50});
    IndependentSet mis = exact_mis(g);
    CHECK(check_independent(g, mis.vertices));
    CHECK(mis.vertices.count() == mis.size);
    CHECK(static_cast<std::int64_t>(mis.size) == brute_max_cobj(g));
  }
}

TEST_CASE("no independent set beats the branch-and-bound optimum") {
  // Independent route: the enumerator must find sets at the claimed optimum
  // and none above it.
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Graph g = sample_graph({30, 3.0, GraphModel::FixedEdgeCount, seed + 400});
    std::uint32_t mis = exact_mis(g).size;
    CHECK(!enumerate_eta_optimal_masks(g, mis, 1u << 22).empty());
    CHECK(enumerate_eta_optimal_masks(g, mis + 1, 1u << 22).empty());
  }
}

TEST_CASE("exact MIS never loses to greedy") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Graph g = sample_graph({30, 3.0, GraphModel::FixedEdgeCount, seed});
    CHECK(exact_mis(g).size >= greedy_is(g, seed * 3 + 1).size);
  }
}

TEST_CASE("threshold zero enumerates every independent set including empty") {
  Graph g(4, {Edge{0, 1}, Edge{2, 3}});
  auto masks = enumerate_eta_optimal_masks(g, 0, 1000);
  auto brute = brute_eta_sets(g, 0);
  std::sort(masks.begin(), masks.end());
  CHECK(masks == brute);
  CHECK(std::find(masks.begin(), masks.end(), 0ULL) != masks.end());
}

TEST_CASE("single edge at threshold one gives the two singletons") {
  Graph g(2, {Edge{0, 1}});
  auto masks = enumerate_eta_optimal_masks(g, 1, 1000);
  std::sort(masks.begin(), masks.end());
  CHECK(masks == std::vector<std::uint64_t>{0b01, 0b10});
}

TEST_CASE("enumeration matches the 2^n filter on an n=18 instance") {
  Graph g = sample_graph({18, 3.0, GraphModel::FixedEdgeCount, 77});
  double alpha = static_cast<double>(exact_mis(g).size) / g.n();
  std::uint32_t threshold = eta_threshold(0.9, alpha, g.n());
  auto fast = enumerate_eta_optimal_masks(g, threshold, 10'000'000);
  std::sort(fast.begin(), fast.end());
  CHECK(fast == brute_eta_sets(g, threshold));
  for (std::uint64_t mask : fast) CHECK(std::popcount(mask) >= static_cast<int>(threshold));
  // No duplicates.
  CHECK(std::adjacent_find(fast.begin(), fast.end()) == fast.end());
}

TEST_CASE("enumerate_eta_optimal wraps masks with verified sets") {
  Graph g = sample_graph({14, 3.0, GraphModel::FixedEdgeCount, 5});
  OgpConfig cfg;
  cfg.eta = 0.85;
  auto sets = enumerate_eta_optimal(g, cfg);
  REQUIRE(!sets.empty());
  for (const IndependentSet& s : sets) {
    CHECK(check_independent(g, s.vertices));
    CHECK(s.size == s.vertices.count());
  }
}

TEST_CASE("eta threshold rounds up and survives float fuzz") {
  CHECK(eta_threshold(0.9, 0.5, 10) == 5);   // 4.5 -> 5
  CHECK(eta_threshold(1.0, 0.5, 12) == 6);   // exact product stays 6
  CHECK(eta_threshold(0.95, 6.0 / 24.0, 24) == 6);
  CHECK(eta_threshold(0.5, 0.0, 10) == 0);
}

TEST_CASE("enumeration cap throws a typed error with the partial count") {
  Graph g(10, {});
  try {
    enumerate_eta_optimal_masks(g, 0, 100);
    FAIL("expected enumeration_cap_error");
  } catch (const enumeration_cap_error& e) {
    CHECK(e.partial_count() == 100);
  }
}

TEST_CASE("graphs beyond 64 vertices are rejected for exact work") {
  Graph g = sample_graph({80, 2.0, GraphModel::FixedEdgeCount, 3});
  CHECK_THROWS_AS(exact_mis(g), size_limit_error);
}

TEST_CASE("self-pair histogram puts mass in the top bin") {
  Graph g = sample_graph({16, 3.0, GraphModel::FixedEdgeCount, 21});
  OgpConfig cfg;
  cfg.eta = 0.9;
  OverlapHistogram h = overlap_histogram(g, g, cfg);
  CHECK(h.count1 == h.count2);
  std::uint64_t mass = 0;
  for (std::uint64_t c : h.counts) mass += c;
  CHECK(mass == h.total_pairs());
  // The (sigma, sigma) diagonal pairs land at the MIS size.
  IndependentSet mis = exact_mis(g);
  CHECK(h.counts[mis.size] > 0);
  CHECK(h.normalized(mis.size) == doctest::Approx(1.0));
}

TEST_CASE("engineered disjoint optima put all cross mass at zero overlap") {
  // K_{2,2} plus one extra edge pins the unique 2-element independent set to
  // {0,1} in g1 and {2,3} in g2.
  Graph g1(4, {Edge{0, 2}, Edge{0, 3}, Edge{1, 2}, Edge{1, 3}, Edge{2, 3}});
  Graph g2(4, {Edge{0, 2}, Edge{0, 3}, Edge{1, 2}, Edge{1, 3}, Edge{0, 1}});
  OgpConfig cfg;
  cfg.eta = 0.9;
  OverlapHistogram h = overlap_histogram(g1, g2, cfg);
  REQUIRE(h.count1 == 1);
  REQUIRE(h.count2 == 1);
  CHECK(h.counts[0] == 1);
  for (std::size_t k = 1; k < h.counts.size(); ++k) CHECK(h.counts[k] == 0);
}

TEST_CASE("intersection sizes match an explicit set-intersection oracle") {
  Graph g1 = sample_graph({18, 3.0, GraphModel::FixedEdgeCount, 31});
  Graph g2 = sample_graph({18, 3.0, GraphModel::FixedEdgeCount, 32});
  OgpConfig cfg;
  cfg.eta = 0.8;
  OverlapHistogram h = overlap_histogram(g1, g2, cfg);

  double a1 = static_cast<double>(exact_mis(g1).size) / 18;
  double a2 = static_cast<double>(exact_mis(g2).size) / 18;
  std::uint32_t threshold = eta_threshold(0.8, std::max(a1, a2), 18);
  auto s1 = enumerate_eta_optimal_masks(g1, threshold, 1u << 20);
  auto s2 = enumerate_eta_optimal_masks(g2, threshold, 1u << 20);
  std::vector<std::uint64_t> counts(19, 0);
  for (std::uint64_t m1 : s1)
    for (std::uint64_t m2 : s2) {
      std::set<int> sa, sb, inter;
      for (int v = 0; v < 18; ++v) {
        if ((m1 >> v) & 1ULL) sa.insert(v);
        if ((m2 >> v) & 1ULL) sb.insert(v);
      }
      std::set_intersection(sa.begin(), sa.end(), sb.begin(), sb.end(),
                            std::inserter(inter, inter.begin()));
      ++counts[inter.size()];
    }
  for (std::size_t k = 0; k < counts.size(); ++k) CHECK(h.counts[k] == counts[k]);
}

TEST_CASE("degenerate path with identical endpoints gives identical histograms") {
  Graph g = sample_graph({14, 3.0, GraphModel::FixedEdgeCount, 8});
  InterpolationPath path(g, g);
  OgpConfig cfg;
  cfg.eta = 0.85;
  auto m = static_cast<std::uint32_t>(path.steps());
  OgpScanReport report = ogp_scan(path, cfg, {0, m / 2, m});
  REQUIRE(report.pairs.size() >= 3);
  for (std::size_t i = 1; i < report.pairs.size(); ++i)
    CHECK(report.pairs[i].counts == report.pairs[0].counts);
}

TEST_CASE("scan diagonals populate high overlap and conserve mass") {
  Graph g0 = sample_graph({16, 4.0, GraphModel::FixedEdgeCount, 61});
  Graph gm = sample_graph({16, 4.0, GraphModel::FixedEdgeCount, 62});
  InterpolationPath path(g0, gm);
  OgpConfig cfg;
  cfg.eta = 0.9;
  auto m = static_cast<std::uint32_t>(path.steps());
  OgpScanReport report = ogp_scan(path, cfg, {0, m / 2, m});
  CHECK(report.label == "EXPLORATORY");
  CHECK(report.endpoint_present);
  for (const OverlapHistogram& h : report.pairs) {
    std::uint64_t mass = 0;
    for (std::uint64_t c : h.counts) mass += c;
    CHECK(mass == h.total_pairs());
    if (h.t1 == h.t2 && h.count1 > 0) {
      // Diagonal pairs include (sigma, sigma), so the top occupied bin is at
      // least the threshold.
      std::uint32_t top = 0;
      for (std::uint32_t k = 0; k < h.counts.size(); ++k)
        if (h.counts[k] > 0) top = k;
      CHECK(top >= report.threshold);
    }
  }
}

TEST_CASE("largest interior gap finder sees a planted hole") {
  OverlapHistogram h;
  h.n = 10;
  h.alpha_ref = 0.5;
  h.counts = {0, 4, 0, 0, 2, 1, 0, 0, 0, 3, 0};
  auto gap = h.largest_interior_gap();
  REQUIRE(gap.has_value());
  CHECK(gap->k_lo == 6);
  CHECK(gap->k_hi == 8);
  CHECK(gap->lo == doctest::Approx(6.0 / 5.0));
  OverlapHistogram contiguous;
  contiguous.n = 10;
  contiguous.alpha_ref = 0.5;
  contiguous.counts = {1, 2, 3};
  CHECK(!contiguous.largest_interior_gap().has_value());
}

TEST_CASE("ab/be emptiness queries agree with direct scans") {
  OverlapHistogram h;
  h.n = 20;
  h.alpha_ref = 0.4;  // normalizer n*alpha = 8
  h.counts.assign(21, 0);
  h.counts[2] = 5;
  h.counts[6] = 1;
  CHECK(h.ab_nonempty(0.74));   // 6/8 = 0.75 >= 0.74
  CHECK(!h.ab_nonempty(0.76));
  CHECK(h.be_nonempty(0.25));   // 2/8 = 0.25
  CHECK(!h.be_nonempty(0.24));
}

TEST_CASE("eta star constant") {
  CHECK(kEtaStar == doctest::Approx(0.8535533905932737).epsilon(1e-15));
}
