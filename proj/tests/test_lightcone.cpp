#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "doctest.h"
#include "qmis/lightcone.hpp"

using namespace qmis;

namespace {

QaoaParams three_angle(double theta, double gamma, double beta) {
  QaoaParams p;
  p.gammas = {gamma};
  p.betas = {beta};
  p.theta = theta;
  return p;
}

double full_pair(const PureState& s, std::size_t a, std::size_t b) {
  return prob_both_one(s, a, b);
}

double full_variance(const PureState& s) {
  std::size_t n = s.num_qubits();
  KahanSum acc;
  std::vector<double> bit(n);
  for (std::size_t v = 0; v < n; ++v) bit[v] = prob_bit_one(s, v);
  for (std::size_t i = 0; i < n; ++i) {
    acc.add(bit[i] * (1.0 - bit[i]));
    for (std::size_t j = i + 1; j < n; ++j)
      acc.add(2.0 * (full_pair(s, i, j) - bit[i] * bit[j]));
  }
  return acc.value();
}

}  // namespace

TEST_CASE("depth zero from all-zeros gives zero everywhere") {
  Graph g = sample_graph({12, 3.0, GraphModel::FixedEdgeCount, 2});
  QaoaParams params;  // p = 0
  for (VertexId v = 0; v < g.n(); ++v) {
    LocalExpectation e = cone_expectation_bit(g, params, InitialState::AllZeros, v);
    CHECK(e.value == 0.0);
    CHECK(e.cone_size == 1);
  }
}

TEST_CASE("isolated vertex under the three-angle circuit gives sin^2(theta+beta)") {
  Graph g(4, {Edge{1, 2}});  // vertices 0 and 3 isolated
  QaoaParams params = three_angle(0.4, 1.1, 0.5);
  double expect = std::pow(std::sin(0.9), 2);
  for (VertexId v : {0u, 3u}) {
    LocalExpectation e = cone_expectation_bit(g, params, InitialState::RotatedZeros, v);
    CHECK(e.value == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("cone expectations match the full statevector on random graphs") {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    Rng rng(derive_seed(seed, "case"));
    Graph g = sample_graph({14, 3.0, GraphModel::FixedEdgeCount, rng.next()});
    QaoaParams params;
    std::size_t p = 1 + seed % 2;
    for (std::size_t l = 0; l < p; ++l) {
      params.gammas.push_back(0.3 + 0.8 * rng.uniform01());
      params.betas.push_back(0.2 + 0.7 * rng.uniform01());
    }
    params.theta = 0.3 + 0.5 * rng.uniform01();
    PureState full = run_qaoa(g, params, InitialState::RotatedZeros);

    for (VertexId v = 0; v < g.n(); ++v) {
      double cone = cone_expectation_bit(g, params, InitialState::RotatedZeros, v).value;
      CHECK(std::abs(cone - prob_bit_one(full, v)) < 1e-10);
    }
    for (const Edge& e : g.canonical_edges()) {
      double cone =
          cone_expectation_pair(g, params, InitialState::RotatedZeros, e.u, e.v).value;
      CHECK(std::abs(cone - full_pair(full, e.u, e.v)) < 1e-10);
    }
    double obj_cone = objective_expectation(g, params, InitialState::RotatedZeros);
    double obj_full = expectation(full, CostModel::objective(g));
    CHECK(std::abs(obj_cone - obj_full) < 1e-9);

    double var_cone = hamming_variance(g, params, InitialState::RotatedZeros);
    CHECK(std::abs(var_cone - full_variance(full)) < 1e-9);
  }
}

TEST_CASE("pair expectation factorizes for two isolated vertices") {
  Graph g(5, {Edge{1, 2}, Edge{2, 3}});  // 0 and 4 isolated
  QaoaParams params = three_angle(0.5, 0.9, 0.4);
  double bi = cone_expectation_bit(g, params, InitialState::RotatedZeros, 0).value;
  double bj = cone_expectation_bit(g, params, InitialState::RotatedZeros, 4).value;
  double pair = cone_expectation_pair(g, params, InitialState::RotatedZeros, 0, 4).value;
  CHECK(pair == doctest::Approx(bi * bj).epsilon(1e-14));
}

TEST_CASE("path endpoints at distance 3 factorize at p=1") {
  Graph g(4, {Edge{0, 1}, Edge{1, 2}, Edge{2, 3}});
  QaoaParams params = three_angle(0.45, 0.8, 0.35);
  PureState full = run_qaoa(g, params, InitialState::RotatedZeros);
  double cov = full_pair(full, 0, 3) - prob_bit_one(full, 0) * prob_bit_one(full, 3);
  CHECK(std::abs(cov) < 1e-10);
}

TEST_CASE("edgeless objective is n sin^2(theta+beta)") {
  Graph g(9, {});
  QaoaParams params = three_angle(0.3, 1.7, 0.6);
  double expect = 9.0 * std::pow(std::sin(0.9), 2);
  CHECK(objective_expectation(g, params, InitialState::RotatedZeros) ==
        doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("variance is zero at depth zero from all-zeros") {
  Graph g = sample_graph({10, 2.0, GraphModel::FixedEdgeCount, 7});
  QaoaParams params;
  CHECK(hamming_variance(g, params, InitialState::AllZeros) == 0.0);
}

TEST_CASE("edgeless variance is the independent-bit binomial sum") {
  Graph g(8, {});
  QaoaParams params = three_angle(0.42, 0.9, 0.33);
  double s2 = std::pow(std::sin(0.75), 2);
  CHECK(hamming_variance(g, params, InitialState::RotatedZeros) ==
        doctest::Approx(8.0 * s2 * (1.0 - s2)).epsilon(1e-11));
}

TEST_CASE("factorization report separates far and near pairs on the 12-cycle") {
  std::vector<Edge> edges;
  for (VertexId i = 0; i < 12; ++i)
    edges.push_back(make_edge(i, static_cast<VertexId>((i + 1) % 12)));
  Graph g(12, std::move(edges));
  QaoaParams params = three_angle(0.5, 0.9, 0.4);
  FactorizationReport report =
      verify_factorization(g, params, InitialState::RotatedZeros);
  REQUIRE(!report.far_pairs.empty());
  REQUIRE(!report.near_pairs.empty());
  CHECK(report.max_far_residual < 1e-10);
  // Correlations do exist within the cone; the check has power.
  CHECK(report.max_near_abs > 1e-6);
  for (const auto& pr : report.far_pairs) CHECK(pr.distance > 2);
  for (const auto& pr : report.near_pairs) CHECK(pr.distance <= 2);
}

TEST_CASE("explicit pair lists restrict the factorization report") {
  Graph g(4, {Edge{0, 1}, Edge{1, 2}, Edge{2, 3}});
  QaoaParams params = three_angle(0.45, 0.8, 0.35);
  std::vector<std::pair<VertexId, VertexId>> pairs = {{0, 3}, {0, 1}};
  FactorizationReport report =
      verify_factorization(g, params, InitialState::RotatedZeros, pairs);
  REQUIRE(report.far_pairs.size() == 1);   // dist(0,3)=3 > 2p=2
  REQUIRE(report.near_pairs.size() == 1);  // dist(0,1)=1
  CHECK(report.far_pairs[0].i == 0);
  CHECK(report.far_pairs[0].j == 3);
  CHECK(report.max_far_residual < 1e-10);
}

TEST_CASE("product start at depth zero has zero covariance everywhere") {
  Graph g = sample_graph({8, 2.0, GraphModel::FixedEdgeCount, 5});
  QaoaParams params;
  params.theta = 0.4;
  FactorizationReport report =
      verify_factorization(g, params, InitialState::RotatedZeros);
  CHECK(report.max_far_residual < 1e-15);
  CHECK(report.max_near_abs < 1e-15);
}

TEST_CASE("cone results are bit-identical across repeated calls") {
  Graph g = sample_graph({30, 3.0, GraphModel::FixedEdgeCount, 77});
  QaoaParams params = three_angle(0.35, 0.95, 0.41);
  double a = objective_expectation(g, params, InitialState::RotatedZeros);
  double b = objective_expectation(g, params, InitialState::RotatedZeros);
  CHECK(a == b);
  double va = hamming_variance(g, params, InitialState::RotatedZeros);
  double vb = hamming_variance(g, params, InitialState::RotatedZeros);
  CHECK(va == vb);
}

TEST_CASE("cone overflow reports the offending vertex and size") {
  Graph g = sample_graph({200, 4.0, GraphModel::FixedEdgeCount, 13});
  QaoaParams params;
  params.gammas = {0.3, 0.4};
  params.betas = {0.8, 0.3};
  params.theta = 0.3;
  SimLimits tiny{3};
  try {
    objective_expectation(g, params, InitialState::RotatedZeros, tiny);
    FAIL("expected size_limit_error");
  } catch (const size_limit_error& e) {
    CHECK(e.limit() == 3);
    CHECK(e.requested() > 3);
    CHECK(std::string(e.what()).find("vertex") != std::string::npos);
  }
}

TEST_CASE("depth-1 closed form matches a depth-1 statevector cone on dense spots") {
  // Triangle-rich neighborhood: the pair cone is not a double star, the
  // common-leaf factor must handle it.
  Graph g(6, {Edge{0, 1}, Edge{0, 2}, Edge{1, 2}, Edge{0, 3}, Edge{1, 4}, Edge{2, 5},
              Edge{3, 4}});
  QaoaParams params = three_angle(0.48, 0.92, 0.36);
  PureState full = run_qaoa(g, params, InitialState::RotatedZeros);
  for (VertexId i = 0; i < g.n(); ++i) {
    CHECK(cone_expectation_bit(g, params, InitialState::RotatedZeros, i).value ==
          doctest::Approx(prob_bit_one(full, i)).epsilon(1e-12));
    for (VertexId j = i + 1; j < g.n(); ++j)
      CHECK(cone_expectation_pair(g, params, InitialState::RotatedZeros, i, j).value ==
            doctest::Approx(full_pair(full, i, j)).epsilon(1e-12));
  }
}

TEST_CASE("per-vertex objective is stable across graph seeds at n=1e4") {
  QaoaParams params = three_angle(0.55, 0.9, 0.45);
  std::vector<double> per_n;
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    Graph g = sample_graph({10000, 3.0, GraphModel::FixedEdgeCount, seed});
    per_n.push_back(objective_expectation(g, params, InitialState::RotatedZeros) / g.n());
  }
  for (double v : per_n) {
    CHECK(std::abs(v - per_n[0]) <= 0.01);
    CHECK(v > 0.0);
  }
}

TEST_CASE("variance stays under n times the largest 2p-ball") {
  Graph g = sample_graph({1000, 3.0, GraphModel::FixedEdgeCount, 99});
  QaoaParams params = three_angle(0.55, 0.9, 0.45);
  double var = hamming_variance(g, params, InitialState::RotatedZeros);
  std::uint64_t worst = 0;
  for (VertexId v = 0; v < g.n(); ++v) worst = std::max<std::uint64_t>(worst, ball(g, v, 2).members.size());
  CHECK(var <= static_cast<double>(g.n()) * static_cast<double>(worst));
  CHECK(var > 0.0);
}
