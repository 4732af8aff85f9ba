#pragma once

#include <cfloat>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qmis/common.hpp"
#include "qmis/graph.hpp"
#include "qmis/lightcone.hpp"
#include "qmis/qaoa_plus.hpp"
#include "qmis/rng.hpp"

namespace qmis {

static_assert(LDBL_MANT_DIG >= 64,
              "mgf recursion needs >= 80-bit effective extended precision");

// Iterated Poisson-branching mgf: phi_0(t) = e^t, phi_{k+1}(t) = e^{d(phi_k(t)-1)}.
struct MgfTable {
  double d = 0.0;
  std::uint32_t k = 0;
  long double t = 0.0L;
  std::vector<long double> phi;  // phi_0 .. phi_k
  std::optional<std::uint32_t> overflow_generation;
};

inline MgfTable mgf_recursion(double d, std::uint32_t k, long double t) {
  if (!(d >= 0.0)) throw parameter_error("mgf_recursion: d must be nonnegative");
  MgfTable table;
  table.d = d;
  table.k = k;
  table.t = t;
  table.phi.reserve(k + 1);
  long double phi = std::exp(t);
  table.phi.push_back(phi);
  for (std::uint32_t j = 0; j < k; ++j) {
    phi = std::exp(static_cast<long double>(d) * (phi - 1.0L));
    table.phi.push_back(phi);
    if (!std::isfinite(phi)) {
      table.overflow_generation = j + 1;
      break;
    }
  }
  return table;
}

// Generation sizes of a Poisson(d) branching process: per replicate the
// trajectory Z_0=1, Z_{j+1} ~ Poisson(d * Z_j). Only generation totals are
// sampled (Poisson additivity), never trees.
struct BranchingStats {
  double d = 0.0;
  std::uint32_t k = 0;
  std::uint64_t replicates = 0;
  std::vector<std::uint64_t> z;  // replicates x (k+1), row-major

  std::uint64_t at(std::uint64_t rep, std::uint32_t gen) const {
    return z[rep * (k + 1) + gen];
  }
  std::uint64_t cumulative(std::uint64_t rep) const {  // B_k = Z_1 + ... + Z_k
    std::uint64_t b = 0;
    for (std::uint32_t gen = 1; gen <= k; ++gen) b += at(rep, gen);
    return b;
  }
  double mean(std::uint32_t gen) const {
    KahanSum s;
    for (std::uint64_t r = 0; r < replicates; ++r) s.add(static_cast<double>(at(r, gen)));
    return s.value() / static_cast<double>(replicates);
  }
  double sample_variance(std::uint32_t gen) const {
    double mu = mean(gen);
    KahanSum s;
    for (std::uint64_t r = 0; r < replicates; ++r) {
      double x = static_cast<double>(at(r, gen)) - mu;
      s.add(x * x);
    }
    return s.value() / static_cast<double>(replicates - 1);
  }
  std::uint64_t exceed_count(std::uint32_t gen, double threshold) const {
    std::uint64_t c = 0;
    for (std::uint64_t r = 0; r < replicates; ++r)
      if (static_cast<double>(at(r, gen)) >= threshold) ++c;
    return c;
  }
};

inline BranchingStats branching_simulate(double d, std::uint32_t k, std::uint64_t replicates,
                                         std::uint64_t seed) {
  if (replicates < 2) throw parameter_error("branching_simulate: need >= 2 replicates");
  double expected_total = replicates * (std::pow(d, k + 1) + k + 1);
  if (!(expected_total < 4e12) || replicates * (k + 1) > (std::uint64_t{1} << 31))
    throw size_limit_error("branching_simulate: population budget exceeded",
                           static_cast<std::size_t>(replicates), 1u << 31);
  BranchingStats stats;
  stats.d = d;
  stats.k = k;
  stats.replicates = replicates;
  stats.z.resize(replicates * (k + 1));
  for (std::uint64_t rep = 0; rep < replicates; ++rep) {
    Rng rng(derive_seed(seed, rep));
    std::uint64_t zr = 1;
    stats.z[rep * (k + 1)] = 1;
    for (std::uint32_t gen = 1; gen <= k; ++gen) {
      zr = zr == 0 ? 0 : rng.poisson(d * static_cast<double>(zr));
      stats.z[rep * (k + 1) + gen] = zr;
    }
  }
  return stats;
}

// 2p <= w log n / log(d / ln 2); the ratio is base-independent.
struct DepthBudget {
  std::uint64_t n = 0;
  double d = 0.0;
  double w = 0.0;
  std::uint32_t two_p = 0;
  std::uint32_t p_quantum = 0;  // floor(two_p / 2)
};

inline DepthBudget depth_budget(std::uint64_t n, double d, double w) {
  if (n < 2) throw parameter_error("depth_budget: n must be >= 2");
  if (!(w > 0.0 && w < 1.0 + 1e-12)) throw parameter_error("depth_budget: need 0 < w <= 1");
  double denom = std::log(d / std::numbers::ln2);
  if (!(denom > 0.0))
    throw parameter_error("depth_budget: requires d > ln 2 so that log(d/ln 2) > 0");
  DepthBudget b;
  b.n = n;
  b.d = d;
  b.w = w;
  b.two_p = static_cast<std::uint32_t>(std::floor(w * std::log(static_cast<double>(n)) / denom));
  b.p_quantum = b.two_p / 2;
  return b;
}

// Per-trial neighborhood growth on sampled graphs versus the branching bound.
struct NeighborhoodTailReport {
  std::uint64_t n = 0;
  double d = 0.0;
  double w = 0.0;
  std::uint32_t two_p = 0;
  double s = 0.1;  // exponent knob of the B_k comparison bound d^{sk} (d/ln2)^k
  std::vector<std::uint64_t> max_ball_2p;  // per trial: max_i |B(i,2p)|
  std::vector<std::uint64_t> max_ball_p;   // per trial: max_i |B(i,p)|
  std::vector<double> a_grid;              // exceedance thresholds n^A
  std::vector<double> exceed_fraction_2p;  // fraction of trials with max >= n^A
  std::vector<double> exceed_fraction_p;   // versus n^{A/2}
  double branching_bound_bk = 0.0;         // d^{s*k} (d/ln2)^k at k = 2p
  double mean_max_ball_2p = 0.0;
  double mean_branching_bk = 0.0;          // mean simulated B_{2p} over replicates
};

inline NeighborhoodTailReport neighborhood_tail_experiment(
    std::uint64_t n, double d, double w, std::uint32_t trials, std::uint64_t seed,
    std::vector<double> a_grid = {0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99}, double s = 0.1,
    std::uint64_t branching_replicates = 2000) {
  DepthBudget budget = depth_budget(n, d, w);
  NeighborhoodTailReport report;
  report.n = n;
  report.d = d;
  report.w = w;
  report.two_p = budget.two_p;
  report.s = s;
  report.a_grid = std::move(a_grid);

  BallScratch scratch;
  std::vector<VertexId> verts;
  std::vector<std::uint32_t> dist;
  for (std::uint32_t trial = 0; trial < trials; ++trial) {
    EnsembleSpec spec{static_cast<VertexId>(n), d, GraphModel::FixedEdgeCount,
                      derive_seed(seed, trial)};
    Graph g = sample_graph(spec);
    std::uint64_t worst2p = 0, worstp = 0;
    for (VertexId v = 0; v < g.n(); ++v) {
      scratch.bfs(g, v, budget.two_p, verts, dist);
      worst2p = std::max<std::uint64_t>(worst2p, verts.size());
      std::uint64_t within_p = 0;
      for (std::uint32_t dd : dist)
        if (dd <= budget.two_p / 2) ++within_p;
      worstp = std::max(worstp, within_p);
    }
    report.max_ball_2p.push_back(worst2p);
    report.max_ball_p.push_back(worstp);
  }

  for (double a : report.a_grid) {
    double thr2p = std::pow(static_cast<double>(n), a);
    double thrp = std::pow(static_cast<double>(n), a / 2.0);
    std::uint64_t c2p = 0, cp = 0;
    for (std::uint64_t v : report.max_ball_2p)
      if (static_cast<double>(v) >= thr2p) ++c2p;
    for (std::uint64_t v : report.max_ball_p)
      if (static_cast<double>(v) >= thrp) ++cp;
    report.exceed_fraction_2p.push_back(static_cast<double>(c2p) / trials);
    report.exceed_fraction_p.push_back(static_cast<double>(cp) / trials);
  }

  KahanSum mean_ball;
  for (std::uint64_t v : report.max_ball_2p) mean_ball.add(static_cast<double>(v));
  report.mean_max_ball_2p = mean_ball.value() / std::max<std::size_t>(1, trials);

  report.branching_bound_bk =
      std::pow(d, s * budget.two_p) * std::pow(d / std::numbers::ln2, budget.two_p);
  if (budget.two_p >= 1) {
    BranchingStats bs =
        branching_simulate(d, budget.two_p, branching_replicates, derive_seed(seed, "bk"));
    KahanSum mean_bk;
    for (std::uint64_t rep = 0; rep < bs.replicates; ++rep)
      mean_bk.add(static_cast<double>(bs.cumulative(rep)));
    report.mean_branching_bk = mean_bk.value() / static_cast<double>(bs.replicates);
  }
  return report;
}

// Hamming-weight concentration, two modes. Sampling mode draws QAOA+ outputs
// and reports how |sigma| spreads around its mean; variance mode computes the
// exact pre-pruning Var(W) through the light-cone engine and compares it with
// the per-instance bound n * max_i |B(i,2p)|.
struct ConcentrationReport {
  std::uint64_t n = 0;
  std::size_t shots = 0;
  double mean_size = 0.0;
  double sample_variance = 0.0;
  std::vector<double> delta_grid;
  std::vector<double> exceed_fraction;  // P[| |sigma| - mean | >= delta n]
  // Variance mode:
  double variance_w = 0.0;
  std::uint64_t max_ball_2p = 0;
  double bound_n_times_ball = 0.0;
  bool variance_within_bound = false;
};

inline ConcentrationReport weight_concentration_sampling(
    const Graph& g, const QaoaParams& params, InitialState initial, std::size_t shots,
    std::uint64_t seed, std::vector<double> delta_grid = {0.01, 0.02, 0.05, 0.1, 0.2},
    const SimLimits& limits = {}) {
  ConcentrationReport report;
  report.n = g.n();
  report.shots = shots;
  report.delta_grid = std::move(delta_grid);
  std::vector<IndependentSet> outs = qaoa_plus_sample(g, params, initial, shots, seed, limits);
  KahanSum mean;
  for (const IndependentSet& s : outs) mean.add(static_cast<double>(s.size));
  report.mean_size = mean.value() / static_cast<double>(shots);
  KahanSum var;
  for (const IndependentSet& s : outs) {
    double x = static_cast<double>(s.size) - report.mean_size;
    var.add(x * x);
  }
  report.sample_variance = shots > 1 ? var.value() / static_cast<double>(shots - 1) : 0.0;
  for (double delta : report.delta_grid) {
    std::uint64_t c = 0;
    for (const IndependentSet& s : outs)
      if (std::abs(static_cast<double>(s.size) - report.mean_size) >=
          delta * static_cast<double>(g.n()))
        ++c;
    report.exceed_fraction.push_back(static_cast<double>(c) / static_cast<double>(shots));
  }
  return report;
}

inline ConcentrationReport weight_concentration_variance(const Graph& g,
                                                         const QaoaParams& params,
                                                         InitialState initial,
                                                         const SimLimits& limits = {}) {
  ConcentrationReport report;
  report.n = g.n();
  report.variance_w = hamming_variance(g, params, initial, limits);
  auto two_p = static_cast<std::uint32_t>(2 * params.depth());
  BallScratch scratch;
  std::vector<VertexId> verts;
  std::vector<std::uint32_t> dist;
  std::uint64_t worst = 0;
  for (VertexId v = 0; v < g.n(); ++v) {
    scratch.bfs(g, v, two_p, verts, dist);
    worst = std::max<std::uint64_t>(worst, verts.size());
  }
  report.max_ball_2p = worst;
  report.bound_n_times_ball = static_cast<double>(g.n()) * static_cast<double>(worst);
  report.variance_within_bound = report.variance_w <= report.bound_n_times_ball + 1e-9;
  return report;
}

// Exact count of minimal valid graphs on t labeled vertices. Every component
// is a star covering >= 2 vertices; a block of r >= 3 vertices has r center
// choices, a block of 2 is a single edge. Recurse on the block containing the
// highest-labeled vertex.
inline std::uint64_t count_minimal_valid_graphs(std::uint32_t t) {
  if (t > 9) throw parameter_error("count_minimal_valid_graphs: t must be <= 9");
  std::vector<std::uint64_t> v(t + 1, 0);
  v[0] = 1;
  if (t >= 1) v[1] = 0;
  // binomials C(i, j) for i < t
  std::vector<std::vector<std::uint64_t>> choose(t + 1, std::vector<std::uint64_t>(t + 1, 0));
  for (std::uint32_t i = 0; i <= t; ++i) {
    choose[i][0] = 1;
    for (std::uint32_t j = 1; j <= i; ++j)
      choose[i][j] = choose[i - 1][j - 1] + (j <= i - 1 ? choose[i - 1][j] : 0);
  }
  for (std::uint32_t tt = 2; tt <= t; ++tt) {
    std::uint64_t acc = 0;
    for (std::uint32_t r = 2; r <= tt; ++r) {
      std::uint64_t centers = r == 2 ? 1 : r;
      acc += choose[tt - 1][r - 1] * centers * v[tt - r];
    }
    v[tt] = acc;
  }
  return v[t];
}

}  // namespace qmis
