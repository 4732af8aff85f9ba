#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qmis/bitset.hpp"
#include "qmis/common.hpp"
#include "qmis/graph.hpp"
#include "qmis/rng.hpp"
#include "qmis/statevector.hpp"

namespace qmis {

// Record of one pruning pass: which edges were violated and what was removed.
struct PruneTrace {
  DynamicBitset input;
  std::uint32_t violated_edges = 0;  // N_E: violated edges in the input string
  std::vector<VertexId> removed;     // one coin per violated edge, canonical order
  DynamicBitset output;
};

// Randomized pruning: every edge violated by the input string flips its own
// fair coin and removes the chosen endpoint (removals are idempotent and
// commute). Each violated edge loses at least one endpoint, so the output is
// independent and |output| >= W(b) - C_IS(b). The coins are independent per
// edge; a vertex's fate depends only on bits within one graph step of it,
// which is what makes the pruning layer local.
inline std::pair<IndependentSet, PruneTrace> prune(const Graph& g, const DynamicBitset& b,
                                                   std::uint64_t seed) {
  PruneTrace trace;
  trace.input = b;
  DynamicBitset cur = b;
  Rng rng(seed);
  for (const Edge& e : g.canonical_edges()) {
    if (!(b.test(e.u) && b.test(e.v))) continue;
    ++trace.violated_edges;
    VertexId drop = rng.bernoulli(0.5) ? e.u : e.v;
    cur.reset(drop);
    trace.removed.push_back(drop);
  }
  trace.output = cur;
  return {IndependentSet::from_bits(std::move(cur)), std::move(trace)};
}

// QAOA+ sampling: run the quantum circuit at the given (quantum) depth, draw
// `count` computational-basis strings, prune each one. Depth accounting is
// explicit: callers pass quantum depth, the pruning layer is separate.
inline std::vector<IndependentSet> qaoa_plus_sample(const Graph& g, const QaoaParams& params,
                                                    InitialState initial, std::size_t count,
                                                    std::uint64_t seed,
                                                    const SimLimits& limits = {}) {
  PureState state = run_qaoa(g, params, initial, limits);
  std::vector<BitString> strings = sample_bitstrings(state, count, derive_seed(seed, "shots"));
  std::vector<IndependentSet> out;
  out.reserve(count);
  for (std::size_t shot = 0; shot < strings.size(); ++shot) {
    auto [set, trace] = prune(g, strings[shot].bits, derive_seed(seed, shot));
    out.push_back(std::move(set));
  }
  return out;
}

enum class PruneMode { QuantumOnly, WithPruning };

namespace detail {

// Enumerate all coin assignments of the violated edges; each leaf adds
// weight * (1/2)^{N_E} to the far-bit marginal bucket. Removal multiplicity is
// tracked per vertex because several edges may drop the same endpoint.
inline void enumerate_prune_paths(const DynamicBitset& input,
                                  std::span<const Edge> violated, std::size_t edge_idx,
                                  std::vector<std::uint32_t>& removed_count, double weight,
                                  std::span<const VertexId> far, std::vector<double>& dist,
                                  std::uint64_t& budget) {
  if (edge_idx == violated.size()) {
    if (budget == 0)
      throw enumeration_cap_error("far_marginal: pruning branch cap exceeded", 0);
    --budget;
    std::uint64_t bucket = 0;
    for (std::size_t t = 0; t < far.size(); ++t)
      if (input.test(far[t]) && removed_count[far[t]] == 0)
        bucket |= (std::uint64_t{1} << t);
    dist[bucket] += weight;
    return;
  }
  const Edge& e = violated[edge_idx];
  for (VertexId drop : {e.u, e.v}) {
    ++removed_count[drop];
    enumerate_prune_paths(input, violated, edge_idx + 1, removed_count, weight * 0.5, far,
                          dist, budget);
    --removed_count[drop];
  }
}

}  // namespace detail

// Exact marginal distribution over the bits in `far` (sorted vertex set). The
// returned vector has 2^|far| entries; bit t of the index is the value at
// far[t]. QuantumOnly marginalizes the measured string; WithPruning also
// enumerates the pruning randomness exactly.
inline std::vector<double> far_marginal_distribution(const Graph& g, const QaoaParams& params,
                                                     InitialState initial,
                                                     std::span<const VertexId> far,
                                                     PruneMode mode,
                                                     const SimLimits& limits = {},
                                                     std::uint64_t branch_cap = (1u << 20)) {
  if (far.size() > 26)
    throw size_limit_error("far_marginal: far set too large to tabulate", far.size(), 26);
  for (std::size_t t = 1; t < far.size(); ++t)
    if (far[t - 1] >= far[t]) throw parameter_error("far_marginal: far set must be sorted");
  for (VertexId v : far)
    if (v >= g.n()) throw parameter_error("far_marginal: far vertex out of range");
  PureState state = run_qaoa(g, params, initial, limits);

  std::vector<double> dist(std::size_t{1} << far.size(), 0.0);
  const std::uint64_t dim = state.amps.size();
  if (mode == PruneMode::QuantumOnly) {
    for (std::uint64_t idx = 0; idx < dim; ++idx) {
      double w = std::norm(state.amps[idx]);
      if (w == 0.0) continue;
      std::uint64_t bucket = 0;
      for (std::size_t t = 0; t < far.size(); ++t)
        if ((idx >> far[t]) & 1ULL) bucket |= (std::uint64_t{1} << t);
      dist[bucket] += w;
    }
    return dist;
  }

  std::uint64_t budget = branch_cap;
  DynamicBitset cur(g.n());
  std::vector<std::uint32_t> removed_count(g.n(), 0);
  std::vector<Edge> violated;
  for (std::uint64_t idx = 0; idx < dim; ++idx) {
    double w = std::norm(state.amps[idx]);
    if (w == 0.0) continue;
    for (VertexId v = 0; v < g.n(); ++v) {
      if ((idx >> v) & 1ULL)
        cur.set(v);
      else
        cur.reset(v);
    }
    violated.clear();
    for (const Edge& e : g.canonical_edges())
      if (cur.test(e.u) && cur.test(e.v)) violated.push_back(e);
    detail::enumerate_prune_paths(cur, violated, 0, removed_count, w, far, dist, budget);
  }
  return dist;
}

inline double far_marginal(const Graph& g, const QaoaParams& params, InitialState initial,
                           std::span<const VertexId> far, std::uint64_t b_far,
                           PruneMode mode, const SimLimits& limits = {},
                           std::uint64_t branch_cap = (1u << 20)) {
  auto dist = far_marginal_distribution(g, params, initial, far, mode, limits, branch_cap);
  if (b_far >= dist.size()) throw parameter_error("far_marginal: b_far out of range");
  return dist[b_far];
}

// Exact check that adding edge (i,j) leaves the output marginals on the far
// set unchanged. QuantumOnly uses far radius = quantum depth p; WithPruning
// uses p+1 because the pruning layer spreads influence one more graph step.
struct FarLemmaReport {
  double max_residual_quantum = 0.0;
  double max_residual_pruned = 0.0;
  // Negative control: far set from radius p-2 balls (empty balls at p=1, so
  // the "far" set wrongly includes the edge endpoints themselves). A generic
  // circuit shows a visible discrepancy here, confirming the test has power.
  double control_residual = 0.0;
  std::uint32_t far_size_quantum = 0;
  std::uint32_t far_size_pruned = 0;
  bool far_empty_quantum = false;
  bool far_empty_pruned = false;
};

inline FarLemmaReport verify_far_lemma(const Graph& g, VertexId i, VertexId j,
                                       const QaoaParams& params, InitialState initial,
                                       const SimLimits& limits = {},
                                       std::uint64_t branch_cap = (1u << 20)) {
  params.validate();
  if (i >= g.n() || j >= g.n() || i == j)
    throw parameter_error("verify_far_lemma: bad edge endpoints");
  std::vector<Edge> edges2 = g.edge_list();
  if (!g.has_edge(i, j)) edges2.push_back(make_edge(i, j));
  Graph g2(g.n(), std::move(edges2));

  auto p = static_cast<std::uint32_t>(params.depth());
  FarLemmaReport report;

  auto max_discrepancy = [&](std::span<const VertexId> far, PruneMode mode) {
    auto d1 = far_marginal_distribution(g, params, initial, far, mode, limits, branch_cap);
    auto d2 = far_marginal_distribution(g2, params, initial, far, mode, limits, branch_cap);
    double worst = 0.0;
    for (std::size_t k = 0; k < d1.size(); ++k)
      worst = std::max(worst, std::abs(d1[k] - d2[k]));
    return worst;
  };

  // The union of the two balls is the same in g and g2, so the far set is
  // unambiguous; compute it on the graph that has the edge.
  std::vector<VertexId> far_q = far_set(g2, i, j, p);
  report.far_size_quantum = static_cast<std::uint32_t>(far_q.size());
  report.far_empty_quantum = far_q.empty();
  if (!far_q.empty())
    report.max_residual_quantum = max_discrepancy(far_q, PruneMode::QuantumOnly);

  std::vector<VertexId> far_p = far_set(g2, i, j, p + 1);
  report.far_size_pruned = static_cast<std::uint32_t>(far_p.size());
  report.far_empty_pruned = far_p.empty();
  if (!far_p.empty())
    report.max_residual_pruned = max_discrepancy(far_p, PruneMode::WithPruning);

  if (p >= 1) {
    std::vector<VertexId> far_control;
    if (p >= 2) {
      far_control = far_set(g2, i, j, p - 2);
    } else {
      far_control.resize(g.n());
      for (VertexId v = 0; v < g.n(); ++v) far_control[v] = v;
    }
    if (!far_control.empty() && far_control.size() <= 20)
      report.control_residual = max_discrepancy(far_control, PruneMode::QuantumOnly);
  }
  return report;
}

}  // namespace qmis
