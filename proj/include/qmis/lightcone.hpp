#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "qmis/common.hpp"
#include "qmis/graph.hpp"
#include "qmis/statevector.hpp"

namespace qmis {

// Exact local expectation obtained from a reverse-light-cone simulation.
struct LocalExpectation {
  VertexId i = 0;
  VertexId j = kNoVertex;  // kNoVertex for single-vertex targets
  double value = 0.0;
  std::uint32_t cone_size = 0;  // qubits simulated
};

namespace detail {

// Depth-1 closed forms. Conjugating b_i (or b_i b_j) through one cost layer
// keeps only the edge phases incident to the observed vertices, so the cone
// collapses to leaves hanging off i (and j, with common leaves counted once).
// The leaf blocks enter through per-leaf overlap factors phi(m) raised to the
// leaf multiplicities; no statevector is materialized, which keeps huge-degree
// pair cones exact and cheap.
struct InitialAmps {
  Amplitude a0{1.0, 0.0};
  Amplitude a1{0.0, 0.0};
};

inline InitialAmps initial_amps(InitialState kind, double theta) {
  switch (kind) {
    case InitialState::AllZeros:
      return {Amplitude(1.0, 0.0), Amplitude(0.0, 0.0)};
    case InitialState::PlusState: {
      double r = 1.0 / std::sqrt(2.0);
      return {Amplitude(r, 0.0), Amplitude(r, 0.0)};
    }
    case InitialState::RotatedZeros:
      return {Amplitude(std::cos(theta), 0.0), Amplitude(0.0, -std::sin(theta))};
  }
  return {};
}

inline Amplitude complex_ipow(Amplitude base, std::size_t k) {
  Amplitude out(1.0, 0.0);
  Amplitude acc = base;
  while (k) {
    if (k & 1) out *= acc;
    acc *= acc;
    k >>= 1;
  }
  return out;
}

inline double p1_bit_expectation(std::size_t degree, double gamma, double beta,
                                 const InitialAmps& init) {
  Amplitude w0 = Amplitude(0.0, -std::sin(beta)) * init.a0;
  Amplitude w1 = Amplitude(std::cos(beta), 0.0) * init.a1;
  double q = std::norm(init.a0), r = std::norm(init.a1);
  Amplitude phi1 = Amplitude(q, 0.0) + r * std::polar(1.0, -gamma);
  Amplitude phik = complex_ipow(phi1, degree);
  Amplitude acc = std::conj(w0) * w0 + std::conj(w1) * w1 +
                  std::conj(w0) * w1 * phik + std::conj(w1) * w0 * std::conj(phik);
  return acc.real();
}

inline double p1_pair_expectation(bool edge_ij, std::size_t private_i, std::size_t private_j,
                                  std::size_t common, double gamma, double beta,
                                  const InitialAmps& init) {
  Amplitude r1[2] = {Amplitude(0.0, -std::sin(beta)), Amplitude(std::cos(beta), 0.0)};
  Amplitude a[2] = {init.a0, init.a1};
  Amplitude edge_phase = std::polar(1.0, -gamma);
  Amplitude w[2][2];
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) {
      w[x][y] = r1[x] * r1[y] * a[x] * a[y];
      if (edge_ij && x == 1 && y == 1) w[x][y] *= edge_phase;
    }
  double q = std::norm(init.a0), rr = std::norm(init.a1);
  // phi(m) = q + r e^{-i gamma m}; powers indexed by m + 2.
  Amplitude phi_k[5], phi_l[5], phi_c[5];
  for (int m = -2; m <= 2; ++m) {
    Amplitude phi = Amplitude(q, 0.0) + rr * std::polar(1.0, -gamma * m);
    phi_k[m + 2] = complex_ipow(phi, private_i);
    phi_l[m + 2] = complex_ipow(phi, private_j);
    phi_c[m + 2] = complex_ipow(phi, common);
  }
  Amplitude acc(0.0, 0.0);
  for (int x = 0; x < 2; ++x)
    for (int xp = 0; xp < 2; ++xp)
      for (int y = 0; y < 2; ++y)
        for (int yp = 0; yp < 2; ++yp)
          acc += std::conj(w[xp][yp]) * w[x][y] * phi_k[x - xp + 2] * phi_l[y - yp + 2] *
                 phi_c[(x + y) - (xp + yp) + 2];
  return acc.real();
}

inline double p1_bit_value(const Graph& g, const QaoaParams& params, InitialState initial,
                           VertexId i) {
  InitialAmps amps = initial_amps(initial, params.theta.value_or(0.0));
  return p1_bit_expectation(g.degree(i), params.gammas[0], params.betas[0], amps);
}

inline double p1_pair_value(const Graph& g, const QaoaParams& params, InitialState initial,
                            VertexId i, VertexId j) {
  auto ni = g.neighbors(i);
  auto nj = g.neighbors(j);
  std::size_t common = 0;
  std::size_t ai = 0, bj = 0;
  while (ai < ni.size() && bj < nj.size()) {
    if (ni[ai] == nj[bj]) {
      ++common;
      ++ai;
      ++bj;
    } else if (ni[ai] < nj[bj]) {
      ++ai;
    } else {
      ++bj;
    }
  }
  bool edge_ij = g.has_edge(i, j);
  std::size_t private_i = ni.size() - common - (edge_ij ? 1 : 0);
  std::size_t private_j = nj.size() - common - (edge_ij ? 1 : 0);
  InitialAmps amps = initial_amps(initial, params.theta.value_or(0.0));
  return p1_pair_expectation(edge_ij, private_i, private_j, common, params.gammas[0],
                             params.betas[0], amps);
}

// Simulate the induced subgraph on `members` (sorted) and return the state.
// The support of the depth-p Heisenberg observable lies inside the radius-p
// ball, and only edges internal to it can touch that support, so this is
// exact for observables on the ball's center(s).
inline PureState simulate_cone(const Graph& g, std::span<const VertexId> members,
                               const QaoaParams& params, InitialState initial,
                               const SimLimits& limits) {
  Graph sub = g.induced_subgraph(members);
  PureState state = run_qaoa(sub, params, initial, limits);
  // Relabel local qubits back to original vertex ids.
  for (std::size_t k = 0; k < state.labels.size(); ++k) state.labels[k] = members[k];
  return state;
}

inline std::size_t position_in(std::span<const VertexId> sorted_members, VertexId v) {
  auto it = std::lower_bound(sorted_members.begin(), sorted_members.end(), v);
  return static_cast<std::size_t>(it - sorted_members.begin());
}

inline void check_cone_budget(std::size_t cone, const SimLimits& limits,
                              const std::string& what) {
  if (cone > limits.max_qubits)
    throw size_limit_error("light cone for " + what + " needs " + std::to_string(cone) +
                               " qubits, Q_max=" + std::to_string(limits.max_qubits),
                           cone, limits.max_qubits);
}

}  // namespace detail

// <b_i> computed on the reverse light cone B(i,p), p = number of cost layers.
// Depth 1 goes through the exact leaf-counting closed form; deeper circuits
// simulate the induced subgraph.
inline LocalExpectation cone_expectation_bit(const Graph& g, const QaoaParams& params,
                                             InitialState initial, VertexId i,
                                             const SimLimits& limits = {}) {
  params.validate();
  auto radius = static_cast<std::uint32_t>(params.depth());
  LocalExpectation e;
  e.i = i;
  if (params.depth() == 1) {
    if (i >= g.n()) throw parameter_error("cone_expectation_bit: vertex out of range");
    e.value = detail::p1_bit_value(g, params, initial, i);
    e.cone_size = static_cast<std::uint32_t>(1 + g.degree(i));
    return e;
  }
  NeighborhoodQuery b = ball(g, i, radius);
  detail::check_cone_budget(b.members.size(), limits, "vertex " + std::to_string(i));
  PureState state = detail::simulate_cone(g, b.members, params, initial, limits);
  e.value = prob_bit_one(state, detail::position_in(b.members, i));
  e.cone_size = static_cast<std::uint32_t>(b.members.size());
  return e;
}

// <b_i b_j> on the union cone B(i,p) u B(j,p).
inline LocalExpectation cone_expectation_pair(const Graph& g, const QaoaParams& params,
                                              InitialState initial, VertexId i, VertexId j,
                                              const SimLimits& limits = {}) {
  params.validate();
  auto radius = static_cast<std::uint32_t>(params.depth());
  LocalExpectation e;
  e.i = i;
  e.j = j;
  if (params.depth() == 1) {
    if (i >= g.n() || j >= g.n() || i == j)
      throw parameter_error("cone_expectation_pair: bad vertex pair");
    e.value = detail::p1_pair_value(g, params, initial, i, j);
    e.cone_size = static_cast<std::uint32_t>(ball_union(g, i, j, 1).size());
    return e;
  }
  std::vector<VertexId> members = ball_union(g, i, j, radius);
  detail::check_cone_budget(members.size(), limits,
                            "pair (" + std::to_string(i) + "," + std::to_string(j) + ")");
  PureState state = detail::simulate_cone(g, members, params, initial, limits);
  e.value = prob_both_one(state, detail::position_in(members, i),
                          detail::position_in(members, j));
  e.cone_size = static_cast<std::uint32_t>(members.size());
  return e;
}

namespace detail {

// Ball sizes for every vertex at the given radius; cheap prescan used to
// reject oversized cones before any simulation starts.
inline void prescan_cones(const Graph& g, std::uint32_t radius, const SimLimits& limits,
                          const std::string& what) {
  BallScratch scratch;
  std::vector<VertexId> verts;
  std::vector<std::uint32_t> dist;
  std::size_t worst = 0;
  VertexId worst_vertex = 0;
  for (VertexId v = 0; v < g.n(); ++v) {
    scratch.bfs(g, v, radius, verts, dist);
    if (verts.size() > worst) {
      worst = verts.size();
      worst_vertex = v;
    }
  }
  if (worst > limits.max_qubits)
    throw size_limit_error(what + ": worst cone at vertex " + std::to_string(worst_vertex) +
                               " needs " + std::to_string(worst) + " qubits, Q_max=" +
                               std::to_string(limits.max_qubits),
                           worst, limits.max_qubits);
}

// All single-vertex expectations <b_i>, radius = depth.
inline std::vector<double> all_bit_expectations(const Graph& g, const QaoaParams& params,
                                                InitialState initial, const SimLimits& limits) {
  std::vector<double> out(g.n(), 0.0);
  if (params.depth() == 1) {
    for (VertexId v = 0; v < g.n(); ++v) out[v] = p1_bit_value(g, params, initial, v);
    return out;
  }
  BallScratch scratch;
  std::vector<VertexId> verts;
  std::vector<std::uint32_t> dist;
  auto radius = static_cast<std::uint32_t>(params.depth());
  for (VertexId v = 0; v < g.n(); ++v) {
    scratch.bfs(g, v, radius, verts, dist);
    std::sort(verts.begin(), verts.end());
    PureState state = simulate_cone(g, verts, params, initial, limits);
    out[v] = prob_bit_one(state, position_in(verts, v));
  }
  return out;
}

inline double pair_expectation_scratch(const Graph& g, const QaoaParams& params,
                                       InitialState initial, VertexId i, VertexId j,
                                       BallScratch& scratch, const SimLimits& limits) {
  if (params.depth() == 1) return p1_pair_value(g, params, initial, i, j);
  auto radius = static_cast<std::uint32_t>(params.depth());
  std::vector<VertexId> vi, vj;
  std::vector<std::uint32_t> di, dj;
  scratch.bfs(g, i, radius, vi, di);
  scratch.bfs(g, j, radius, vj, dj);
  std::sort(vi.begin(), vi.end());
  std::sort(vj.begin(), vj.end());
  std::vector<VertexId> members;
  std::set_union(vi.begin(), vi.end(), vj.begin(), vj.end(), std::back_inserter(members));
  check_cone_budget(members.size(), limits,
                    "pair (" + std::to_string(i) + "," + std::to_string(j) + ")");
  PureState state = simulate_cone(g, members, params, initial, limits);
  return prob_both_one(state, position_in(members, i), position_in(members, j));
}

}  // namespace detail

// <C_obj> = sum_i <b_i> - sum_{(i,j) in E} <b_i b_j>, all terms from cones.
inline double objective_expectation(const Graph& g, const QaoaParams& params,
                                    InitialState initial, const SimLimits& limits = {}) {
  params.validate();
  if (params.depth() > 1)
    detail::prescan_cones(g, static_cast<std::uint32_t>(params.depth()), limits,
                          "objective_expectation");
  std::vector<double> bits = detail::all_bit_expectations(g, params, initial, limits);
  std::vector<double> edge_terms(g.edge_count());
  BallScratch scratch;
  const auto& edges = g.canonical_edges();
  for (std::size_t e = 0; e < edges.size(); ++e)
    edge_terms[e] =
        detail::pair_expectation_scratch(g, params, initial, edges[e].u, edges[e].v, scratch,
                                         limits);
  return pairwise_sum(bits) - pairwise_sum(edge_terms);
}

// Var(W) = sum over pairs with dist <= 2p of cov(b_i, b_j); farther pairs are
// exactly zero and skipped.
inline double hamming_variance(const Graph& g, const QaoaParams& params, InitialState initial,
                               const SimLimits& limits = {}) {
  params.validate();
  auto p = static_cast<std::uint32_t>(params.depth());
  if (p > 1) detail::prescan_cones(g, p, limits, "hamming_variance");
  std::vector<double> bits = detail::all_bit_expectations(g, params, initial, limits);

  std::vector<double> contributions(g.n());
  BallScratch scratch;
  std::vector<VertexId> verts;
  std::vector<std::uint32_t> dist;
  for (VertexId i = 0; i < g.n(); ++i) {
    KahanSum local;
    local.add(bits[i] * (1.0 - bits[i]));  // diagonal term
    scratch.bfs(g, i, 2 * p, verts, dist);
    for (VertexId j : verts) {
      if (j <= i) continue;
      double pij = detail::pair_expectation_scratch(g, params, initial, i, j, scratch, limits);
      local.add(2.0 * (pij - bits[i] * bits[j]));
    }
    contributions[i] = local.value();
  }
  return pairwise_sum(contributions);
}

// Full-statevector check of the distant-qubit factorization: pairs farther
// than 2p apart must have zero covariance.
struct FactorizationReport {
  struct PairResidual {
    VertexId i;
    VertexId j;
    std::uint32_t distance;  // graph distance, max radius+1 if beyond
    double covariance;
  };
  std::vector<PairResidual> far_pairs;   // dist > 2p
  std::vector<PairResidual> near_pairs;  // dist <= 2p
  double max_far_residual = 0.0;
  double max_near_abs = 0.0;
};

// Pass explicit pairs to restrict the check; an empty list means all pairs.
inline FactorizationReport verify_factorization(
    const Graph& g, const QaoaParams& params, InitialState initial,
    std::span<const std::pair<VertexId, VertexId>> pairs = {},
    const SimLimits& limits = {}) {
  params.validate();
  detail::check_qubit_budget(g.n(), limits);
  PureState state = run_qaoa(g, params, initial, limits);
  std::vector<double> bit(g.n());
  for (VertexId v = 0; v < g.n(); ++v) bit[v] = prob_bit_one(state, v);

  auto two_p = static_cast<std::uint32_t>(2 * params.depth());
  FactorizationReport report;
  BallScratch scratch;
  std::vector<VertexId> verts;
  std::vector<std::uint32_t> dist;
  std::vector<std::uint32_t> dist_of(g.n());
  VertexId last_center = kNoVertex;
  auto check_pair = [&](VertexId i, VertexId j) {
    if (i != last_center) {
      scratch.bfs(g, i, two_p, verts, dist);
      std::fill(dist_of.begin(), dist_of.end(), two_p + 1);
      for (std::size_t k = 0; k < verts.size(); ++k) dist_of[verts[k]] = dist[k];
      last_center = i;
    }
    double cov = prob_both_one(state, i, j) - bit[i] * bit[j];
    FactorizationReport::PairResidual r{i, j, dist_of[j], cov};
    if (dist_of[j] > two_p) {
      report.far_pairs.push_back(r);
      report.max_far_residual = std::max(report.max_far_residual, std::abs(cov));
    } else {
      report.near_pairs.push_back(r);
      report.max_near_abs = std::max(report.max_near_abs, std::abs(cov));
    }
  };
  if (pairs.empty()) {
    for (VertexId i = 0; i < g.n(); ++i)
      for (VertexId j = i + 1; j < g.n(); ++j) check_pair(i, j);
  } else {
    for (auto [i, j] : pairs) {
      if (i >= g.n() || j >= g.n() || i == j)
        throw parameter_error("verify_factorization: bad pair");
      check_pair(std::min(i, j), std::max(i, j));
    }
  }
  return report;
}

}  // namespace qmis
