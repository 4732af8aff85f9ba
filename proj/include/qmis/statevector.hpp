#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qmis/bitset.hpp"
#include "qmis/common.hpp"
#include "qmis/graph.hpp"
#include "qmis/rng.hpp"

namespace qmis {

using Amplitude = std::complex<double>;

struct SimLimits {
  std::size_t max_qubits = 26;  // Q_max
};

// QAOA angle schedule. `theta` is the optional initial rotation used by the
// rotated-zeros start (the "half layer" of the three-angle circuit).
struct QaoaParams {
  std::vector<double> gammas;
  std::vector<double> betas;
  std::optional<double> theta;

  std::size_t depth() const { return gammas.size(); }

  void validate() const {
    if (gammas.size() != betas.size())
      throw parameter_error("QaoaParams: gammas and betas must have equal length");
  }
};

enum class InitialState { AllZeros, PlusState, RotatedZeros };

enum class CostKind { HammingWeight, IndependentSetPenalty, Objective };

// Diagonal cost over a graph's vertices: W, C_IS, or C_obj = W - C_IS.
struct CostModel {
  CostKind kind = CostKind::Objective;
  const Graph* graph = nullptr;  // may be null for HammingWeight

  static CostModel hamming_weight() { return {CostKind::HammingWeight, nullptr}; }
  static CostModel penalty(const Graph& g) { return {CostKind::IndependentSetPenalty, &g}; }
  static CostModel objective(const Graph& g) { return {CostKind::Objective, &g}; }
};

// Dense amplitude vector over labeled qubits. Bit k of a basis index is the
// value of qubit k, i.e. of vertex labels[k] (little-endian).
struct PureState {
  std::vector<VertexId> labels;
  std::vector<Amplitude> amps;

  std::size_t num_qubits() const { return labels.size(); }

  double norm_sq() const {
    KahanSum s;
    for (const Amplitude& a : amps) s.add(std::norm(a));
    return s.value();
  }

  std::size_t position_of(VertexId v) const {
    for (std::size_t k = 0; k < labels.size(); ++k)
      if (labels[k] == v) return k;
    throw parameter_error("PureState: vertex " + std::to_string(v) + " not a qubit label");
  }
};

namespace detail {

inline void check_qubit_budget(std::size_t q, const SimLimits& limits) {
  if (q > limits.max_qubits)
    throw size_limit_error("statevector: " + std::to_string(q) +
                               " qubits exceeds Q_max=" + std::to_string(limits.max_qubits),
                           q, limits.max_qubits);
}

// Edges of the cost graph mapped to qubit positions of a state. Every edge
// must have both endpoints among the state's labels.
inline std::vector<std::pair<std::size_t, std::size_t>> map_cost_edges(
    const PureState& state, const Graph& g) {
  std::vector<std::size_t> pos(g.n(), std::numeric_limits<std::size_t>::max());
  for (std::size_t k = 0; k < state.labels.size(); ++k) {
    if (state.labels[k] >= g.n())
      throw parameter_error("cost/state label mismatch: label " +
                            std::to_string(state.labels[k]) + " not in graph");
    pos[state.labels[k]] = k;
  }
  std::vector<std::pair<std::size_t, std::size_t>> mapped;
  mapped.reserve(g.edge_count());
  for (const Edge& e : g.canonical_edges()) {
    std::size_t a = pos[e.u], b = pos[e.v];
    bool ha = a != std::numeric_limits<std::size_t>::max();
    bool hb = b != std::numeric_limits<std::size_t>::max();
    if (ha != hb)
      throw parameter_error("cost/state label mismatch: edge (" + std::to_string(e.u) + "," +
                            std::to_string(e.v) + ") crosses the state's qubit set");
    if (ha && hb) mapped.emplace_back(a, b);
  }
  if (mapped.size() != g.edge_count())
    throw parameter_error("cost/state label mismatch: cost graph has edges outside the state");
  return mapped;
}

inline long long cost_value(CostKind kind, std::uint64_t idx,
                            const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
  long long w = std::popcount(idx);
  if (kind == CostKind::HammingWeight) return w;
  long long pen = 0;
  for (const auto& [a, b] : edges)
    if (((idx >> a) & 1ULL) && ((idx >> b) & 1ULL)) ++pen;
  if (kind == CostKind::IndependentSetPenalty) return pen;
  return w - pen;
}

}  // namespace detail

inline PureState prepare_initial(std::vector<VertexId> labels, InitialState kind,
                                 double theta = 0.0, const SimLimits& limits = {}) {
  detail::check_qubit_budget(labels.size(), limits);
  PureState s;
  s.labels = std::move(labels);
  std::size_t dim = std::size_t{1} << s.num_qubits();
  s.amps.assign(dim, Amplitude(0.0, 0.0));
  switch (kind) {
    case InitialState::AllZeros:
      s.amps[0] = Amplitude(1.0, 0.0);
      break;
    case InitialState::PlusState: {
      double a = 1.0 / std::sqrt(static_cast<double>(dim));
      std::fill(s.amps.begin(), s.amps.end(), Amplitude(a, 0.0));
      break;
    }
    case InitialState::RotatedZeros: {
      // Product of exp(-i*theta*X)|0> = cos(theta)|0> - i sin(theta)|1>.
      Amplitude a0(std::cos(theta), 0.0);
      Amplitude a1(0.0, -std::sin(theta));
      s.amps[0] = Amplitude(1.0, 0.0);
      for (std::size_t k = 0; k < s.num_qubits(); ++k) {
        std::uint64_t bit = std::uint64_t{1} << k;
        for (std::uint64_t idx = 0; idx < (std::uint64_t{1} << k); ++idx) {
          s.amps[idx | bit] = s.amps[idx] * a1;
          s.amps[idx] *= a0;
        }
      }
      break;
    }
  }
  return s;
}

// Multiply each basis amplitude by exp(-i*gamma*cost(b)). Norm-preserving.
inline void apply_cost_phase(PureState& state, const CostModel& cost, double gamma) {
  if (cost.kind != CostKind::HammingWeight && cost.graph == nullptr)
    throw parameter_error("apply_cost_phase: cost model needs a graph");
  const std::uint64_t dim = state.amps.size();
  if (cost.kind == CostKind::HammingWeight || cost.kind == CostKind::Objective) {
    Amplitude ph = std::polar(1.0, -gamma);
    for (std::size_t k = 0; k < state.num_qubits(); ++k) {
      std::uint64_t bit = std::uint64_t{1} << k;
      for (std::uint64_t idx = 0; idx < dim; ++idx)
        if (idx & bit) state.amps[idx] *= ph;
    }
  }
  if (cost.kind == CostKind::IndependentSetPenalty || cost.kind == CostKind::Objective) {
    // C_obj = W - C_IS, so the penalty phase flips sign under Objective.
    double sign = cost.kind == CostKind::Objective ? 1.0 : -1.0;
    Amplitude ph = std::polar(1.0, sign * gamma);
    for (const auto& [a, b] : detail::map_cost_edges(state, *cost.graph)) {
      std::uint64_t mask = (std::uint64_t{1} << a) | (std::uint64_t{1} << b);
      for (std::uint64_t idx = 0; idx < dim; ++idx)
        if ((idx & mask) == mask) state.amps[idx] *= ph;
    }
  }
}

// Product of per-qubit rotations exp(-i*beta*X_j) over all qubits.
inline void apply_mixer(PureState& state, double beta) {
  const double c = std::cos(beta);
  const double s = std::sin(beta);
  const Amplitude mis(0.0, -s);
  const std::uint64_t dim = state.amps.size();
  for (std::size_t k = 0; k < state.num_qubits(); ++k) {
    const std::uint64_t bit = std::uint64_t{1} << k;
    for (std::uint64_t base = 0; base < dim; ++base) {
      if (base & bit) continue;
      Amplitude a0 = state.amps[base];
      Amplitude a1 = state.amps[base | bit];
      state.amps[base] = c * a0 + mis * a1;
      state.amps[base | bit] = mis * a0 + c * a1;
    }
  }
}

// Alternating phase/mixer layers applied to the chosen product start:
// state = U(B,beta_p) U(C,gamma_p) ... U(B,beta_1) U(C,gamma_1) |s>.
inline PureState run_qaoa(const Graph& g, const QaoaParams& params, InitialState initial,
                          const SimLimits& limits = {}) {
  params.validate();
  if (initial == InitialState::RotatedZeros && !params.theta.has_value())
    throw parameter_error("run_qaoa: RotatedZeros start requires theta");
  std::vector<VertexId> labels(g.n());
  for (VertexId v = 0; v < g.n(); ++v) labels[v] = v;
  PureState state =
      prepare_initial(std::move(labels), initial, params.theta.value_or(0.0), limits);
  CostModel phase_cost = CostModel::penalty(g);
  for (std::size_t layer = 0; layer < params.depth(); ++layer) {
    apply_cost_phase(state, phase_cost, params.gammas[layer]);
    apply_mixer(state, params.betas[layer]);
    double drift = std::abs(state.norm_sq() - 1.0);
    if (drift > 1e-10)
      throw error("run_qaoa: norm drift " + std::to_string(drift) + " after layer " +
                  std::to_string(layer + 1));
  }
  return state;
}

inline double expectation(const PureState& state, const CostModel& cost) {
  if (cost.kind != CostKind::HammingWeight && cost.graph == nullptr)
    throw parameter_error("expectation: cost model needs a graph");
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  if (cost.graph != nullptr) edges = detail::map_cost_edges(state, *cost.graph);
  KahanSum acc;
  for (std::uint64_t idx = 0; idx < state.amps.size(); ++idx) {
    double p = std::norm(state.amps[idx]);
    if (p == 0.0) continue;
    acc.add(p * static_cast<double>(detail::cost_value(cost.kind, idx, edges)));
  }
  return acc.value();
}

// Marginal P(qubit at `pos` measures 1).
inline double prob_bit_one(const PureState& state, std::size_t pos) {
  const std::uint64_t bit = std::uint64_t{1} << pos;
  KahanSum acc;
  for (std::uint64_t idx = 0; idx < state.amps.size(); ++idx)
    if (idx & bit) acc.add(std::norm(state.amps[idx]));
  return acc.value();
}

inline double prob_both_one(const PureState& state, std::size_t pos_a, std::size_t pos_b) {
  const std::uint64_t mask = (std::uint64_t{1} << pos_a) | (std::uint64_t{1} << pos_b);
  KahanSum acc;
  for (std::uint64_t idx = 0; idx < state.amps.size(); ++idx)
    if ((idx & mask) == mask) acc.add(std::norm(state.amps[idx]));
  return acc.value();
}

// I.i.d. computational-basis samples, one BitString per shot. Bits are placed
// at the state's vertex labels; the string length is max(label)+1.
inline std::vector<BitString> sample_bitstrings(const PureState& state, std::size_t count,
                                                std::uint64_t seed) {
  std::vector<double> cdf(state.amps.size() + 1, 0.0);
  KahanSum acc;
  for (std::size_t i = 0; i < state.amps.size(); ++i) {
    acc.add(std::norm(state.amps[i]));
    cdf[i + 1] = acc.value();
  }
  double total = cdf.back();
  if (total <= 0.0) throw parameter_error("sample_bitstrings: zero-norm state");

  VertexId width = 0;
  for (VertexId v : state.labels) width = std::max(width, v);
  ++width;

  Rng rng(seed);
  std::vector<BitString> out;
  out.reserve(count);
  for (std::size_t shot = 0; shot < count; ++shot) {
    double u = rng.uniform01() * total;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    std::uint64_t idx = it == cdf.begin()
                            ? 0
                            : static_cast<std::uint64_t>(it - cdf.begin()) - 1;
    if (idx >= state.amps.size()) idx = state.amps.size() - 1;
    DynamicBitset bits(width);
    for (std::size_t k = 0; k < state.num_qubits(); ++k)
      if ((idx >> k) & 1ULL) bits.set(state.labels[k]);
    out.push_back(BitString::from_bits(std::move(bits)));
  }
  return out;
}

}  // namespace qmis
