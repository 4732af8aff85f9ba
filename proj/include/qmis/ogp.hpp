#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qmis/bitset.hpp"
#include "qmis/common.hpp"
#include "qmis/graph.hpp"

namespace qmis {

// Threshold factor above which the overlap-gap machinery applies for large d.
inline const double kEtaStar = 0.5 + 0.5 / std::sqrt(2.0);  // 0.853...

namespace detail {

struct BitGraph {
  std::uint32_t n = 0;
  std::vector<std::uint64_t> adj;

  explicit BitGraph(const Graph& g) : n(g.n()), adj(g.n(), 0) {
    if (g.n() > 64)
      throw size_limit_error("exact enumeration needs n <= 64", g.n(), 64);
    for (const Edge& e : g.canonical_edges()) {
      adj[e.u] |= std::uint64_t{1} << e.v;
      adj[e.v] |= std::uint64_t{1} << e.u;
    }
  }

  std::uint64_t full_mask() const {
    return n == 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << n) - 1);
  }
};

inline void mis_branch(const BitGraph& bg, std::uint64_t candidates, std::uint64_t chosen,
                       std::uint32_t chosen_count, std::uint64_t& best_mask,
                       std::uint32_t& best_count) {
  // Degree-0 and degree-1 vertices can always be taken.
  for (;;) {
    bool reduced = false;
    std::uint64_t rest = candidates;
    while (rest) {
      std::uint32_t v = static_cast<std::uint32_t>(std::countr_zero(rest));
      rest &= rest - 1;
      std::uint64_t nb = bg.adj[v] & candidates;
      int deg = std::popcount(nb);
      if (deg <= 1) {
        chosen |= std::uint64_t{1} << v;
        ++chosen_count;
        candidates &= ~(nb | (std::uint64_t{1} << v));
        reduced = true;
        break;
      }
    }
    if (!reduced) break;
  }
  if (candidates == 0) {
    if (chosen_count > best_count) {
      best_count = chosen_count;
      best_mask = chosen;
    }
    return;
  }
  if (chosen_count + static_cast<std::uint32_t>(std::popcount(candidates)) <= best_count)
    return;

  // Branch on a max-degree candidate.
  std::uint64_t rest = candidates;
  std::uint32_t pivot = 0;
  int pivot_deg = -1;
  while (rest) {
    std::uint32_t v = static_cast<std::uint32_t>(std::countr_zero(rest));
    rest &= rest - 1;
    int deg = std::popcount(bg.adj[v] & candidates);
    if (deg > pivot_deg) {
      pivot_deg = deg;
      pivot = v;
    }
  }
  std::uint64_t pb = std::uint64_t{1} << pivot;
  mis_branch(bg, candidates & ~(bg.adj[pivot] | pb), chosen | pb, chosen_count + 1,
             best_mask, best_count);
  mis_branch(bg, candidates & ~pb, chosen, chosen_count, best_mask, best_count);
}

inline void enumerate_branch(const BitGraph& bg, std::uint64_t candidates,
                             std::uint64_t chosen, std::uint32_t chosen_count,
                             std::uint32_t threshold, std::vector<std::uint64_t>& out,
                             std::uint64_t cap) {
  if (chosen_count + static_cast<std::uint32_t>(std::popcount(candidates)) < threshold)
    return;
  if (candidates == 0) {
    if (chosen_count >= threshold) {
      if (out.size() >= cap)
        throw enumeration_cap_error("enumerate_eta_optimal: output cap " +
                                        std::to_string(cap) + " exceeded",
                                    out.size());
      out.push_back(chosen);
    }
    return;
  }
  std::uint32_t v = static_cast<std::uint32_t>(std::countr_zero(candidates));
  std::uint64_t vb = std::uint64_t{1} << v;
  enumerate_branch(bg, candidates & ~(bg.adj[v] | vb), chosen | vb, chosen_count + 1,
                   threshold, out, cap);
  enumerate_branch(bg, candidates & ~vb, chosen, chosen_count, threshold, out, cap);
}

inline DynamicBitset mask_to_bitset(std::uint64_t mask, std::uint32_t n) {
  DynamicBitset b(n);
  while (mask) {
    b.set(static_cast<std::size_t>(std::countr_zero(mask)));
    mask &= mask - 1;
  }
  return b;
}

}  // namespace detail

// A maximum independent set via exhaustive branch and bound (n <= 64).
inline IndependentSet exact_mis(const Graph& g) {
  detail::BitGraph bg(g);
  std::uint64_t best_mask = 0;
  std::uint32_t best_count = 0;
  detail::mis_branch(bg, bg.full_mask(), 0, 0, best_mask, best_count);
  IndependentSet out;
  out.vertices = detail::mask_to_bitset(best_mask, g.n());
  out.size = best_count;
  return out;
}

struct OgpConfig {
  double eta = 0.9;
  enum class AlphaRef { PerInstance, Asymptotic } alpha_mode = AlphaRef::PerInstance;
  double d = 0.0;  // used by Asymptotic mode: alpha = 2 ln d / d
  std::uint32_t tau_grid = 64;
  std::uint64_t enumeration_cap = 10'000'000;

  void validate() const {
    if (!(eta > 0.0 && eta < 1.0)) throw parameter_error("OgpConfig: eta must be in (0,1)");
    if (alpha_mode == AlphaRef::Asymptotic && !(d > 1.0))
      throw parameter_error("OgpConfig: asymptotic alpha needs d > 1");
  }
};

inline double asymptotic_alpha(double d) { return 2.0 * std::log(d) / d; }

// Smallest integer >= eta * alpha * n, robust to float fuzz.
inline std::uint32_t eta_threshold(double eta, double alpha, std::uint32_t n) {
  double v = eta * alpha * static_cast<double>(n);
  return static_cast<std::uint32_t>(std::max(0.0, std::ceil(v - 1e-9)));
}

// All independent sets of size >= the eta threshold, as bit masks (n <= 64).
inline std::vector<std::uint64_t> enumerate_eta_optimal_masks(const Graph& g,
                                                              std::uint32_t threshold,
                                                              std::uint64_t cap) {
  detail::BitGraph bg(g);
  std::vector<std::uint64_t> out;
  detail::enumerate_branch(bg, bg.full_mask(), 0, 0, threshold, out, cap);
  return out;
}

inline std::vector<IndependentSet> enumerate_eta_optimal(const Graph& g,
                                                         const OgpConfig& cfg) {
  cfg.validate();
  double alpha = cfg.alpha_mode == OgpConfig::AlphaRef::Asymptotic
                     ? asymptotic_alpha(cfg.d)
                     : static_cast<double>(exact_mis(g).size) / g.n();
  std::uint32_t threshold = eta_threshold(cfg.eta, alpha, g.n());
  std::vector<IndependentSet> out;
  for (std::uint64_t mask :
       enumerate_eta_optimal_masks(g, threshold, cfg.enumeration_cap)) {
    IndependentSet s;
    s.vertices = detail::mask_to_bitset(mask, g.n());
    s.size = static_cast<std::uint32_t>(std::popcount(mask));
    out.push_back(std::move(s));
  }
  return out;
}

// Cross-pair overlap histogram over integer intersection sizes; normalized bin
// edges are k/(n*alpha). Exact integer binning keeps O^Ab/O^Be queries sharp
// for any tau.
struct OverlapHistogram {
  std::uint32_t t1 = 0, t2 = 0;
  std::uint32_t n = 0;
  double alpha_ref = 0.0;
  double eta = 0.0;
  std::uint64_t count1 = 0, count2 = 0;        // |I(eta, G_t1)|, |I(eta, G_t2)|
  std::vector<std::uint64_t> counts;           // index = |s1 & s2|

  std::uint64_t total_pairs() const { return count1 * count2; }
  double normalized(std::uint32_t k) const {
    return static_cast<double>(k) / (static_cast<double>(n) * alpha_ref);
  }
  bool ab_nonempty(double tau) const {  // exists pair with overlap >= tau
    for (std::uint32_t k = 0; k < counts.size(); ++k)
      if (counts[k] > 0 && normalized(k) >= tau) return true;
    return false;
  }
  bool be_nonempty(double tau) const {  // exists pair with overlap <= tau
    for (std::uint32_t k = 0; k < counts.size(); ++k)
      if (counts[k] > 0 && normalized(k) <= tau) return true;
    return false;
  }
  // Largest zero-count run strictly between occupied values, as a normalized
  // interval; nullopt when the occupied values are contiguous.
  struct Gap {
    double lo = 0.0, hi = 0.0;
    std::uint32_t k_lo = 0, k_hi = 0;
  };
  std::optional<Gap> largest_interior_gap() const {
    std::optional<Gap> best;
    std::int64_t first = -1, last = -1;
    for (std::uint32_t k = 0; k < counts.size(); ++k)
      if (counts[k] > 0) {
        if (first < 0) first = k;
        last = k;
      }
    if (first < 0) return best;
    std::uint32_t run_start = 0;
    bool in_run = false;
    for (std::uint32_t k = static_cast<std::uint32_t>(first);
         k <= static_cast<std::uint32_t>(last); ++k) {
      if (counts[k] == 0) {
        if (!in_run) {
          in_run = true;
          run_start = k;
        }
      } else if (in_run) {
        in_run = false;
        std::uint32_t run_end = k - 1;
        if (!best || run_end - run_start > best->k_hi - best->k_lo)
          best = Gap{normalized(run_start), normalized(run_end + 1), run_start, run_end};
      }
    }
    return best;
  }
};

inline OverlapHistogram overlap_histogram_from_masks(std::span<const std::uint64_t> set1,
                                                     std::span<const std::uint64_t> set2,
                                                     std::uint32_t n, double alpha_ref,
                                                     double eta) {
  OverlapHistogram h;
  h.n = n;
  h.alpha_ref = alpha_ref;
  h.eta = eta;
  h.count1 = set1.size();
  h.count2 = set2.size();
  h.counts.assign(n + 1, 0);
  for (std::uint64_t a : set1)
    for (std::uint64_t b : set2)
      ++h.counts[static_cast<std::uint32_t>(std::popcount(a & b))];
  return h;
}

inline OverlapHistogram overlap_histogram(const Graph& g1, const Graph& g2,
                                          const OgpConfig& cfg) {
  cfg.validate();
  if (g1.n() != g2.n()) throw parameter_error("overlap_histogram: graphs must share n");
  double alpha;
  if (cfg.alpha_mode == OgpConfig::AlphaRef::Asymptotic) {
    alpha = asymptotic_alpha(cfg.d);
  } else {
    double a1 = static_cast<double>(exact_mis(g1).size) / g1.n();
    double a2 = static_cast<double>(exact_mis(g2).size) / g2.n();
    alpha = std::max(a1, a2);
  }
  std::uint32_t threshold = eta_threshold(cfg.eta, alpha, g1.n());
  auto s1 = enumerate_eta_optimal_masks(g1, threshold, cfg.enumeration_cap);
  auto s2 = enumerate_eta_optimal_masks(g2, threshold, cfg.enumeration_cap);
  return overlap_histogram_from_masks(s1, s2, g1.n(), alpha, cfg.eta);
}

// Interpolation-path overlap scan. All results are labeled exploratory: at
// desk scale the histograms are data, not asymptotic statements.
struct OgpScanReport {
  std::uint32_t n = 0;
  double eta = 0.0;
  double alpha_ref = 0.0;
  std::uint32_t threshold = 0;
  std::string label = "EXPLORATORY";
  std::vector<OverlapHistogram> pairs;
  // Endpoint (0,m) summary for the near-orthogonality claim.
  double endpoint_max_overlap = 0.0;
  bool endpoint_present = false;
};

inline OgpScanReport ogp_scan(const InterpolationPath& path, const OgpConfig& cfg,
                              std::vector<std::uint32_t> t_samples) {
  cfg.validate();
  auto m = static_cast<std::uint32_t>(path.steps());
  if (t_samples.empty()) throw parameter_error("ogp_scan: need at least one t sample");
  for (std::uint32_t t : t_samples)
    if (t > m) throw parameter_error("ogp_scan: t sample out of range");
  if (std::find(t_samples.begin(), t_samples.end(), 0u) == t_samples.end())
    t_samples.push_back(0);
  if (std::find(t_samples.begin(), t_samples.end(), m) == t_samples.end())
    t_samples.push_back(m);
  std::sort(t_samples.begin(), t_samples.end());
  t_samples.erase(std::unique(t_samples.begin(), t_samples.end()), t_samples.end());

  std::vector<Graph> graphs;
  graphs.reserve(t_samples.size());
  for (std::uint32_t t : t_samples) graphs.push_back(path.graph_at(t));

  double alpha;
  if (cfg.alpha_mode == OgpConfig::AlphaRef::Asymptotic) {
    alpha = asymptotic_alpha(cfg.d);
  } else {
    alpha = 0.0;
    for (const Graph& g : graphs)
      alpha = std::max(alpha, static_cast<double>(exact_mis(g).size) / g.n());
  }

  OgpScanReport report;
  report.n = path.g0().n();
  report.eta = cfg.eta;
  report.alpha_ref = alpha;
  report.threshold = eta_threshold(cfg.eta, alpha, report.n);

  std::vector<std::vector<std::uint64_t>> families;
  families.reserve(graphs.size());
  for (const Graph& g : graphs)
    families.push_back(
        enumerate_eta_optimal_masks(g, report.threshold, cfg.enumeration_cap));

  for (std::size_t a = 0; a < t_samples.size(); ++a)
    for (std::size_t b = a; b < t_samples.size(); ++b) {
      OverlapHistogram h = overlap_histogram_from_masks(families[a], families[b], report.n,
                                                        alpha, cfg.eta);
      h.t1 = t_samples[a];
      h.t2 = t_samples[b];
      if (h.t1 == 0 && h.t2 == m) {
        report.endpoint_present = true;
        for (std::uint32_t k = 0; k < h.counts.size(); ++k)
          if (h.counts[k] > 0)
            report.endpoint_max_overlap = std::max(report.endpoint_max_overlap,
                                                   h.normalized(k));
      }
      report.pairs.push_back(std::move(h));
    }
  return report;
}

inline void write_overlap_csv(std::span<const OverlapHistogram> rows,
                              const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw io_error("cannot open for writing: " + path);
  out << "t1,t2,bin_lo,bin_hi,count\n";
  out.precision(17);
  for (const OverlapHistogram& h : rows) {
    std::uint32_t top = 0;
    for (std::uint32_t k = 0; k < h.counts.size(); ++k)
      if (h.counts[k] > 0) top = k;
    for (std::uint32_t k = 0; k <= top; ++k)
      out << h.t1 << ',' << h.t2 << ',' << h.normalized(k) << ',' << h.normalized(k + 1)
          << ',' << h.counts[k] << '\n';
  }
  if (!out) throw io_error("write failed: " + path);
}

}  // namespace qmis
