#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qmis/common.hpp"
#include "qmis/simplex.hpp"

namespace qmis {

// Graph-ensemble average of the three-angle (p=1.5) QAOA objective per vertex,
// in the n->infinity limit of the Bernoulli(d/n) edge model. Vertex degrees
// become Poisson(d) and every light cone is a star, so both the single-vertex
// and the edge term reduce to closed forms in the leaf count; the ensemble
// objective is a Poisson-weighted sum truncated at a degree cut K.

struct P15Config {
  double d = 3.0;
  std::uint32_t degree_cut = 0;  // 0 = smallest K with Poisson tail < tail_target
  double tail_target = 1e-10;
  double theta_lo = 0.0, theta_hi = std::numbers::pi / 2;
  double beta_lo = 0.0, beta_hi = std::numbers::pi / 2;
  double gamma_lo = 0.0, gamma_hi = std::numbers::pi;
  std::size_t grid_theta = 13, grid_beta = 13, grid_gamma = 17;
  std::size_t starts = 20;
  SimplexOptions simplex{1e-10, 4000};
  std::optional<double> gamma_fixed;  // restrict the phase angle (e.g. 0)

  void validate() const {
    if (!(d > 0.0)) throw parameter_error("P15Config: d must be positive");
    if (!(tail_target > 0.0)) throw parameter_error("P15Config: tail_target must be positive");
    if (starts == 0) throw parameter_error("P15Config: starts must be positive");
  }
};

struct P15Result {
  double value_per_n = 0.0;
  double theta = 0.0, gamma = 0.0, beta = 0.0;
  std::uint32_t degree_cut = 0;
  double tail_mass = 0.0;
  bool boundary_argmax = false;
  std::uint32_t vertex_subcircuit = 0;  // largest star simulated implicitly: K+1
  std::uint32_t edge_subcircuit = 0;    // largest double star: 2K+2
};

namespace detail {

// Leaf-overlap factor of the rotated star: <L | L_gamma> per leaf.
inline std::complex<double> leaf_overlap(double theta, double gamma) {
  double c2 = std::cos(theta) * std::cos(theta);
  double s2 = std::sin(theta) * std::sin(theta);
  return std::complex<double>(c2, 0.0) + s2 * std::polar(1.0, -gamma);
}

struct PairWeights {
  std::complex<double> w[2][2];
};

inline PairWeights edge_pair_weights(double theta, double gamma, double beta) {
  double c = std::cos(theta), s = std::sin(theta);
  double cb = std::cos(beta), sb = std::sin(beta);
  PairWeights pw;
  pw.w[0][0] = {-sb * sb * c * c, 0.0};
  pw.w[0][1] = {-sb * cb * c * s, 0.0};
  pw.w[1][0] = pw.w[0][1];
  pw.w[1][1] = -cb * cb * s * s * std::polar(1.0, -gamma);
  return pw;
}

// Quadratic form sum_{a,a',b,b'} conj(w[a'][b']) w[a][b] A[a'][a] B[b'][b]
// with A, B the 2x2 Gram matrices of the two leaf blocks.
inline double edge_quadratic_form(const PairWeights& pw, const std::complex<double> A[2][2],
                                  const std::complex<double> B[2][2]) {
  std::complex<double> acc(0.0, 0.0);
  for (int a = 0; a < 2; ++a)
    for (int ap = 0; ap < 2; ++ap)
      for (int b = 0; b < 2; ++b)
        for (int bp = 0; bp < 2; ++bp)
          acc += std::conj(pw.w[ap][bp]) * pw.w[a][b] * A[ap][a] * B[bp][b];
  return acc.real();
}

inline void gram_from_overlap(std::complex<double> overlap, double diag,
                              std::complex<double> out[2][2]) {
  out[0][0] = {diag, 0.0};
  out[1][1] = {diag, 0.0};
  out[0][1] = overlap;
  out[1][0] = std::conj(overlap);
}

// Poisson(d) pmf values 0..k_max by stable recurrence.
inline std::vector<double> poisson_pmf(double d, std::uint32_t k_max) {
  std::vector<double> pmf(k_max + 1);
  pmf[0] = std::exp(-d);
  for (std::uint32_t k = 0; k < k_max; ++k)
    pmf[k + 1] = pmf[k] * d / static_cast<double>(k + 1);
  return pmf;
}

}  // namespace detail

// Smallest K whose Poisson(d) tail mass beyond K is below `tail_target`.
inline std::uint32_t choose_degree_cut(double d, double tail_target = 1e-10) {
  auto k_max = static_cast<std::uint32_t>(d + 20.0 * std::sqrt(d) + 80.0);
  std::vector<double> pmf = detail::poisson_pmf(d, k_max);
  std::vector<double> suffix(k_max + 2, 0.0);
  for (std::uint32_t k = k_max + 1; k-- > 0;) suffix[k] = suffix[k + 1] + pmf[k];
  for (std::uint32_t K = 0; K <= k_max; ++K)
    if (suffix[K + 1] < tail_target) return K;
  throw parameter_error("choose_degree_cut: no K found; raise the scan ceiling");
}

inline double poisson_tail_mass(double d, std::uint32_t K) {
  auto k_max = static_cast<std::uint32_t>(std::max<double>(K, d + 20.0 * std::sqrt(d)) + 200);
  std::vector<double> pmf = detail::poisson_pmf(d, k_max);
  double tail = 0.0;
  for (std::uint32_t k = k_max; k > K; --k) tail += pmf[k];
  return tail;
}

// Exact <b_0> for the center of a star with k leaves under the three-angle
// circuit U(B,beta) U(C_IS,gamma) U(B,theta) |0>.
inline double p15_vertex_term(std::uint64_t k, double theta, double gamma, double beta) {
  double c = std::cos(theta), s = std::sin(theta);
  double cb = std::cos(beta), sb = std::sin(beta);
  std::complex<double> gk(1.0, 0.0);
  std::complex<double> g = detail::leaf_overlap(theta, gamma);
  for (std::uint64_t t = 0; t < k; ++t) gk *= g;
  return sb * sb * c * c + cb * cb * s * s + 2.0 * sb * cb * c * s * gk.real();
}

// Exact <b_i b_j> on the double star: edge (i,j) with k extra leaves on i and
// l extra leaves on j, same circuit.
inline double p15_edge_term(std::uint64_t k, std::uint64_t l, double theta, double gamma,
                            double beta) {
  std::complex<double> g = detail::leaf_overlap(theta, gamma);
  std::complex<double> gk(1.0, 0.0), gl(1.0, 0.0);
  for (std::uint64_t t = 0; t < k; ++t) gk *= g;
  for (std::uint64_t t = 0; t < l; ++t) gl *= g;
  detail::PairWeights pw = detail::edge_pair_weights(theta, gamma, beta);
  std::complex<double> A[2][2], B[2][2];
  detail::gram_from_overlap(gk, 1.0, A);
  detail::gram_from_overlap(gl, 1.0, B);
  return detail::edge_quadratic_form(pw, A, B);
}

// Truncated ensemble objective
//   sum_k Pois_d(k) vertex(k) - (d/2) sum_{k,l} Pois_d(k) Pois_d(l) edge(k,l)
// evaluated with the degree sums collapsed through the shared Gram structure;
// identical to the explicit double sum up to float rounding.
inline double p15_ensemble_objective(double theta, double gamma, double beta,
                                     const P15Config& cfg) {
  cfg.validate();
  std::uint32_t K = cfg.degree_cut ? cfg.degree_cut : choose_degree_cut(cfg.d, cfg.tail_target);
  std::vector<double> pmf = detail::poisson_pmf(cfg.d, K);

  double c = std::cos(theta), s = std::sin(theta);
  double cb = std::cos(beta), sb = std::sin(beta);
  std::complex<double> g = detail::leaf_overlap(theta, gamma);

  double mass = 0.0;
  std::complex<double> mean_pow(0.0, 0.0);
  double mean_re = 0.0;
  std::complex<double> gk(1.0, 0.0);
  for (std::uint32_t k = 0; k <= K; ++k) {
    mass += pmf[k];
    mean_pow += pmf[k] * gk;
    mean_re += pmf[k] * gk.real();
    gk *= g;
  }

  double vertex_sum =
      mass * (sb * sb * c * c + cb * cb * s * s) + 2.0 * sb * cb * c * s * mean_re;

  detail::PairWeights pw = detail::edge_pair_weights(theta, gamma, beta);
  std::complex<double> Abar[2][2];
  detail::gram_from_overlap(mean_pow, mass, Abar);
  double edge_sum = detail::edge_quadratic_form(pw, Abar, Abar);

  return vertex_sum - (cfg.d / 2.0) * edge_sum;
}

inline P15Result p15_optimize(const P15Config& cfg) {
  cfg.validate();
  P15Config working = cfg;
  if (working.degree_cut == 0)
    working.degree_cut = choose_degree_cut(cfg.d, cfg.tail_target);

  const bool restricted = cfg.gamma_fixed.has_value();
  const double gamma_fixed = cfg.gamma_fixed.value_or(0.0);

  auto objective3 = [&](const std::vector<double>& x) {
    return p15_ensemble_objective(x[0], restricted ? gamma_fixed : x[1],
                                  restricted ? x[1] : x[2], working);
  };

  // Coarse grid; keep the best `starts` cells as refinement seeds.
  struct Seed {
    double value;
    std::vector<double> x;
  };
  std::vector<Seed> seeds;
  auto grid_points = [&](double lo, double hi, std::size_t count) {
    std::vector<double> pts(count);
    for (std::size_t i = 0; i < count; ++i)
      pts[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
    return pts;
  };
  std::vector<double> thetas = grid_points(cfg.theta_lo, cfg.theta_hi, cfg.grid_theta);
  std::vector<double> betas = grid_points(cfg.beta_lo, cfg.beta_hi, cfg.grid_beta);
  std::vector<double> gammas =
      restricted ? std::vector<double>{gamma_fixed}
                 : grid_points(cfg.gamma_lo, cfg.gamma_hi, cfg.grid_gamma);
  for (double th : thetas)
    for (double ga : gammas)
      for (double be : betas) {
        std::vector<double> x =
            restricted ? std::vector<double>{th, be} : std::vector<double>{th, ga, be};
        seeds.push_back({objective3(x), std::move(x)});
      }
  // Analytic gamma=0 seed: sin(theta+beta) = 1/sqrt(d) attains 1/(2d) exactly,
  // so the optimum can never fall below that baseline.
  if (cfg.d >= 1.0 && (!restricted || gamma_fixed == 0.0)) {
    double th = std::asin(1.0 / std::sqrt(cfg.d));
    th = std::clamp(th, cfg.theta_lo, cfg.theta_hi);
    std::vector<double> x =
        restricted ? std::vector<double>{th, 0.0} : std::vector<double>{th, 0.0, 0.0};
    seeds.push_back({objective3(x), std::move(x)});
  }
  std::sort(seeds.begin(), seeds.end(),
            [](const Seed& a, const Seed& b) { return a.value > b.value; });
  if (seeds.size() > cfg.starts) seeds.resize(cfg.starts);

  std::vector<double> lo = restricted ? std::vector<double>{cfg.theta_lo, cfg.beta_lo}
                                      : std::vector<double>{cfg.theta_lo, cfg.gamma_lo,
                                                            cfg.beta_lo};
  std::vector<double> hi = restricted ? std::vector<double>{cfg.theta_hi, cfg.beta_hi}
                                      : std::vector<double>{cfg.theta_hi, cfg.gamma_hi,
                                                            cfg.beta_hi};
  std::vector<double> step(lo.size());
  for (std::size_t k = 0; k < step.size(); ++k) step[k] = (hi[k] - lo[k]) / 24.0;

  SimplexResult best;
  best.value = -1e300;
  for (const Seed& seed : seeds) {
    SimplexResult r = nelder_mead_maximize(objective3, seed.x, step, lo, hi, cfg.simplex);
    if (r.value > best.value) best = r;
  }

  P15Result out;
  out.value_per_n = best.value;
  out.theta = best.x[0];
  out.gamma = restricted ? gamma_fixed : best.x[1];
  out.beta = restricted ? best.x[1] : best.x[2];
  out.degree_cut = working.degree_cut;
  out.tail_mass = poisson_tail_mass(cfg.d, working.degree_cut);
  out.vertex_subcircuit = working.degree_cut + 1;
  out.edge_subcircuit = 2 * working.degree_cut + 2;
  // gamma sits at 0 for the symmetric optimum, so that edge does not count as
  // a box bind; any other coordinate pinned to its box edge gets flagged.
  const double edge_tol = 1e-6;
  auto at_edge = [&](double x, double xlo, double xhi, bool ignore_lo) {
    return (!ignore_lo && x < xlo + edge_tol) || x > xhi - edge_tol;
  };
  out.boundary_argmax =
      at_edge(out.theta, cfg.theta_lo, cfg.theta_hi, false) ||
      at_edge(out.beta, cfg.beta_lo, cfg.beta_hi, false) ||
      (!restricted && at_edge(out.gamma, cfg.gamma_lo, cfg.gamma_hi, cfg.gamma_lo == 0.0));
  return out;
}

struct P15ScanRow {
  double d = 0.0;
  double value_per_n = 0.0;
  double d_value = 0.0;
  double theta = 0.0, gamma = 0.0, beta = 0.0;
  std::uint32_t degree_cut = 0;
  double tail_mass = 0.0;
};

inline std::vector<P15ScanRow> p15_large_d_scan(std::span<const double> ds,
                                                const P15Config& base = {}) {
  std::vector<P15ScanRow> rows;
  double prev = -1.0;
  for (double d : ds) {
    if (d <= prev) throw parameter_error("p15_large_d_scan: d values must increase");
    prev = d;
    P15Config cfg = base;
    cfg.d = d;
    cfg.degree_cut = 0;
    P15Result r = p15_optimize(cfg);
    rows.push_back({d, r.value_per_n, d * r.value_per_n, r.theta, r.gamma, r.beta,
                    r.degree_cut, r.tail_mass});
  }
  return rows;
}

inline void write_p15_scan_csv(std::span<const P15ScanRow> rows, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw io_error("cannot open for writing: " + path);
  out << "d,value_per_n,d*value,theta,gamma,beta,K,tail_mass\n";
  out.precision(17);
  for (const P15ScanRow& r : rows)
    out << r.d << ',' << r.value_per_n << ',' << r.d_value << ',' << r.theta << ','
        << r.gamma << ',' << r.beta << ',' << r.degree_cut << ',' << r.tail_mass << '\n';
  if (!out) throw io_error("write failed: " + path);
}

}  // namespace qmis
