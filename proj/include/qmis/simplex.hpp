#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "qmis/common.hpp"

namespace qmis {

struct SimplexOptions {
  double value_tol = 1e-10;
  std::size_t max_iter = 2000;
};

struct SimplexResult {
  std::vector<double> x;
  double value = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

// Nelder-Mead maximization with box clamping. Good enough for the smooth,
// low-dimensional angle landscapes this project optimizes.
inline SimplexResult nelder_mead_maximize(
    const std::function<double(const std::vector<double>&)>& f, std::vector<double> x0,
    const std::vector<double>& initial_step, const std::vector<double>& lo,
    const std::vector<double>& hi, const SimplexOptions& opts = {}) {
  const std::size_t dim = x0.size();
  if (initial_step.size() != dim || lo.size() != dim || hi.size() != dim)
    throw parameter_error("nelder_mead: dimension mismatch");

  auto clamp = [&](std::vector<double>& x) {
    for (std::size_t k = 0; k < dim; ++k) x[k] = std::clamp(x[k], lo[k], hi[k]);
  };
  auto eval = [&](std::vector<double>& x) {
    clamp(x);
    return -f(x);  // minimize -f
  };

  std::vector<std::vector<double>> pts(dim + 1, x0);
  std::vector<double> fx(dim + 1);
  for (std::size_t k = 0; k < dim; ++k) {
    pts[k + 1][k] += initial_step[k];
    if (pts[k + 1][k] > hi[k]) pts[k + 1][k] = x0[k] - initial_step[k];
  }
  for (std::size_t k = 0; k <= dim; ++k) fx[k] = eval(pts[k]);

  SimplexResult result;
  for (std::size_t iter = 0; iter < opts.max_iter; ++iter) {
    std::vector<std::size_t> order(dim + 1);
    for (std::size_t k = 0; k <= dim; ++k) order[k] = k;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return fx[a] < fx[b]; });
    std::size_t best = order[0], worst = order[dim], second = order[dim - 1];

    result.iterations = iter;
    if (std::abs(fx[worst] - fx[best]) <
        opts.value_tol * (1.0 + std::abs(fx[best]) + std::abs(fx[worst]))) {
      result.converged = true;
      break;
    }

    std::vector<double> centroid(dim, 0.0);
    for (std::size_t k = 0; k <= dim; ++k) {
      if (k == worst) continue;
      for (std::size_t d = 0; d < dim; ++d) centroid[d] += pts[k][d];
    }
    for (double& c : centroid) c /= static_cast<double>(dim);

    auto combine = [&](double t) {
      std::vector<double> x(dim);
      for (std::size_t d = 0; d < dim; ++d)
        x[d] = centroid[d] + t * (pts[worst][d] - centroid[d]);
      return x;
    };

    std::vector<double> refl = combine(-1.0);
    double f_refl = eval(refl);
    if (f_refl < fx[best]) {
      std::vector<double> expd = combine(-2.0);
      double f_expd = eval(expd);
      if (f_expd < f_refl) {
        pts[worst] = std::move(expd);
        fx[worst] = f_expd;
      } else {
        pts[worst] = std::move(refl);
        fx[worst] = f_refl;
      }
    } else if (f_refl < fx[second]) {
      pts[worst] = std::move(refl);
      fx[worst] = f_refl;
    } else {
      std::vector<double> contr = combine(f_refl < fx[worst] ? -0.5 : 0.5);
      double f_contr = eval(contr);
      if (f_contr < std::min(f_refl, fx[worst])) {
        pts[worst] = std::move(contr);
        fx[worst] = f_contr;
      } else {
        for (std::size_t k = 0; k <= dim; ++k) {  // shrink toward best
          if (k == best) continue;
          for (std::size_t d = 0; d < dim; ++d)
            pts[k][d] = pts[best][d] + 0.5 * (pts[k][d] - pts[best][d]);
          fx[k] = eval(pts[k]);
        }
      }
    }
  }

  std::size_t best = 0;
  for (std::size_t k = 1; k <= dim; ++k)
    if (fx[k] < fx[best]) best = k;
  result.x = pts[best];
  result.value = -fx[best];
  return result;
}

}  // namespace qmis
