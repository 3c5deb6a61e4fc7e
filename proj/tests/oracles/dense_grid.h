// Dense-grid test of whether a closed square meets the zero set of g.
#ifndef FAIRPLUG_TESTS_ORACLES_DENSE_GRID_H_
#define FAIRPLUG_TESTS_ORACLES_DENSE_GRID_H_

#include <algorithm>
#include <cmath>
#include <functional>

namespace oracle {

struct GridVerdict {
  bool meets;
  double min_value;
  double max_value;
};

// Evaluates g on an n x n lattice spanning [u-eps, u+eps] x [v-eps, v+eps]
// (corners included) and reports a sign change or an exact zero.
inline GridVerdict SquareMeetsZeroSet(const std::function<double(double, double)>& g,
                                      double u, double v, double eps, int n = 200) {
  double lo = INFINITY, hi = -INFINITY;
  const double h = 2.0 * eps / (n - 1);
  for (int i = 0; i < n; ++i) {
    const double uu = i == n - 1 ? u + eps : u - eps + i * h;
    for (int j = 0; j < n; ++j) {
      const double vv = j == n - 1 ? v + eps : v - eps + j * h;
      const double val = g(uu, vv);
      lo = std::min(lo, val);
      hi = std::max(hi, val);
    }
  }
  return {lo <= 0.0 && hi >= 0.0, lo, hi};
}

// Upper bound on |g| anywhere within one lattice cell of a zero of g, for
// g(u, v) = a v - b u v - c on the square: the gradient norm times the
// cell diagonal.
inline double BilinearResolutionBound(double a, double b, double u, double v,
                                      double eps, int n = 200) {
  const double vmax = std::abs(v) + eps;
  const double du = std::abs(b) * vmax;
  const double dv = std::abs(a) + std::abs(b) * (std::abs(u) + eps);
  return std::hypot(du, dv) * 2.0 * eps / (n - 1) * std::sqrt(2.0);
}

}  // namespace oracle

#endif  // FAIRPLUG_TESTS_ORACLES_DENSE_GRID_H_
