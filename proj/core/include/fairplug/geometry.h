#ifndef FAIRPLUG_GEOMETRY_H_
#define FAIRPLUG_GEOMETRY_H_

#include <cstdint>
#include <functional>
#include <variant>
#include <vector>

#include "fairplug/dataset.h"
#include "fairplug/random.h"

namespace fairplug {

// A point in the regression-function plane: u on the horizontal axis
// (eta_bar(x,1), eta_bar(x) or eta(x,-1)), v on the vertical axis (eta(x)
// or eta(x,1)).
struct PlanePoint {
  double u;
  double v;
};

// EO-blind decision boundary {(1 + lambda c_bar/pi) v - (lambda/pi) u v - c = 0}.
struct Hyperbola {
  double lambda;
  double pi;
  double c;
  double c_bar;

  Hyperbola(double lambda, double pi, double c, double c_bar);
};

// DPar-blind decision boundary {v - lambda u + lambda c_bar - c = 0}.
struct BoundaryLine {
  double lambda;
  double c;
  double c_bar;

  BoundaryLine(double lambda, double c, double c_bar);
};

enum class ThresholdKind { kEoAware, kDparAware };

// Aware-setting thresholds on the eta(.,-1) and eta(.,1) axes.
struct ThresholdPair {
  double t_minus;
  double t_plus;
  ThresholdKind kind;

  static ThresholdPair EoAware(double lambda, double pi, double c, double c_bar);
  static ThresholdPair DparAware(double lambda, double c, double c_bar);
};

using Boundary = std::variant<Hyperbola, BoundaryLine, ThresholdPair>;

double BoundaryScore(const Hyperbola& h, double u, double v);
double BoundaryScore(const BoundaryLine& l, double u, double v);

// c_bar + pi / lambda; throws std::invalid_argument for lambda = 0.
double AsymptoteX(const Hyperbola& h);

// Does the closed square [u-eps, u+eps] x [v-eps, v+eps] meet {g = 0}?
// g is bilinear (hyperbola) or affine (line), so its extrema over the square
// sit at the corners: the square meets the boundary iff the corner values
// straddle zero. eps must lie in (0, 1/2).
bool SquareIntersectsHyperbola(const Hyperbola& h, PlanePoint center, double eps);
bool SquareIntersectsLine(const BoundaryLine& l, PlanePoint center, double eps);

// |value - threshold| <= eps (closed margin).
bool InThresholdMargin(double threshold, double value, double eps);

// Membership of a projected point in the margin set of a boundary. For a
// ThresholdPair, `which` selects the axis: -1 tests u against t_minus,
// +1 tests v against t_plus.
bool InMargin(const Boundary& boundary, PlanePoint p, double eps, int which = 0);

struct MassEstimate {
  double mass;
  double std_error;  // sqrt(p (1 - p) / m)
  std::int64_t samples;
};

// Draws one projected point per call. Must be deterministic given the rng.
using PlaneSampler = std::function<PlanePoint(Rng&)>;

// Monte-Carlo P_X(X_M(eps)). For hyperbolas and lines, the fraction of m
// points whose 2eps-square meets the boundary. For threshold pairs, the
// larger of the two per-axis margin fractions. Samples are drawn in
// fixed-size shards, each with its own derived seed, and the counts are
// summed, so the estimate depends only on (seed, m) whatever `jobs` is.
MassEstimate EstimateMarginMass(const PlaneSampler& sampler,
                                const Boundary& boundary, double eps,
                                std::int64_t m, std::uint64_t seed, int jobs = 1);

struct BoundConstants {
  double delta_prime;
  double margin_mass;
  double b_const;  // delta' + margin mass
  double g_const;  // max{B/(1-pi), B/(pi beta), B/(pi (1-beta))}
  double q_const;  // 4 G max{c(1-pi), (1-c)pi, |l| c_bar(1-beta), |l|(1-c_bar)beta}
};

BoundConstants ComputeBoundConstants(double margin_mass, double delta_prime,
                                     const DistStats& stats,
                                     const FairnessParams& params);

// One cell of a region raster over [0,1]^2.
struct RasterCell {
  double u;
  double v;
  int sign;        // sign of the boundary score (+1, -1, 0 exactly on it)
  bool in_margin;  // square of half-width eps meets the boundary
};

// n x n grid of nodes u, v in {0, 1/(n-1), ..., 1} (n = 1 gives the centre).
// Throws std::invalid_argument for n < 1.
std::vector<RasterCell> RegionRaster(const Hyperbola& h, double eps, int n);
std::vector<RasterCell> RegionRaster(const BoundaryLine& l, double eps, int n);

}  // namespace fairplug

#endif  // FAIRPLUG_GEOMETRY_H_
