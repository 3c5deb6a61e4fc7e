#include "fairplug/geometry.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fairplug/parallel.h"

namespace fairplug {
namespace {

constexpr std::int64_t kShardSize = 8192;

bool InUnit(double x) { return x > 0.0 && x < 1.0; }

void CheckEps(double eps) {
  if (!(eps > 0.0 && eps < 0.5)) throw std::invalid_argument("eps must lie in (0, 1/2)");
}

template <typename Score>
bool CornersStraddle(Score g, PlanePoint p, double eps) {
  CheckEps(eps);
  const double vals[4] = {g(p.u - eps, p.v - eps), g(p.u - eps, p.v + eps),
                          g(p.u + eps, p.v - eps), g(p.u + eps, p.v + eps)};
  const auto [lo, hi] = std::minmax_element(vals, vals + 4);
  return *lo <= 0.0 && 0.0 <= *hi;
}

int ScoreSign(double g) { return g > 0.0 ? 1 : (g < 0.0 ? -1 : 0); }

template <typename Curve>
std::vector<RasterCell> Raster(const Curve& curve, double eps, int n) {
  if (n < 1) throw std::invalid_argument("raster size must be >= 1");
  std::vector<RasterCell> cells;
  cells.reserve(std::size_t(n) * std::size_t(n));
  for (int j = 0; j < n; ++j) {
    const double v = n == 1 ? 0.5 : double(j) / double(n - 1);
    for (int i = 0; i < n; ++i) {
      const double u = n == 1 ? 0.5 : double(i) / double(n - 1);
      cells.push_back({u, v, ScoreSign(BoundaryScore(curve, u, v)),
                       InMargin(curve, {u, v}, eps)});
    }
  }
  return cells;
}

}  // namespace

Hyperbola::Hyperbola(double lambda, double pi, double c, double c_bar)
    : lambda(lambda), pi(pi), c(c), c_bar(c_bar) {
  if (!std::isfinite(lambda)) throw std::invalid_argument("lambda must be finite");
  if (!InUnit(pi) || !InUnit(c) || !InUnit(c_bar)) {
    throw std::invalid_argument("hyperbola needs pi, c, c_bar in (0, 1)");
  }
}

BoundaryLine::BoundaryLine(double lambda, double c, double c_bar)
    : lambda(lambda), c(c), c_bar(c_bar) {
  if (!std::isfinite(lambda)) throw std::invalid_argument("lambda must be finite");
  if (!InUnit(c) || !InUnit(c_bar)) {
    throw std::invalid_argument("line needs c, c_bar in (0, 1)");
  }
}

ThresholdPair ThresholdPair::EoAware(double lambda, double pi, double c, double c_bar) {
  if (!InUnit(pi) || !InUnit(c) || !InUnit(c_bar)) {
    throw std::invalid_argument("thresholds need pi, c, c_bar in (0, 1)");
  }
  const double d_minus = 1.0 + lambda * c_bar / pi;
  const double d_plus = 1.0 + lambda * (c_bar - 1.0) / pi;
  if (d_minus == 0.0 || d_plus == 0.0) {
    throw std::invalid_argument("EO-aware threshold denominator is zero");
  }
  ThresholdPair t{c / d_minus, c / d_plus, ThresholdKind::kEoAware};
  if (!std::isfinite(t.t_minus) || !std::isfinite(t.t_plus)) {
    throw std::invalid_argument("EO-aware thresholds are not finite");
  }
  return t;
}

ThresholdPair ThresholdPair::DparAware(double lambda, double c, double c_bar) {
  if (!InUnit(c) || !InUnit(c_bar) || !std::isfinite(lambda)) {
    throw std::invalid_argument("thresholds need finite lambda and c, c_bar in (0, 1)");
  }
  return {c - lambda * c_bar, c + lambda - lambda * c_bar, ThresholdKind::kDparAware};
}

double BoundaryScore(const Hyperbola& h, double u, double v) {
  return (1.0 + h.lambda * h.c_bar / h.pi) * v - (h.lambda / h.pi) * u * v - h.c;
}

double BoundaryScore(const BoundaryLine& l, double u, double v) {
  return v - l.lambda * u + l.lambda * l.c_bar - l.c;
}

double AsymptoteX(const Hyperbola& h) {
  if (h.lambda == 0.0) {
    throw std::invalid_argument("lambda = 0: the boundary has no vertical asymptote");
  }
  return h.c_bar + h.pi / h.lambda;
}

bool SquareIntersectsHyperbola(const Hyperbola& h, PlanePoint center, double eps) {
  return CornersStraddle([&](double u, double v) { return BoundaryScore(h, u, v); },
                         center, eps);
}

bool SquareIntersectsLine(const BoundaryLine& l, PlanePoint center, double eps) {
  return CornersStraddle([&](double u, double v) { return BoundaryScore(l, u, v); },
                         center, eps);
}

bool InThresholdMargin(double threshold, double value, double eps) {
  return std::abs(value - threshold) <= eps;
}

bool InMargin(const Boundary& boundary, PlanePoint p, double eps, int which) {
  if (const auto* h = std::get_if<Hyperbola>(&boundary)) {
    return SquareIntersectsHyperbola(*h, p, eps);
  }
  if (const auto* l = std::get_if<BoundaryLine>(&boundary)) {
    return SquareIntersectsLine(*l, p, eps);
  }
  const auto& t = std::get<ThresholdPair>(boundary);
  CheckEps(eps);
  if (which < 0) return InThresholdMargin(t.t_minus, p.u, eps);
  if (which > 0) return InThresholdMargin(t.t_plus, p.v, eps);
  return InThresholdMargin(t.t_minus, p.u, eps) || InThresholdMargin(t.t_plus, p.v, eps);
}

MassEstimate EstimateMarginMass(const PlaneSampler& sampler, const Boundary& boundary,
                                double eps, std::int64_t m, std::uint64_t seed,
                                int jobs) {
  if (m < 1) throw std::invalid_argument("margin mass needs m >= 1");
  CheckEps(eps);
  const bool thresholds = std::holds_alternative<ThresholdPair>(boundary);
  const std::size_t shards = std::size_t((m + kShardSize - 1) / kShardSize);
  std::vector<std::int64_t> hits_a(shards, 0), hits_b(shards, 0);
  ParallelFor(shards, jobs, [&](std::size_t s) {
    Rng rng(DeriveSeed(seed, "margin", {s}));
    const std::int64_t begin = std::int64_t(s) * kShardSize;
    const std::int64_t end = std::min(m, begin + kShardSize);
    for (std::int64_t i = begin; i < end; ++i) {
      const PlanePoint p = sampler(rng);
      if (thresholds) {
        hits_a[s] += InMargin(boundary, p, eps, -1);
        hits_b[s] += InMargin(boundary, p, eps, +1);
      } else {
        hits_a[s] += InMargin(boundary, p, eps);
      }
    }
  });
  std::int64_t a = 0, b = 0;
  for (std::size_t s = 0; s < shards; ++s) {
    a += hits_a[s];
    b += hits_b[s];
  }
  const double p = double(std::max(a, b)) / double(m);
  return {p, std::sqrt(p * (1.0 - p) / double(m)), m};
}

BoundConstants ComputeBoundConstants(double margin_mass, double delta_prime,
                                     const DistStats& s, const FairnessParams& q) {
  if (!(margin_mass >= 0.0 && margin_mass <= 1.0)) {
    throw std::invalid_argument("margin mass must lie in [0, 1]");
  }
  if (!(delta_prime >= 0.0)) throw std::invalid_argument("delta' must be >= 0");
  BoundConstants k;
  k.delta_prime = delta_prime;
  k.margin_mass = margin_mass;
  k.b_const = delta_prime + margin_mass;
  k.g_const = std::max({k.b_const / (1.0 - s.pi), k.b_const / (s.pi * s.beta),
                        k.b_const / (s.pi * (1.0 - s.beta))});
  const double l = std::abs(q.lambda);
  k.q_const = 4.0 * k.g_const *
              std::max({q.c * (1.0 - s.pi), (1.0 - q.c) * s.pi,
                        l * q.c_bar * (1.0 - s.beta), l * (1.0 - q.c_bar) * s.beta});
  return k;
}

std::vector<RasterCell> RegionRaster(const Hyperbola& h, double eps, int n) {
  return Raster(h, eps, n);
}

std::vector<RasterCell> RegionRaster(const BoundaryLine& l, double eps, int n) {
  return Raster(l, eps, n);
}

}  // namespace fairplug
