#include "fairplug/synthetic.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

#include "fairplug/error.h"
#include "fairplug/parallel.h"

namespace fairplug {
namespace {

constexpr std::size_t kMaxNodesPerDim = 10'000;

// Finite-support model: exact lookup of the input vector.
class TableModel final : public ProbabilityModel {
 public:
  TableModel(std::vector<std::vector<double>> keys, std::vector<double> values)
      : keys_(std::move(keys)), values_(std::move(values)) {}

  double Probability(std::span<const double> input) const override {
    for (std::size_t k = 0; k < keys_.size(); ++k) {
      if (std::equal(input.begin(), input.end(), keys_[k].begin(), keys_[k].end())) {
        return values_[k];
      }
    }
    throw std::invalid_argument("input is not a support point of the discrete law");
  }
  std::size_t input_dim() const override { return keys_.front().size(); }

 private:
  std::vector<std::vector<double>> keys_;
  std::vector<double> values_;
};

// eta_bar(x, 1) and eta_bar(x, -1) for an (x, y) model.
std::pair<double, double> EtaBarBoth(const ProbabilityModel& eta_bar_eo,
                                     std::span<const double> x) {
  std::vector<double> z(x.begin(), x.end());
  z.push_back(1.0);
  const double pos = eta_bar_eo.Probability(z);
  z.back() = -1.0;
  return {pos, eta_bar_eo.Probability(z)};
}

class DparTruth final : public ProbabilityModel {
 public:
  DparTruth(ModelPtr eta, ModelPtr eta_bar_eo)
      : eta_(std::move(eta)), eta_bar_eo_(std::move(eta_bar_eo)) {}
  double Probability(std::span<const double> x) const override {
    const double p = eta_->Probability(x);
    auto [a, b] = EtaBarBoth(*eta_bar_eo_, x);
    return p * a + (1.0 - p) * b;
  }
  std::size_t input_dim() const override { return eta_->input_dim(); }

 private:
  ModelPtr eta_, eta_bar_eo_;
};

class AwareTruth final : public ProbabilityModel {
 public:
  AwareTruth(ModelPtr eta, ModelPtr eta_bar_eo)
      : eta_(std::move(eta)), eta_bar_eo_(std::move(eta_bar_eo)) {}
  double Probability(std::span<const double> input) const override {
    const auto x = input.first(input.size() - 1);
    const bool pos_bar = input.back() > 0.0;
    const double p = eta_->Probability(x);
    auto [a, b] = EtaBarBoth(*eta_bar_eo_, x);
    const double joint_pos = p * (pos_bar ? a : 1.0 - a);
    const double joint_neg = (1.0 - p) * (pos_bar ? b : 1.0 - b);
    return joint_pos / (joint_pos + joint_neg);
  }
  std::size_t input_dim() const override { return eta_->input_dim() + 1; }

 private:
  ModelPtr eta_, eta_bar_eo_;
};

struct AxisNodes {
  std::vector<double> points;
  std::vector<double> weights;  // sum to 1
};

std::vector<AxisNodes> QuadratureAxes(const FeatureLaw& law, std::size_t dim,
                                      std::size_t max_nodes) {
  std::size_t per_dim = std::size_t(std::floor(
      std::pow(double(max_nodes), 1.0 / double(dim)) + 1e-9));
  per_dim = std::clamp<std::size_t>(per_dim, 1, kMaxNodesPerDim);
  std::vector<AxisNodes> axes(dim);
  for (std::size_t j = 0; j < dim; ++j) {
    double lo, hi;
    if (const auto* u = std::get_if<UniformBox>(&law)) {
      lo = u->lower[j];
      hi = u->upper[j];
    } else {
      const auto& g = std::get<TruncatedGaussian>(law);
      lo = g.lower[j];
      hi = g.upper[j];
    }
    const double h = (hi - lo) / double(per_dim);
    double total = 0.0;
    for (std::size_t k = 0; k < per_dim; ++k) {
      const double x = lo + (double(k) + 0.5) * h;
      double w = 1.0;
      if (const auto* g = std::get_if<TruncatedGaussian>(&law)) {
        const double z = (x - g->mean[j]) / g->sd[j];
        w = std::exp(-0.5 * z * z);
      }
      axes[j].points.push_back(x);
      axes[j].weights.push_back(w);
      total += w;
    }
    for (double& w : axes[j].weights) w /= total;
  }
  return axes;
}

// Calls visit(x, weight) for every quadrature node (or support point).
template <typename Visit>
void ForEachNode(const FeatureLaw& law, std::size_t dim, std::size_t max_nodes,
                 Visit&& visit) {
  if (const auto* d = std::get_if<DiscreteLaw>(&law)) {
    for (std::size_t k = 0; k < d->points.size(); ++k) visit(d->points[k], d->probs[k]);
    return;
  }
  const auto axes = QuadratureAxes(law, dim, max_nodes);
  std::vector<std::size_t> idx(dim, 0);
  std::vector<double> x(dim);
  for (;;) {
    double w = 1.0;
    for (std::size_t j = 0; j < dim; ++j) {
      x[j] = axes[j].points[idx[j]];
      w *= axes[j].weights[idx[j]];
    }
    visit(std::span<const double>(x), w);
    std::size_t j = 0;
    while (j < dim && ++idx[j] == axes[j].points.size()) idx[j++] = 0;
    if (j == dim) return;
  }
}

std::size_t ValidateLaw(const FeatureLaw& law) {
  if (const auto* u = std::get_if<UniformBox>(&law)) {
    if (u->lower.empty() || u->lower.size() != u->upper.size()) {
      throw DataError("uniform law needs matching lower/upper bounds");
    }
    for (std::size_t j = 0; j < u->lower.size(); ++j) {
      if (!(u->lower[j] < u->upper[j])) throw DataError("uniform law: lower >= upper");
    }
    return u->lower.size();
  }
  if (const auto* g = std::get_if<TruncatedGaussian>(&law)) {
    const std::size_t d = g->mean.size();
    if (d == 0 || g->sd.size() != d || g->lower.size() != d || g->upper.size() != d) {
      throw DataError("gaussian law needs mean, sd, lower, upper of equal length");
    }
    for (std::size_t j = 0; j < d; ++j) {
      if (!(g->sd[j] > 0.0)) throw DataError("gaussian law: sd must be > 0");
      if (!(g->lower[j] < g->upper[j])) throw DataError("gaussian law: lower >= upper");
    }
    return d;
  }
  const auto& d = std::get<DiscreteLaw>(law);
  if (d.points.empty() || d.points.size() != d.probs.size()) {
    throw DataError("discrete law needs one probability per point");
  }
  const std::size_t dim = d.points.front().size();
  double total = 0.0;
  for (std::size_t k = 0; k < d.points.size(); ++k) {
    if (d.points[k].size() != dim || dim == 0) {
      throw DataError("discrete law points differ in dimension");
    }
    if (!(d.probs[k] > 0.0)) throw DataError("discrete law probabilities must be > 0");
    total += d.probs[k];
  }
  if (std::abs(total - 1.0) > 1e-9) throw DataError("discrete law probabilities must sum to 1");
  return dim;
}

bool Bernoulli(Rng& rng, double p) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p;
}

// Draws a training set, redrawing degenerate draws. Returns the number of
// redraws through `retries`.
template <typename Build>
auto DrawAndBuild(const SyntheticDistribution& dist, std::int64_t n,
                  std::uint64_t seed, std::uint64_t trial, int max_retries,
                  int* retries, Build&& build) {
  for (int r = 0;; ++r) {
    try {
      Dataset train = dist.Sample(
          std::size_t(n),
          DeriveSeed(seed, "train", {std::uint64_t(n), trial, std::uint64_t(r)}));
      ComputeDistStats(train);
      auto out = build(train);
      *retries = r;
      return out;
    } catch (const DataError&) {
      if (r >= max_retries) {
        throw DataError("training draw stayed degenerate after " +
                        std::to_string(max_retries) + " redraws at n = " +
                        std::to_string(n));
      }
    }
  }
}

double Mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / double(v.size());
}

double SampleStd(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = Mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / double(v.size() - 1));
}

std::vector<std::vector<double>> SampleFeatureRows(const SyntheticDistribution& dist,
                                                   std::int64_t m, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::vector<double>> xs(static_cast<std::size_t>(m));
  for (auto& x : xs) x = dist.SampleFeatures(rng);
  return xs;
}

void CheckBlind(Setting setting) {
  if (IsAware(setting)) throw UsageError("this experiment needs a blind setting");
}

}  // namespace

SyntheticDistribution::SyntheticDistribution(FeatureLaw law, std::size_t dim,
                                             ModelPtr eta, ModelPtr eta_bar_eo)
    : law_(std::move(law)),
      dim_(dim),
      eta_(std::move(eta)),
      eta_bar_eo_(std::move(eta_bar_eo)) {
  eta_bar_dpar_ = std::make_shared<DparTruth>(eta_, eta_bar_eo_);
  eta_aware_ = std::make_shared<AwareTruth>(eta_, eta_bar_eo_);
  double pi = 0.0, pi_bar = 0.0, joint = 0.0;
  ForEachNode(law_, dim_, 4'000'000, [&](std::span<const double> x, double w) {
    const double p = eta_->Probability(x);
    auto [a, b] = EtaBarBoth(*eta_bar_eo_, x);
    pi += w * p;
    pi_bar += w * (p * a + (1.0 - p) * b);
    joint += w * p * a;
  });
  stats_.emplace(pi, pi_bar, joint / pi);
}

SyntheticDistribution SyntheticDistribution::Logistic(FeatureLaw law,
                                                      Eigen::VectorXd w_eta,
                                                      Eigen::VectorXd w_eta_bar) {
  const std::size_t dim = ValidateLaw(law);
  if (std::holds_alternative<DiscreteLaw>(law)) {
    throw DataError("logistic designs need a continuous feature law");
  }
  if (std::size_t(w_eta.size()) != dim + 1) throw DataError("w_eta must have d+1 entries");
  if (std::size_t(w_eta_bar.size()) != dim + 2) {
    throw DataError("w_eta_bar must have d+2 entries");
  }
  auto eta = std::make_shared<LinearCpe>(w_eta, 0.0, InputArity::kFeatures);
  auto eta_bar = std::make_shared<LinearCpe>(w_eta_bar, 0.0, InputArity::kFeaturesPlusLabel);
  SyntheticDistribution d(std::move(law), dim, eta, eta_bar);
  d.w_eta_ = std::move(w_eta);
  d.w_eta_bar_ = std::move(w_eta_bar);
  return d;
}

SyntheticDistribution SyntheticDistribution::Discrete(
    DiscreteLaw law, std::vector<double> eta,
    std::vector<std::array<double, 2>> eta_bar) {
  const std::size_t dim = ValidateLaw(law);
  const std::size_t k = law.points.size();
  if (eta.size() != k || eta_bar.size() != k) {
    throw DataError("discrete design needs eta and eta_bar for every point");
  }
  std::vector<std::vector<double>> keys_bar;
  std::vector<double> values_bar;
  for (std::size_t i = 0; i < k; ++i) {
    for (double p : {eta[i], eta_bar[i][0], eta_bar[i][1]}) {
      if (!(p > 0.0 && p < 1.0)) throw DataError("regression values must lie in (0, 1)");
    }
    for (int y : {-1, 1}) {
      auto key = law.points[i];
      key.push_back(double(y));
      keys_bar.push_back(std::move(key));
      values_bar.push_back(eta_bar[i][y == 1 ? 1 : 0]);
    }
  }
  auto eta_model = std::make_shared<TableModel>(law.points, std::move(eta));
  auto bar_model = std::make_shared<TableModel>(std::move(keys_bar), std::move(values_bar));
  return SyntheticDistribution(std::move(law), dim, eta_model, bar_model);
}

std::vector<double> SyntheticDistribution::SampleFeatures(Rng& rng) const {
  if (const auto* u = std::get_if<UniformBox>(&law_)) {
    std::vector<double> x(dim_);
    for (std::size_t j = 0; j < dim_; ++j) {
      x[j] = std::uniform_real_distribution<double>(u->lower[j], u->upper[j])(rng);
    }
    return x;
  }
  if (const auto* g = std::get_if<TruncatedGaussian>(&law_)) {
    std::vector<double> x(dim_);
    for (std::size_t j = 0; j < dim_; ++j) {
      std::normal_distribution<double> normal(g->mean[j], g->sd[j]);
      do {
        x[j] = normal(rng);
      } while (x[j] < g->lower[j] || x[j] > g->upper[j]);
    }
    return x;
  }
  const auto& d = std::get<DiscreteLaw>(law_);
  std::discrete_distribution<std::size_t> pick(d.probs.begin(), d.probs.end());
  return d.points[pick(rng)];
}

Dataset SyntheticDistribution::Sample(std::size_t n, std::uint64_t seed) const {
  if (n < 1) throw std::invalid_argument("sample size must be >= 1");
  Rng rng(seed);
  FeatureMatrix x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim_));
  Eigen::VectorXd y(static_cast<Eigen::Index>(n)), ybar(static_cast<Eigen::Index>(n));
  std::vector<double> z(dim_ + 1);
  for (std::size_t i = 0; i < n; ++i) {
    auto row = SampleFeatures(rng);
    const int label = Bernoulli(rng, eta_->Probability(row)) ? 1 : -1;
    std::copy(row.begin(), row.end(), z.begin());
    z.back() = double(label);
    const int sens = Bernoulli(rng, eta_bar_eo_->Probability(z)) ? 1 : -1;
    for (std::size_t j = 0; j < dim_; ++j) x(Eigen::Index(i), Eigen::Index(j)) = row[j];
    y[Eigen::Index(i)] = label;
    ybar[Eigen::Index(i)] = sens;
  }
  return Dataset(std::move(x), std::move(y), std::move(ybar));
}

double SyntheticDistribution::Expectation(
    const std::function<double(std::span<const double>)>& fn,
    std::size_t max_nodes) const {
  double total = 0.0;
  ForEachNode(law_, dim_, max_nodes,
              [&](std::span<const double> x, double w) { total += w * fn(x); });
  return total;
}

const DistStats& SyntheticDistribution::TrueStats() const { return *stats_; }

RatePair SyntheticDistribution::PopulationRates(
    const std::function<int(std::span<const double>, int)>& decide,
    Criterion criterion) const {
  // Probability masses: [truth positive?][predicted positive?].
  double d[2][2] = {}, bar[2][2] = {};
  ForEachNode(law_, dim_, 4'000'000, [&](std::span<const double> x, double w) {
    const double p = eta_->Probability(x);
    auto [a, b] = EtaBarBoth(*eta_bar_eo_, x);
    for (int yb : {-1, 1}) {
      const bool pred = decide(x, yb) == 1;
      const double m_pos = w * p * (yb == 1 ? a : 1.0 - a);  // Y=1, Ybar=yb
      const double m_neg = w * (1.0 - p) * (yb == 1 ? b : 1.0 - b);
      d[1][pred] += m_pos;
      d[0][pred] += m_neg;
      bar[yb == 1][pred] += m_pos;
      if (criterion == Criterion::kDpar) bar[yb == 1][pred] += m_neg;
    }
  });
  auto rates = [](const double m[2][2]) {
    return GroupRates::FromTprTnr(m[1][1] / (m[1][0] + m[1][1]),
                                  m[0][0] / (m[0][0] + m[0][1]));
  };
  return {rates(d), rates(bar)};
}

SyntheticDistribution ReferenceDistribution() {
  Eigen::VectorXd w_eta(3), w_eta_bar(4);
  w_eta << 2.0, -1.5, 0.2;
  w_eta_bar << -1.0, 1.5, 1.0, 0.3;
  return SyntheticDistribution::Logistic(UniformBox{{-1.0, -1.0}, {1.0, 1.0}}, w_eta,
                                         w_eta_bar);
}

SyntheticDistribution ParseDistribution(const KeyValues& kv) {
  auto get = [&](const char* key) {
    auto it = kv.find(key);
    if (it == kv.end()) throw DataError(std::string("distribution missing ") + key);
    return ParseDoubleList(it->second);
  };
  auto law_it = kv.find("law");
  const std::string law = law_it == kv.end() ? "uniform" : law_it->second;
  FeatureLaw feature_law;
  if (law == "uniform") {
    feature_law = UniformBox{get("lower"), get("upper")};
  } else if (law == "gaussian") {
    feature_law = TruncatedGaussian{get("mean"), get("sd"), get("lower"), get("upper")};
  } else {
    throw DataError("unknown feature law '" + law + "'");
  }
  auto w_eta = get("w_eta");
  auto w_eta_bar = get("w_eta_bar");
  return SyntheticDistribution::Logistic(
      std::move(feature_law),
      Eigen::Map<Eigen::VectorXd>(w_eta.data(), Eigen::Index(w_eta.size())),
      Eigen::Map<Eigen::VectorXd>(w_eta_bar.data(), Eigen::Index(w_eta_bar.size())));
}

SyntheticDistribution LoadDistribution(const std::filesystem::path& path) {
  return ParseDistribution(ReadKeyValueFile(path));
}

KeyValues DistributionToKeyValues(const SyntheticDistribution& dist) {
  if (!dist.w_eta() || !dist.w_eta_bar()) {
    throw std::invalid_argument("only logistic designs can be serialized");
  }
  auto vec = [](const Eigen::VectorXd& v) {
    return JoinDoubles(std::vector<double>(v.data(), v.data() + v.size()));
  };
  KeyValues kv;
  if (const auto* u = std::get_if<UniformBox>(&dist.law())) {
    kv["law"] = "uniform";
    kv["lower"] = JoinDoubles(u->lower);
    kv["upper"] = JoinDoubles(u->upper);
  } else {
    const auto& g = std::get<TruncatedGaussian>(dist.law());
    kv["law"] = "gaussian";
    kv["mean"] = JoinDoubles(g.mean);
    kv["sd"] = JoinDoubles(g.sd);
    kv["lower"] = JoinDoubles(g.lower);
    kv["upper"] = JoinDoubles(g.upper);
  }
  kv["w_eta"] = vec(*dist.w_eta());
  kv["w_eta_bar"] = vec(*dist.w_eta_bar());
  return kv;
}

PlugInRule BayesClassifier(const SyntheticDistribution& dist, Setting setting,
                           const FairnessParams& params) {
  const double pi = dist.TrueStats().pi;
  switch (setting) {
    case Setting::kEoBlind:
      return PlugInRule(setting, params, pi, dist.eta(), dist.eta_bar_eo());
    case Setting::kDparBlind:
      return PlugInRule(setting, params, pi, dist.eta(), dist.eta_bar_dpar());
    case Setting::kEoAware:
    case Setting::kDparAware:
      return PlugInRule(setting, params, pi, dist.eta_aware());
  }
  throw std::logic_error("unreachable setting");
}

MeasureEstimate MeasureOnSample(const PlugInRule& rule, const Dataset& sample,
                                const DistStats& stats, const FairnessParams& params) {
  const auto pred = rule.Predict(sample);
  std::vector<int> truth(sample.rows()), sens(sample.rows());
  for (std::size_t i = 0; i < sample.rows(); ++i) {
    truth[i] = sample.label_sign(i);
    sens[i] = sample.sensitive_sign(i);
  }
  const Criterion crit = CriterionOf(rule.setting());
  const RatePair r = EmpiricalRatePair(pred, truth, sens, crit);
  const double value = PerformanceMeasure({r.d, r.dbar, stats, params, crit});

  // Binomial variance of each rate, with its class count.
  double n_pos = 0, n_neg = 0, nb_pos = 0, nb_neg = 0;
  for (std::size_t i = 0; i < sample.rows(); ++i) {
    (truth[i] == 1 ? n_pos : n_neg) += 1;
    if (crit == Criterion::kDpar || truth[i] == 1) (sens[i] == 1 ? nb_pos : nb_neg) += 1;
  }
  const double prior_bar = crit == Criterion::kEo ? stats.beta : stats.pi_bar;
  auto term = [](double coef, double rate, double count) {
    return coef * coef * rate * (1.0 - rate) / count;
  };
  const double l2 = params.lambda * params.lambda;
  const double var =
      term(params.c * (1.0 - stats.pi), r.d.fpr, n_neg) +
      term(stats.pi * (1.0 - params.c), r.d.fnr, n_pos) +
      l2 * term(params.c_bar * (1.0 - prior_bar), r.dbar.fpr, nb_neg) +
      l2 * term(prior_bar * (1.0 - params.c_bar), r.dbar.fnr, nb_pos);
  return {value, std::sqrt(var)};
}

MeasureEstimate EstimateMeasure(const PlugInRule& rule, const SyntheticDistribution& dist,
                                const FairnessParams& params, std::int64_t m,
                                std::uint64_t seed) {
  if (m < 1) throw std::invalid_argument("m must be >= 1");
  return MeasureOnSample(rule, dist.Sample(std::size_t(m), seed), dist.TrueStats(), params);
}

RegretCurve ConsistencyCurve(const SyntheticDistribution& dist, Setting setting,
                             const FairnessParams& params,
                             const ConsistencyOptions& opt) {
  if (opt.n_schedule.empty() || opt.trials < 1 || opt.m_eval < 1) {
    throw UsageError("consistency needs a schedule, trials >= 1 and m_eval >= 1");
  }
  for (std::size_t i = 0; i < opt.n_schedule.size(); ++i) {
    if (opt.n_schedule[i] < 1 || (i > 0 && opt.n_schedule[i] <= opt.n_schedule[i - 1])) {
      throw UsageError("n schedule must be positive and strictly increasing");
    }
  }
  const DistStats& stats = dist.TrueStats();
  const Dataset eval = dist.Sample(std::size_t(opt.m_eval), DeriveSeed(opt.seed, "eval"));
  const double best = MeasureOnSample(BayesClassifier(dist, setting, params), eval, stats,
                                      params).value;
  RuleFactory factory = opt.rule_factory;
  if (!factory) {
    factory = [&](const Dataset& train) {
      return FitPlugInModels(train, setting, opt.cpe_config).Assemble(params);
    };
  }

  RegretCurve curve;
  for (std::size_t k = 0; k < opt.n_schedule.size(); ++k) {
    const std::int64_t n = opt.n_schedule[k];
    std::vector<double> regrets(std::size_t(opt.trials));
    std::vector<int> retries(std::size_t(opt.trials));
    ParallelFor(std::size_t(opt.trials), opt.jobs, [&](std::size_t t) {
      PlugInRule rule = DrawAndBuild(dist, n, opt.seed, t,
                                     opt.max_retries, &retries[t], factory);
      if (opt.pi_mode == PiMode::kKnown) {
        rule = PlugInRule(rule.setting(), rule.params(), stats.pi, rule.eta(),
                          rule.eta_bar());
      }
      regrets[t] = Regret(MeasureOnSample(rule, eval, stats, params).value, best);
    });
    curve.push_back({n, Mean(regrets), SampleStd(regrets), opt.trials,
                     std::accumulate(retries.begin(), retries.end(), 0)});
  }
  return curve;
}

FrontierEstimate Frontier(const SyntheticDistribution& dist, const FairnessParams& params,
                          std::int64_t m, std::uint64_t seed, Setting setting) {
  CheckBlind(setting);
  if (m < 2) throw std::invalid_argument("frontier needs m >= 2");
  const PlugInRule bayes = BayesClassifier(dist, setting, params);
  const auto xs = SampleFeatureRows(dist, m, seed);
  std::vector<double> terms(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double eta = dist.eta()->Probability(xs[i]);
    const double f = bayes.Classify(xs[i]) == 1 ? 1.0 : 0.0;
    terms[i] = (params.c - eta) * (f - (eta > params.c ? 1.0 : 0.0));
  }
  return {Mean(terms), SampleStd(terms) / std::sqrt(double(m))};
}

TradeoffGapResult TradeoffGap(const SyntheticDistribution& dist,
                              const FairnessParams& params,
                              const TradeoffGapOptions& opt) {
  CheckBlind(opt.setting);
  if (opt.n < 1 || opt.trials < 1 || opt.m_eval < 2) {
    throw UsageError("trade-off gap needs n >= 1, trials >= 1, m_eval >= 2");
  }
  const auto xs = SampleFeatureRows(dist, opt.m_eval, DeriveSeed(opt.seed, "eval"));
  std::vector<double> eta(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) eta[i] = dist.eta()->Probability(xs[i]);

  const PlugInRule bayes = BayesClassifier(dist, opt.setting, params);
  double frontier = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = bayes.Classify(xs[i]) == 1 ? 1.0 : 0.0;
    frontier += (params.c - eta[i]) * (f - (eta[i] > params.c ? 1.0 : 0.0));
  }
  frontier /= double(xs.size());

  RuleFactory factory = opt.rule_factory;
  if (!factory) {
    factory = [&](const Dataset& train) {
      return FitPlugInModels(train, opt.setting, opt.cpe_config).Assemble(params);
    };
  }
  const FairnessParams unconstrained(0.0, params.c, params.c_bar);
  std::vector<double> gaps(std::size_t(opt.trials));
  ParallelFor(std::size_t(opt.trials), opt.jobs, [&](std::size_t t) {
    int retries = 0;
    const PlugInRule rule = DrawAndBuild(dist, opt.n, opt.seed, t, opt.max_retries,
                                         &retries, factory);
    const PlugInRule rule0 = rule.WithParams(unconstrained);
    double diff = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double f = rule.Classify(xs[i]) == 1 ? 1.0 : 0.0;
      const double f0 = rule0.Classify(xs[i]) == 1 ? 1.0 : 0.0;
      diff += (params.c - eta[i]) * (f - f0);
    }
    gaps[t] = std::abs(diff / double(xs.size()));
  });
  const double gap = Mean(gaps);
  double pos = 0.0;
  for (double g : gaps) pos += std::max(0.0, g - frontier);
  return {opt.n, gap, SampleStd(gaps), frontier, gap - frontier, pos / double(gaps.size()),
          opt.trials};
}

SampleComplexityResult EstimateSampleComplexity(const SyntheticDistribution& dist,
                                                const SampleComplexityOptions& opt) {
  if (!(opt.eps > 0.0) || !(opt.delta_prime >= 0.0 && opt.delta_prime < 1.0) ||
      !(opt.delta >= 0.0 && opt.delta < 1.0) || opt.trials < 1 || opt.m_eval < 1) {
    throw UsageError("invalid sample-complexity target");
  }
  const bool bar = opt.target == ComplexityTarget::kEtaBar;
  const auto xs = SampleFeatureRows(dist, opt.m_eval, DeriveSeed(opt.seed, "eval"));
  // Inputs at which the truth and the estimate are compared.
  std::vector<std::vector<double>> inputs = xs;
  if (bar) {
    for (auto& z : inputs) z.push_back(1.0);
  }
  const ProbabilityModel& truth = bar ? *dist.eta_bar_eo() : *dist.eta();
  std::vector<double> truth_values(inputs.size());
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    truth_values[i] = truth.Probability(inputs[i]);
  }
  EstimatorFactory estimator = opt.estimator;
  if (!estimator) {
    estimator = [&](const Dataset& train) -> ModelPtr {
      if (bar) return std::make_shared<LinearCpe>(FitEtaBarEo(train, opt.cpe_config));
      return std::make_shared<LinearCpe>(FitEta(train, opt.cpe_config));
    };
  }

  SampleComplexityResult result{};
  auto passes = [&](std::int64_t n) {
    int ok = 0;
    for (int t = 0; t < opt.trials; ++t) {
      int retries = 0;
      ModelPtr est = DrawAndBuild(dist, n, opt.seed, std::uint64_t(t),
                                  100, &retries, estimator);
      std::int64_t bad = 0;
      for (std::size_t i = 0; i < inputs.size(); ++i) {
        if (std::abs(truth_values[i] - est->Probability(inputs[i])) >= opt.eps) ++bad;
      }
      if (double(bad) / double(inputs.size()) <= opt.delta_prime) ++ok;
    }
    const double frac = double(ok) / double(opt.trials);
    const bool pass = frac >= 1.0 - opt.delta - 1e-12;
    result.probes.push_back({n, frac, pass});
    return pass;
  };
  const auto search = SmallestPassingSize(passes, opt.start, opt.cap, opt.resolution);
  result.n = search.n;
  result.converged = search.converged;
  return result;
}

double ScoreAtomFraction(const SyntheticDistribution& dist, Setting setting,
                         const FairnessParams& params, std::int64_t m,
                         std::uint64_t seed, double tol) {
  const PlugInRule bayes = BayesClassifier(dist, setting, params);
  const Dataset sample = dist.Sample(std::size_t(m), seed);
  std::int64_t hits = 0;
  for (std::size_t i = 0; i < sample.rows(); ++i) {
    const double s = IsAware(setting) ? bayes.Score(sample.row(i), sample.sensitive_sign(i))
                                      : bayes.Score(sample.row(i));
    if (std::abs(s) < tol) ++hits;
  }
  return double(hits) / double(m);
}

void WriteRegretCurveCsv(const RegretCurve& curve, std::ostream& out) {
  out << "n,mean,std,trials,retries\n";
  for (const auto& r : curve) {
    out << r.n << ',' << FormatDouble(r.mean_regret) << ',' << FormatDouble(r.std_regret)
        << ',' << r.trials << ',' << r.retries << '\n';
  }
}

void WriteTradeoffGapCsv(const std::vector<TradeoffGapResult>& rows, std::ostream& out) {
  out << "n,gap,gap_std,frontier,excess,excess_pos,trials\n";
  for (const auto& r : rows) {
    out << r.n << ',' << FormatDouble(r.gap) << ',' << FormatDouble(r.gap_std) << ','
        << FormatDouble(r.frontier) << ',' << FormatDouble(r.excess) << ','
        << FormatDouble(r.excess_pos) << ',' << r.trials
        << '\n';
  }
}

}  // namespace fairplug
