#ifndef FAIRPLUG_SYNTHETIC_H_
#define FAIRPLUG_SYNTHETIC_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "fairplug/cpe.h"
#include "fairplug/dataset.h"
#include "fairplug/metrics.h"
#include "fairplug/plugin.h"
#include "fairplug/random.h"
#include "fairplug/search.h"
#include "fairplug/text_io.h"

namespace fairplug {

// Uniform law on the box [lower, upper].
struct UniformBox {
  std::vector<double> lower;
  std::vector<double> upper;
};

// Independent Gaussian coordinates truncated to [lower, upper].
struct TruncatedGaussian {
  std::vector<double> mean;
  std::vector<double> sd;
  std::vector<double> lower;
  std::vector<double> upper;
};

// Finite support: points[k] with probability probs[k].
struct DiscreteLaw {
  std::vector<std::vector<double>> points;
  std::vector<double> probs;
};

using FeatureLaw = std::variant<UniformBox, TruncatedGaussian, DiscreteLaw>;

// A joint law of (X, Y, Ybar) with known regression functions.
//
// Sampling: x from the feature law, y = +1 with probability eta(x), then
// ybar = +1 with probability eta_bar_EO(x, y). The remaining regression
// functions follow exactly:
//   eta_bar_DPar(x) = eta(x) eta_bar(x,1) + (1 - eta(x)) eta_bar(x,-1)
//   eta(x, ybar)    = P(Y=1, Ybar=ybar | x) / P(Ybar=ybar | x).
class SyntheticDistribution {
 public:
  // eta(x) = sigma(w_eta . [x;1]), eta_bar_EO(x,y) = sigma(w_eta_bar . [x;y;1]).
  static SyntheticDistribution Logistic(FeatureLaw law, Eigen::VectorXd w_eta,
                                        Eigen::VectorXd w_eta_bar);
  // Finite support with tabulated eta[k] and eta_bar[k] = {eta_bar(x_k,-1),
  // eta_bar(x_k,+1)}.
  static SyntheticDistribution Discrete(DiscreteLaw law, std::vector<double> eta,
                                        std::vector<std::array<double, 2>> eta_bar);

  std::size_t dim() const { return dim_; }
  const FeatureLaw& law() const { return law_; }

  // Deterministic under seed.
  Dataset Sample(std::size_t n, std::uint64_t seed) const;
  std::vector<double> SampleFeatures(Rng& rng) const;

  // True regression functions as probability models.
  const ModelPtr& eta() const { return eta_; }              // x
  const ModelPtr& eta_bar_eo() const { return eta_bar_eo_; }  // (x, y)
  const ModelPtr& eta_bar_dpar() const { return eta_bar_dpar_; }  // x
  const ModelPtr& eta_aware() const { return eta_aware_; }  // (x, ybar)

  // E_X[fn(x)]: exact for discrete laws, tensor-grid midpoint quadrature
  // otherwise (at most `max_nodes` nodes in total, capped at 10^4 per
  // dimension).
  double Expectation(const std::function<double(std::span<const double>)>& fn,
                     std::size_t max_nodes = 4'000'000) const;

  // pi, pi_bar, beta by quadrature, computed once at construction.
  const DistStats& TrueStats() const;

  // Population GroupRates on D and on the criterion's Dbar for a
  // deterministic decision rule; exact for discrete laws.
  RatePair PopulationRates(
      const std::function<int(std::span<const double>, int)>& decide,
      Criterion criterion) const;

  // Logistic designs keep their weights for serialization.
  const std::optional<Eigen::VectorXd>& w_eta() const { return w_eta_; }
  const std::optional<Eigen::VectorXd>& w_eta_bar() const { return w_eta_bar_; }

 private:
  SyntheticDistribution(FeatureLaw law, std::size_t dim, ModelPtr eta,
                        ModelPtr eta_bar_eo);

  FeatureLaw law_;
  std::size_t dim_;
  ModelPtr eta_;
  ModelPtr eta_bar_eo_;
  ModelPtr eta_bar_dpar_;
  ModelPtr eta_aware_;
  std::optional<Eigen::VectorXd> w_eta_;
  std::optional<Eigen::VectorXd> w_eta_bar_;
  mutable std::optional<DistStats> stats_;
};

// Two-dimensional logistic design on [-1,1]^2 used by the experiments.
SyntheticDistribution ReferenceDistribution();

// Text form (key=value): law=uniform|gaussian, lower=, upper=, mean=, sd=,
// w_eta=, w_eta_bar=.
SyntheticDistribution ParseDistribution(const KeyValues& kv);
SyntheticDistribution LoadDistribution(const std::filesystem::path& path);
KeyValues DistributionToKeyValues(const SyntheticDistribution& dist);

// Plug-in rule built from the true regression functions and the true pi.
PlugInRule BayesClassifier(const SyntheticDistribution& dist, Setting setting,
                           const FairnessParams& params);

struct MeasureEstimate {
  double value;
  double std_error;  // binomial error of the rate terms; approximate
};

// Psi of a rule on an evaluation sample, with the distribution's true
// pi / beta / pi_bar as the class priors.
MeasureEstimate MeasureOnSample(const PlugInRule& rule, const Dataset& sample,
                                const DistStats& stats,
                                const FairnessParams& params);
// Draws m triplets with `seed` and evaluates MeasureOnSample.
MeasureEstimate EstimateMeasure(const PlugInRule& rule,
                                const SyntheticDistribution& dist,
                                const FairnessParams& params, std::int64_t m,
                                std::uint64_t seed);

enum class PiMode { kEstimated, kKnown };

// Builds the rule to evaluate from a training sample. The default fits the
// setting's CPEs (FitPlugInModels); tests inject the Bayes rule here.
using RuleFactory = std::function<PlugInRule(const Dataset& train)>;

struct ConsistencyOptions {
  std::vector<std::int64_t> n_schedule{64, 256, 1024, 16384};
  int trials = 20;
  std::int64_t m_eval = 100'000;
  std::uint64_t seed = 1;
  PiMode pi_mode = PiMode::kEstimated;
  FitConfig cpe_config{};
  int jobs = 1;
  int max_retries = 100;
  RuleFactory rule_factory{};  // empty: fit CPEs on each training draw
};

struct RegretRow {
  std::int64_t n;
  double mean_regret;
  double std_regret;  // sample standard deviation over trials
  int trials;
  int retries;        // degenerate training draws that were redrawn
};

using RegretCurve = std::vector<RegretRow>;

// For each n: per trial, draw a training set (redrawing single-class or
// single-group draws with a fresh derived seed), build the rule, and take
// Psi(Bayes) - Psi(rule) on a common evaluation sample of m_eval triplets.
// Trial t at size n always uses the same derived seeds.
RegretCurve ConsistencyCurve(const SyntheticDistribution& dist, Setting setting,
                             const FairnessParams& params,
                             const ConsistencyOptions& options);

struct FrontierEstimate {
  double value;
  double std_error;
};

// E_X[(c - eta(x)) (f*_lambda(x) - 1{eta(x) > c})] with f*_lambda the Bayes
// rule of a blind setting as a {0,1} indicator; Monte-Carlo over m draws.
FrontierEstimate Frontier(const SyntheticDistribution& dist,
                          const FairnessParams& params, std::int64_t m,
                          std::uint64_t seed, Setting setting = Setting::kEoBlind);

struct TradeoffGapOptions {
  std::int64_t n = 1024;
  int trials = 20;
  std::int64_t m_eval = 100'000;
  std::uint64_t seed = 1;
  Setting setting = Setting::kEoBlind;
  FitConfig cpe_config{};
  int jobs = 1;
  int max_retries = 100;
  RuleFactory rule_factory{};  // builds f_hat_lambda; f_hat_0 reuses its CPEs
};

struct TradeoffGapResult {
  std::int64_t n;
  double gap;        // mean |CS(f_lambda) - CS(f_0)| over trials
  double gap_std;
  double frontier;   // G(lambda)
  double excess;     // gap - frontier
  double excess_pos; // mean over trials of max(0, gap_t - frontier)
  int trials;
};

// CS(f; D, c) is evaluated as E_X[(c - eta(x)) f(x)] + pi (1 - c) on the
// evaluation draws (exact conditional expectation given x), for both the
// fitted rules and the frontier.
TradeoffGapResult TradeoffGap(const SyntheticDistribution& dist,
                              const FairnessParams& params,
                              const TradeoffGapOptions& options);

// Which regression function's learnability is measured.
enum class ComplexityTarget { kEta, kEtaBar };

using EstimatorFactory = std::function<ModelPtr(const Dataset& train)>;

struct SampleComplexityOptions {
  double eps = 0.1;
  double delta_prime = 0.1;
  double delta = 0.2;
  int trials = 25;
  std::int64_t m_eval = 20'000;
  std::uint64_t seed = 1;
  ComplexityTarget target = ComplexityTarget::kEta;
  FitConfig cpe_config{};
  std::int64_t start = 16;
  std::int64_t cap = 1 << 20;
  std::int64_t resolution = 16;
  EstimatorFactory estimator{};  // empty: FitEta / FitEtaBarEo
};

struct ComplexityProbe {
  std::int64_t n;
  double pass_fraction;  // trials with P_X(|eta - eta_hat| >= eps) <= delta'
  bool passed;
};

struct SampleComplexityResult {
  std::int64_t n;
  bool converged;
  std::vector<ComplexityProbe> probes;
};

// Smallest n (doubling then bisection) such that at least (1 - delta) of the
// trials have P_X(|eta(x) - eta_hat(x)| >= eps) <= delta' (or the eta_bar(.,1)
// analogue).
SampleComplexityResult EstimateSampleComplexity(
    const SyntheticDistribution& dist, const SampleComplexityOptions& options);

// Fraction of m draws with |gamma(x) - k| < tol, where gamma is the setting's
// score without its constant term and k the matching threshold. Used to
// check the no-atom condition on the shipped designs.
double ScoreAtomFraction(const SyntheticDistribution& dist, Setting setting,
                         const FairnessParams& params, std::int64_t m,
                         std::uint64_t seed, double tol);

// CSV writers (header row first).
void WriteRegretCurveCsv(const RegretCurve& curve, std::ostream& out);
void WriteTradeoffGapCsv(const std::vector<TradeoffGapResult>& rows,
                         std::ostream& out);

}  // namespace fairplug

#endif  // FAIRPLUG_SYNTHETIC_H_
