#include "fairplug/privacy.h"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "fairplug/error.h"
#include "fairplug/random.h"
#include "fairplug/text_io.h"

namespace fairplug {
namespace {

constexpr double kNormSlack = 1e-9;

std::string NextLine(std::istream& in) {
  std::string line;
  while (std::getline(in, line)) {
    auto t = Trim(line);
    if (!t.empty()) return std::string(t);
  }
  throw DataError("unexpected end of privatized CPE record");
}

}  // namespace

PrivacyBudget PrivacyBudget::Make(double eps_p, std::int64_t n, double lambda_reg,
                                  std::size_t dim) {
  if (!(eps_p > 0.0)) throw UsageError("eps_p must be > 0");
  if (n < 1) throw std::invalid_argument("privacy budget needs n >= 1");
  if (!(lambda_reg > 0.0)) {
    throw UsageError("output perturbation needs lambda_reg > 0");
  }
  return {eps_p, double(n) * lambda_reg * eps_p / 2.0, dim, n, lambda_reg};
}

double SensitivityBound(std::int64_t n, double lambda_reg) {
  if (n < 1) throw std::invalid_argument("sensitivity needs n >= 1");
  if (!(lambda_reg > 0.0)) throw std::invalid_argument("sensitivity needs lambda > 0");
  return 2.0 / (double(n) * lambda_reg);
}

Eigen::VectorXd SampleNoise(std::size_t dim, double gamma, std::uint64_t seed) {
  if (dim == 0) throw std::invalid_argument("noise dimension must be >= 1");
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be > 0");
  Rng rng(seed);
  std::gamma_distribution<double> radius(double(dim), 1.0 / gamma);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd dir(static_cast<Eigen::Index>(dim));
  double norm = 0.0;
  do {
    for (Eigen::Index j = 0; j < dir.size(); ++j) dir[j] = normal(rng);
    norm = dir.norm();
  } while (norm == 0.0);
  return dir * (radius(rng) / norm);
}

PrivatizedCpe Privatize(const LinearCpe& model, std::int64_t n, double lambda_reg,
                        double eps_p, std::uint64_t seed) {
  if (model.lambda_reg() != lambda_reg) {
    throw UsageError("privatize: model was fitted with a different lambda_reg");
  }
  const std::size_t dim = std::size_t(model.weights().size());
  PrivacyBudget budget = PrivacyBudget::Make(eps_p, n, lambda_reg, dim);
  Eigen::VectorXd noise = std::isinf(eps_p) ? Eigen::VectorXd::Zero(Eigen::Index(dim))
                                            : SampleNoise(dim, budget.gamma, seed);
  return {model, std::move(noise), budget, seed};
}

void SavePrivatizedCpe(const PrivatizedCpe& cpe, std::ostream& out) {
  std::vector<double> noise(cpe.noise.data(), cpe.noise.data() + cpe.noise.size());
  out << "privatized v1\n"
      << "eps_p=" << FormatDouble(cpe.budget.eps_p) << "\n"
      << "gamma=" << FormatDouble(cpe.budget.gamma) << "\n"
      << "n=" << cpe.budget.n << "\n"
      << "lambda_reg=" << FormatDouble(cpe.budget.lambda_reg) << "\n"
      << "seed=" << cpe.seed << "\n"
      << "noise=" << JoinDoubles(noise) << "\n";
  SaveCpe(cpe.base, out);
}

PrivatizedCpe LoadPrivatizedCpe(std::istream& in) {
  if (NextLine(in) != "privatized v1") throw DataError("not a privatized CPE record");
  KeyValues kv;
  for (const char* key : {"eps_p", "gamma", "n", "lambda_reg", "seed", "noise"}) {
    auto parsed = ParseKeyValues(NextLine(in));
    auto it = parsed.find(key);
    if (it == parsed.end()) throw DataError(std::string("privatized record missing ") + key);
    kv[key] = it->second;
  }
  LinearCpe base = LoadCpe(in);
  auto noise = ParseDoubleList(kv["noise"]);
  if (noise.size() != std::size_t(base.weights().size())) {
    throw DataError("privatized record: noise and weights differ in length");
  }
  PrivacyBudget budget = PrivacyBudget::Make(ParseDouble(kv["eps_p"]), ParseInt(kv["n"]),
                                             ParseDouble(kv["lambda_reg"]), noise.size());
  if (budget.gamma != ParseDouble(kv["gamma"])) {
    throw DataError("privatized record: gamma does not match n lambda eps_p / 2");
  }
  const auto seed = std::stoull(kv["seed"]);
  return {std::move(base), Eigen::Map<Eigen::VectorXd>(noise.data(), Eigen::Index(noise.size())),
          budget, seed};
}

bool ReplayMatches(const PrivatizedCpe& cpe) {
  const auto dim = std::size_t(cpe.noise.size());
  const Eigen::VectorXd replay = std::isinf(cpe.budget.eps_p)
                                     ? Eigen::VectorXd::Zero(Eigen::Index(dim))
                                     : SampleNoise(dim, cpe.budget.gamma, cpe.seed);
  return replay == cpe.noise;
}

double MaxJointNorm(const Dataset& data) {
  double best = 0.0;
  for (std::size_t i = 0; i < data.rows(); ++i) {
    const double y = data.labels()[Eigen::Index(i)];
    best = std::max(best, std::sqrt(data.features().row(Eigen::Index(i)).squaredNorm() + y * y));
  }
  return best;
}

DpPluginPipeline::DpPluginPipeline(const Dataset& train, Setting setting,
                                   const FitConfig& config, double eps_p,
                                   std::uint64_t seed)
    : eps_p_(eps_p) {
  if (IsAware(setting)) throw UsageError("DP pipelines exist only for blind settings");
  if (!std::isinf(eps_p)) {
    if (!(config.lambda_reg > 0.0) || !config.regularize_intercept) {
      throw UsageError("DP pipeline needs lambda_reg > 0 with a regularized intercept");
    }
    const double norm = IsEo(setting) ? MaxJointNorm(train)
                                      : train.features().rowwise().norm().maxCoeff();
    if (norm > 1.0 + kNormSlack) {
      throw DataError("training rows exceed the unit norm bound (max " +
                      FormatDouble(norm) + "); preprocess the data first");
    }
  }
  const DistStats stats = ComputeDistStats(train);
  models_.setting = setting;
  models_.pi_hat = stats.pi;
  models_.eta = std::make_shared<LinearCpe>(FitEta(train, config));
  eta_bar_fit_ = std::make_shared<LinearCpe>(
      IsEo(setting) ? FitEtaBarEo(train, config) : FitEtaBarDpar(train, config));
  if (std::isinf(eps_p)) {
    models_.eta_bar = eta_bar_fit_;
    return;
  }
  release_ = Privatize(*eta_bar_fit_, std::int64_t(train.rows()), config.lambda_reg, eps_p,
                       seed);
  ++noise_draws_;
  models_.eta_bar = std::make_shared<LinearCpe>(release_->Privatized());
}

SizeSearchResult EstimateTailDecayComplexity(std::size_t dim, double lambda_reg,
                                             double eps_p, double eps, double delta,
                                             int draws, std::uint64_t seed,
                                             std::int64_t cap) {
  if (dim == 0 || !(lambda_reg > 0.0) || !(eps_p > 0.0) || !(eps > 0.0) ||
      !(delta > 0.0 && delta < 1.0) || draws < 1) {
    throw UsageError("invalid tail-decay target");
  }
  // ||b|| = G / gamma with G ~ Gamma(dim, 1), so one set of G draws serves
  // every n.
  Rng rng(seed);
  std::gamma_distribution<double> unit(double(dim), 1.0);
  std::vector<double> g(static_cast<std::size_t>(draws));
  for (double& v : g) v = unit(rng);
  auto passes = [&](std::int64_t n) {
    const double gamma = double(n) * lambda_reg * eps_p / 2.0;
    const auto over = std::count_if(g.begin(), g.end(),
                                    [&](double v) { return v / gamma > eps; });
    return double(over) / double(draws) <= delta;
  };
  return SmallestPassingSize(passes, 1, cap, 1);
}

}  // namespace fairplug
