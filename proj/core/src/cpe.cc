#include "fairplug/cpe.h"

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

// log(1 + exp(-m)) without overflow.
double LogisticLoss(double m) {
  if (m > 0) return std::log1p(std::exp(-m));
  return -m + std::log1p(std::exp(m));
}

void CheckTargets(const Eigen::VectorXd& targets) {
  bool pos = false, neg = false;
  for (Eigen::Index i = 0; i < targets.size(); ++i) {
    if (targets[i] == 1.0) {
      pos = true;
    } else if (targets[i] == -1.0) {
      neg = true;
    } else {
      throw DataError("fit targets must be +1 or -1");
    }
  }
  if (!pos || !neg) throw DataError("fit needs at least one row of each target class");
}

std::string ReadLine(std::istream& in) {
  std::string line;
  while (std::getline(in, line)) {
    auto t = Trim(line);
    if (!t.empty()) return std::string(t);
  }
  throw DataError("unexpected end of model record");
}

}  // namespace

std::string_view ArityName(InputArity arity) {
  switch (arity) {
    case InputArity::kFeatures: return "features";
    case InputArity::kFeaturesPlusLabel: return "features+label";
    case InputArity::kFeaturesPlusSensitive: return "features+sensitive";
  }
  return "unknown";
}

InputArity ParseArity(std::string_view name) {
  if (name == "features") return InputArity::kFeatures;
  if (name == "features+label") return InputArity::kFeaturesPlusLabel;
  if (name == "features+sensitive") return InputArity::kFeaturesPlusSensitive;
  throw DataError("unknown CPE arity '" + std::string(name) + "'");
}

double Sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double LogisticLossDerivative(double margin) { return -Sigmoid(-margin); }

LinearCpe::LinearCpe(Eigen::VectorXd weights, double lambda_reg, InputArity arity,
                     double label_scale)
    : weights_(std::move(weights)),
      lambda_reg_(lambda_reg),
      arity_(arity),
      label_scale_(label_scale) {
  if (weights_.size() < 1) throw std::invalid_argument("LinearCpe needs an intercept");
  if (arity_ != InputArity::kFeatures && weights_.size() < 2) {
    throw std::invalid_argument("augmented arity needs at least two weights");
  }
  if (!(lambda_reg_ >= 0.0)) throw std::invalid_argument("lambda_reg must be >= 0");
  if (!weights_.allFinite()) throw NumericError("LinearCpe weights are not finite");
}

double LinearCpe::Margin(std::span<const double> input) const {
  if (input.size() != input_dim()) {
    throw std::invalid_argument("CPE input has dimension " +
                                std::to_string(input.size()) + ", expected " +
                                std::to_string(input_dim()));
  }
  double z = weights_[weights_.size() - 1];
  for (std::size_t j = 0; j < input.size(); ++j) z += weights_[Eigen::Index(j)] * input[j];
  return z;
}

double LinearCpe::Probability(std::span<const double> input) const {
  return Sigmoid(Margin(input));
}

LinearCpe LinearCpe::WithWeights(Eigen::VectorXd weights) const {
  if (weights.size() != weights_.size()) {
    throw std::invalid_argument("WithWeights: dimension mismatch");
  }
  return LinearCpe(std::move(weights), lambda_reg_, arity_, label_scale_);
}

void SaveCpe(const LinearCpe& model, std::ostream& out) {
  std::vector<double> w(model.weights().data(),
                        model.weights().data() + model.weights().size());
  out << "cpe v1\n"
      << "arity=" << ArityName(model.arity()) << "\n"
      << "lambda_reg=" << FormatDouble(model.lambda_reg()) << "\n"
      << "label_scale=" << FormatDouble(model.label_scale()) << "\n"
      << "weights=" << JoinDoubles(w) << "\n"
      << "end\n";
}

LinearCpe LoadCpe(std::istream& in) {
  if (ReadLine(in) != "cpe v1") throw DataError("not a CPE record");
  KeyValues kv;
  for (std::string line = ReadLine(in); line != "end"; line = ReadLine(in)) {
    auto parsed = ParseKeyValues(line);
    kv.insert(parsed.begin(), parsed.end());
  }
  for (const char* key : {"arity", "lambda_reg", "label_scale", "weights"}) {
    if (!kv.count(key)) throw DataError(std::string("CPE record missing ") + key);
  }
  auto w = ParseDoubleList(kv["weights"]);
  return LinearCpe(Eigen::Map<Eigen::VectorXd>(w.data(), Eigen::Index(w.size())),
                   ParseDouble(kv["lambda_reg"]), ParseArity(kv["arity"]),
                   ParseDouble(kv["label_scale"]));
}

void FitConfig::Validate() const {
  if (!(lambda_reg >= 0.0) || !std::isfinite(lambda_reg)) {
    throw UsageError("lambda_reg must be a finite value >= 0");
  }
  if (max_iters < 1) throw UsageError("max_iters must be >= 1");
  if (!(tolerance > 0.0)) throw UsageError("tolerance must be > 0");
}

double LogisticObjective(const DesignMatrix& rows, const Eigen::VectorXd& targets,
                         const Eigen::VectorXd& weights, double lambda_reg,
                         bool regularize_intercept, Eigen::VectorXd* gradient) {
  const Eigen::Index n = rows.rows();
  const Eigen::Index k = rows.cols();
  const auto coef = weights.head(k);
  const double intercept = weights[k];
  Eigen::VectorXd margins = rows * coef;
  margins.array() += intercept;
  margins.array() *= targets.array();

  double loss = 0.0;
  Eigen::VectorXd dloss(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    loss += LogisticLoss(margins[i]);
    dloss[i] = LogisticLossDerivative(margins[i]) * targets[i];
  }
  loss /= double(n);
  const double penalty_sq = regularize_intercept
                                ? weights.squaredNorm()
                                : coef.squaredNorm();
  const double objective = loss + 0.5 * lambda_reg * penalty_sq;

  if (gradient != nullptr) {
    gradient->resize(k + 1);
    gradient->head(k) = rows.transpose() * dloss / double(n);
    (*gradient)[k] = dloss.sum() / double(n);
    *gradient += lambda_reg * weights;
    if (!regularize_intercept) (*gradient)[k] -= lambda_reg * weights[k];
  }
  return objective;
}

LinearCpe Fit(const DesignMatrix& rows, const Eigen::VectorXd& targets,
              const FitConfig& config, InputArity arity, double label_scale,
              FitReport* report) {
  config.Validate();
  if (rows.rows() != targets.size()) throw std::invalid_argument("Fit: row count mismatch");
  if (rows.rows() < 1) throw DataError("Fit: no rows");
  if (!rows.allFinite()) throw DataError("Fit: design matrix has non-finite entries");
  CheckTargets(targets);

  const Eigen::Index dim = rows.cols() + 1;
  Eigen::VectorXd w = Eigen::VectorXd::Zero(dim);
  if (config.init == InitKind::kRandom) {
    Rng rng(config.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (Eigen::Index j = 0; j < dim; ++j) w[j] = normal(rng);
  }

  const double kArmijo = 1e-4;
  Eigen::VectorXd grad;
  double f = LogisticObjective(rows, targets, w, config.lambda_reg,
                               config.regularize_intercept, &grad);
  double step = 1.0;
  FitReport rep;
  for (rep.iterations = 0; rep.iterations < config.max_iters; ++rep.iterations) {
    if (!std::isfinite(f)) throw NumericError("Fit: objective became non-finite");
    const double gnorm_sq = grad.squaredNorm();
    if (std::sqrt(gnorm_sq) <= config.tolerance) {
      rep.converged = true;
      break;
    }
    // Backtracking from a step slightly larger than the last accepted one.
    step *= 2.0;
    Eigen::VectorXd candidate;
    double f_new = 0.0;
    for (;;) {
      candidate = w - step * grad;
      f_new = LogisticObjective(rows, targets, candidate, config.lambda_reg,
                                config.regularize_intercept);
      if (f_new <= f - kArmijo * step * gnorm_sq) break;
      step *= 0.5;
      if (step < 1e-20) throw NumericError("Fit: line search failed");
    }
    w = std::move(candidate);
    f = LogisticObjective(rows, targets, w, config.lambda_reg,
                          config.regularize_intercept, &grad);
  }
  rep.gradient_norm = grad.norm();
  rep.objective = f;
  if (rep.gradient_norm <= config.tolerance) rep.converged = true;
  if (report != nullptr) *report = rep;
  return LinearCpe(std::move(w), config.lambda_reg, arity, label_scale);
}

namespace {

Eigen::VectorXd LabelTargets(const Dataset& data) {
  Eigen::VectorXd t(Eigen::Index(data.rows()));
  for (std::size_t i = 0; i < data.rows(); ++i) t[Eigen::Index(i)] = data.label_sign(i);
  return t;
}

Eigen::VectorXd SensitiveTargets(const Dataset& data) {
  Eigen::VectorXd t(Eigen::Index(data.rows()));
  for (std::size_t i = 0; i < data.rows(); ++i) t[Eigen::Index(i)] = data.sensitive_sign(i);
  return t;
}

}  // namespace

DesignMatrix FeaturesWithLabel(const Dataset& data) {
  DesignMatrix z(Eigen::Index(data.rows()), Eigen::Index(data.dim() + 1));
  z.leftCols(Eigen::Index(data.dim())) = data.features();
  z.col(Eigen::Index(data.dim())) = data.labels();
  return z;
}

DesignMatrix FeaturesWithSensitive(const Dataset& data) {
  DesignMatrix z(Eigen::Index(data.rows()), Eigen::Index(data.dim() + 1));
  z.leftCols(Eigen::Index(data.dim())) = data.features();
  z.col(Eigen::Index(data.dim())) = data.sensitive();
  return z;
}

LinearCpe FitEta(const Dataset& data, const FitConfig& config, FitReport* report) {
  return Fit(data.features(), LabelTargets(data), config, InputArity::kFeatures, 1.0,
             report);
}

LinearCpe FitEtaBarEo(const Dataset& data, const FitConfig& config,
                      FitReport* report) {
  return Fit(FeaturesWithLabel(data), SensitiveTargets(data), config,
             InputArity::kFeaturesPlusLabel, data.label_scale(), report);
}

LinearCpe FitEtaBarDpar(const Dataset& data, const FitConfig& config,
                        FitReport* report) {
  return Fit(data.features(), SensitiveTargets(data), config, InputArity::kFeatures,
             1.0, report);
}

LinearCpe FitEtaAware(const Dataset& data, const FitConfig& config,
                      FitReport* report) {
  return Fit(FeaturesWithSensitive(data), LabelTargets(data), config,
             InputArity::kFeaturesPlusSensitive, 1.0, report);
}

}  // namespace fairplug
