#include "fairplug/metrics.h"

#include <cmath>
#include <stdexcept>

#include "fairplug/error.h"

namespace fairplug {
namespace {

void CheckSizes(std::size_t a, std::size_t b) {
  if (a != b) throw std::invalid_argument("prediction and label lengths differ");
}

// Positive prediction rate within each sensitive group: {ybar=-1, ybar=+1}.
std::pair<double, double> GroupPositiveRates(std::span<const int> predictions,
                                             std::span<const int> sensitive) {
  CheckSizes(predictions.size(), sensitive.size());
  double pos[2] = {0, 0}, count[2] = {0, 0};
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const int g = sensitive[i] == 1 ? 1 : 0;
    count[g] += 1;
    if (predictions[i] == 1) pos[g] += 1;
  }
  if (count[0] == 0 || count[1] == 0) {
    throw DataError("a sensitive group has no rows");
  }
  return {pos[0] / count[0], pos[1] / count[1]};
}

}  // namespace

GroupRates GroupRates::FromTprTnr(double tpr, double tnr) {
  return GroupRates{tpr, tnr, 1.0 - tnr, 1.0 - tpr};
}

GroupRates EmpiricalRates(std::span<const int> predictions,
                          std::span<const int> truth) {
  CheckSizes(predictions.size(), truth.size());
  double tp = 0, p = 0, tn = 0, n = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] == 1) {
      p += 1;
      if (predictions[i] == 1) tp += 1;
    } else {
      n += 1;
      if (predictions[i] != 1) tn += 1;
    }
  }
  if (p == 0 || n == 0) throw DataError("rates need both truth classes present");
  return GroupRates::FromTprTnr(tp / p, tn / n);
}

double CostSensitiveRisk(const GroupRates& r, double prior, double c) {
  return c * (1.0 - prior) * r.fpr + prior * (1.0 - c) * r.fnr;
}

double BalancedCsr(const GroupRates& r, double c) {
  return c * r.fpr + (1.0 - c) * r.fnr;
}

double DisparateImpact(std::span<const int> predictions,
                       std::span<const int> sensitive) {
  auto [neg, pos] = GroupPositiveRates(predictions, sensitive);
  if (pos == 0.0) throw DataError("disparate impact undefined: no positives in ybar=+1");
  return neg / pos;
}

double MeanDifference(std::span<const int> predictions,
                      std::span<const int> sensitive) {
  auto [neg, pos] = GroupPositiveRates(predictions, sensitive);
  return neg - pos;
}

double EoViolation(std::span<const int> predictions, std::span<const int> truth,
                   std::span<const int> sensitive) {
  CheckSizes(predictions.size(), truth.size());
  CheckSizes(predictions.size(), sensitive.size());
  std::vector<int> pred, sens;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] == 1) {
      pred.push_back(predictions[i]);
      sens.push_back(sensitive[i]);
    }
  }
  auto [neg, pos] = GroupPositiveRates(pred, sens);
  return std::abs(pos - neg);
}

double DparViolation(std::span<const int> predictions,
                     std::span<const int> sensitive) {
  auto [neg, pos] = GroupPositiveRates(predictions, sensitive);
  return std::abs(pos - neg);
}

double BalancedAccuracy(const GroupRates& r) { return 0.5 * (r.tpr + r.tnr); }

Criterion CriterionOf(Setting setting) {
  return IsEo(setting) ? Criterion::kEo : Criterion::kDpar;
}

double PerformanceMeasure(const PerformanceInputs& in) {
  const double prior_bar = in.criterion == Criterion::kEo ? in.stats.beta
                                                          : in.stats.pi_bar;
  return -(CostSensitiveRisk(in.rates_d, in.stats.pi, in.params.c) -
           in.params.lambda *
               CostSensitiveRisk(in.rates_dbar, prior_bar, in.params.c_bar));
}

double PerformanceMeasureBalanced(const PerformanceInputs& in) {
  return -(CostSensitiveRisk(in.rates_d, in.stats.pi, in.params.c) -
           in.params.lambda * BalancedCsr(in.rates_dbar, in.params.c_bar));
}

RatePair EmpiricalRatePair(std::span<const int> predictions,
                           std::span<const int> truth,
                           std::span<const int> sensitive, Criterion criterion) {
  CheckSizes(predictions.size(), truth.size());
  CheckSizes(predictions.size(), sensitive.size());
  RatePair out{EmpiricalRates(predictions, truth), {}};
  if (criterion == Criterion::kDpar) {
    out.dbar = EmpiricalRates(predictions, sensitive);
    return out;
  }
  std::vector<int> pred, sens;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] == 1) {
      pred.push_back(predictions[i]);
      sens.push_back(sensitive[i]);
    }
  }
  out.dbar = EmpiricalRates(pred, sens);
  return out;
}

double Regret(double measure_f, double measure_opt) { return measure_opt - measure_f; }

}  // namespace fairplug
