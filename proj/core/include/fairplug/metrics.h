#ifndef FAIRPLUG_METRICS_H_
#define FAIRPLUG_METRICS_H_

#include <span>

#include "fairplug/dataset.h"

namespace fairplug {

// Conditional rates of a classifier with respect to one binary target.
struct GroupRates {
  double tpr;
  double tnr;
  double fpr;
  double fnr;

  // From TPR and TNR; FNR and FPR are their complements.
  static GroupRates FromTprTnr(double tpr, double tnr);
};

// Plug-in frequencies. `predictions` and `truth` hold +1/-1. Throws
// DataError when a truth class is absent.
GroupRates EmpiricalRates(std::span<const int> predictions,
                          std::span<const int> truth);

// c (1 - prior) FPR + prior (1 - c) FNR.
double CostSensitiveRisk(const GroupRates& rates, double prior, double c);
// c FPR + (1 - c) FNR.
double BalancedCsr(const GroupRates& rates, double c);

// P(yhat=+ | ybar=-1) / P(yhat=+ | ybar=+1). Throws DataError if either
// group is empty or the ybar=+1 positive rate is zero.
double DisparateImpact(std::span<const int> predictions,
                       std::span<const int> sensitive);
// P(yhat=+ | ybar=-1) - P(yhat=+ | ybar=+1).
double MeanDifference(std::span<const int> predictions,
                      std::span<const int> sensitive);

// |TPR_{ybar=+1} - TPR_{ybar=-1}| over the given rows.
double EoViolation(std::span<const int> predictions, std::span<const int> truth,
                   std::span<const int> sensitive);
// |P(yhat=+ | ybar=+1) - P(yhat=+ | ybar=-1)|.
double DparViolation(std::span<const int> predictions,
                     std::span<const int> sensitive);

double BalancedAccuracy(const GroupRates& rates);

// Which sensitive-attribute distribution the fairness term is measured on.
// EO: (X, Ybar) conditioned on Y = 1, class prior beta.
// DPar: (X, Ybar) unconditioned, class prior pi_bar.
enum class Criterion { kEo, kDpar };
Criterion CriterionOf(Setting setting);

// Arguments of the performance metric Psi.
struct PerformanceInputs {
  GroupRates rates_d;      // w.r.t. Y
  GroupRates rates_dbar;   // w.r.t. Ybar on the criterion's distribution
  DistStats stats;
  FairnessParams params;
  Criterion criterion = Criterion::kEo;
};

// -{CS(f; D, c) - lambda CS(f; Dbar, c_bar)}, with Dbar's prior beta (EO) or
// pi_bar (DPar).
double PerformanceMeasure(const PerformanceInputs& inputs);
// DPar variant with the balanced risk on Dbar:
// -{CS(f; D, c) - lambda CS_bal(f; Dbar, c_bar)}.
double PerformanceMeasureBalanced(const PerformanceInputs& inputs);

// Empirical rates on D and on the criterion's Dbar from per-row predictions.
struct RatePair {
  GroupRates d;
  GroupRates dbar;
};
RatePair EmpiricalRatePair(std::span<const int> predictions,
                           std::span<const int> truth,
                           std::span<const int> sensitive, Criterion criterion);

// measure_opt - measure_f. Monte-Carlo estimates may dip below zero.
double Regret(double measure_f, double measure_opt);

}  // namespace fairplug

#endif  // FAIRPLUG_METRICS_H_
