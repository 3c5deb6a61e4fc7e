#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "fairplug/error.h"
#include "fairplug/metrics.h"
#include "oracles/finite_law.h"

namespace fairplug {
namespace {

const std::vector<int> kPred{1, 1, -1, -1, 1, -1, 1, -1};
const std::vector<int> kTruth{1, -1, 1, -1, 1, 1, -1, -1};
const std::vector<int> kGroup{1, 1, 1, 1, -1, -1, -1, -1};

TEST(EmpiricalRates, HandCounts) {
  // Positives at 0, 2, 4, 5 (predicted 1, -1, 1, -1); negatives at 1, 3, 6, 7.
  const GroupRates r = EmpiricalRates(kPred, kTruth);
  EXPECT_DOUBLE_EQ(r.tpr, 0.5);
  EXPECT_DOUBLE_EQ(r.tnr, 0.5);
  EXPECT_DOUBLE_EQ(r.fpr, 0.5);
  EXPECT_DOUBLE_EQ(r.fnr, 0.5);
  const std::vector<int> all_pos(8, 1);
  EXPECT_THROW(EmpiricalRates(kPred, all_pos), DataError);
  EXPECT_THROW(EmpiricalRates(std::vector<int>{1}, kTruth), std::invalid_argument);
}

TEST(CostSensitiveRisk, HandValues) {
  const GroupRates r = GroupRates::FromTprTnr(0.8, 0.6);
  EXPECT_DOUBLE_EQ(r.fpr, 1.0 - 0.6);
  EXPECT_NEAR(CostSensitiveRisk(r, 0.3, 0.25), 0.25 * 0.7 * 0.4 + 0.3 * 0.75 * 0.2, 1e-15);
  EXPECT_NEAR(BalancedCsr(r, 0.25), 0.25 * 0.4 + 0.75 * 0.2, 1e-15);
  EXPECT_NEAR(BalancedAccuracy(r), 0.7, 1e-15);
}

TEST(BalancedCsr, ComplementClassifierIdentity) {
  // Flipping every prediction swaps FPR with TNR and FNR with TPR.
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> unit;
  for (int i = 0; i < 1000; ++i) {
    const double tpr = unit(rng), tnr = unit(rng), c = unit(rng);
    const GroupRates f = GroupRates::FromTprTnr(tpr, tnr);
    const GroupRates flipped = GroupRates::FromTprTnr(1.0 - tpr, 1.0 - tnr);
    EXPECT_NEAR(BalancedCsr(f, c) + BalancedCsr(flipped, c), 1.0, 1e-12);
  }
}

TEST(FairnessMeasures, HandValues) {
  // Group +1: predictions 1,1,-1,-1; group -1: 1,-1,1,-1.
  EXPECT_DOUBLE_EQ(DisparateImpact(kPred, kGroup), 1.0);
  EXPECT_DOUBLE_EQ(MeanDifference(kPred, kGroup), 0.0);
  const std::vector<int> pred{1, 1, 1, -1, 1, -1, -1, -1};
  EXPECT_DOUBLE_EQ(DisparateImpact(pred, kGroup), 0.25 / 0.75);
  EXPECT_DOUBLE_EQ(MeanDifference(pred, kGroup), -0.5);
  EXPECT_DOUBLE_EQ(DparViolation(pred, kGroup), 0.5);
  // TPR within Y=1: group +1 rows 0, 2 -> 1, 1; group -1 rows 4, 5 -> 1, -1.
  EXPECT_DOUBLE_EQ(EoViolation(pred, kTruth, kGroup), 0.5);
  const std::vector<int> none(8, -1);
  EXPECT_THROW(DisparateImpact(none, kGroup), DataError);
  const std::vector<int> one_group(8, 1);
  EXPECT_THROW(DparViolation(pred, one_group), DataError);
}

TEST(EmpiricalRatePair, EoConditionsOnPositiveLabel) {
  const RatePair eo = EmpiricalRatePair(kPred, kTruth, kGroup, Criterion::kEo);
  // Y=1 rows 0, 2, 4, 5: ybar 1, 1, -1, -1; predictions 1, -1, 1, -1.
  EXPECT_DOUBLE_EQ(eo.dbar.tpr, 0.5);
  EXPECT_DOUBLE_EQ(eo.dbar.fpr, 0.5);
  const RatePair dp = EmpiricalRatePair(kPred, kTruth, kGroup, Criterion::kDpar);
  EXPECT_DOUBLE_EQ(dp.dbar.tpr, 0.5);
  EXPECT_DOUBLE_EQ(dp.d.tpr, eo.d.tpr);
}

PerformanceInputs Inputs(double tpr, double tnr, double tpr_bar, double tnr_bar,
                         double lambda, Criterion crit) {
  return {GroupRates::FromTprTnr(tpr, tnr), GroupRates::FromTprTnr(tpr_bar, tnr_bar),
          DistStats(0.3, 0.6, 0.45), FairnessParams(lambda, 0.4, 0.7), crit};
}

TEST(PerformanceMeasure, Collapses) {
  EXPECT_EQ(PerformanceMeasure(Inputs(1, 1, 0.3, 0.9, 0.0, Criterion::kEo)), 0.0);
  const PerformanceInputs in = Inputs(0.7, 0.6, 0.3, 0.9, 0.0, Criterion::kEo);
  EXPECT_DOUBLE_EQ(PerformanceMeasure(in), -CostSensitiveRisk(in.rates_d, 0.3, 0.4));
}

TEST(PerformanceMeasure, UsesCriterionPrior) {
  const PerformanceInputs eo = Inputs(0.7, 0.6, 0.3, 0.9, 2.0, Criterion::kEo);
  const PerformanceInputs dp = Inputs(0.7, 0.6, 0.3, 0.9, 2.0, Criterion::kDpar);
  const double base = -CostSensitiveRisk(eo.rates_d, 0.3, 0.4);
  EXPECT_NEAR(PerformanceMeasure(eo), base + 2.0 * CostSensitiveRisk(eo.rates_dbar, 0.45, 0.7),
              1e-15);
  EXPECT_NEAR(PerformanceMeasure(dp), base + 2.0 * CostSensitiveRisk(dp.rates_dbar, 0.6, 0.7),
              1e-15);
  EXPECT_NEAR(PerformanceMeasureBalanced(dp), base + 2.0 * BalancedCsr(dp.rates_dbar, 0.7),
              1e-15);
}

TEST(PerformanceMeasure, AffineInEachRate) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> unit(0.1, 0.9);
  for (int trial = 0; trial < 200; ++trial) {
    double r[4] = {unit(rng), unit(rng), unit(rng), unit(rng)};
    const double lambda = 4.0 * unit(rng) - 2.0;
    for (int k = 0; k < 4; ++k) {
      auto at = [&](double delta) {
        double q[4] = {r[0], r[1], r[2], r[3]};
        q[k] += delta;
        return PerformanceMeasure(Inputs(q[0], q[1], q[2], q[3], lambda, Criterion::kEo));
      };
      EXPECT_NEAR(at(0.05) - 2.0 * at(0.0) + at(-0.05), 0.0, 1e-14);
    }
  }
}

TEST(Regret, Difference) {
  EXPECT_DOUBLE_EQ(Regret(0.8, 1.0), 0.2);
  EXPECT_EQ(Regret(0.5, 0.5), 0.0);
}

// Super-level sets of DI and MD against balanced risks over the sensitive
// attribute, checked over every classifier of random 4-point laws.
TEST(FairnessReductions, DisparateImpactAndMeanDifferenceLevelSets) {
  std::mt19937_64 rng(21);
  int checked = 0;
  for (int d = 0; d < 5; ++d) {
    const oracle::FiniteLaw law = oracle::RandomLaw(4, rng);
    for (unsigned mask = 0; mask < 16; ++mask) {
      const auto f = oracle::BlindFromMask(mask);
      const double a = oracle::PositiveRateInGroup(law, f, -1);
      const double b = oracle::PositiveRateInGroup(law, f, 1);
      const GroupRates rates = GroupRates::FromTprTnr(b, 1.0 - a);
      for (double tau : {0.25, 0.5, 0.8, 1.0, 2.0}) {
        const double kappa = tau / (1.0 + tau);
        if (b > 0.0) {
          EXPECT_EQ(a / b >= tau, BalancedCsr(rates, 1.0 - kappa) >= kappa);
          ++checked;
        }
      }
      for (double tau : {-0.6, -0.25, 0.1, 0.4, 0.75}) {
        const double kappa = (1.0 + tau) / 2.0;
        EXPECT_EQ(a - b >= tau, BalancedCsr(rates, 0.5) >= kappa);
        ++checked;
      }
    }
  }
  EXPECT_GT(checked, 700);
}

}  // namespace
}  // namespace fairplug
