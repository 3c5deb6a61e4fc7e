#include <cmath>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "fairplug/cpe.h"
#include "fairplug/dataset.h"
#include "fairplug/error.h"
#include "oracles/numeric.h"

namespace fairplug {
namespace {

// Labels drawn from a known logistic model on Gaussian features.
Dataset LogisticSample(std::size_t n, const Eigen::VectorXd& w, std::uint64_t seed,
                       double label_scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit;
  const Eigen::Index d = w.size() - 1;
  FeatureMatrix x(static_cast<Eigen::Index>(n), d);
  Eigen::VectorXd y(static_cast<Eigen::Index>(n));
  Eigen::VectorXd s(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    double z = w[d];
    for (Eigen::Index j = 0; j < d; ++j) {
      x(i, j) = normal(rng);
      z += w[j] * x(i, j);
    }
    y[i] = unit(rng) < oracle::Logistic(z) ? label_scale : -label_scale;
    s[i] = unit(rng) < 0.5 ? 1.0 : -1.0;
  }
  return Dataset(std::move(x), std::move(y), std::move(s), label_scale);
}

TEST(Sigmoid, StableAtExtremes) {
  EXPECT_DOUBLE_EQ(Sigmoid(0.0), 0.5);
  EXPECT_TRUE(std::isfinite(Sigmoid(-800.0)));
  EXPECT_DOUBLE_EQ(Sigmoid(800.0), 1.0);
  EXPECT_NEAR(Sigmoid(2.0) + Sigmoid(-2.0), 1.0, 1e-15);
}

TEST(LogisticObjective, GradientMatchesFiniteDifferences) {
  const Dataset data = LogisticSample(50, Eigen::Vector3d(1.0, -2.0, 0.5), 3);
  Eigen::VectorXd targets(50);
  for (int i = 0; i < 50; ++i) targets[i] = data.label_sign(std::size_t(i));
  for (bool reg_intercept : {true, false}) {
    const Eigen::Vector3d w(0.3, -0.7, 0.2);
    Eigen::VectorXd grad;
    LogisticObjective(data.features(), targets, w, 0.1, reg_intercept, &grad);
    const auto fd = oracle::FiniteDifferenceGradient(
        [&](const std::vector<double>& v) {
          return LogisticObjective(data.features(), targets,
                                   Eigen::Map<const Eigen::VectorXd>(v.data(), 3), 0.1,
                                   reg_intercept);
        },
        {w[0], w[1], w[2]});
    for (int j = 0; j < 3; ++j) EXPECT_NEAR(grad[j], fd[std::size_t(j)], 1e-7);
  }
}

TEST(LogisticLossDerivative, MatchesFiniteDifference) {
  for (double m : {-30.0, -1.0, 0.0, 2.5, 40.0}) {
    const auto fd = oracle::FiniteDifferenceGradient(
        [](const std::vector<double>& v) { return std::log1p(std::exp(-v[0])); }, {m});
    EXPECT_NEAR(LogisticLossDerivative(m), fd[0], 1e-7);
  }
}

TEST(Fit, ReachesStationaryPoint) {
  const Dataset data = LogisticSample(400, Eigen::Vector3d(1.0, -2.0, 0.5), 5);
  FitConfig config;
  config.lambda_reg = 0.01;
  config.tolerance = 1e-7;
  FitReport report;
  const LinearCpe model = FitEta(data, config, &report);
  EXPECT_TRUE(report.converged);
  Eigen::VectorXd targets(400), grad;
  for (int i = 0; i < 400; ++i) targets[i] = data.label_sign(std::size_t(i));
  LogisticObjective(data.features(), targets, model.weights(), 0.01, true, &grad);
  EXPECT_LT(grad.norm(), 1e-7);
}

TEST(Fit, RecoversWellSpecifiedModel) {
  const Eigen::Vector3d truth(1.0, -2.0, 0.5);
  const Dataset data = LogisticSample(20000, truth, 11);
  FitConfig config;
  config.lambda_reg = 0.0;
  const LinearCpe model = FitEta(data, config);
  EXPECT_LT((model.weights() - truth).norm(), 0.15);
}

TEST(Fit, RandomInitConvergesToSameOptimum) {
  const Dataset data = LogisticSample(300, Eigen::Vector3d(0.5, 0.5, -0.5), 2);
  FitConfig config;
  config.lambda_reg = 0.05;
  config.tolerance = 1e-10;
  const LinearCpe a = FitEta(data, config);
  config.init = InitKind::kRandom;
  config.seed = 99;
  const LinearCpe b = FitEta(data, config);
  EXPECT_LT((a.weights() - b.weights()).norm(), 1e-8);
}

TEST(Fit, RejectsSingleClassAndBadConfig) {
  FeatureMatrix x(3, 1);
  x << 1, 2, 3;
  Eigen::VectorXd y = Eigen::VectorXd::Ones(3);
  EXPECT_THROW(Fit(x, y, FitConfig{}, InputArity::kFeatures), DataError);
  y[0] = 0.5;
  EXPECT_THROW(Fit(x, y, FitConfig{}, InputArity::kFeatures), DataError);
  y << 1, -1, 1;
  FitConfig bad;
  bad.max_iters = 0;
  EXPECT_THROW(Fit(x, y, bad, InputArity::kFeatures), UsageError);
  x(1, 0) = NAN;
  EXPECT_THROW(Fit(x, y, FitConfig{}, InputArity::kFeatures), DataError);
}

TEST(Fit, IterationCapLeavesUnconverged) {
  const Dataset data = LogisticSample(200, Eigen::Vector3d(1.0, 1.0, 0.0), 4);
  FitConfig config;
  config.max_iters = 2;
  config.tolerance = 1e-12;
  FitReport report;
  FitEta(data, config, &report);
  EXPECT_FALSE(report.converged);
  EXPECT_EQ(report.iterations, 2);
}

TEST(AugmentedDesigns, AppendLabelOrSensitive) {
  const Dataset data = LogisticSample(5, Eigen::Vector2d(1.0, 0.0), 8, 0.5);
  const DesignMatrix with_label = FeaturesWithLabel(data);
  const DesignMatrix with_group = FeaturesWithSensitive(data);
  ASSERT_EQ(with_label.cols(), 2);
  for (Eigen::Index i = 0; i < 5; ++i) {
    EXPECT_EQ(with_label(i, 0), data.features()(i, 0));
    EXPECT_EQ(with_label(i, 1), data.labels()[i]);
    EXPECT_EQ(with_group(i, 1), data.sensitive()[i]);
  }
}

TEST(FitEtaBarEo, KeepsLabelScale) {
  const Dataset data = LogisticSample(200, Eigen::Vector3d(1.0, -1.0, 0.0), 6, 0.5);
  const LinearCpe model = FitEtaBarEo(data, FitConfig{});
  EXPECT_EQ(model.arity(), InputArity::kFeaturesPlusLabel);
  EXPECT_EQ(model.label_scale(), 0.5);
  EXPECT_EQ(model.input_dim(), 3u);
}

TEST(LinearCpe, ProbabilityAndInputChecks) {
  const LinearCpe model(Eigen::Vector3d(1.0, -1.0, 0.25), 0.1, InputArity::kFeatures);
  const double x[] = {0.5, 2.0};
  EXPECT_DOUBLE_EQ(model.Margin(x), 0.5 - 2.0 + 0.25);
  EXPECT_DOUBLE_EQ(model.Probability(x), oracle::Logistic(-1.25));
  const double short_x[] = {1.0};
  EXPECT_THROW(model.Probability(short_x), std::invalid_argument);
  EXPECT_THROW(LinearCpe(Eigen::VectorXd(0), 0.1, InputArity::kFeatures),
               std::invalid_argument);
  EXPECT_THROW(LinearCpe(Eigen::VectorXd::Ones(2), -1.0, InputArity::kFeatures),
               std::invalid_argument);
}

TEST(SaveCpe, RoundTripsExactly) {
  const LinearCpe model(Eigen::Vector3d(0.1, 1.0 / 3.0, -7e-17), 0.01,
                        InputArity::kFeaturesPlusLabel, 0.5);
  std::stringstream ss;
  SaveCpe(model, ss);
  const LinearCpe back = LoadCpe(ss);
  EXPECT_EQ(back.weights(), model.weights());
  EXPECT_EQ(back.lambda_reg(), 0.01);
  EXPECT_EQ(back.arity(), InputArity::kFeaturesPlusLabel);
  EXPECT_EQ(back.label_scale(), 0.5);
  std::stringstream bad("not a model\n");
  EXPECT_THROW(LoadCpe(bad), DataError);
  EXPECT_THROW(ParseArity("bogus"), DataError);
}

}  // namespace
}  // namespace fairplug
