#include <cmath>
#include <random>
#include <sstream>

#include <boost/math/special_functions/gamma.hpp>
#include <gtest/gtest.h>

#include "fairplug/error.h"
#include "fairplug/privacy.h"
#include "fairplug/random.h"
#include "oracles/distributions.h"

namespace fairplug {
namespace {

Dataset UnitBallSample(std::size_t n, std::uint64_t seed, double radius = 0.8) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  FeatureMatrix x(static_cast<Eigen::Index>(n), 3);
  Eigen::VectorXd y(x.rows()), s(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (int j = 0; j < 3; ++j) x(i, j) = unit(rng);
    x.row(i) *= radius / std::max(1.0, x.row(i).norm() * std::sqrt(3.0));
    y[i] = x(i, 0) + 0.3 * unit(rng) > 0 ? 0.5 : -0.5;
    s[i] = x(i, 1) + 0.3 * unit(rng) > 0 ? 1.0 : -1.0;
  }
  return Dataset(x, y, s, 0.5);
}

std::vector<double> NoiseNorms(std::size_t dim, double gamma, int draws, std::uint64_t seed) {
  std::vector<double> norms(static_cast<std::size_t>(draws));
  for (int i = 0; i < draws; ++i) {
    norms[std::size_t(i)] = SampleNoise(dim, gamma, DeriveSeed(seed, {std::uint64_t(i)})).norm();
  }
  return norms;
}

TEST(SampleNoise, DeterministicAndValidated) {
  EXPECT_EQ(SampleNoise(4, 2.0, 9), SampleNoise(4, 2.0, 9));
  EXPECT_NE(SampleNoise(4, 2.0, 9), SampleNoise(4, 2.0, 10));
  EXPECT_EQ(SampleNoise(4, 2.0, 9).size(), 4);
  EXPECT_THROW(SampleNoise(0, 1.0, 1), std::invalid_argument);
  EXPECT_THROW(SampleNoise(2, 0.0, 1), std::invalid_argument);
}

TEST(SampleNoise, RadiusFollowsGammaLaw) {
  for (auto [dim, gamma] : {std::pair<std::size_t, double>{1, 3.0}, {3, 10.0}, {12, 40.0}}) {
    const auto norms = NoiseNorms(dim, gamma, 20000, 5);
    const double ks = oracle::KsDistance(norms, [&](double r) {
      return oracle::GammaCdf(r, double(dim), gamma);
    });
    EXPECT_LT(ks, 0.015) << "dim " << dim;
  }
}

TEST(SampleNoise, PlanarDrawsMatchRejectionSampler) {
  const double gamma = 4.0;
  std::mt19937_64 rng(17);
  std::vector<double> ref_x, ref_r, got_x, got_r;
  for (int i = 0; i < 20000; ++i) {
    const auto b = oracle::PlanarLaplaceRejection(gamma, rng);
    ref_x.push_back(b[0]);
    ref_r.push_back(std::hypot(b[0], b[1]));
    const Eigen::VectorXd v = SampleNoise(2, gamma, DeriveSeed(3, {std::uint64_t(i)}));
    got_x.push_back(v[0]);
    got_r.push_back(v.norm());
  }
  EXPECT_LT(oracle::KsTwoSample(ref_x, got_x), 0.025);
  EXPECT_LT(oracle::KsTwoSample(ref_r, got_r), 0.025);
}

TEST(SampleNoise, DirectionIsIsotropic) {
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(5);
  for (int i = 0; i < 20000; ++i) {
    const Eigen::VectorXd v = SampleNoise(5, 1.0, DeriveSeed(8, {std::uint64_t(i)}));
    sum += v / v.norm();
  }
  EXPECT_LT((sum / 20000.0).norm(), 0.03);
}

TEST(Budget, GammaAndSensitivity) {
  const PrivacyBudget b = PrivacyBudget::Make(1.0, 1000, 0.01, 4);
  EXPECT_DOUBLE_EQ(b.gamma, 1000 * 0.01 * 1.0 / 2.0);
  EXPECT_DOUBLE_EQ(SensitivityBound(1000, 0.01), 2.0 / (1000 * 0.01));
  EXPECT_THROW(PrivacyBudget::Make(0.0, 10, 0.1, 2), UsageError);
  EXPECT_THROW(PrivacyBudget::Make(1.0, 10, 0.0, 2), UsageError);
}

TEST(Privatize, AddsSeededNoiseOrNone) {
  const LinearCpe model(Eigen::Vector3d(0.5, -0.2, 0.1), 0.01, InputArity::kFeatures);
  const PrivatizedCpe none = Privatize(model, 500, 0.01, kNoPrivacy, 1);
  EXPECT_TRUE(none.noise.isZero(0.0));
  EXPECT_EQ(none.Privatized().weights(), model.weights());
  const PrivatizedCpe dp = Privatize(model, 500, 0.01, 1.0, 42);
  EXPECT_EQ(dp.noise, SampleNoise(3, 500 * 0.01 / 2.0, 42));
  EXPECT_EQ(dp.Privatized().weights(), model.weights() + dp.noise);
  EXPECT_TRUE(ReplayMatches(dp));
  EXPECT_THROW(Privatize(model, 500, 0.02, 1.0, 42), UsageError);
}

TEST(Privatize, RecordRoundTrips) {
  const LinearCpe model(Eigen::Vector4d(0.5, -0.2, 0.3, 0.1), 0.05,
                        InputArity::kFeaturesPlusLabel, 0.5);
  const PrivatizedCpe dp = Privatize(model, 321, 0.05, 0.7, 5);
  std::stringstream ss;
  SavePrivatizedCpe(dp, ss);
  const PrivatizedCpe back = LoadPrivatizedCpe(ss);
  EXPECT_EQ(back.noise, dp.noise);
  EXPECT_EQ(back.base.weights(), dp.base.weights());
  EXPECT_EQ(back.seed, 5u);
  EXPECT_TRUE(ReplayMatches(back));
  PrivatizedCpe tampered = back;
  tampered.noise[0] += 1e-9;
  EXPECT_FALSE(ReplayMatches(tampered));
}

TEST(MaxJointNorm, IncludesLabel) {
  FeatureMatrix x(2, 2);
  x << 0.6, 0.0, 0.0, 0.3;
  const Dataset d(x, Eigen::Vector2d(0.8, -0.8), Eigen::Vector2d(1, -1), 0.8);
  EXPECT_NEAR(MaxJointNorm(d), 1.0, 1e-15);
}

TEST(DpPluginPipeline, OneNoiseDrawAndChecks) {
  const Dataset train = UnitBallSample(400, 1);
  FitConfig config;
  config.lambda_reg = 0.01;
  const DpPluginPipeline dp(train, Setting::kEoBlind, config, 1.0, 3);
  EXPECT_EQ(dp.noise_draws(), 1);
  ASSERT_TRUE(dp.release().has_value());
  EXPECT_EQ(dp.release()->budget.gamma, 400 * 0.01 * 1.0 / 2.0);
  const auto* released = dynamic_cast<const LinearCpe*>(dp.models().eta_bar.get());
  ASSERT_NE(released, nullptr);
  EXPECT_EQ(released->weights(), dp.eta_bar_nonprivate().weights() + dp.release()->noise);

  const DpPluginPipeline plain(train, Setting::kDparBlind, config, kNoPrivacy, 3);
  EXPECT_EQ(plain.noise_draws(), 0);

  EXPECT_THROW(DpPluginPipeline(train, Setting::kEoAware, config, 1.0, 3), UsageError);
  FitConfig unreg = config;
  unreg.regularize_intercept = false;
  EXPECT_THROW(DpPluginPipeline(train, Setting::kEoBlind, unreg, 1.0, 3), UsageError);
  const Dataset wide = UnitBallSample(50, 2, 3.0);
  EXPECT_THROW(DpPluginPipeline(wide, Setting::kEoBlind, config, 1.0, 3), DataError);
}

TEST(DpPluginPipeline, HugeBudgetApproachesNonPrivate) {
  const Dataset train = UnitBallSample(400, 4);
  FitConfig config;
  config.lambda_reg = 0.01;
  const DpPluginPipeline a(train, Setting::kEoBlind, config, 1e9, 3);
  EXPECT_LT(a.release()->noise.norm(), 1e-5);
}

TEST(TailDecay, MatchesGammaQuantile) {
  const std::size_t dim = 6;
  const double lambda = 0.01, eps_p = 1.0, eps = 0.05, delta = 0.1;
  const SizeSearchResult r =
      EstimateTailDecayComplexity(dim, lambda, eps_p, eps, delta, 20000, 7);
  ASSERT_TRUE(r.converged);
  const double q = boost::math::gamma_q_inv(double(dim), delta);
  const double exact = 2.0 * q / (lambda * eps_p * eps);
  EXPECT_NEAR(double(r.n), exact, 0.03 * exact);
  EXPECT_THROW(EstimateTailDecayComplexity(dim, 0.0, eps_p, eps, delta, 10, 1), UsageError);
}

}  // namespace
}  // namespace fairplug
