#ifndef FAIRPLUG_PRIVACY_H_
#define FAIRPLUG_PRIVACY_H_

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <memory>
#include <optional>

#include <Eigen/Dense>

#include "fairplug/cpe.h"
#include "fairplug/dataset.h"
#include "fairplug/plugin.h"
#include "fairplug/search.h"

namespace fairplug {

inline constexpr double kNoPrivacy = std::numeric_limits<double>::infinity();

// Output-perturbation budget: gamma = n lambda eps_p / 2.
struct PrivacyBudget {
  double eps_p;
  double gamma;
  std::size_t dim;
  std::int64_t n;
  double lambda_reg;

  static PrivacyBudget Make(double eps_p, std::int64_t n, double lambda_reg,
                            std::size_t dim);
};

// l2 sensitivity bound 2 / (n lambda) of the regularized ERM minimizer.
double SensitivityBound(std::int64_t n, double lambda_reg);

// A vector with density proportional to exp(-gamma ||b||_2): the radius is
// Gamma(shape = dim, rate = gamma) and the direction uniform on the sphere.
// Deterministic under seed. Throws std::invalid_argument for gamma <= 0 or
// dim = 0.
Eigen::VectorXd SampleNoise(std::size_t dim, double gamma, std::uint64_t seed);

struct PrivatizedCpe {
  LinearCpe base;
  Eigen::VectorXd noise;
  PrivacyBudget budget;
  std::uint64_t seed;

  LinearCpe Privatized() const { return base.WithWeights(base.weights() + noise); }
};

// Adds SampleNoise(weights.size(), n lambda eps_p / 2, seed) to the model
// weights. The model must have been fitted with the same lambda (> 0) and a
// regularized intercept. With eps_p = kNoPrivacy the noise is zero and no
// draw is made.
PrivatizedCpe Privatize(const LinearCpe& model, std::int64_t n,
                        double lambda_reg, double eps_p, std::uint64_t seed);

// Record carries eps_p, gamma, n, lambda and seed so the noise can be
// replayed; the noise itself is stored too.
void SavePrivatizedCpe(const PrivatizedCpe& cpe, std::ostream& out);
PrivatizedCpe LoadPrivatizedCpe(std::istream& in);
// Regenerates the noise from the budget record and checks it matches.
bool ReplayMatches(const PrivatizedCpe& cpe);

// Largest ||(x, y)||_2 over rows, the input norm relevant to the eta_bar
// fit of the EO setting (x alone for DPar).
double MaxJointNorm(const Dataset& data);

// DP plug-in pipeline for the blind settings. pi_hat and eta_hat never see
// the sensitive attribute and are fitted without noise; eta_bar is fitted by
// regularized ERM and privatized once. Rules for any number of (lambda, c,
// c_bar) are post-processing of that single release.
class DpPluginPipeline {
 public:
  // Throws UsageError for aware settings and DataError when a training row
  // breaks the unit norm bound (the guarantee would be void). With
  // eps_p = kNoPrivacy it reduces to the non-private plug-in.
  DpPluginPipeline(const Dataset& train, Setting setting, const FitConfig& config,
                   double eps_p, std::uint64_t seed);

  PlugInRule Assemble(const FairnessParams& params) const {
    return models_.Assemble(params);
  }

  const PlugInModels& models() const { return models_; }
  const std::optional<PrivatizedCpe>& release() const { return release_; }
  const LinearCpe& eta_bar_nonprivate() const { return *eta_bar_fit_; }
  int noise_draws() const { return noise_draws_; }
  double eps_p() const { return eps_p_; }

 private:
  PlugInModels models_;
  std::shared_ptr<const LinearCpe> eta_bar_fit_;
  std::optional<PrivatizedCpe> release_;
  double eps_p_;
  int noise_draws_ = 0;
};

// Tail-decay complexity: the smallest n for which P(||b|| > eps) <= delta
// when b has gamma = n lambda eps_p / 2, estimated from `draws` Monte-Carlo
// norms per probe (doubling then bisection). `converged` is false if `cap`
// was reached.
SizeSearchResult EstimateTailDecayComplexity(std::size_t dim, double lambda_reg,
                                             double eps_p, double eps, double delta,
                                             int draws, std::uint64_t seed,
                                             std::int64_t cap = 1LL << 40);

}  // namespace fairplug

#endif  // FAIRPLUG_PRIVACY_H_
