#ifndef FAIRPLUG_CPE_H_
#define FAIRPLUG_CPE_H_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string_view>

#include <Eigen/Dense>

#include "fairplug/dataset.h"

namespace fairplug {

// Anything that maps an input vector to a probability in (0, 1). Fitted
// logistic models implement it, and so do the exact regression functions
// of the synthetic distributions.
class ProbabilityModel {
 public:
  virtual ~ProbabilityModel() = default;
  virtual double Probability(std::span<const double> input) const = 0;
  virtual std::size_t input_dim() const = 0;
};

using ModelPtr = std::shared_ptr<const ProbabilityModel>;

// What a CPE consumes besides the feature vector.
enum class InputArity {
  kFeatures,                // x             -> eta(x), eta_bar_DPar(x)
  kFeaturesPlusLabel,       // (x, y)        -> eta_bar_EO(x, y)
  kFeaturesPlusSensitive,   // (x, ybar)     -> eta(x, ybar)
};

std::string_view ArityName(InputArity arity);
InputArity ParseArity(std::string_view name);

double Sigmoid(double z);

// Logistic class-probability estimator sigma(w . [input; 1]). The last
// weight is the intercept.
class LinearCpe final : public ProbabilityModel {
 public:
  // `feature_dim` is the dimension of x; the input dimension adds one for
  // the two augmented arities. `label_scale` records the magnitude C used
  // for the label input of kFeaturesPlusLabel models.
  LinearCpe(Eigen::VectorXd weights, double lambda_reg, InputArity arity,
            double label_scale = 1.0);

  double Probability(std::span<const double> input) const override;
  std::size_t input_dim() const override {
    return static_cast<std::size_t>(weights_.size()) - 1;
  }
  double Margin(std::span<const double> input) const;  // w . [input; 1]

  const Eigen::VectorXd& weights() const { return weights_; }
  double lambda_reg() const { return lambda_reg_; }
  InputArity arity() const { return arity_; }
  double label_scale() const { return label_scale_; }

  LinearCpe WithWeights(Eigen::VectorXd weights) const;

 private:
  Eigen::VectorXd weights_;
  double lambda_reg_;
  InputArity arity_;
  double label_scale_;
};

// Flat text record: arity, lambda, label scale, weights at full precision.
void SaveCpe(const LinearCpe& model, std::ostream& out);
LinearCpe LoadCpe(std::istream& in);

enum class InitKind { kZero, kRandom };

struct FitConfig {
  double lambda_reg = 1e-3;
  int max_iters = 5000;
  double tolerance = 1e-7;  // on the gradient 2-norm
  std::uint64_t seed = 0;   // only used with InitKind::kRandom
  InitKind init = InitKind::kZero;
  // When false the intercept is left out of the penalty. Default keeps the
  // full parameter vector under ||w||^2 / 2 (1-strong convexity).
  bool regularize_intercept = true;

  void Validate() const;
};

struct FitReport {
  int iterations = 0;
  double gradient_norm = 0.0;
  double objective = 0.0;
  bool converged = false;
};

// Design matrix with one row per example; the intercept column is added
// internally.
using DesignMatrix = FeatureMatrix;

// Regularized logistic objective
//   J(w) = (1/n) sum_i log(1 + exp(-t_i w.[z_i;1])) + lambda ||w||^2 / 2
// and its gradient; exposed for verification.
double LogisticObjective(const DesignMatrix& rows, const Eigen::VectorXd& targets,
                         const Eigen::VectorXd& weights, double lambda_reg,
                         bool regularize_intercept,
                         Eigen::VectorXd* gradient = nullptr);

// Derivative of log(1 + exp(-m)) with respect to the margin m.
double LogisticLossDerivative(double margin);

// Minimizes J by full-batch gradient descent with backtracking line search.
// `targets` are +1/-1. Throws DataError for single-class targets or
// non-finite inputs and NumericError if the objective becomes non-finite.
LinearCpe Fit(const DesignMatrix& rows, const Eigen::VectorXd& targets,
              const FitConfig& config, InputArity arity,
              double label_scale = 1.0, FitReport* report = nullptr);

// eta(x) from {x_i, y_i}.
LinearCpe FitEta(const Dataset& data, const FitConfig& config,
                 FitReport* report = nullptr);
// eta_bar_EO(x, y) from {(x_i, y_i), ybar_i}; y enters as its stored value.
LinearCpe FitEtaBarEo(const Dataset& data, const FitConfig& config,
                      FitReport* report = nullptr);
// eta_bar_DPar(x) from {x_i, ybar_i}.
LinearCpe FitEtaBarDpar(const Dataset& data, const FitConfig& config,
                        FitReport* report = nullptr);
// eta(x, ybar) from {(x_i, ybar_i), y_i}.
LinearCpe FitEtaAware(const Dataset& data, const FitConfig& config,
                      FitReport* report = nullptr);

// Builds the augmented design matrices used by the fitters above.
DesignMatrix FeaturesWithLabel(const Dataset& data);
DesignMatrix FeaturesWithSensitive(const Dataset& data);

}  // namespace fairplug

#endif  // FAIRPLUG_CPE_H_
