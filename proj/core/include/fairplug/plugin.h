#ifndef FAIRPLUG_PLUGIN_H_
#define FAIRPLUG_PLUGIN_H_

#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "fairplug/cpe.h"
#include "fairplug/dataset.h"

namespace fairplug {

// Score functions of the four plug-in rules. Each takes already-evaluated
// class probabilities; the sign of the score is the decision.

// {1 - (lambda/pi)(eta_bar(x,1) - c_bar)} eta(x) - c
double ScoreEoBlind(double eta_x, double eta_bar_x1, double pi,
                    const FairnessParams& params);
// eta(x,ybar) [1 + lambda c_bar / pi - lambda 1{ybar = 1} / pi] - c
double ScoreEoAware(double eta_xy, int y_bar, double pi,
                    const FairnessParams& params);
// eta(x) - {c + lambda (eta_bar(x) - c_bar)}
double ScoreDparBlind(double eta_x, double eta_bar_x, const FairnessParams& params);
// eta(x,ybar) - c + lambda c_bar - lambda 1{ybar = 1}
double ScoreDparAware(double eta_xy, int y_bar, const FairnessParams& params);

// sign with the tie at zero sent to -1.
inline int SignDecision(double score) { return score > 0.0 ? 1 : -1; }

// Score-and-sign classifier for one setting. Blind settings carry eta(x)
// and eta_bar; aware settings carry a single eta(x, ybar). pi_hat is only
// read by the EO settings.
class PlugInRule {
 public:
  PlugInRule(Setting setting, FairnessParams params, double pi_hat,
             ModelPtr eta, ModelPtr eta_bar = nullptr);

  // Evaluates the CPEs at x (and ybar for aware settings). Throws
  // std::invalid_argument when y_bar presence does not match the setting.
  double Score(std::span<const double> x, std::optional<int> y_bar = {}) const;
  int Classify(std::span<const double> x, std::optional<int> y_bar = {}) const {
    return SignDecision(Score(x, y_bar));
  }
  // Predictions for every row; aware settings read the row's ybar.
  std::vector<int> Predict(const Dataset& data) const;

  Setting setting() const { return setting_; }
  const FairnessParams& params() const { return params_; }
  double pi_hat() const { return pi_hat_; }
  const ModelPtr& eta() const { return eta_; }
  const ModelPtr& eta_bar() const { return eta_bar_; }

  PlugInRule WithParams(const FairnessParams& params) const;

 private:
  Setting setting_;
  FairnessParams params_;
  double pi_hat_;
  ModelPtr eta_;
  ModelPtr eta_bar_;
  // Value fed as "y = 1" to an eta_bar_EO model (its label scale).
  double positive_label_input_ = 1.0;
};

// The fitted ingredients of a plug-in rule, independent of (lambda, c,
// c_bar). Re-assembling with new parameters refits nothing.
struct PlugInModels {
  Setting setting;
  double pi_hat;
  ModelPtr eta;
  ModelPtr eta_bar;  // null for aware settings

  PlugInRule Assemble(const FairnessParams& params) const {
    return PlugInRule(setting, params, pi_hat, eta, eta_bar);
  }
};

// pi_hat from the training split, eta and (for blind settings) eta_bar
// fitted with the given config.
PlugInModels FitPlugInModels(const Dataset& train, Setting setting,
                             const FitConfig& config);

// Rule records: setting, params, pi_hat, then the embedded CPE records.
// Only rules whose CPEs are LinearCpe can be saved.
void SaveRule(const PlugInRule& rule, std::ostream& out);
PlugInRule LoadRule(std::istream& in);

}  // namespace fairplug

#endif  // FAIRPLUG_PLUGIN_H_
