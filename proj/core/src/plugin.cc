#include "fairplug/plugin.h"

#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "fairplug/error.h"
#include "fairplug/text_io.h"

namespace fairplug {
namespace {

// x with one trailing value, in a per-thread buffer.
std::span<const double> Augment(std::span<const double> x, double extra) {
  thread_local std::vector<double> buffer;
  buffer.assign(x.begin(), x.end());
  buffer.push_back(extra);
  return buffer;
}

std::string NextLine(std::istream& in) {
  std::string line;
  while (std::getline(in, line)) {
    auto t = Trim(line);
    if (!t.empty()) return std::string(t);
  }
  throw DataError("unexpected end of rule record");
}

}  // namespace

double ScoreEoBlind(double eta_x, double eta_bar_x1, double pi,
                    const FairnessParams& p) {
  return (1.0 - (p.lambda / pi) * (eta_bar_x1 - p.c_bar)) * eta_x - p.c;
}

double ScoreEoAware(double eta_xy, int y_bar, double pi, const FairnessParams& p) {
  const double pos = y_bar == 1 ? 1.0 : 0.0;
  return eta_xy * (1.0 + p.lambda * p.c_bar / pi - p.lambda * pos / pi) - p.c;
}

double ScoreDparBlind(double eta_x, double eta_bar_x, const FairnessParams& p) {
  return eta_x - (p.c + p.lambda * (eta_bar_x - p.c_bar));
}

double ScoreDparAware(double eta_xy, int y_bar, const FairnessParams& p) {
  const double pos = y_bar == 1 ? 1.0 : 0.0;
  return eta_xy - p.c + p.lambda * p.c_bar - p.lambda * pos;
}

PlugInRule::PlugInRule(Setting setting, FairnessParams params, double pi_hat,
                       ModelPtr eta, ModelPtr eta_bar)
    : setting_(setting),
      params_(params),
      pi_hat_(pi_hat),
      eta_(std::move(eta)),
      eta_bar_(std::move(eta_bar)) {
  if (!eta_) throw std::invalid_argument("PlugInRule needs an eta model");
  if (IsAware(setting_) && eta_bar_) {
    throw std::invalid_argument("aware rules take a single eta(x, ybar) model");
  }
  if (!IsAware(setting_) && !eta_bar_) {
    throw std::invalid_argument("blind rules need an eta_bar model");
  }
  if (IsEo(setting_) && !(pi_hat_ > 0.0 && pi_hat_ < 1.0)) {
    throw DataError("pi_hat must lie in (0, 1) for EO rules");
  }
  if (setting_ == Setting::kEoBlind) {
    if (eta_bar_->input_dim() != eta_->input_dim() + 1) {
      throw std::invalid_argument("eta_bar_EO must take (x, y)");
    }
    if (auto* lin = dynamic_cast<const LinearCpe*>(eta_bar_.get())) {
      positive_label_input_ = lin->label_scale();
    }
  } else if (setting_ == Setting::kDparBlind) {
    if (eta_bar_->input_dim() != eta_->input_dim()) {
      throw std::invalid_argument("eta_bar_DPar must take x");
    }
  }
}

double PlugInRule::Score(std::span<const double> x, std::optional<int> y_bar) const {
  if (IsAware(setting_) != y_bar.has_value()) {
    throw std::invalid_argument(IsAware(setting_)
                                    ? "aware rule needs the sensitive attribute"
                                    : "blind rule must not see the sensitive attribute");
  }
  switch (setting_) {
    case Setting::kEoBlind:
      return ScoreEoBlind(eta_->Probability(x),
                          eta_bar_->Probability(Augment(x, positive_label_input_)),
                          pi_hat_, params_);
    case Setting::kDparBlind:
      return ScoreDparBlind(eta_->Probability(x), eta_bar_->Probability(x), params_);
    case Setting::kEoAware:
      return ScoreEoAware(eta_->Probability(Augment(x, double(*y_bar))), *y_bar,
                          pi_hat_, params_);
    case Setting::kDparAware:
      return ScoreDparAware(eta_->Probability(Augment(x, double(*y_bar))), *y_bar,
                            params_);
  }
  throw std::logic_error("unreachable setting");
}

std::vector<int> PlugInRule::Predict(const Dataset& data) const {
  std::vector<int> out(data.rows());
  const bool aware = IsAware(setting_);
  for (std::size_t i = 0; i < data.rows(); ++i) {
    out[i] = aware ? Classify(data.row(i), data.sensitive_sign(i))
                   : Classify(data.row(i));
  }
  return out;
}

PlugInRule PlugInRule::WithParams(const FairnessParams& params) const {
  return PlugInRule(setting_, params, pi_hat_, eta_, eta_bar_);
}

PlugInModels FitPlugInModels(const Dataset& train, Setting setting,
                             const FitConfig& config) {
  const DistStats stats = ComputeDistStats(train);
  PlugInModels m{setting, stats.pi, nullptr, nullptr};
  switch (setting) {
    case Setting::kEoBlind:
      m.eta = std::make_shared<LinearCpe>(FitEta(train, config));
      m.eta_bar = std::make_shared<LinearCpe>(FitEtaBarEo(train, config));
      break;
    case Setting::kDparBlind:
      m.eta = std::make_shared<LinearCpe>(FitEta(train, config));
      m.eta_bar = std::make_shared<LinearCpe>(FitEtaBarDpar(train, config));
      break;
    case Setting::kEoAware:
    case Setting::kDparAware:
      m.eta = std::make_shared<LinearCpe>(FitEtaAware(train, config));
      break;
  }
  return m;
}

void SaveRule(const PlugInRule& rule, std::ostream& out) {
  auto* eta = dynamic_cast<const LinearCpe*>(rule.eta().get());
  auto* eta_bar = dynamic_cast<const LinearCpe*>(rule.eta_bar().get());
  if (eta == nullptr || (rule.eta_bar() && eta_bar == nullptr)) {
    throw std::invalid_argument("only rules built from LinearCpe models can be saved");
  }
  out << "rule v1\n"
      << "setting=" << SettingName(rule.setting()) << "\n"
      << "lambda=" << FormatDouble(rule.params().lambda) << "\n"
      << "c=" << FormatDouble(rule.params().c) << "\n"
      << "c_bar=" << FormatDouble(rule.params().c_bar) << "\n"
      << "pi_hat=" << FormatDouble(rule.pi_hat()) << "\n";
  SaveCpe(*eta, out);
  if (eta_bar != nullptr) SaveCpe(*eta_bar, out);
}

PlugInRule LoadRule(std::istream& in) {
  if (NextLine(in) != "rule v1") throw DataError("not a rule record");
  KeyValues kv;
  for (const char* key : {"setting", "lambda", "c", "c_bar", "pi_hat"}) {
    auto parsed = ParseKeyValues(NextLine(in));
    auto it = parsed.find(key);
    if (it == parsed.end()) throw DataError(std::string("rule record missing ") + key);
    kv[key] = it->second;
  }
  const Setting setting = ParseSetting(kv["setting"]);
  FairnessParams params(ParseDouble(kv["lambda"]), ParseDouble(kv["c"]),
                        ParseDouble(kv["c_bar"]));
  ModelPtr eta = std::make_shared<LinearCpe>(LoadCpe(in));
  ModelPtr eta_bar;
  if (!IsAware(setting)) eta_bar = std::make_shared<LinearCpe>(LoadCpe(in));
  return PlugInRule(setting, params, ParseDouble(kv["pi_hat"]), eta, eta_bar);
}

}  // namespace fairplug
