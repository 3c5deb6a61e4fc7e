#include "fairplug/dataset.h"

#include <cmath>
#include <stdexcept>
#include <string>

#include "fairplug/error.h"

namespace fairplug {

Dataset::Dataset(FeatureMatrix features, Eigen::VectorXd labels,
                 Eigen::VectorXd sensitive, double label_scale)
    : features_(std::move(features)),
      labels_(std::move(labels)),
      sensitive_(std::move(sensitive)),
      label_scale_(label_scale) {
  if (features_.rows() < 1) throw DataError("dataset must have at least one row");
  if (labels_.size() != features_.rows() || sensitive_.size() != features_.rows()) {
    throw DataError("features, labels and sensitive differ in row count");
  }
  if (!(label_scale_ > 0.0) || !std::isfinite(label_scale_)) {
    throw DataError("label scale must be positive and finite");
  }
  for (Eigen::Index i = 0; i < labels_.size(); ++i) {
    if (std::abs(labels_[i]) != label_scale_) {
      throw DataError("row " + std::to_string(i) + ": label " +
                      std::to_string(labels_[i]) + " is not +/-" +
                      std::to_string(label_scale_));
    }
    if (sensitive_[i] != 1.0 && sensitive_[i] != -1.0) {
      throw DataError("row " + std::to_string(i) + ": sensitive value is not +/-1");
    }
  }
  if (!features_.allFinite()) throw DataError("features contain non-finite values");
}

Dataset Dataset::Subset(std::span<const std::size_t> indices) const {
  FeatureMatrix f(static_cast<Eigen::Index>(indices.size()), features_.cols());
  Eigen::VectorXd y(static_cast<Eigen::Index>(indices.size()));
  Eigen::VectorXd s(static_cast<Eigen::Index>(indices.size()));
  for (std::size_t k = 0; k < indices.size(); ++k) {
    const auto i = static_cast<Eigen::Index>(indices[k]);
    if (indices[k] >= rows()) throw std::out_of_range("Dataset::Subset index");
    f.row(Eigen::Index(k)) = features_.row(i);
    y[Eigen::Index(k)] = labels_[i];
    s[Eigen::Index(k)] = sensitive_[i];
  }
  return Dataset(std::move(f), std::move(y), std::move(s), label_scale_);
}

DistStats::DistStats(double pi_, double pi_bar_, double beta_)
    : pi(pi_), pi_bar(pi_bar_), beta(beta_) {
  auto check = [](double v, const char* name) {
    if (!(v > 0.0 && v < 1.0)) {
      throw DataError(std::string(name) + " = " + std::to_string(v) +
                      " is degenerate; need a value strictly inside (0, 1)");
    }
  };
  check(pi, "pi");
  check(pi_bar, "pi_bar");
  check(beta, "beta");
}

FairnessParams::FairnessParams(double lambda_, double c_, double c_bar_)
    : lambda(lambda_), c(c_), c_bar(c_bar_) {
  if (!std::isfinite(lambda)) throw UsageError("lambda must be finite");
  if (!(c > 0.0 && c < 1.0)) throw UsageError("cost c must lie in (0, 1)");
  if (!(c_bar > 0.0 && c_bar < 1.0)) throw UsageError("cost c_bar must lie in (0, 1)");
}

bool IsAware(Setting s) { return s == Setting::kEoAware || s == Setting::kDparAware; }
bool IsEo(Setting s) { return s == Setting::kEoBlind || s == Setting::kEoAware; }

std::string_view SettingName(Setting s) {
  switch (s) {
    case Setting::kEoBlind: return "eo-blind";
    case Setting::kEoAware: return "eo-aware";
    case Setting::kDparBlind: return "dpar-blind";
    case Setting::kDparAware: return "dpar-aware";
  }
  return "unknown";
}

Setting ParseSetting(std::string_view name) {
  if (name == "eo-blind") return Setting::kEoBlind;
  if (name == "eo-aware") return Setting::kEoAware;
  if (name == "dpar-blind") return Setting::kDparBlind;
  if (name == "dpar-aware") return Setting::kDparAware;
  throw UsageError("unknown setting '" + std::string(name) +
                   "' (expected eo-blind, eo-aware, dpar-blind, dpar-aware)");
}

DistStats ComputeDistStats(const Dataset& dataset) {
  const std::size_t n = dataset.rows();
  if (n == 0) throw DataError("empty dataset");
  std::size_t pos = 0, sens = 0, both = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const bool y = dataset.positive_label(i);
    const bool s = dataset.positive_sensitive(i);
    pos += y;
    sens += s;
    both += (y && s);
  }
  const double pi = double(pos) / double(n);
  const double pi_bar = double(sens) / double(n);
  const double beta = pos > 0 ? double(both) / double(pos) : 0.0;
  return DistStats(pi, pi_bar, beta);
}

}  // namespace fairplug
