#ifndef FAIRPLUG_DATASET_H_
#define FAIRPLUG_DATASET_H_

#include <cstddef>
#include <span>
#include <string_view>

#include <Eigen/Dense>

namespace fairplug {

// Rows of (features, label, sensitive attribute). Labels take values in
// {-C, +C} (C = label_scale, 1 unless the data went through DP
// preprocessing); sensitive values are in {-1, +1}. Immutable once built.
using FeatureMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

class Dataset {
 public:
  Dataset(FeatureMatrix features, Eigen::VectorXd labels,
          Eigen::VectorXd sensitive, double label_scale = 1.0);

  std::size_t rows() const { return static_cast<std::size_t>(features_.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(features_.cols()); }
  double label_scale() const { return label_scale_; }

  const FeatureMatrix& features() const { return features_; }
  const Eigen::VectorXd& labels() const { return labels_; }
  const Eigen::VectorXd& sensitive() const { return sensitive_; }

  std::span<const double> row(std::size_t i) const {
    return {features_.data() + i * dim(), dim()};
  }
  bool positive_label(std::size_t i) const { return labels_[Eigen::Index(i)] > 0.0; }
  bool positive_sensitive(std::size_t i) const {
    return sensitive_[Eigen::Index(i)] > 0.0;
  }
  // Label sign as +1/-1 regardless of label_scale.
  int label_sign(std::size_t i) const { return positive_label(i) ? 1 : -1; }
  int sensitive_sign(std::size_t i) const { return positive_sensitive(i) ? 1 : -1; }

  Dataset Subset(std::span<const std::size_t> indices) const;

 private:
  FeatureMatrix features_;
  Eigen::VectorXd labels_;
  Eigen::VectorXd sensitive_;
  double label_scale_;
};

// P(Y=1), P(Ybar=1), P(Ybar=1 | Y=1). All strictly inside (0, 1).
struct DistStats {
  double pi;
  double pi_bar;
  double beta;

  DistStats(double pi, double pi_bar, double beta);
};

// Trade-off lambda (any real) and costs c, c_bar in (0, 1).
struct FairnessParams {
  double lambda;
  double c;
  double c_bar;

  FairnessParams(double lambda, double c, double c_bar);
};

// The four fairness-criterion / test-time-access combinations.
enum class Setting { kEoBlind, kEoAware, kDparBlind, kDparAware };

bool IsAware(Setting s);
bool IsEo(Setting s);
std::string_view SettingName(Setting s);  // "eo-blind", ...
Setting ParseSetting(std::string_view name);

// Empirical pi, pi_bar, beta. Throws DataError on an empty dataset or when
// any estimate is exactly 0 or 1.
DistStats ComputeDistStats(const Dataset& dataset);

}  // namespace fairplug

#endif  // FAIRPLUG_DATASET_H_
