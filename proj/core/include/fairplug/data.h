#ifndef FAIRPLUG_DATA_H_
#define FAIRPLUG_DATA_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fairplug/dataset.h"
#include "fairplug/text_io.h"

namespace fairplug {

enum class ColumnKind { kNumeric, kCategorical };

struct FeatureColumn {
  std::string name;
  ColumnKind kind;
};

// Declarative description of a CSV file. Positive values are matched after
// trimming whitespace and a single trailing '.' (the Adult test file writes
// ">50K.").
struct CsvSchema {
  std::vector<FeatureColumn> feature_columns;
  std::string label_column;
  std::vector<std::string> label_positive;
  std::vector<std::string> label_negative;  // empty: anything not positive
  std::string sensitive_column;
  std::vector<std::string> sensitive_positive;
  std::vector<std::string> sensitive_negative;
  // Numeric sensitive column: values above the threshold are positive.
  std::optional<double> sensitive_threshold;
  std::vector<std::string> drop_columns;
  std::vector<std::string> missing_tokens{"", "?", "NA"};

  // Throws UsageError when label/sensitive collide or appear as features.
  void Validate() const;
};

// Schema file keys: label, label_positive, label_negative, sensitive,
// sensitive_positive, sensitive_negative, sensitive_threshold, numeric,
// categorical, drop, missing (comma-separated lists). When a negative list is given, values in
// neither list are an error.
CsvSchema ParseSchema(const KeyValues& kv);
CsvSchema LoadSchema(const std::filesystem::path& path);

struct LoadedCsv {
  Dataset dataset;
  std::vector<std::string> feature_names;  // after one-hot expansion
  std::size_t rows_read;
  std::size_t rows_dropped;  // rows with a missing value in a used column
};

// Reads a comma-delimited UTF-8 CSV with a header row. Categorical columns
// are one-hot encoded in first-appearance order. Throws DataError for a
// missing column, an unmappable label / sensitive value, or zero rows left.
LoadedCsv LoadCsv(const std::filesystem::path& path, const CsvSchema& schema);
LoadedCsv ParseCsv(std::string_view text, const CsvSchema& schema);

// Standardize-then-rescale transform fitted on a training split. Applying
// it gives feature rows of norm <= sqrt(1 - C^2) and labels in {-C, +C}, so
// every joint (x, y) has norm <= 1.
class DpTransform {
 public:
  static DpTransform Fit(const Dataset& train, double label_magnitude);

  Dataset Apply(const Dataset& data) const;

  double label_magnitude() const { return label_magnitude_; }
  const Eigen::VectorXd& mean() const { return mean_; }
  const Eigen::VectorXd& scale() const { return scale_; }
  double global_scale() const { return global_scale_; }
  double feature_radius() const;  // sqrt(1 - C^2)

 private:
  Eigen::VectorXd mean_;
  Eigen::VectorXd scale_;  // 1 / sd, or 1 for constant columns
  double global_scale_ = 1.0;
  double label_magnitude_ = 0.5;
};

// Fit on `data` and apply to it. Throws UsageError unless 0 < C < 1.
Dataset PreprocessDp(const Dataset& data, double label_magnitude = 0.5);

struct SplitPlan {
  double train = 0.70;
  double val = 0.20;
  double test = 0.10;
  int n_repeats = 20;
  std::uint64_t master_seed = 0;

  void Validate() const;
};

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> val;
  std::vector<std::size_t> test;
  int redraws = 0;  // degenerate draws rejected before this one
};

// A split is degenerate when its training part lacks a label or a group, or
// its test part lacks a label.
bool IsDegenerateSplit(const Dataset& data, const SplitIndices& split);

// n_repeats shuffled partitions of [0, n) with sizes round(train n),
// round(val n) and the remainder. Each repeat uses its own derived seed;
// degenerate draws are redrawn (counted in `redraws`). Identical repeats
// are reported through `warn`.
std::vector<SplitIndices> MakeSplits(
    const Dataset& data, const SplitPlan& plan,
    const std::function<void(const std::string&)>& warn = {});

void WriteSplit(const SplitIndices& split, std::ostream& out);
SplitIndices ReadSplit(std::istream& in);

// Plain numeric CSV of an encoded dataset: feature columns, label,
// sensitive. The header carries feature names.
void WriteDatasetCsv(const Dataset& data, const std::vector<std::string>& names,
                     std::ostream& out);
Dataset ReadDatasetCsv(std::string_view text,
                       std::vector<std::string>* names = nullptr);

}  // namespace fairplug

#endif  // FAIRPLUG_DATA_H_
