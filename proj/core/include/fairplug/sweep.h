#ifndef FAIRPLUG_SWEEP_H_
#define FAIRPLUG_SWEEP_H_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

#include "fairplug/cpe.h"
#include "fairplug/data.h"
#include "fairplug/dataset.h"
#include "fairplug/plugin.h"

namespace fairplug {

// Inclusive arithmetic range lo, lo + step, ..., hi.
struct GridRange {
  double lo;
  double hi;
  double step;

  std::vector<double> Values() const;
};

struct SweepGrid {
  GridRange lambda{-10.0, 10.0, 0.5};
  GridRange c{0.1, 0.9, 0.1};
  GridRange c_bar{0.1, 0.9, 0.1};

  std::size_t size() const;
  void Validate() const;
};

inline constexpr std::uint32_t kFlagDegenerateTest = 1u;

struct SweepRecord {
  int split_id;
  double lambda;
  double c;
  double c_bar;
  double bal_acc;
  double violation;
  std::uint32_t flags = 0;
};

// Train and test parts of one split, already preprocessed.
struct SplitData {
  Dataset train;
  Dataset test;
};

// Fits the transform on the split's training rows and applies it to both
// parts (validation rows are left out).
SplitData PrepareSplit(const Dataset& encoded, const SplitIndices& split,
                       double label_magnitude);

struct SweepOptions {
  SweepGrid grid{};
  Setting setting = Setting::kEoBlind;
  double eps_p = 1.0;  // kNoPrivacy for the non-private sweep
  FitConfig cpe_config{};
  std::uint64_t seed = 0;
  int jobs = 1;
};

struct SweepResult {
  std::vector<SweepRecord> records;  // ordered by (split, lambda, c, c_bar)
  std::vector<int> noise_draws;      // per split
};

// Per split: fit eta, eta_bar and pi once, privatize eta_bar once (finite
// eps_p), then evaluate every grid point on the test part. Aware settings
// are only accepted with eps_p = kNoPrivacy (UsageError otherwise).
SweepResult RunSweep(const std::vector<SplitData>& splits,
                     const SweepOptions& options);

// Test-set decisions of one rule, used by RunSweep and by the agreement
// checks between private and non-private sweeps.
std::vector<int> SweepDecisions(const SplitData& split, const PlugInModels& models,
                                const FairnessParams& params);

inline constexpr double kBinWidth = 0.025;
inline constexpr double kBinFloor = 0.50;

// Minimal violation per balanced-accuracy bin [0.5 + k w, 0.5 + (k+1) w);
// the top bin also takes the maximum accuracy itself. Flagged records and
// records below 0.5 are skipped. Absent bins are empty optionals.
std::vector<std::optional<double>> BinMinViolation(
    const std::vector<SweepRecord>& split_records, double bin_width = kBinWidth);

struct CurveBin {
  double bin_low;
  double mean;   // NaN when no split contributes
  double std;    // population standard deviation over contributing splits
  int n_splits;
};

struct TradeoffCurve {
  double bin_width = kBinWidth;
  std::vector<CurveBin> bins;  // contiguous from 0.50
};

TradeoffCurve AggregateCurves(
    const std::vector<std::vector<std::optional<double>>>& per_split,
    double bin_width = kBinWidth);

// Groups records by split_id and aggregates.
TradeoffCurve CurveFromRecords(const std::vector<SweepRecord>& records,
                               double bin_width = kBinWidth);

void WriteRecordsCsv(const std::vector<SweepRecord>& records, std::ostream& out);
std::vector<SweepRecord> ReadRecordsCsv(std::string_view text);
void WriteCurveCsv(const TradeoffCurve& curve, std::ostream& out);

}  // namespace fairplug

#endif  // FAIRPLUG_SWEEP_H_
