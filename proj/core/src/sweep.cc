#include "fairplug/sweep.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>

#include "fairplug/error.h"
#include "fairplug/metrics.h"
#include "fairplug/parallel.h"
#include "fairplug/privacy.h"
#include "fairplug/random.h"
#include "fairplug/text_io.h"

namespace fairplug {
namespace {

constexpr double kRangeTolerance = 1e-9;

// CPE outputs on the test rows; they do not depend on (lambda, c, c_bar).
struct TestProbabilities {
  std::vector<double> eta;      // eta(x) or eta(x, ybar_i)
  std::vector<double> eta_bar;  // eta_bar(x, 1) or eta_bar(x); blind only
};

TestProbabilities Precompute(const Dataset& test, const PlugInModels& m) {
  TestProbabilities p;
  const std::size_t n = test.rows();
  p.eta.resize(n);
  std::vector<double> z(test.dim() + 1);
  double label_input = 1.0;
  if (auto* lin = dynamic_cast<const LinearCpe*>(m.eta_bar.get())) {
    label_input = lin->label_scale();
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto x = test.row(i);
    std::copy(x.begin(), x.end(), z.begin());
    if (IsAware(m.setting)) {
      z.back() = double(test.sensitive_sign(i));
      p.eta[i] = m.eta->Probability(z);
    } else {
      p.eta[i] = m.eta->Probability(x);
    }
  }
  if (!IsAware(m.setting)) {
    p.eta_bar.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto x = test.row(i);
      if (m.setting == Setting::kEoBlind) {
        std::copy(x.begin(), x.end(), z.begin());
        z.back() = label_input;
        p.eta_bar[i] = m.eta_bar->Probability(z);
      } else {
        p.eta_bar[i] = m.eta_bar->Probability(x);
      }
    }
  }
  return p;
}

int Decide(const PlugInModels& m, const TestProbabilities& p, const Dataset& test,
           std::size_t i, const FairnessParams& params) {
  switch (m.setting) {
    case Setting::kEoBlind:
      return SignDecision(ScoreEoBlind(p.eta[i], p.eta_bar[i], m.pi_hat, params));
    case Setting::kDparBlind:
      return SignDecision(ScoreDparBlind(p.eta[i], p.eta_bar[i], params));
    case Setting::kEoAware:
      return SignDecision(ScoreEoAware(p.eta[i], test.sensitive_sign(i), m.pi_hat, params));
    case Setting::kDparAware:
      return SignDecision(ScoreDparAware(p.eta[i], test.sensitive_sign(i), params));
  }
  throw std::logic_error("unreachable setting");
}

// Does the test part hold every group the violation needs?
bool TestCellsPresent(const Dataset& test, Criterion criterion) {
  bool seen[2] = {};
  for (std::size_t i = 0; i < test.rows(); ++i) {
    if (criterion == Criterion::kEo && !test.positive_label(i)) continue;
    seen[test.positive_sensitive(i)] = true;
  }
  bool labels[2] = {};
  for (std::size_t i = 0; i < test.rows(); ++i) labels[test.positive_label(i)] = true;
  return seen[0] && seen[1] && labels[0] && labels[1];
}

std::size_t BinCount(double bin_width) {
  if (!(bin_width > 0.0 && bin_width <= 0.5)) {
    throw std::invalid_argument("bin width must lie in (0, 0.5]");
  }
  return std::size_t(std::ceil((1.0 - kBinFloor) / bin_width - 1e-9));
}

}  // namespace

std::vector<double> GridRange::Values() const {
  if (!(step > 0.0) || !(hi >= lo)) throw UsageError("grid range needs step > 0 and hi >= lo");
  const auto count = std::size_t(std::floor((hi - lo) / step + kRangeTolerance)) + 1;
  std::vector<double> v(count);
  for (std::size_t k = 0; k < count; ++k) {
    // Round to 12 digits so 0.1 + 2 * 0.1 prints as 0.3.
    v[k] = std::round((lo + double(k) * step) * 1e12) / 1e12;
  }
  return v;
}

std::size_t SweepGrid::size() const {
  return lambda.Values().size() * c.Values().size() * c_bar.Values().size();
}

void SweepGrid::Validate() const {
  lambda.Values();
  for (const GridRange* r : {&c, &c_bar}) {
    for (double v : r->Values()) {
      if (!(v > 0.0 && v < 1.0)) throw UsageError("c and c_bar grids must stay inside (0, 1)");
    }
  }
}

SplitData PrepareSplit(const Dataset& encoded, const SplitIndices& split,
                       double label_magnitude) {
  const Dataset train = encoded.Subset(split.train);
  const DpTransform t = DpTransform::Fit(train, label_magnitude);
  return {t.Apply(train), t.Apply(encoded.Subset(split.test))};
}

std::vector<int> SweepDecisions(const SplitData& split, const PlugInModels& models,
                                const FairnessParams& params) {
  return models.Assemble(params).Predict(split.test);
}

SweepResult RunSweep(const std::vector<SplitData>& splits, const SweepOptions& opt) {
  opt.grid.Validate();
  if (IsAware(opt.setting) && !std::isinf(opt.eps_p)) {
    throw UsageError("aware settings have no DP pipeline; use eps_p = inf");
  }
  const auto lambdas = opt.grid.lambda.Values();
  const auto cs = opt.grid.c.Values();
  const auto c_bars = opt.grid.c_bar.Values();
  const std::size_t per_split = lambdas.size() * cs.size() * c_bars.size();
  const Criterion crit = CriterionOf(opt.setting);

  SweepResult result;
  result.records.resize(per_split * splits.size());
  result.noise_draws.assign(splits.size(), 0);
  ParallelFor(splits.size(), opt.jobs, [&](std::size_t s) {
    const SplitData& split = splits[s];
    PlugInModels models;
    if (IsAware(opt.setting)) {
      models = FitPlugInModels(split.train, opt.setting, opt.cpe_config);
    } else {
      DpPluginPipeline pipe(split.train, opt.setting, opt.cpe_config, opt.eps_p,
                            DeriveSeed(opt.seed, "noise", {s}));
      models = pipe.models();
      result.noise_draws[s] = pipe.noise_draws();
    }
    const Dataset& test = split.test;
    const TestProbabilities probs = Precompute(test, models);
    const bool complete = TestCellsPresent(test, crit);
    std::vector<int> truth(test.rows()), sens(test.rows()), pred(test.rows());
    for (std::size_t i = 0; i < test.rows(); ++i) {
      truth[i] = test.label_sign(i);
      sens[i] = test.sensitive_sign(i);
    }
    std::size_t k = s * per_split;
    for (double l : lambdas) {
      for (double c : cs) {
        for (double cb : c_bars) {
          const FairnessParams params(l, c, cb);
          for (std::size_t i = 0; i < test.rows(); ++i) {
            pred[i] = Decide(models, probs, test, i, params);
          }
          SweepRecord& rec = result.records[k++];
          rec = {int(s), l, c, cb, 0.0, 0.0, 0};
          if (!complete) {
            rec.flags |= kFlagDegenerateTest;
            continue;
          }
          rec.bal_acc = BalancedAccuracy(EmpiricalRates(pred, truth));
          rec.violation = crit == Criterion::kEo ? EoViolation(pred, truth, sens)
                                                 : DparViolation(pred, sens);
        }
      }
    }
  });
  return result;
}

std::vector<std::optional<double>> BinMinViolation(const std::vector<SweepRecord>& records,
                                                   double bin_width) {
  const std::size_t bins = BinCount(bin_width);
  std::vector<std::optional<double>> out(bins);
  for (const auto& r : records) {
    if (r.flags != 0 || r.bal_acc < kBinFloor) continue;
    auto k = std::size_t(std::floor((r.bal_acc - kBinFloor) / bin_width + 1e-9));
    k = std::min(k, bins - 1);
    if (!out[k] || r.violation < *out[k]) out[k] = r.violation;
  }
  return out;
}

TradeoffCurve AggregateCurves(const std::vector<std::vector<std::optional<double>>>& per_split,
                              double bin_width) {
  const std::size_t bins = BinCount(bin_width);
  TradeoffCurve curve;
  curve.bin_width = bin_width;
  for (std::size_t k = 0; k < bins; ++k) {
    double sum = 0.0, sq = 0.0;
    int n = 0;
    for (const auto& split : per_split) {
      if (split.size() != bins) throw std::invalid_argument("per-split curves differ in length");
      if (!split[k]) continue;
      sum += *split[k];
      ++n;
    }
    const double mean = n > 0 ? sum / n : std::nan("");
    for (const auto& split : per_split) {
      if (split[k]) sq += (*split[k] - mean) * (*split[k] - mean);
    }
    const double low = std::round((kBinFloor + double(k) * bin_width) * 1e12) / 1e12;
    curve.bins.push_back({low, mean,
                          n > 0 ? std::sqrt(sq / n) : std::nan(""), n});
  }
  return curve;
}

TradeoffCurve CurveFromRecords(const std::vector<SweepRecord>& records, double bin_width) {
  std::map<int, std::vector<SweepRecord>> by_split;
  for (const auto& r : records) by_split[r.split_id].push_back(r);
  std::vector<std::vector<std::optional<double>>> per_split;
  for (const auto& [id, recs] : by_split) per_split.push_back(BinMinViolation(recs, bin_width));
  return AggregateCurves(per_split, bin_width);
}

void WriteRecordsCsv(const std::vector<SweepRecord>& records, std::ostream& out) {
  out << "split_id,lambda,c,c_bar,bal_acc,violation,flags\n";
  for (const auto& r : records) {
    out << r.split_id << ',' << FormatDouble(r.lambda) << ',' << FormatDouble(r.c) << ','
        << FormatDouble(r.c_bar) << ',' << FormatDouble(r.bal_acc) << ','
        << FormatDouble(r.violation) << ',' << r.flags << '\n';
  }
}

std::vector<SweepRecord> ReadRecordsCsv(std::string_view text) {
  std::vector<SweepRecord> out;
  const auto lines = SplitString(text, '\n');
  bool header = true;
  std::size_t line_no = 0;
  for (const auto& raw : lines) {
    ++line_no;
    const auto line = Trim(raw);
    if (line.empty()) continue;
    if (header) {
      if (line != "split_id,lambda,c,c_bar,bal_acc,violation,flags") {
        throw DataError("records CSV has an unexpected header");
      }
      header = false;
      continue;
    }
    const auto f = SplitString(line, ',');
    if (f.size() != 7) {
      throw DataError("records CSV line " + std::to_string(line_no) + " has wrong width");
    }
    out.push_back({int(ParseInt(f[0])), ParseDouble(f[1]), ParseDouble(f[2]),
                   ParseDouble(f[3]), ParseDouble(f[4]), ParseDouble(f[5]),
                   std::uint32_t(ParseInt(f[6]))});
  }
  if (header) throw DataError("records CSV is empty");
  return out;
}

void WriteCurveCsv(const TradeoffCurve& curve, std::ostream& out) {
  out << "bin_low,mean,std,n\n";
  for (const auto& b : curve.bins) {
    if (b.n_splits == 0) continue;
    out << FormatDouble(b.bin_low) << ',' << FormatDouble(b.mean) << ','
        << FormatDouble(b.std) << ',' << b.n_splits << '\n';
  }
}

}  // namespace fairplug
