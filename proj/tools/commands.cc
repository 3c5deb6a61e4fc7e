#include "commands.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "fairplug/data.h"
#include "fairplug/error.h"
#include "fairplug/geometry.h"
#include "fairplug/privacy.h"
#include "fairplug/report.h"
#include "fairplug/sweep.h"
#include "fairplug/synthetic.h"

namespace fairplug::cli {
namespace {

namespace fs = std::filesystem;

// Writes `text` under dir and records its fingerprint.
void Emit(KeyValues& manifest, const fs::path& dir, const std::string& name,
          const std::string& text) {
  WriteFile(dir / name, text);
  manifest["output." + name] = Fingerprint(text);
}

template <typename Writer>
std::string Render(Writer&& write) {
  std::ostringstream out;
  write(out);
  return out.str();
}

GridRange ParseRange(const std::string& text, const char* what) {
  const auto parts = SplitString(text, ':');
  if (parts.size() != 3) {
    throw UsageError(std::string(what) + " range must be lo:hi:step, got '" + text + "'");
  }
  return {ParseDouble(parts[0]), ParseDouble(parts[1]), ParseDouble(parts[2])};
}

std::vector<std::int64_t> ParseSizes(const std::string& text) {
  std::vector<std::int64_t> out;
  for (const auto& part : SplitString(text, ',')) {
    const long long v = ParseInt(part);
    if (v < 1) throw UsageError("sample sizes must be >= 1");
    out.push_back(v);
  }
  return out;
}

SyntheticDistribution Distribution(const fs::path& path) {
  return path.empty() ? ReferenceDistribution() : LoadDistribution(path);
}

std::string SplitFileName(int k) {
  std::string digits = std::to_string(k);
  if (digits.size() < 2) digits = "0" + digits;
  return "split_" + digits + ".txt";
}

}  // namespace

KeyValues RunPrepare(const PrepareArgs& args) {
  const CsvSchema schema = LoadSchema(args.schema);
  const LoadedCsv loaded = LoadCsv(args.input, schema);
  if (!(args.dp_norm > 0.0 && args.dp_norm < 1.0)) throw UsageError("--dp-norm must lie in (0, 1)");
  SplitPlan plan{args.train, args.val, args.test, args.splits, args.seed};
  const auto splits = MakeSplits(loaded.dataset, plan, [](const std::string& msg) {
    std::cerr << "warning: " << msg << "\n";
  });

  KeyValues m;
  m["input.fingerprint"] = Fingerprint(ReadFile(args.input));
  m["schema.fingerprint"] = Fingerprint(ReadFile(args.schema));
  m["rows_read"] = std::to_string(loaded.rows_read);
  m["rows_dropped"] = std::to_string(loaded.rows_dropped);
  m["rows"] = std::to_string(loaded.dataset.rows());
  m["feature_dim"] = std::to_string(loaded.dataset.dim());

  fs::create_directories(args.out / "splits");
  Emit(m, args.out, "encoded.csv", Render([&](std::ostream& o) {
         WriteDatasetCsv(loaded.dataset, loaded.feature_names, o);
       }));
  double max_norm = 0.0;
  int redraws = 0;
  for (std::size_t k = 0; k < splits.size(); ++k) {
    Emit(m, args.out, "splits/" + SplitFileName(int(k)),
         Render([&](std::ostream& o) { WriteSplit(splits[k], o); }));
    const SplitData prepared = PrepareSplit(loaded.dataset, splits[k], args.dp_norm);
    max_norm = std::max({max_norm, MaxJointNorm(prepared.train), MaxJointNorm(prepared.test)});
    redraws += splits[k].redraws;
  }
  KeyValues meta{{"dp_norm", FormatDouble(args.dp_norm)},
                 {"splits", std::to_string(splits.size())}};
  Emit(m, args.out, "prepare.txt", FormatKeyValues(meta));
  m["max_joint_norm"] = FormatDouble(max_norm);
  m["split_redraws"] = std::to_string(redraws);
  std::cout << "prepared " << loaded.dataset.rows() << " rows (" << loaded.rows_dropped
            << " dropped), " << loaded.dataset.dim() << " features, " << splits.size()
            << " splits; max joint norm " << FormatDouble(max_norm) << "\n";
  return m;
}

KeyValues RunSweep(const SweepArgs& args) {
  const KeyValues meta = ReadKeyValueFile(args.prepared / "prepare.txt");
  if (!meta.count("dp_norm") || !meta.count("splits")) {
    throw DataError("prepare.txt lacks dp_norm or splits");
  }
  const double dp_norm = ParseDouble(meta.at("dp_norm"));
  int n_splits = int(ParseInt(meta.at("splits")));
  if (args.max_splits > 0) n_splits = std::min(n_splits, args.max_splits);

  SweepOptions opt;
  if (args.grid == "small") {
    opt.grid = {{-2.0, 2.0, 1.0}, {0.3, 0.7, 0.2}, {0.3, 0.7, 0.2}};
  } else if (args.grid != "default") {
    throw UsageError("--grid must be 'default' or 'small'");
  }
  if (!args.lambda_range.empty()) opt.grid.lambda = ParseRange(args.lambda_range, "lambda");
  if (!args.c_range.empty()) opt.grid.c = ParseRange(args.c_range, "c");
  if (!args.c_bar_range.empty()) opt.grid.c_bar = ParseRange(args.c_bar_range, "c_bar");
  opt.setting = ParseSetting(args.setting);
  opt.eps_p = ParseDouble(args.eps_p);
  if (!(opt.eps_p > 0.0)) throw UsageError("--eps-p must be > 0 (inf for no privacy)");
  opt.cpe_config.lambda_reg = args.lambda_reg;
  opt.cpe_config.max_iters = args.max_iters;
  opt.cpe_config.tolerance = args.tolerance;
  opt.seed = args.seed;
  opt.jobs = args.jobs;
  if (IsAware(opt.setting) && !std::isinf(opt.eps_p)) {
    throw UsageError("setting " + args.setting + " has no DP pipeline; pass --eps-p inf");
  }

  const std::string encoded_text = ReadFile(args.prepared / "encoded.csv");
  const Dataset encoded = ReadDatasetCsv(encoded_text);
  std::vector<SplitData> splits;
  for (int k = 0; k < n_splits; ++k) {
    std::ifstream in(args.prepared / "splits" / SplitFileName(k));
    if (!in) throw DataError("missing split file " + SplitFileName(k));
    splits.push_back(PrepareSplit(encoded, ReadSplit(in), dp_norm));
  }
  const SweepResult result = fairplug::RunSweep(splits, opt);

  KeyValues m;
  m["encoded.fingerprint"] = Fingerprint(encoded_text);
  m["grid_size"] = std::to_string(opt.grid.size());
  m["splits_used"] = std::to_string(splits.size());
  std::string draws, flagged;
  std::vector<int> flag_count(splits.size(), 0);
  for (const auto& r : result.records) flag_count[std::size_t(r.split_id)] += r.flags != 0;
  for (std::size_t k = 0; k < splits.size(); ++k) {
    draws += (k ? "," : "") + std::to_string(result.noise_draws[k]);
    flagged += (k ? "," : "") + std::to_string(flag_count[k]);
  }
  m["noise_draws"] = draws;
  m["flagged_records"] = flagged;
  fs::create_directories(args.out);
  Emit(m, args.out, "records.csv",
       Render([&](std::ostream& o) { WriteRecordsCsv(result.records, o); }));
  const TradeoffCurve curve = CurveFromRecords(result.records);
  Emit(m, args.out, "curve.csv", Render([&](std::ostream& o) { WriteCurveCsv(curve, o); }));
  Emit(m, args.out, "curve.svg",
       CurveSvg(curve, 0.2, args.setting + ", eps_p = " + args.eps_p));
  std::cout << result.records.size() << " records over " << splits.size() << " splits\n";
  return m;
}

KeyValues RunSimulate(const SimulateArgs& args) {
  const SyntheticDistribution dist = Distribution(args.dist);
  const Setting setting = ParseSetting(args.setting);
  const FairnessParams params(args.lambda, args.c, args.c_bar);
  FitConfig cpe;
  cpe.lambda_reg = args.lambda_reg;
  KeyValues m;
  m["dist"] = args.dist.empty() ? "reference" : Fingerprint(ReadFile(args.dist));
  const DistStats& stats = dist.TrueStats();
  m["true_pi"] = FormatDouble(stats.pi);
  m["true_pi_bar"] = FormatDouble(stats.pi_bar);
  m["true_beta"] = FormatDouble(stats.beta);
  fs::create_directories(args.out);

  if (args.experiment == "consistency") {
    ConsistencyOptions opt;
    opt.n_schedule = ParseSizes(args.n_schedule);
    opt.trials = args.trials;
    opt.m_eval = args.m_eval;
    opt.seed = args.seed;
    opt.cpe_config = cpe;
    opt.jobs = args.jobs;
    if (args.pi_mode == "known") {
      opt.pi_mode = PiMode::kKnown;
    } else if (args.pi_mode != "estimated") {
      throw UsageError("--pi-mode must be estimated or known");
    }
    const RegretCurve curve = ConsistencyCurve(dist, setting, params, opt);
    Emit(m, args.out, "consistency.csv",
         Render([&](std::ostream& o) { WriteRegretCurveCsv(curve, o); }));
  } else if (args.experiment == "frontier") {
    std::ostringstream o;
    o << "lambda,frontier,std_error\n";
    for (double l : ParseDoubleList(args.lambdas)) {
      const FrontierEstimate f =
          Frontier(dist, FairnessParams(l, args.c, args.c_bar), args.m_eval, args.seed, setting);
      o << FormatDouble(l) << ',' << FormatDouble(f.value) << ',' << FormatDouble(f.std_error)
        << '\n';
    }
    Emit(m, args.out, "frontier.csv", o.str());
  } else if (args.experiment == "tradeoff-gap") {
    std::vector<TradeoffGapResult> rows;
    for (std::int64_t n : ParseSizes(args.n_schedule)) {
      TradeoffGapOptions opt;
      opt.n = n;
      opt.trials = args.trials;
      opt.m_eval = args.m_eval;
      opt.seed = args.seed;
      opt.setting = setting;
      opt.cpe_config = cpe;
      opt.jobs = args.jobs;
      rows.push_back(TradeoffGap(dist, params, opt));
    }
    Emit(m, args.out, "tradeoff_gap.csv",
         Render([&](std::ostream& o) { WriteTradeoffGapCsv(rows, o); }));
  } else if (args.experiment == "sample-complexity") {
    SampleComplexityOptions opt;
    opt.eps = args.eps;
    opt.delta_prime = args.delta_prime;
    opt.delta = args.delta;
    opt.trials = args.trials;
    opt.m_eval = args.m_eval;
    opt.seed = args.seed;
    opt.cpe_config = cpe;
    if (args.target == "eta-bar") {
      opt.target = ComplexityTarget::kEtaBar;
    } else if (args.target != "eta") {
      throw UsageError("--target must be eta or eta-bar");
    }
    const SampleComplexityResult r = EstimateSampleComplexity(dist, opt);
    std::ostringstream o;
    o << "n,pass_fraction,passed\n";
    for (const auto& p : r.probes) {
      o << p.n << ',' << FormatDouble(p.pass_fraction) << ',' << (p.passed ? 1 : 0) << '\n';
    }
    Emit(m, args.out, "sample_complexity.csv", o.str());
    m["result.n"] = std::to_string(r.n);
    m["result.converged"] = r.converged ? "true" : "false";
    std::cout << "sample complexity n = " << r.n << (r.converged ? "" : " (cap reached)") << "\n";
  } else {
    throw UsageError("unknown experiment '" + args.experiment +
                     "' (consistency, frontier, tradeoff-gap, sample-complexity)");
  }
  return m;
}

KeyValues RunGeometry(const GeometryArgs& args) {
  const auto p = ParseDoubleList(args.params);
  if (p.size() != 4) throw UsageError("--params takes lambda,pi,c,c_bar");
  if (args.raster < 1) throw UsageError("--raster must be >= 1");
  if (!(args.eps > 0.0 && args.eps < 0.5)) throw UsageError("--eps must lie in (0, 1/2)");
  KeyValues m;
  std::vector<RasterCell> cells;
  double asymptote = std::nan("");
  if (args.kind == "hyperbola") {
    const Hyperbola h(p[0], p[1], p[2], p[3]);
    cells = RegionRaster(h, args.eps, args.raster);
    if (h.lambda != 0.0) asymptote = AsymptoteX(h);
  } else if (args.kind == "line") {
    cells = RegionRaster(BoundaryLine(p[0], p[2], p[3]), args.eps, args.raster);
  } else {
    throw UsageError("--kind must be hyperbola or line");
  }
  m["asymptote_x"] = std::isnan(asymptote) ? "none" : FormatDouble(asymptote);
  fs::create_directories(args.out);
  std::ostringstream o;
  o << "u,v,sign,in_margin\n";
  for (const auto& c : cells) {
    o << FormatDouble(c.u) << ',' << FormatDouble(c.v) << ',' << c.sign << ','
      << (c.in_margin ? 1 : 0) << '\n';
  }
  Emit(m, args.out, "raster.csv", o.str());
  if (args.svg) {
    Emit(m, args.out, "raster.svg",
         RasterSvg(cells, args.raster, asymptote, !std::isnan(asymptote), args.kind));
  }
  if (!std::isnan(asymptote)) std::cout << "asymptote x = " << FormatDouble(asymptote) << "\n";
  return m;
}

KeyValues RunReport(const ReportArgs& args) {
  const fs::path file = args.records / "records.csv";
  if (!fs::exists(file)) throw DataError("no records.csv in " + args.records.string());
  const std::string text = ReadFile(file);
  const auto records = ReadRecordsCsv(text);
  if (records.empty()) throw DataError("records.csv holds no records");
  KeyValues m;
  m["records.fingerprint"] = Fingerprint(text);
  const TradeoffCurve curve = CurveFromRecords(records);
  fs::create_directories(args.out);
  Emit(m, args.out, "curve.csv", Render([&](std::ostream& o) { WriteCurveCsv(curve, o); }));
  Emit(m, args.out, "curve.svg", CurveSvg(curve, args.band_scale, args.title));
  return m;
}

}  // namespace fairplug::cli
