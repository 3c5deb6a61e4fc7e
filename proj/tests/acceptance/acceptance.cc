// Acceptance checks. One PASS/FAIL line per criterion; the exit status is
// non-zero when any criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fairplug/data.h"
#include "fairplug/geometry.h"
#include "fairplug/privacy.h"
#include "fairplug/random.h"
#include "fairplug/sweep.h"
#include "fairplug/synthetic.h"
#include "fairplug/text_io.h"
#include "oracles/dense_grid.h"
#include "oracles/distributions.h"
#include "oracles/finite_law.h"
#include "oracles/numeric.h"
#include "support/finite.h"

namespace fs = std::filesystem;
using namespace fairplug;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string Fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

constexpr Setting kSettings[] = {Setting::kEoBlind, Setting::kEoAware, Setting::kDparBlind,
                                 Setting::kDparAware};

Outcome AsymptoteGolden() {
  const double top = AsymptoteX(Hyperbola(0.4, 0.85, 0.8, 0.9));
  const double bottom = AsymptoteX(Hyperbola(-3.6, 0.85, 0.8, 0.9));
  return {top >= 3.01 && top <= 3.03 && bottom >= 0.6628 && bottom <= 0.6648,
          "top " + Fmt(top) + ", bottom " + Fmt(bottom)};
}

Outcome BayesMatchesBruteForce() {
  std::mt19937_64 rng(2024);
  int cases = 0, value_mismatch = 0, label_mismatch = 0;
  for (int d = 0; d < 5; ++d) {
    const oracle::FiniteLaw law = oracle::RandomLaw(4, rng);
    const SyntheticDistribution dist = support::ToDistribution(law);
    for (double lambda : {-2.0, 0.0, 1.5}) {
      for (double c : {0.2, 0.5, 0.8}) {
        for (double c_bar : {0.3, 0.5, 0.7}) {
          for (Setting s : kSettings) {
            ++cases;
            const PlugInRule rule = BayesClassifier(dist, s, FairnessParams(lambda, c, c_bar));
            const auto f = support::FromRule(rule);
            const auto best = support::BestClassifier(law, IsAware(s), lambda, c, c_bar, IsEo(s));
            const double got = oracle::Measure(law, f, lambda, c, c_bar, IsEo(s));
            if (std::abs(got - best.best) > 1e-12) ++value_mismatch;
            if (best.best - best.second > 1e-12 &&
                support::MaskOf(f, law.size(), IsAware(s)) != best.best_mask) {
              ++label_mismatch;
            }
          }
        }
      }
    }
  }
  return {value_mismatch == 0 && label_mismatch == 0,
          std::to_string(cases) + " cases, " + std::to_string(value_mismatch) +
              " value and " + std::to_string(label_mismatch) + " labeling mismatches"};
}

Outcome Consistency() {
  ConsistencyOptions opt;
  opt.n_schedule = {256, 16384};
  opt.trials = 20;
  opt.m_eval = 100000;
  opt.seed = 1;
  const RegretCurve curve = ConsistencyCurve(ReferenceDistribution(), Setting::kEoBlind,
                                             FairnessParams(1.0, 0.5, 0.5), opt);
  const double small = curve[0].mean_regret, large = curve[1].mean_regret;
  return {large <= 0.02 && large <= 0.5 * small,
          "mean regret " + Fmt(small) + " at n=256, " + Fmt(large) + " at n=16384"};
}

Outcome ZeroLambdaReduction() {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> normal;
  auto model = [&](InputArity arity, int inputs) {
    Eigen::VectorXd w(inputs + 1);
    for (int j = 0; j <= inputs; ++j) w[j] = normal(rng);
    return std::make_shared<LinearCpe>(w, 0.01, arity);
  };
  int mismatches = 0, points = 0;
  for (Setting s : kSettings) {
    const double c = std::uniform_real_distribution<double>(0.05, 0.95)(rng);
    const FairnessParams p(0.0, c, 0.37);
    const ModelPtr eta = IsAware(s) ? model(InputArity::kFeaturesPlusSensitive, 4)
                                    : model(InputArity::kFeatures, 3);
    ModelPtr eta_bar;
    if (s == Setting::kEoBlind) eta_bar = model(InputArity::kFeaturesPlusLabel, 4);
    if (s == Setting::kDparBlind) eta_bar = model(InputArity::kFeatures, 3);
    const PlugInRule rule(s, p, 0.42, eta, eta_bar);
    for (int i = 0; i < 10000; ++i, ++points) {
      const double x[] = {normal(rng), normal(rng), normal(rng)};
      const int ybar = i % 2 ? 1 : -1;
      const double xy[] = {x[0], x[1], x[2], double(ybar)};
      const double prob = IsAware(s) ? eta->Probability(xy) : eta->Probability(x);
      const int got = IsAware(s) ? rule.Classify(x, ybar) : rule.Classify(x);
      if (got != (prob > c ? 1 : -1)) ++mismatches;
    }
  }
  return {mismatches == 0,
          std::to_string(points) + " points, " + std::to_string(mismatches) + " mismatches"};
}

Outcome GeometryOracle() {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unit(0.0, 1.0), cost(0.05, 0.95), lam(-5.0, 5.0),
      half(0.005, 0.25);
  int line_bad = 0, hyp_bad = 0, hyp_unexplained = 0, line_hits = 0, hyp_hits = 0;
  for (int i = 0; i < 1000; ++i) {
    const double lambda = lam(rng), pi = cost(rng), c = cost(rng), c_bar = cost(rng);
    const PlanePoint p{unit(rng), unit(rng)};
    const double eps = half(rng);
    const Hyperbola h(lambda, pi, c, c_bar);
    const BoundaryLine l(lambda, c, c_bar);
    auto gh = [&](double u, double v) { return BoundaryScore(h, u, v); };
    auto gl = [&](double u, double v) { return BoundaryScore(l, u, v); };
    const auto hv = oracle::SquareMeetsZeroSet(gh, p.u, p.v, eps);
    const auto lv = oracle::SquareMeetsZeroSet(gl, p.u, p.v, eps);
    line_hits += lv.meets;
    hyp_hits += hv.meets;
    if (SquareIntersectsLine(l, p, eps) != lv.meets) ++line_bad;
    if (SquareIntersectsHyperbola(h, p, eps) != hv.meets) {
      ++hyp_bad;
      const double bound = oracle::BilinearResolutionBound(1.0 + lambda * c_bar / pi,
                                                           lambda / pi, p.u, p.v, eps);
      double corner = INFINITY;
      for (double du : {-eps, eps}) {
        for (double dv : {-eps, eps}) corner = std::min(corner, std::abs(gh(p.u + du, p.v + dv)));
      }
      if (corner > bound) ++hyp_unexplained;
    }
  }
  return {line_bad == 0 && hyp_bad <= 1 && hyp_unexplained == 0,
          "line disagreements " + std::to_string(line_bad) + ", hyperbola " +
              std::to_string(hyp_bad) + " (" + std::to_string(hyp_unexplained) +
              " beyond resolution); squares meeting: line " + std::to_string(line_hits) +
              ", hyperbola " + std::to_string(hyp_hits)};
}

Outcome MarginMassLaw() {
  const Hyperbola flat(0.0, 0.5, 0.5, 0.5);
  auto sampler = [](Rng& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double u = unit(rng);
    return PlanePoint{u, unit(rng)};
  };
  bool within = true, monotone = true;
  std::string detail;
  double previous = -1.0;
  for (double eps : {0.005, 0.01, 0.02, 0.05, 0.1, 0.2}) {
    const MassEstimate m = EstimateMarginMass(sampler, flat, eps, 100000, 5);
    if (eps == 0.01 || eps == 0.05 || eps == 0.1) {
      const bool ok = std::abs(m.mass - 2.0 * eps) <= 3.0 * m.std_error;
      within = within && ok;
      detail += "eps " + Fmt(eps) + ": " + Fmt(m.mass) + " (z " +
                Fmt((m.mass - 2.0 * eps) / m.std_error) + "); ";
    }
    monotone = monotone && m.mass >= previous;
    previous = m.mass;
  }
  return {within && monotone, detail + (monotone ? "monotone" : "NOT monotone")};
}

Outcome NoiseLaw() {
  bool pass = true;
  std::string detail;
  for (auto [dim, gamma] : {std::pair<std::size_t, double>{2, 5.0}, {10, 50.0}, {31, 500.0}}) {
    std::vector<double> norms(100000);
    double sum = 0.0;
    for (std::size_t i = 0; i < norms.size(); ++i) {
      norms[i] = SampleNoise(dim, gamma, DeriveSeed(99, "ks", {dim, i})).norm();
      sum += norms[i];
    }
    const double ks = oracle::KsDistance(
        norms, [&](double r) { return oracle::GammaCdf(r, double(dim), gamma); });
    const double mean_ratio = sum / double(norms.size()) / (double(dim) / gamma);
    pass = pass && ks <= 0.01 && std::abs(mean_ratio - 1.0) <= 0.02;
    detail += "(" + std::to_string(dim) + ", " + Fmt(gamma) + "): KS " + Fmt(ks) +
              ", mean/expected " + Fmt(mean_ratio) + "; ";
  }
  return {pass, detail};
}

// The real CSV if present, otherwise a generated file with the same
// schema columns.
struct DataSource {
  fs::path csv;
  fs::path schema;
  bool real;
};

std::string SurrogateCsv(const CsvSchema& schema, std::size_t rows, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::ostringstream out;
  std::vector<std::string> header;
  for (const auto& f : schema.feature_columns) header.push_back(f.name);
  header.push_back(schema.sensitive_column);
  header.push_back(schema.label_column);
  for (std::size_t j = 0; j < header.size(); ++j) out << (j ? "," : "") << header[j];
  out << '\n';
  for (std::size_t i = 0; i < rows; ++i) {
    double signal = 0.0;
    for (const auto& f : schema.feature_columns) {
      const double z = normal(rng);
      signal += z;
      if (f.kind == ColumnKind::kNumeric) {
        out << Fmt(10.0 * z + 40.0) << ',';
      } else {
        out << "level" << (z > 0.5 ? 2 : (z > -0.5 ? 1 : 0)) << ',';
      }
    }
    const bool group = normal(rng) + 0.3 * signal > 0;
    if (schema.sensitive_threshold) {
      out << Fmt(*schema.sensitive_threshold + (group ? 5.0 : -5.0)) << ',';
    } else {
      out << (group ? schema.sensitive_positive.front()
                    : (schema.sensitive_negative.empty() ? std::string("other")
                                                         : schema.sensitive_negative.front()))
          << ',';
    }
    const bool label = 0.3 * signal + (group ? 0.4 : -0.4) + normal(rng) > 0.3;
    out << (label ? schema.label_positive.front()
                  : (schema.label_negative.empty() ? std::string("negative")
                                                   : schema.label_negative.front()))
        << '\n';
  }
  return out.str();
}

DataSource Source(const char* env, const std::string& file, const std::string& schema,
                  std::size_t surrogate_rows) {
  const fs::path root = FAIRPLUG_SOURCE_DIR;
  DataSource src{root / "data" / file, root / "data" / "schemas" / schema, true};
  if (const char* override_path = std::getenv(env); override_path && *override_path) {
    src.csv = override_path;
  }
  if (!fs::exists(src.csv)) {
    src.real = false;
    src.csv = fs::temp_directory_path() / ("fairplug_surrogate_" + file);
    WriteFile(src.csv, SurrogateCsv(LoadSchema(src.schema), surrogate_rows, 17));
  }
  return src;
}

Outcome DpBookkeeping() {
  const DataSource src = Source("FAIRPLUG_GERMAN_CSV", "german.csv", "german-gender.schema", 1000);
  const LoadedCsv loaded = LoadCsv(src.csv, LoadSchema(src.schema));
  SplitPlan plan;
  plan.n_repeats = 1;
  plan.master_seed = 3;
  const SplitData split = PrepareSplit(loaded.dataset, MakeSplits(loaded.dataset, plan)[0], 0.5);
  SweepOptions opt;
  opt.cpe_config.lambda_reg = 0.01;
  opt.seed = 5;
  const SweepResult result = RunSweep({split}, opt);
  const bool one_draw = result.noise_draws.size() == 1 && result.noise_draws[0] == 1 &&
                        result.records.size() == 3321;

  const DpPluginPipeline huge(split.train, Setting::kEoBlind, opt.cpe_config, 1e9, 5);
  const DpPluginPipeline exact(split.train, Setting::kEoBlind, opt.cpe_config, kNoPrivacy, 5);
  std::size_t agree = 0, total = 0;
  for (double l : opt.grid.lambda.Values()) {
    for (double c : opt.grid.c.Values()) {
      for (double cb : opt.grid.c_bar.Values()) {
        const FairnessParams p(l, c, cb);
        const auto a = SweepDecisions(split, huge.models(), p);
        const auto b = SweepDecisions(split, exact.models(), p);
        for (std::size_t i = 0; i < a.size(); ++i) agree += a[i] == b[i];
        total += a.size();
      }
    }
  }
  const double rate = double(agree) / double(total);
  return {one_draw && huge.noise_draws() == 1 && rate >= 0.99,
          std::string(src.real ? "German" : "surrogate German") + " data, " +
              std::to_string(result.records.size()) + " grid points, noise draws " +
              std::to_string(result.noise_draws[0]) + "; eps_p=1e9 agreement " + Fmt(rate) +
              " over " + std::to_string(total) + " decisions"};
}

Outcome FrontierCrossCheck() {
  const SyntheticDistribution dist = ReferenceDistribution();
  const Eigen::VectorXd we = *dist.w_eta();
  const Eigen::VectorXd wb = *dist.w_eta_bar();
  auto eta = [&](double a, double b) { return oracle::Logistic(we[0] * a + we[1] * b + we[2]); };
  auto eta_bar1 = [&](double a, double b) {
    return oracle::Logistic(wb[0] * a + wb[1] * b + wb[2] + wb[3]);
  };
  const double pi = oracle::MeanOverSquare(eta, 2000);
  const double c = 0.5, c_bar = 0.5;
  const std::int64_t m = 200000;
  bool pass = true;
  std::string detail;
  for (double lambda : {-2.0, -0.5, 0.0, 0.5, 2.0}) {
    const FrontierEstimate lib = Frontier(dist, FairnessParams(lambda, c, c_bar), m, 31);
    // Independent draw of (x, y); CS from realized errors of both rules.
    std::mt19937_64 rng(DeriveSeed(1234, {std::uint64_t(lambda * 10 + 100)}));
    std::uniform_real_distribution<double> box(-1.0, 1.0), unit(0.0, 1.0);
    double sum = 0.0, sq = 0.0;
    for (std::int64_t i = 0; i < m; ++i) {
      const double a = box(rng), b = box(rng);
      const double e = eta(a, b);
      const int y = unit(rng) < e ? 1 : -1;
      const double score = (1.0 - lambda / pi * (eta_bar1(a, b) - c_bar)) * e - c;
      const int f_lambda = score > 0 ? 1 : -1;
      const int f_zero = e - c > 0 ? 1 : -1;
      auto loss = [&](int f) {
        return (f > 0 && y < 0 ? c : 0.0) + (f < 0 && y > 0 ? 1.0 - c : 0.0);
      };
      const double d = loss(f_lambda) - loss(f_zero);
      sum += d;
      sq += d * d;
    }
    const double mean = sum / double(m);
    const double se = std::sqrt(std::max(0.0, sq / double(m) - mean * mean) / double(m));
    const double combined = std::hypot(se, lib.std_error);
    const bool ok = lambda == 0.0 ? lib.value == 0.0 && mean == 0.0
                                  : std::abs(lib.value - mean) <= 3.0 * combined;
    pass = pass && ok;
    detail += "lambda " + Fmt(lambda) + ": " + Fmt(lib.value) + " vs " + Fmt(mean) + " (" +
              Fmt(combined) + "); ";
  }
  return {pass, detail};
}

Outcome TradeoffGapShrinks() {
  const SyntheticDistribution dist = ReferenceDistribution();
  std::vector<TradeoffGapResult> rows;
  for (std::int64_t n : {256, 16384}) {
    TradeoffGapOptions opt;
    opt.n = n;
    opt.trials = 20;
    opt.m_eval = 100000;
    opt.seed = 1;
    rows.push_back(TradeoffGap(dist, FairnessParams(1.0, 0.5, 0.5), opt));
  }
  return {rows[1].excess_pos <= 0.5 * rows[0].excess_pos,
          "positive exceedance " + Fmt(rows[0].excess_pos) + " at n=256, " +
              Fmt(rows[1].excess_pos) + " at n=16384 (signed excess " + Fmt(rows[0].excess) +
              ", " + Fmt(rows[1].excess) + "; G = " + Fmt(rows[0].frontier) + ")"};
}

// Spearman-style check: does violation rise with accuracy over the upper half
// of the populated bins?
bool RisesInUpperRange(const TradeoffCurve& curve) {
  std::vector<double> means;
  for (const auto& b : curve.bins) {
    if (b.n_splits > 0) means.push_back(b.mean);
  }
  if (means.size() < 4) return false;
  const std::size_t start = means.size() / 2;
  int up = 0, down = 0;
  for (std::size_t i = start; i < means.size(); ++i) {
    for (std::size_t j = i + 1; j < means.size(); ++j) {
      up += means[j] > means[i];
      down += means[j] < means[i];
    }
  }
  return up > down;
}

Outcome RealDataProtocol() {
  bool pass = true;
  std::string detail;
  struct Job {
    const char* env;
    const char* file;
    const char* schema;
    std::size_t surrogate_rows;
    const char* name;
  };
  for (const Job& job : {Job{"FAIRPLUG_ADULT_CSV", "adult.csv", "adult-gender.schema", 45222,
                             "Adult/gender"},
                         Job{"FAIRPLUG_GERMAN_CSV", "german.csv", "german-gender.schema", 1000,
                             "German/gender"}}) {
    const DataSource src = Source(job.env, job.file, job.schema, job.surrogate_rows);
    const LoadedCsv loaded = LoadCsv(src.csv, LoadSchema(src.schema));
    const std::size_t n = loaded.dataset.rows();
    SplitPlan plan;
    plan.master_seed = 11;
    const auto splits = MakeSplits(loaded.dataset, plan);
    bool sizes = splits.size() == 20;
    double max_norm = 0.0;
    std::vector<SplitData> prepared;
    for (const auto& s : splits) {
      sizes = sizes && s.train.size() == std::size_t(std::llround(0.7 * double(n))) &&
              s.val.size() == std::size_t(std::llround(0.2 * double(n))) &&
              s.train.size() + s.val.size() + s.test.size() == n;
      prepared.push_back(PrepareSplit(loaded.dataset, s, 0.5));
      max_norm = std::max({max_norm, MaxJointNorm(prepared.back().train),
                           MaxJointNorm(prepared.back().test)});
    }
    SweepOptions opt;
    opt.cpe_config.lambda_reg = 0.01;
    opt.seed = 11;
    const SweepResult result = RunSweep(prepared, opt);
    const std::size_t grid = SweepGrid{}.size();
    bool counts = result.records.size() == grid * splits.size();
    std::size_t flagged = 0;
    for (std::size_t s = 0; s < splits.size(); ++s) {
      std::size_t ok = 0, bad = 0;
      for (const auto& r : result.records) {
        if (std::size_t(r.split_id) != s) continue;
        (r.flags ? bad : ok) += 1;
      }
      counts = counts && ok == grid - bad;
      flagged += bad;
    }
    const TradeoffCurve curve = CurveFromRecords(result.records);
    bool bins = curve.bin_width == 0.025 && curve.bins.size() == 20;
    for (std::size_t k = 0; k < curve.bins.size(); ++k) {
      bins = bins && std::abs(curve.bins[k].bin_low - (0.5 + 0.025 * double(k))) < 1e-12;
    }
    const bool ok = sizes && max_norm <= 1.0 + 1e-9 && counts && bins;
    pass = pass && ok;
    detail += std::string(job.name) + (src.real ? "" : " (surrogate)") + ": " +
              std::to_string(n) + " rows, 20 splits " + (sizes ? "70:20:10" : "MISSIZED") +
              ", max joint norm " + Fmt(max_norm) + ", flagged records " +
              std::to_string(flagged) + ", bins " + (bins ? "ok" : "WRONG") +
              "; rising violation in upper range: " +
              (RisesInUpperRange(curve) ? "observed" : "not observed") + ". ";
  }
  return {pass, detail};
}

Outcome LevelSetEquivalences() {
  std::mt19937_64 rng(77);
  int checks = 0, counterexamples = 0, undefined = 0;
  for (int d = 0; d < 5; ++d) {
    const oracle::FiniteLaw law = oracle::RandomLaw(4, rng);
    const SyntheticDistribution dist = support::ToDistribution(law);
    for (unsigned mask = 0; mask < 16; ++mask) {
      const auto f = oracle::BlindFromMask(mask);
      const RatePair rates = dist.PopulationRates(
          [&](std::span<const double> x, int ybar) { return f(std::size_t(x[0]), ybar); },
          Criterion::kDpar);
      const double a = rates.dbar.fpr, b = rates.dbar.tpr;
      if (std::abs(a - oracle::PositiveRateInGroup(law, f, -1)) > 1e-12 ||
          std::abs(b - oracle::PositiveRateInGroup(law, f, 1)) > 1e-12) {
        ++counterexamples;
      }
      for (double tau : {0.25, 0.5, 0.8, 1.0, 2.0}) {
        if (b == 0.0) {
          ++undefined;
          continue;
        }
        const double kappa = tau / (1.0 + tau);
        ++checks;
        if ((a / b >= tau) != (BalancedCsr(rates.dbar, 1.0 - kappa) >= kappa)) ++counterexamples;
      }
      for (double tau : {-0.5, -0.2, 0.1, 0.4, 0.7}) {
        const double kappa = (1.0 + tau) / 2.0;
        ++checks;
        if ((a - b >= tau) != (BalancedCsr(rates.dbar, 0.5) >= kappa)) ++counterexamples;
      }
    }
  }
  return {counterexamples == 0,
          std::to_string(checks) + " equivalences checked, " + std::to_string(counterexamples) +
              " counterexamples (" + std::to_string(undefined) +
              " DI cases skipped: zero positive rate in the ybar=+1 group)"};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"asymptote golden values", AsymptoteGolden},
      {"Bayes classifier equals exhaustive optimum", BayesMatchesBruteForce},
      {"consistency on the reference design", Consistency},
      {"lambda = 0 reduces to cost-sensitive thresholding", ZeroLambdaReduction},
      {"square intersection vs dense grid", GeometryOracle},
      {"margin mass of the horizontal band", MarginMassLaw},
      {"noise radius law", NoiseLaw},
      {"one noise draw per split and huge-budget agreement", DpBookkeeping},
      {"frontier cross-check", FrontierCrossCheck},
      {"trade-off gap shrinkage", TradeoffGapShrinks},
      {"real-data protocol conformance", RealDataProtocol},
      {"DI / MD level-set equivalences", LevelSetEquivalences},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = criteria[i].second();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += !out.pass;
    std::cout << "criterion " << i + 1 << ": " << (out.pass ? "PASS" : "FAIL") << "  "
              << criteria[i].first << " [" << Fmt(secs) << " s] " << out.detail << std::endl;
  }
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
