#include <algorithm>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "commands.h"
#include "fairplug/error.h"
#include "fairplug/text_io.h"
#include "json.hpp"

namespace {

namespace fs = std::filesystem;
using fairplug::KeyValues;
using namespace fairplug::cli;

// `--config FILE` holds flat key=value lines; they are spliced in ahead of
// the command-line flags so that later flags win.
std::vector<std::string> ExpandConfig(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::vector<std::string> out;
  std::vector<std::string> from_file;
  for (std::size_t i = 0; i < args.size(); ++i) {
    std::string path;
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      out.push_back(args[i]);
      continue;
    }
    for (const auto& [key, value] : fairplug::ReadKeyValueFile(path)) {
      from_file.push_back("--" + key + "=" + value);
    }
  }
  if (!from_file.empty() && !out.empty()) {
    // Subcommand name first, then file values, then flags.
    out.insert(out.begin() + 1, from_file.begin(), from_file.end());
  }
  return out;
}

std::uint64_t DefaultSeed() {
  const char* env = std::getenv("FAIRPLUG_SEED");
  if (env == nullptr || *env == '\0') return 0;
  const long long v = fairplug::ParseInt(env);
  if (v < 0) throw fairplug::UsageError("FAIRPLUG_SEED must be non-negative");
  return static_cast<std::uint64_t>(v);
}

void WriteManifest(const fs::path& out, const std::string& command, CLI::App* sub,
                   const KeyValues& entries) {
  nlohmann::json config = nlohmann::json::object();
  for (const CLI::Option* opt : sub->get_options()) {
    const std::string name = opt->get_lnames().empty() ? "" : opt->get_lnames().front();
    if (name.empty() || name == "help") continue;
    config[name] = opt->count() > 0 ? opt->results().back() : opt->get_default_str();
  }
  nlohmann::json manifest;
  manifest["command"] = command;
  manifest["config"] = config;
  nlohmann::json outputs = nlohmann::json::object();
  nlohmann::json facts = nlohmann::json::object();
  for (const auto& [key, value] : entries) {
    if (key.rfind("output.", 0) == 0) {
      outputs[key.substr(7)] = value;
    } else {
      facts[key] = value;
    }
  }
  manifest["outputs"] = outputs;
  manifest["results"] = facts;
  fs::create_directories(out);
  fairplug::WriteFile(out / "manifest.json", manifest.dump(2) + "\n");
}

}  // namespace

int main(int argc, char** argv) {
  try {
    CLI::App app{"Fairness-aware cost-sensitive plug-in classification"};
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    const std::uint64_t seed = DefaultSeed();

    PrepareArgs prep;
    prep.seed = seed;
    auto* p = app.add_subcommand("prepare", "Encode a CSV and draw train/val/test splits");
    p->add_option("--input", prep.input, "raw CSV")->required()->check(CLI::ExistingFile);
    p->add_option("--schema", prep.schema, "schema file")->required()->check(CLI::ExistingFile);
    p->add_option("--dp-norm", prep.dp_norm, "label magnitude C")->capture_default_str();
    p->add_option("--splits", prep.splits, "number of splits")->capture_default_str();
    p->add_option("--train", prep.train)->capture_default_str();
    p->add_option("--val", prep.val)->capture_default_str();
    p->add_option("--test", prep.test)->capture_default_str();
    p->add_option("--seed", prep.seed, "master seed (FAIRPLUG_SEED)")->capture_default_str();
    p->add_option("--out", prep.out)->required();

    SweepArgs sw;
    sw.seed = seed;
    auto* s = app.add_subcommand("sweep", "Sweep (lambda, c, c_bar) over prepared splits");
    s->add_option("--prepared", sw.prepared)->required()->check(CLI::ExistingDirectory);
    s->add_option("--setting", sw.setting)->capture_default_str();
    s->add_option("--eps-p", sw.eps_p, "privacy budget, inf for none")->capture_default_str();
    s->add_option("--grid", sw.grid, "default or small")->capture_default_str();
    s->add_option("--lambda-range", sw.lambda_range, "lo:hi:step");
    s->add_option("--c-range", sw.c_range, "lo:hi:step");
    s->add_option("--c-bar-range", sw.c_bar_range, "lo:hi:step");
    s->add_option("--lambda-reg", sw.lambda_reg)->capture_default_str();
    s->add_option("--max-iters", sw.max_iters)->capture_default_str();
    s->add_option("--tolerance", sw.tolerance)->capture_default_str();
    s->add_option("--max-splits", sw.max_splits)->capture_default_str();
    s->add_option("--seed", sw.seed)->capture_default_str();
    s->add_option("--jobs", sw.jobs)->capture_default_str()->check(CLI::PositiveNumber);
    s->add_option("--out", sw.out)->required();

    SimulateArgs sim;
    sim.seed = seed;
    auto* m = app.add_subcommand("simulate", "Synthetic experiments");
    m->add_option("--experiment", sim.experiment,
                  "consistency|frontier|tradeoff-gap|sample-complexity")->required();
    m->add_option("--dist", sim.dist, "distribution file")->check(CLI::ExistingFile);
    m->add_option("--setting", sim.setting)->capture_default_str();
    m->add_option("--lambda", sim.lambda)->capture_default_str();
    m->add_option("--c", sim.c)->capture_default_str();
    m->add_option("--c-bar", sim.c_bar)->capture_default_str();
    m->add_option("--lambdas", sim.lambdas)->capture_default_str();
    m->add_option("--n-schedule", sim.n_schedule)->capture_default_str();
    m->add_option("--trials", sim.trials)->capture_default_str()->check(CLI::PositiveNumber);
    m->add_option("--m-eval", sim.m_eval)->capture_default_str()->check(CLI::PositiveNumber);
    m->add_option("--pi-mode", sim.pi_mode)->capture_default_str();
    m->add_option("--lambda-reg", sim.lambda_reg)->capture_default_str();
    m->add_option("--eps", sim.eps)->capture_default_str();
    m->add_option("--delta-prime", sim.delta_prime)->capture_default_str();
    m->add_option("--delta", sim.delta)->capture_default_str();
    m->add_option("--target", sim.target, "eta or eta-bar")->capture_default_str();
    m->add_option("--seed", sim.seed)->capture_default_str();
    m->add_option("--jobs", sim.jobs)->capture_default_str()->check(CLI::PositiveNumber);
    m->add_option("--out", sim.out)->required();

    GeometryArgs geo;
    auto* g = app.add_subcommand("geometry", "Decision boundary and margin raster");
    g->add_option("--params", geo.params, "lambda,pi,c,c_bar")->required();
    g->add_option("--kind", geo.kind, "hyperbola or line")->capture_default_str();
    g->add_option("--eps", geo.eps)->capture_default_str();
    g->add_option("--raster", geo.raster)->capture_default_str();
    g->add_flag("--svg", geo.svg);
    g->add_option("--out", geo.out)->required();

    ReportArgs rep;
    auto* r = app.add_subcommand("report", "Aggregate sweep records into a curve");
    r->add_option("--records", rep.records)->required();
    r->add_option("--band-scale", rep.band_scale)->capture_default_str();
    r->add_option("--title", rep.title)->capture_default_str();
    r->add_option("--out", rep.out)->required();

    std::vector<std::string> args = ExpandConfig(argc, argv);
    std::reverse(args.begin(), args.end());
    try {
      app.parse(args);
    } catch (const CLI::ParseError& e) {
      return app.exit(e) == 0 ? 0 : 2;
    }

    CLI::App* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    KeyValues entries;
    fs::path out;
    if (name == "prepare") {
      entries = RunPrepare(prep), out = prep.out;
    } else if (name == "sweep") {
      entries = RunSweep(sw), out = sw.out;
    } else if (name == "simulate") {
      entries = RunSimulate(sim), out = sim.out;
    } else if (name == "geometry") {
      entries = RunGeometry(geo), out = geo.out;
    } else {
      entries = RunReport(rep), out = rep.out;
    }
    WriteManifest(out, name, sub, entries);
    return 0;
  } catch (const fairplug::UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const fairplug::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const fairplug::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
