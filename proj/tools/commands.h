#ifndef FAIRPLUG_TOOLS_COMMANDS_H_
#define FAIRPLUG_TOOLS_COMMANDS_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "fairplug/text_io.h"

namespace fairplug::cli {

struct PrepareArgs {
  std::filesystem::path input;
  std::filesystem::path schema;
  double dp_norm = 0.5;
  int splits = 20;
  double train = 0.70;
  double val = 0.20;
  double test = 0.10;
  std::uint64_t seed = 0;
  std::filesystem::path out;
};

struct SweepArgs {
  std::filesystem::path prepared;
  std::string setting = "eo-blind";
  std::string eps_p = "1.0";
  std::string grid = "default";
  std::string lambda_range;  // lo:hi:step, overrides the grid preset
  std::string c_range;
  std::string c_bar_range;
  double lambda_reg = 0.01;
  int max_iters = 5000;
  double tolerance = 1e-7;
  int max_splits = 0;  // 0: every split in the prepared directory
  std::uint64_t seed = 0;
  int jobs = 1;
  std::filesystem::path out;
};

struct SimulateArgs {
  std::string experiment;
  std::filesystem::path dist;  // empty: the built-in reference design
  std::string setting = "eo-blind";
  double lambda = 1.0;
  double c = 0.5;
  double c_bar = 0.5;
  std::string lambdas = "-2,-0.5,0,0.5,2";  // frontier
  std::string n_schedule = "64,256,1024,16384";
  int trials = 20;
  std::int64_t m_eval = 100000;
  std::string pi_mode = "estimated";
  double lambda_reg = 1e-3;
  double eps = 0.1;
  double delta_prime = 0.1;
  double delta = 0.2;
  std::string target = "eta";
  std::uint64_t seed = 0;
  int jobs = 1;
  std::filesystem::path out;
};

struct GeometryArgs {
  std::string params;  // lambda,pi,c,c_bar
  std::string kind = "hyperbola";
  double eps = 0.05;
  int raster = 200;
  bool svg = false;
  std::filesystem::path out;
};

struct ReportArgs {
  std::filesystem::path records;
  double band_scale = 0.2;
  std::string title = "fairness violation vs balanced accuracy";
  std::filesystem::path out;
};

// Each command writes its outputs under args.out and returns the manifest
// entries describing them.
KeyValues RunPrepare(const PrepareArgs& args);
KeyValues RunSweep(const SweepArgs& args);
KeyValues RunSimulate(const SimulateArgs& args);
KeyValues RunGeometry(const GeometryArgs& args);
KeyValues RunReport(const ReportArgs& args);

}  // namespace fairplug::cli

#endif  // FAIRPLUG_TOOLS_COMMANDS_H_
