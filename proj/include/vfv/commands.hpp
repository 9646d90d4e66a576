#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "vfv/config.hpp"

namespace vfv {

inline constexpr const char* kVersion = "1.0.0";

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int usage = 1;
inline constexpr int solver = 2;
inline constexpr int analysis = 3;
}  // namespace exit_code

struct RunCommandOptions {
  std::string config_path;
  bool force = false;
  int threads = 0;  // 0: VFV_THREADS or hardware concurrency
};

/// Runs every k of the config into <output>/k<k>/. The output directory is
/// taken relative to the config file.
int cmd_run(const RunCommandOptions& options, std::ostream& out, std::ostream& err);

struct AnalyzeOptions {
  std::vector<std::string> inputs;  // run directories or their parents
  std::vector<std::string> weights{"equal"};
  std::string reference = "per-column";
  std::string cutoff = "auto";
  std::vector<Rect> subdomains;
  int bins = 20;
  std::string out_dir = "analysis";
};

int cmd_analyze(const AnalyzeOptions& options, std::ostream& out, std::ostream& err);

struct SelftestOptions {
  std::string mutate;  // "" or "flux-sign"
};

int cmd_selftest(const SelftestOptions& options, std::ostream& out);

/// Worker count from VFV_THREADS, falling back to the hardware concurrency.
int worker_limit();

/// Final density of a run directory, as stored by cmd_run.
struct StoredRun {
  int k = 0;
  double final_time = 0.0;
  std::string directory;
  ScalarField density{Mesh(1)};
};

StoredRun load_run(const std::string& directory);
/// Every run under the given directories (each either a run or a parent of runs), sorted by k.
std::vector<StoredRun> collect_runs(const std::vector<std::string>& inputs);

}  // namespace vfv
