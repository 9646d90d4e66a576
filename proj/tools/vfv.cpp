#include <CLI11.hpp>

#include <iostream>

#include "vfv/commands.hpp"
#include "vfv/measure.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Viscosity finite volume solver and S-convergence analysis"};
  app.set_version_flag("--version", vfv::kVersion);
  app.require_subcommand(1);

  vfv::RunCommandOptions run_opts;
  auto* run = app.add_subcommand("run", "Run the solver for every mesh size in a config");
  run->add_option("config", run_opts.config_path, "Experiment config file")->required()->check(CLI::ExistingFile);
  run->add_flag("--force", run_opts.force, "Rerun even when an identical run is present");
  run->add_option("--threads", run_opts.threads, "Concurrent runs (default: VFV_THREADS or core count)")
      ->check(CLI::PositiveNumber);

  vfv::AnalyzeOptions an_opts;
  std::vector<std::string> subdomains;
  auto* analyze = app.add_subcommand("analyze", "Convergence tables, averages, variances and histograms");
  analyze->add_option("dirs", an_opts.inputs, "Run directories or their parent")->required();
  analyze->add_option("--weight", an_opts.weights, "equal|quad|sin2|exp|custom:<table> (repeatable)")
      ->capture_default_str();
  analyze->add_option("--reference", an_opts.reference, "per-column|cesaro-superset|file:<path>")
      ->capture_default_str();
  analyze->add_option("--cutoff", an_opts.cutoff, "Largest k with a table row: auto|none|<k>")->capture_default_str();
  analyze->add_option("--subdomain", subdomains, "Histogram region x0,x1,y0,y1 (repeatable)");
  analyze->add_option("--bins", an_opts.bins, "Histogram bins")->capture_default_str();
  analyze->add_option("--out", an_opts.out_dir, "Output directory")->capture_default_str();

  vfv::SelftestOptions st_opts;
  auto* selftest = app.add_subcommand("selftest", "Check the embedded invariant suite");
  selftest->add_option("--mutate", st_opts.mutate, "Deliberately break a kernel (flux-sign)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? vfv::exit_code::ok : vfv::exit_code::usage;
  }

  if (*run) return vfv::cmd_run(run_opts, std::cout, std::cerr);
  if (*analyze) {
    try {
      for (const auto& s : subdomains) an_opts.subdomains.push_back(vfv::Rect::parse(s));
    } catch (const vfv::Error& e) {
      std::cerr << "vfv analyze: " << e.what() << "\n";
      return vfv::exit_code::usage;
    }
    return vfv::cmd_analyze(an_opts, std::cout, std::cerr);
  }
  return vfv::cmd_selftest(st_opts, std::cout);
}
