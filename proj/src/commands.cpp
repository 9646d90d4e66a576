#include "vfv/commands.hpp"

#include <omp.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "vfv/analysis.hpp"
#include "vfv/experiments.hpp"
#include "vfv/field_io.hpp"
#include "vfv/measure.hpp"

namespace fs = std::filesystem;

namespace vfv {

int worker_limit() {
  if (const char* env = std::getenv("VFV_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

using Manifest = std::map<std::string, std::string>;

// `key = value` lines; checkpoint lines `t=<time> step=<n>` are returned separately.
Manifest read_manifest(const fs::path& path, std::vector<std::pair<double, int>>* checkpoints = nullptr) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open manifest " + path.string());
  Manifest m;
  std::string line;
  while (std::getline(in, line)) {
    double t;
    int step;
    if (std::sscanf(line.c_str(), "t=%lf step=%d", &t, &step) == 2) {
      if (checkpoints) checkpoints->emplace_back(t, step);
      continue;
    }
    const auto eq = line.find(" = ");
    if (eq != std::string::npos && line.find('[') != 0) m[line.substr(0, eq)] = line.substr(eq + 3);
  }
  return m;
}

std::string checkpoint_name(int step) { return "state_" + std::to_string(step) + ".field"; }

State initial_state(const ExperimentConfig& cfg, const Mesh& mesh, KHParams* kh) {
  if (cfg.initial == InitialData::Smooth) return make_smooth_state(mesh, cfg.smooth_amplitude, cfg.quadrature);
  *kh = draw_kh_params(cfg.seed, cfg.modes, cfg.eps_perturb);
  return make_initial_state(*kh, mesh, cfg.quadrature);
}

struct RunOutcome {
  bool skipped = false;
  bool failed = false;
  std::string message;
};

RunOutcome run_one(const ExperimentConfig& cfg, int k, const fs::path& dir, bool force) {
  const std::string run_hash = hex64(cfg.run_hash(k));
  const fs::path manifest = dir / "manifest.txt";
  if (!force && fs::exists(manifest)) {
    const Manifest old = read_manifest(manifest);
    if (old.count("run_hash") && old.at("run_hash") == run_hash && old.count("status") &&
        old.at("status") == "complete")
      return {true, false, "k=" + std::to_string(k) + ": identical run present, skipped (use --force to rerun)"};
  }
  fs::create_directories(dir);

  const Mesh mesh(k, cfg.dim);
  KHParams kh;
  std::ostringstream body;
  body << "vfv-manifest v1\n";
  body << "code_version = " << kVersion << "\n";
  body << "config_hash = " << hex64(cfg.hash()) << "\n";
  body << "run_hash = " << run_hash << "\n";
  body << "k = " << k << "\n";
  body << "final_time = " << num(cfg.final_time) << "\n";

  std::string status = "complete", error;
  Trajectory traj;
  State initial;
  try {
    initial = initial_state(cfg, mesh, &kh);
    RunOptions opts;
    opts.save_times = cfg.save_times.empty() ? std::vector<double>{cfg.final_time} : cfg.save_times;
    opts.save_every_steps = cfg.save_every_steps;
    traj = run(initial, cfg.scheme, cfg.final_time, opts);
  } catch (const Error& e) {
    status = "failed";
    error = e.what();
  }
  body << "status = " << status << "\n";
  if (!error.empty()) body << "error = " << error << "\n";
  if (auto warn = cfg.scheme.alpha_warning(cfg.dim)) body << "warning = " << *warn << "\n";

  if (status == "complete") {
    double e0 = total_energy(initial, cfg.scheme), dt_min = INFINITY, dt_max = 0.0, min_rho = INFINITY,
           max_res = 0.0, max_balance = -INFINITY;
    int max_picard = 0;
    for (const auto& r : traj.reports) {
      dt_min = std::min(dt_min, r.dt);
      dt_max = std::max(dt_max, r.dt);
      min_rho = std::min(min_rho, r.min_density);
      max_res = std::max(max_res, r.residual);
      max_picard = std::max(max_picard, r.picard_iterations);
      max_balance = std::max(max_balance, r.energy_balance());
    }
    const double m0 = initial.rho.integral(), m1 = traj.final_state.rho.integral();
    body << "steps = " << traj.reports.size() << "\n";
    body << "mass_initial = " << num(m0) << "\n";
    body << "mass_final = " << num(m1) << "\n";
    body << "mass_drift_relative = " << num(std::abs(m1 - m0) / m0) << "\n";
    body << "energy_initial = " << num(e0) << "\n";
    body << "energy_final = " << num(total_energy(traj.final_state, cfg.scheme)) << "\n";
    body << "max_energy_balance = " << num(max_balance) << "\n";
    body << "min_density = " << num(min_rho) << "\n";
    body << "max_picard_iterations = " << max_picard << "\n";
    body << "max_residual = " << num(max_res) << "\n";
    body << "dt_min = " << num(dt_min) << "\n";
    body << "dt_max = " << num(dt_max) << "\n";
  }
  body << cfg.canonical_run(k);
  if (cfg.initial == InitialData::KelvinHelmholtz) body << kh.to_config_block();
  if (status == "complete") {
    for (const auto& snap : traj.snapshots) {
      std::vector<const ScalarField*> comps{&snap.state.rho};
      std::vector<ScalarField> mom;
      for (int a = 0; a < cfg.dim; ++a) mom.push_back(snap.state.mom.component_field(a));
      for (const auto& f : mom) comps.push_back(&f);
      write_field(dir / checkpoint_name(snap.step), mesh, comps);
      body << "t=" << num(snap.state.time) << " step=" << snap.step << "\n";
    }
  }
  const fs::path tmp = dir / "manifest.txt.tmp";
  {
    std::ofstream os(tmp);
    os << body.str();
    if (!os) throw Error("cannot write " + tmp.string());
  }
  fs::rename(tmp, manifest);
  if (status != "complete") return {false, true, "k=" + std::to_string(k) + ": " + error};
  return {false, false,
          "k=" + std::to_string(k) + ": " + std::to_string(traj.reports.size()) + " steps to t=" +
              num(traj.final_time)};
}

}  // namespace

int cmd_run(const RunCommandOptions& options, std::ostream& out, std::ostream& err) {
  ExperimentConfig cfg;
  try {
    cfg = load_config(options.config_path);
  } catch (const Error& e) {
    err << "vfv run: " << e.what() << "\n";
    return exit_code::usage;
  }
  if (auto warn = cfg.scheme.alpha_warning(cfg.dim)) err << "vfv run: warning: " << *warn << "\n";

  fs::path root = cfg.output;
  if (root.is_relative()) root = fs::absolute(options.config_path).parent_path() / root;

  // Largest meshes first so the longest runs start early.
  std::vector<int> order(cfg.ks.rbegin(), cfg.ks.rend());
  std::vector<RunOutcome> outcomes(order.size());
  const int workers = std::min<int>(options.threads > 0 ? options.threads : worker_limit(),
                                    static_cast<int>(order.size()));
  std::atomic<std::size_t> next{0};
  std::mutex io;
  auto worker = [&] {
    if (workers > 1) omp_set_num_threads(1);
    for (std::size_t i; (i = next++) < order.size();) {
      const int k = order[i];
      try {
        outcomes[i] = run_one(cfg, k, root / ("k" + std::to_string(k)), options.force);
      } catch (const std::exception& e) {
        outcomes[i] = {false, true, "k=" + std::to_string(k) + ": " + e.what()};
      }
      std::lock_guard lock(io);
      (outcomes[i].failed ? err : out) << "vfv run: " << outcomes[i].message << "\n";
    }
  };
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  const bool failed = std::any_of(outcomes.begin(), outcomes.end(), [](const auto& o) { return o.failed; });
  return failed ? exit_code::solver : exit_code::ok;
}

StoredRun load_run(const std::string& directory) {
  std::vector<std::pair<double, int>> checkpoints;
  const Manifest m = read_manifest(fs::path(directory) / "manifest.txt", &checkpoints);
  if (!m.count("status") || m.at("status") != "complete")
    throw AnalysisError("run " + directory + " is not complete");
  StoredRun r;
  r.directory = directory;
  r.k = std::stoi(m.at("k"));
  r.final_time = std::stod(m.at("final_time"));
  const auto last = std::find_if(checkpoints.begin(), checkpoints.end(),
                                 [&](const auto& c) { return c.first == r.final_time; });
  if (last == checkpoints.end()) throw AnalysisError("run " + directory + " has no checkpoint at the final time");
  FieldDump dump = read_field(fs::path(directory) / checkpoint_name(last->second));
  if (dump.mesh.k() != r.k) throw AnalysisError("run " + directory + ": checkpoint mesh does not match k");
  r.density = std::move(dump.components.front());
  return r;
}

std::vector<StoredRun> collect_runs(const std::vector<std::string>& inputs) {
  std::vector<std::string> dirs;
  for (const auto& in : inputs) {
    if (fs::exists(fs::path(in) / "manifest.txt")) {
      dirs.push_back(in);
      continue;
    }
    if (!fs::is_directory(in)) throw AnalysisError("input " + in + " is not a directory");
    std::vector<std::string> found;
    for (const auto& e : fs::directory_iterator(in))
      if (e.is_directory() && fs::exists(e.path() / "manifest.txt")) found.push_back(e.path().string());
    if (found.empty()) throw AnalysisError("no runs found under " + in);
    std::sort(found.begin(), found.end());
    dirs.insert(dirs.end(), found.begin(), found.end());
  }
  std::vector<StoredRun> runs;
  for (const auto& d : dirs) runs.push_back(load_run(d));
  std::sort(runs.begin(), runs.end(), [](const auto& a, const auto& b) { return a.k < b.k; });
  for (std::size_t i = 1; i < runs.size(); ++i) {
    if (runs[i].k == runs[i - 1].k) throw AnalysisError("two runs with k = " + std::to_string(runs[i].k));
    if (runs[i].final_time != runs[0].final_time) throw AnalysisError("runs do not share a final time");
    if (runs[i].density.mesh().dim() != runs[0].density.mesh().dim())
      throw AnalysisError("runs live on tori of different dimension");
  }
  return runs;
}

int cmd_analyze(const AnalyzeOptions& options, std::ostream& out, std::ostream& err) {
  std::vector<WeightFunction> weights;
  ReferencePolicy ref;
  Cutoff cutoff;
  try {
    if (options.inputs.empty()) throw Error("no run directories given");
    if (options.weights.empty()) throw Error("no weight given");
    for (const auto& w : options.weights) weights.push_back(WeightFunction::parse(w));
    ref = ReferencePolicy::parse(options.reference);
    cutoff = Cutoff::parse(options.cutoff);
    if (options.bins < 1) throw Error("--bins must be >= 1");
  } catch (const Error& e) {
    err << "vfv analyze: " << e.what() << "\n";
    return exit_code::usage;
  }

  try {
    const std::vector<StoredRun> runs = collect_runs(options.inputs);
    if (runs.empty()) throw AnalysisError("no runs");
    RunFields fields;
    std::vector<const ScalarField*> ordered;
    std::vector<std::vector<const ScalarField*>> observables;
    for (const auto& r : runs) {
      fields[r.k] = &r.density;
      ordered.push_back(&r.density);
      observables.push_back({&r.density});
    }
    const Mesh analysis = runs.back().density.mesh();
    fs::create_directories(options.out_dir);
    const fs::path dir = options.out_dir;

    for (std::size_t i = 0; i < weights.size(); ++i) {
      const std::string& label = options.weights[i].rfind("custom:", 0) == 0 ? weights[i].name() : options.weights[i];
      average_convergence_table(fields, weights[i], ref, cutoff).write_csv((dir / ("table_avg_" + label + ".csv")).string());
      if (ref.kind != ReferencePolicy::Kind::File)
        wasserstein_convergence_table(fields, weights[i], ref, analysis, cutoff)
            .write_csv((dir / ("table_wass_" + label + ".csv")).string());
      out << "vfv analyze: tables for weight " << label << " written\n";
    }

    // Field dumps and histograms use the first weight.
    const WeightFunction& w = weights.front();
    for (std::size_t K = 1; K <= ordered.size(); ++K) {
      const std::vector<const ScalarField*> part(ordered.begin(), ordered.begin() + static_cast<std::ptrdiff_t>(K));
      const SummationRow row = summation_row(w, static_cast<int>(K));
      const int k = runs[K - 1].k;
      write_field(dir / ("avg_upto_" + std::to_string(k) + ".field"), weighted_average(part, row, analysis));
      write_field(dir / ("var_upto_" + std::to_string(k) + ".field"), first_variance(part, row, analysis));
    }
    if (analysis.dim() == 2) {
      const MeasureField mf =
          measure_field_from_runs(observables, summation_row(w, static_cast<int>(observables.size())), analysis);
      for (const Rect& rect : options.subdomains)
        subdomain_histogram(mf, rect, options.bins).write_csv((dir / ("hist_" + rect.label() + ".csv")).string());
    }
    out << "vfv analyze: " << runs.size() << " runs, analysis mesh k=" << analysis.k() << ", output in "
        << options.out_dir << "\n";
  } catch (const Error& e) {
    err << "vfv analyze: " << e.what() << "\n";
    return exit_code::analysis;
  } catch (const std::exception& e) {
    err << "vfv analyze: " << e.what() << "\n";
    return exit_code::analysis;
  }
  return exit_code::ok;
}

}  // namespace vfv
