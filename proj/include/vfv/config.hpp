#pragma once

// Experiment configuration.
//
// Grammar (one entry per line, '#' starts a comment):
//
//   [section]
//   key = value
//
// Lists are comma-separated; subdomain lists are ';'-separated rectangles
// "x0,x1,y0,y1". Unknown sections or keys are errors. See README for keys.

#include <cstdint>
#include <string>
#include <vector>

#include "vfv/measure.hpp"
#include "vfv/scheme.hpp"

namespace vfv {

enum class InitialData { KelvinHelmholtz, Smooth };

struct ExperimentConfig {
  // [experiment]
  std::vector<int> ks{32};
  double final_time = 2.0;
  std::uint64_t seed = 1;
  std::string output = "runs";
  InitialData initial = InitialData::KelvinHelmholtz;
  int dim = 2;
  int quadrature = 8;  // subsamples per axis in the initial projection
  double eps_perturb = 0.01;
  int modes = 10;
  double smooth_amplitude = 0.1;
  std::vector<double> save_times;  // empty: final time only
  int save_every_steps = 0;

  // [scheme]; KH defaults use a = 2.5
  SchemeParams scheme = kh_scheme_defaults();

  // [analysis]
  std::vector<std::string> weights{"equal", "quad", "sin2", "exp"};
  std::string reference = "per-column";
  std::string cutoff = "auto";
  std::vector<Rect> subdomains{{0.48, 0.52, 0.68, 0.72}, {0.48, 0.52, 0.73, 0.77}, {0.48, 0.52, 0.78, 0.82}};
  int bins = 20;

  static SchemeParams kh_scheme_defaults();

  /// Throws ConfigError naming the offending field.
  void validate() const;
  /// Every field in a fixed order with exact number formatting.
  std::string canonical() const;
  /// Canonical text of the fields that determine the run at mesh size k.
  std::string canonical_run(int k) const;
  std::uint64_t hash() const;
  std::uint64_t run_hash(int k) const;
};

/// Throws ConfigError with the line number on malformed input.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(const std::string& bytes);
std::string hex64(std::uint64_t v);

}  // namespace vfv
