#pragma once

// Regular summation methods generated by a weight function:
//   s_{n,N} = N w(n/N) / sum_m w(m/N),  n = 1..N,
// falling back to s = 1 when the sampled weights sum to zero.

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "vfv/grid.hpp"

namespace vfv {

class WeightFunction {
 public:
  /// One of equal, quad, sin2, exp.
  static WeightFunction named(const std::string& name);
  /// Piecewise-linear interpolation through (t, w) pairs covering [0, 1].
  static WeightFunction tabulated(std::vector<std::pair<double, double>> table, std::string name = "custom");
  /// `named` for the four built-ins, otherwise reads "custom:<path>" as a
  /// whitespace-separated two-column table.
  static WeightFunction parse(const std::string& spec);

  const std::string& name() const { return name_; }
  double operator()(double t) const { return eval_(t); }

 private:
  WeightFunction(std::string name, std::function<double(double)> eval)
      : name_(std::move(name)), eval_(std::move(eval)) {}

  std::string name_;
  std::function<double(double)> eval_;
};

const std::vector<std::string>& builtin_weight_names();

struct SummationRow {
  int N = 0;
  std::vector<double> s;  // s[n-1] = s_{n,N}
  bool fallback = false;

  double sum() const;
  double max() const;
  /// s_{n,N} for 1-based n, zero for n > N.
  double at(int n) const { return n >= 1 && n <= N ? s[n - 1] : 0.0; }
};

/// Throws Error for N < 1 or a negative or non-finite weight sample.
SummationRow summation_row(const WeightFunction& w, int N);

/// (1/N) sum_n s_{n,N} item_n after restriction to `analysis`.
ScalarField weighted_average(const std::vector<const ScalarField*>& items, const SummationRow& row,
                             const Mesh& analysis);

/// (1/N) sum_n s_{n,N} |item_n - weighted_average| pointwise.
ScalarField first_variance(const std::vector<const ScalarField*>& items, const SummationRow& row,
                           const Mesh& analysis);

}  // namespace vfv
