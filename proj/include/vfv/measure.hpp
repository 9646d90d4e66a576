#pragma once

// Finite atomic probability measures on R^m, the 1-Wasserstein distance and a
// truncated dual (bounded-test-function) metric.

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "vfv/grid.hpp"
#include "vfv/summation.hpp"

namespace vfv {

struct EmpiricalMeasure {
  int dim = 1;
  std::vector<double> atoms;    // size() * dim, atom-major
  std::vector<double> weights;  // nonnegative, sum 1

  EmpiricalMeasure() = default;
  EmpiricalMeasure(int dim, std::vector<double> atoms, std::vector<double> weights);
  /// Scalar atoms with equal weights.
  static EmpiricalMeasure uniform(std::vector<double> values);

  std::size_t size() const { return weights.size(); }
  std::span<const double> atom(std::size_t i) const { return {atoms.data() + i * dim, static_cast<std::size_t>(dim)}; }
  /// Throws MeasureError unless weights are >= 0 and sum to 1 within 1e-12.
  void validate() const;
};

double w1_scalar(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu);

inline constexpr std::size_t kDefaultAtomCap = 2048;

/// Exact W1 with Euclidean ground cost. Throws when the combined atom count
/// exceeds `atom_cap`.
double w1_general(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, std::size_t atom_cap = kDefaultAtomCap);

using TestFunction = std::function<double(std::span<const double>)>;

/// prod_i cos(j_i x_i) exp(-|x|^2) over multi-indices j ordered by |j|_1, then
/// lexicographically; the first `count` members for dimension m.
std::vector<TestFunction> default_test_family(int m, int count = 16);

/// sum_{k=1}^{K} 2^-k |<mu, b_k> - <nu, b_k>| with K = min(K_max, family size).
double dual_metric(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, const std::vector<TestFunction>& family,
                   int k_max = 16);

/// Per-cell measures sharing one weight vector: cell c has atom n at
/// atoms[(c * N + n) * dim].
class MeasureField {
 public:
  MeasureField(Mesh mesh, int dim, std::vector<double> weights, std::vector<double> atoms);

  const Mesh& mesh() const { return mesh_; }
  int dim() const { return dim_; }
  std::size_t atoms_per_cell() const { return weights_.size(); }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<double>& atoms() const { return atoms_; }
  EmpiricalMeasure cell(std::size_t c) const;

 private:
  Mesh mesh_;
  int dim_;
  std::vector<double> weights_;
  std::vector<double> atoms_;
};

/// runs[n][i] is observable component i of run n. Components are restricted
/// to `analysis`; weights are s_{n,N}/N.
MeasureField measure_field_from_runs(const std::vector<std::vector<const ScalarField*>>& runs, const SummationRow& row,
                                     const Mesh& analysis);

struct Rect {
  double x0, x1, y0, y1;
  /// "x0,x1,y0,y1"
  static Rect parse(const std::string& text);
  std::string label() const;
};

struct Histogram {
  std::vector<double> edges;  // bins + 1
  std::vector<double> prob;

  void write_csv(const std::string& path) const;
  static Histogram read_csv(const std::string& path);
};

/// Pools the atoms of cells whose centres lie in `rect` (scalar fields only).
/// Without an explicit range the bins span the pooled atom range.
Histogram subdomain_histogram(const MeasureField& mf, const Rect& rect, int bins);
Histogram subdomain_histogram(const MeasureField& mf, const Rect& rect, int bins, double lo, double hi);

/// sum_K |K| W1(a_K, b_K).
double w1_field_l1(const MeasureField& a, const MeasureField& b);

void write_measure_field(const std::string& path, const MeasureField& mf);
MeasureField read_measure_field(const std::string& path);

}  // namespace vfv
