#pragma once

// Convergence studies over a family of runs indexed by mesh size k: error
// tables with experimental orders, subsequence comparisons, correlations.

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vfv/grid.hpp"
#include "vfv/summation.hpp"

namespace vfv {

/// ln(e1/e2) / ln(k2/k1); empty when either error is zero.
/// Throws AnalysisError for negative errors or k2 <= k1.
std::optional<double> eoc(double e1, double e2, int k1, int k2);

struct ConvergenceRow {
  int k = 0;
  double error = 0.0;
  std::optional<double> order;
};

struct ConvergenceTable {
  std::string reference;
  std::vector<ConvergenceRow> rows;

  /// Orders between consecutive rows, first row without an order.
  static ConvergenceTable from_errors(const std::vector<int>& ks, const std::vector<double>& errors,
                                      std::string reference = {});

  /// Header `k,error,order`, errors as %.2e, orders as %.2f or "-".
  std::string to_csv() const;
  void write_csv(const std::string& path) const;
  static ConvergenceTable parse_csv(const std::string& text);
  static ConvergenceTable read_csv(const std::string& path);
};

struct ReferencePolicy {
  enum class Kind { PerColumn, CesaroSuperset, File };
  Kind kind = Kind::PerColumn;
  std::string path;  // Kind::File

  /// per-column | cesaro-superset | file:<path>
  static ReferencePolicy parse(const std::string& text);
  std::string describe(const std::string& weight) const;
};

/// Which cutoffs K get a table row. Auto keeps K <= k_max / 2 for the
/// run-set references (later rows are dominated by the reference itself) and
/// every K for a file reference.
struct Cutoff {
  enum class Mode { Auto, None, Max };
  Mode mode = Mode::Auto;
  int k = 0;

  /// auto | none | <k>
  static Cutoff parse(const std::string& text);
  std::vector<int> rows(const std::vector<int>& ks, const ReferencePolicy& ref) const;
};

using RunFields = std::map<int, const ScalarField*>;

/// Throws AnalysisError naming every expected k without a run.
void require_runs(const RunFields& runs, const std::vector<int>& expected);

/// error(K) = integral |avg_{k <= K} - reference| on the common refinement of
/// all meshes involved, avg weighted by the summation row of `weight`.
ConvergenceTable average_convergence_table(const RunFields& runs, const WeightFunction& weight,
                                           const ReferencePolicy& ref, const Cutoff& cutoff = {});

/// error(K) = sum_cells |K| W1(V_{k <= K}, V_ref) for the per-cell measures of
/// the density on `analysis`. File references are not supported.
ConvergenceTable wasserstein_convergence_table(const RunFields& runs, const WeightFunction& weight,
                                               const ReferencePolicy& ref, const Mesh& analysis,
                                               const Cutoff& cutoff = {});

/// Exact integral over a box of the first variance of `items` under `row`.
double first_variance_integral(const std::vector<const ScalarField*>& items, const SummationRow& row,
                               std::span<const double> lo, std::span<const double> hi);

struct SubsequenceErrors {
  std::vector<int> ell;
  /// curve[r][l-1] = || C_{3l} - C^{(r)}_l ||_1 with C^{(r)}_l the Cesaro mean
  /// of runs k = base (3m - 2 + r), m = 1..l, and C_{3l} the mean of the first 3l.
  std::vector<double> curve[3];
};

SubsequenceErrors subsequence_errors(const RunFields& runs, int K, int base = 32);

struct CorrelationMatrix {
  int N = 0;
  std::vector<double> entry;  // N x N, row-major
  std::vector<double> eps;
  std::vector<double> fraction;  // share of pairs with |entry| < eps[i]

  double at(int n, int m) const { return entry[static_cast<std::size_t>(n) * N + m]; }
};

/// entry(n, m) = integral (V_n - V)(V_m - V), exact on the common refinement.
CorrelationMatrix correlation_matrix(const std::vector<const ScalarField*>& fields, const ScalarField& reference,
                                     const std::vector<double>& eps = {});

}  // namespace vfv
