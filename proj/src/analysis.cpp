#include "vfv/analysis.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "vfv/field_io.hpp"
#include "vfv/measure.hpp"

namespace vfv {

std::optional<double> eoc(double e1, double e2, int k1, int k2) {
  if (!(e1 >= 0.0) || !(e2 >= 0.0)) throw AnalysisError("eoc: errors must be nonnegative");
  if (k1 < 1 || k2 <= k1) throw AnalysisError("eoc: need 0 < k1 < k2");
  if (e1 == 0.0 || e2 == 0.0) return std::nullopt;
  return std::log(e1 / e2) / std::log(static_cast<double>(k2) / k1);
}

ConvergenceTable ConvergenceTable::from_errors(const std::vector<int>& ks, const std::vector<double>& errors,
                                               std::string reference) {
  if (ks.size() != errors.size()) throw AnalysisError("table: k and error columns differ in length");
  ConvergenceTable t;
  t.reference = std::move(reference);
  for (std::size_t i = 0; i < ks.size(); ++i) {
    ConvergenceRow r{ks[i], errors[i], std::nullopt};
    if (i > 0) r.order = eoc(errors[i - 1], errors[i], ks[i - 1], ks[i]);
    t.rows.push_back(r);
  }
  return t;
}

std::string ConvergenceTable::to_csv() const {
  std::string out = "k,error,order\n";
  char buf[96];
  for (const auto& r : rows) {
    if (r.order)
      std::snprintf(buf, sizeof buf, "%d,%.2e,%.2f\n", r.k, r.error, *r.order);
    else
      std::snprintf(buf, sizeof buf, "%d,%.2e,-\n", r.k, r.error);
    out += buf;
  }
  return out;
}

void ConvergenceTable::write_csv(const std::string& path) const {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw AnalysisError("table: cannot open " + path);
  os << to_csv();
}

ConvergenceTable ConvergenceTable::parse_csv(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line) || line != "k,error,order") throw AnalysisError("table: missing header k,error,order");
  ConvergenceTable t;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    ConvergenceRow r;
    char order[32] = {};
    if (std::sscanf(line.c_str(), "%d,%lf,%31s", &r.k, &r.error, order) != 3)
      throw AnalysisError("table: malformed row '" + line + "'");
    if (std::string(order) != "-") r.order = std::stod(order);
    t.rows.push_back(r);
  }
  return t;
}

ConvergenceTable ConvergenceTable::read_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw AnalysisError("table: cannot open " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_csv(ss.str());
}

ReferencePolicy ReferencePolicy::parse(const std::string& text) {
  if (text == "per-column") return {Kind::PerColumn, {}};
  if (text == "cesaro-superset") return {Kind::CesaroSuperset, {}};
  if (text.rfind("file:", 0) == 0 && text.size() > 5) return {Kind::File, text.substr(5)};
  throw AnalysisError("reference '" + text + "': expected per-column, cesaro-superset or file:<path>");
}

std::string ReferencePolicy::describe(const std::string& weight) const {
  switch (kind) {
    case Kind::PerColumn: return "average of all runs with weight " + weight;
    case Kind::CesaroSuperset: return "Cesaro average of all runs";
    case Kind::File: return "field " + path;
  }
  return {};
}

Cutoff Cutoff::parse(const std::string& text) {
  if (text == "auto") return {};
  if (text == "none") return {Mode::None, 0};
  try {
    std::size_t used = 0;
    const int k = std::stoi(text, &used);
    if (used == text.size() && k > 0) return {Mode::Max, k};
  } catch (const std::exception&) {
  }
  throw AnalysisError("cutoff '" + text + "': expected auto, none or a positive k");
}

std::vector<int> Cutoff::rows(const std::vector<int>& ks, const ReferencePolicy& ref) const {
  if (ks.empty()) return {};
  int limit = ks.back();
  if (mode == Mode::Max) limit = k;
  if (mode == Mode::Auto && ref.kind != ReferencePolicy::Kind::File) limit = ks.back() / 2;
  std::vector<int> out;
  for (int x : ks)
    if (x <= limit) out.push_back(x);
  if (out.empty()) out.push_back(ks.front());
  return out;
}

void require_runs(const RunFields& runs, const std::vector<int>& expected) {
  std::string missing;
  for (int k : expected)
    if (!runs.count(k)) missing += (missing.empty() ? "" : ", ") + std::to_string(k);
  if (!missing.empty()) throw AnalysisError("missing runs for k = " + missing);
}

namespace {

struct Ordered {
  std::vector<int> ks;
  std::vector<const ScalarField*> fields;
};

Ordered ordered(const RunFields& runs, std::size_t min_runs) {
  if (runs.size() < min_runs)
    throw AnalysisError("analysis needs at least " + std::to_string(min_runs) + " runs, got " +
                        std::to_string(runs.size()));
  Ordered o;
  for (const auto& [k, f] : runs) {
    if (!f) throw AnalysisError("missing field for k = " + std::to_string(k));
    o.ks.push_back(k);
    o.fields.push_back(f);
  }
  return o;
}

// Coefficients c_n with avg = sum_n c_n f_n over the first `count` runs.
std::vector<double> average_coefficients(const WeightFunction& w, std::size_t count, std::size_t total) {
  const SummationRow row = summation_row(w, static_cast<int>(count));
  std::vector<double> c(total, 0.0);
  for (std::size_t n = 0; n < count; ++n) c[n] = row.s[n] / row.N;
  return c;
}

}  // namespace

ConvergenceTable average_convergence_table(const RunFields& runs, const WeightFunction& weight,
                                           const ReferencePolicy& ref, const Cutoff& cutoff) {
  const Ordered o = ordered(runs, 1);
  const std::size_t N = o.ks.size();
  std::vector<const ScalarField*> fields = o.fields;
  std::vector<double> ref_coef(N, 0.0);
  std::optional<FieldDump> ref_dump;
  switch (ref.kind) {
    case ReferencePolicy::Kind::PerColumn: ref_coef = average_coefficients(weight, N, N); break;
    case ReferencePolicy::Kind::CesaroSuperset:
      ref_coef = average_coefficients(WeightFunction::named("equal"), N, N);
      break;
    case ReferencePolicy::Kind::File:
      ref_dump = read_field(ref.path);
      if (ref_dump->mesh.dim() != fields.front()->mesh().dim())
        throw AnalysisError("reference field " + ref.path + " lives on a different torus");
      fields.push_back(&ref_dump->components.front());
      break;
  }

  const std::vector<int> row_ks = cutoff.rows(o.ks, ref);
  std::vector<double> errors;
  for (std::size_t K = 1; K <= row_ks.size(); ++K) {
    const std::vector<double> c = average_coefficients(weight, K, N);
    std::vector<double> coef(fields.size(), 0.0);
    for (std::size_t n = 0; n < N; ++n) coef[n] = c[n] - ref_coef[n];
    if (ref_dump) coef.back() = -1.0;
    errors.push_back(integrate_pointwise(fields, [&](std::span<const double> v) {
      double s = 0.0;
      for (std::size_t i = 0; i < v.size(); ++i) s += coef[i] * v[i];
      return std::abs(s);
    }));
  }
  return ConvergenceTable::from_errors(row_ks, errors, ref.describe(weight.name()));
}

ConvergenceTable wasserstein_convergence_table(const RunFields& runs, const WeightFunction& weight,
                                               const ReferencePolicy& ref, const Mesh& analysis,
                                               const Cutoff& cutoff) {
  if (ref.kind == ReferencePolicy::Kind::File)
    throw AnalysisError("Wasserstein table: a file reference carries no measure");
  const Ordered o = ordered(runs, 1);
  const std::size_t N = o.ks.size();
  std::vector<std::vector<const ScalarField*>> all;
  for (const ScalarField* f : o.fields) all.push_back({f});

  const WeightFunction ref_weight =
      ref.kind == ReferencePolicy::Kind::PerColumn ? weight : WeightFunction::named("equal");
  const MeasureField reference = measure_field_from_runs(all, summation_row(ref_weight, static_cast<int>(N)), analysis);

  const std::vector<int> row_ks = cutoff.rows(o.ks, ref);
  std::vector<double> errors;
  for (std::size_t K = 1; K <= row_ks.size(); ++K) {
    const std::vector<std::vector<const ScalarField*>> part(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(K));
    const MeasureField mf = measure_field_from_runs(part, summation_row(weight, static_cast<int>(K)), analysis);
    errors.push_back(w1_field_l1(mf, reference));
  }
  return ConvergenceTable::from_errors(row_ks, errors, ref.describe(weight.name()));
}

double first_variance_integral(const std::vector<const ScalarField*>& items, const SummationRow& row,
                               std::span<const double> lo, std::span<const double> hi) {
  if (static_cast<int>(items.size()) != row.N)
    throw AnalysisError("first variance: row length does not match the item count");
  return integrate_pointwise(
      items,
      [&](std::span<const double> v) {
        double mean = 0.0;
        for (int n = 0; n < row.N; ++n) mean += row.s[n] * v[n];
        mean /= row.N;
        double var = 0.0;
        for (int n = 0; n < row.N; ++n) var += row.s[n] * std::abs(v[n] - mean);
        return var / row.N;
      },
      lo, hi);
}

SubsequenceErrors subsequence_errors(const RunFields& runs, int K, int base) {
  if (K < 1 || base < 1) throw AnalysisError("subsequence errors: need K >= 1 and base >= 1");
  std::vector<int> expected;
  for (int m = 1; m <= 3 * K; ++m) expected.push_back(base * m);
  require_runs(runs, expected);

  SubsequenceErrors out;
  for (int l = 1; l <= K; ++l) {
    out.ell.push_back(l);
    std::vector<const ScalarField*> fields;
    for (int m = 1; m <= 3 * l; ++m) fields.push_back(runs.at(base * m));
    for (int r = 0; r < 3; ++r) {
      // Field index j (0-based) belongs to subsequence r when j % 3 == r.
      out.curve[r].push_back(integrate_pointwise(fields, [&](std::span<const double> v) {
        double all = 0.0, sub = 0.0;
        for (std::size_t j = 0; j < v.size(); ++j) {
          all += v[j];
          if (static_cast<int>(j % 3) == r) sub += v[j];
        }
        return std::abs(all / (3 * l) - sub / l);
      }));
    }
  }
  return out;
}

CorrelationMatrix correlation_matrix(const std::vector<const ScalarField*>& fields, const ScalarField& reference,
                                     const std::vector<double>& eps) {
  CorrelationMatrix cm;
  cm.N = static_cast<int>(fields.size());
  cm.entry.assign(static_cast<std::size_t>(cm.N) * cm.N, 0.0);
  for (int n = 0; n < cm.N; ++n)
    for (int m = n; m < cm.N; ++m) {
      const double v = integrate_pointwise({fields[n], fields[m], &reference}, [](std::span<const double> x) {
        return (x[0] - x[2]) * (x[1] - x[2]);
      });
      cm.entry[static_cast<std::size_t>(n) * cm.N + m] = v;
      cm.entry[static_cast<std::size_t>(m) * cm.N + n] = v;
    }
  cm.eps = eps;
  for (double e : eps) {
    std::size_t hits = 0;
    for (double v : cm.entry)
      if (std::abs(v) < e) ++hits;
    cm.fraction.push_back(cm.entry.empty() ? 1.0 : static_cast<double>(hits) / cm.entry.size());
  }
  return cm;
}

}  // namespace vfv
