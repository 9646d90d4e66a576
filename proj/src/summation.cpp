#include "vfv/summation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace vfv {

WeightFunction WeightFunction::named(const std::string& name) {
  if (name == "equal") return {name, [](double) { return 1.0; }};
  if (name == "quad") return {name, [](double t) { return t * (1.0 - t); }};
  if (name == "sin2")
    return {name, [](double t) {
              const double s = std::sin(std::numbers::pi * t);
              return s * s;
            }};
  if (name == "exp")
    return {name, [](double t) { return t > 0.0 && t < 1.0 ? std::exp(-1.0 / (t * (1.0 - t))) : 0.0; }};
  throw Error("unknown weight function '" + name + "' (expected equal, quad, sin2, exp or custom:<path>)");
}

WeightFunction WeightFunction::tabulated(std::vector<std::pair<double, double>> table, std::string name) {
  if (table.size() < 2) throw Error("tabulated weight needs at least two points");
  std::sort(table.begin(), table.end());
  for (std::size_t i = 0; i < table.size(); ++i) {
    if (!std::isfinite(table[i].first) || !std::isfinite(table[i].second) || table[i].second < 0.0)
      throw Error("tabulated weight: entries must be finite with w >= 0");
    if (i > 0 && table[i].first == table[i - 1].first) throw Error("tabulated weight: duplicate t");
  }
  if (table.front().first > 0.0 || table.back().first < 1.0)
    throw Error("tabulated weight must cover [0, 1]");
  return {std::move(name), [table = std::move(table)](double t) {
            auto hi = std::lower_bound(table.begin(), table.end(), t,
                                       [](const auto& e, double v) { return e.first < v; });
            if (hi == table.begin()) return hi->second;
            if (hi == table.end()) return table.back().second;
            const auto lo = hi - 1;
            const double f = (t - lo->first) / (hi->first - lo->first);
            return lo->second + f * (hi->second - lo->second);
          }};
}

WeightFunction WeightFunction::parse(const std::string& spec) {
  const std::string prefix = "custom:";
  if (spec.rfind(prefix, 0) != 0) return named(spec);
  const std::string path = spec.substr(prefix.size());
  std::ifstream in(path);
  if (!in) throw Error("cannot open weight table '" + path + "'");
  std::vector<std::pair<double, double>> table;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    double t, w;
    if (!(ls >> t >> w)) throw Error("weight table '" + path + "': malformed line '" + line + "'");
    table.emplace_back(t, w);
  }
  return tabulated(std::move(table), "custom");
}

const std::vector<std::string>& builtin_weight_names() {
  static const std::vector<std::string> names{"equal", "quad", "sin2", "exp"};
  return names;
}

double SummationRow::sum() const {
  double t = 0.0;
  for (double v : s) t += v;
  return t;
}

double SummationRow::max() const { return s.empty() ? 0.0 : *std::max_element(s.begin(), s.end()); }

SummationRow summation_row(const WeightFunction& w, int N) {
  if (N < 1) throw Error("summation row: N must be >= 1");
  std::vector<double> samples(N);
  double total = 0.0;
  for (int n = 1; n <= N; ++n) {
    const double v = w(static_cast<double>(n) / N);
    if (!std::isfinite(v) || v < 0.0)
      throw Error("weight '" + w.name() + "' is negative or not finite at t=" + std::to_string(n) + "/" +
                  std::to_string(N));
    samples[n - 1] = v;
    total += v;
  }
  SummationRow row;
  row.N = N;
  row.s.assign(N, 1.0);
  row.fallback = total == 0.0;
  if (!row.fallback)
    for (int n = 0; n < N; ++n) row.s[n] = N * samples[n] / total;
  return row;
}

namespace {

std::vector<ScalarField> restricted(const std::vector<const ScalarField*>& items, const SummationRow& row,
                                    const Mesh& analysis) {
  if (items.empty()) throw Error("summation: no items");
  if (static_cast<int>(items.size()) != row.N)
    throw Error("summation: " + std::to_string(items.size()) + " items for a row of length " +
                std::to_string(row.N));
  std::vector<ScalarField> out;
  out.reserve(items.size());
  for (const ScalarField* f : items) {
    if (f->mesh().dim() != analysis.dim()) throw Error("summation: item lives on a different torus");
    out.push_back(f->mesh() == analysis ? *f : restrict_to(*f, analysis));
  }
  return out;
}

ScalarField average_of(const std::vector<ScalarField>& fields, const SummationRow& row, const Mesh& analysis) {
  ScalarField avg(analysis, 0.0);
  for (int n = 0; n < row.N; ++n)
    for (std::size_t c = 0; c < analysis.cell_count(); ++c) avg[c] += row.s[n] * fields[n][c];
  for (std::size_t c = 0; c < analysis.cell_count(); ++c) avg[c] /= row.N;
  return avg;
}

}  // namespace

ScalarField weighted_average(const std::vector<const ScalarField*>& items, const SummationRow& row,
                             const Mesh& analysis) {
  return average_of(restricted(items, row, analysis), row, analysis);
}

ScalarField first_variance(const std::vector<const ScalarField*>& items, const SummationRow& row,
                           const Mesh& analysis) {
  const auto fields = restricted(items, row, analysis);
  const ScalarField avg = average_of(fields, row, analysis);
  ScalarField var(analysis, 0.0);
  for (int n = 0; n < row.N; ++n)
    for (std::size_t c = 0; c < analysis.cell_count(); ++c) var[c] += row.s[n] * std::abs(fields[n][c] - avg[c]);
  for (std::size_t c = 0; c < analysis.cell_count(); ++c) var[c] /= row.N;
  return var;
}

}  // namespace vfv
