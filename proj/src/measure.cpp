#include "vfv/measure.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "binary_io.hpp"
#include "vfv/transport.hpp"

namespace vfv {

EmpiricalMeasure::EmpiricalMeasure(int dim_, std::vector<double> atoms_, std::vector<double> weights_)
    : dim(dim_), atoms(std::move(atoms_)), weights(std::move(weights_)) {
  if (dim < 1) throw MeasureError("measure: atom dimension must be >= 1");
  if (atoms.size() != weights.size() * static_cast<std::size_t>(dim))
    throw MeasureError("measure: atom array does not match weight count");
}

EmpiricalMeasure EmpiricalMeasure::uniform(std::vector<double> values) {
  std::vector<double> w(values.size(), 1.0 / static_cast<double>(values.size()));
  return {1, std::move(values), std::move(w)};
}

void EmpiricalMeasure::validate() const {
  if (weights.empty()) throw MeasureError("measure: no atoms");
  double s = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw MeasureError("measure: negative or non-finite weight");
    s += w;
  }
  if (std::abs(s - 1.0) > 1e-12) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "measure: weights sum to %.17g, not 1", s);
    throw MeasureError(buf);
  }
  for (double a : atoms)
    if (!std::isfinite(a)) throw MeasureError("measure: non-finite atom");
}

double w1_scalar(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu) {
  if (mu.dim != 1 || nu.dim != 1) throw MeasureError("w1_scalar: atoms must be scalar");
  mu.validate();
  nu.validate();
  // Signed point masses of mu - nu, swept in increasing position.
  std::vector<std::pair<double, double>> ev;
  ev.reserve(mu.size() + nu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) ev.emplace_back(mu.atoms[i], mu.weights[i]);
  for (std::size_t i = 0; i < nu.size(); ++i) ev.emplace_back(nu.atoms[i], -nu.weights[i]);
  std::sort(ev.begin(), ev.end());
  double cdf_diff = 0.0, total = 0.0;
  for (std::size_t i = 0; i + 1 < ev.size(); ++i) {
    cdf_diff += ev[i].second;
    total += std::abs(cdf_diff) * (ev[i + 1].first - ev[i].first);
  }
  return total;
}

double w1_general(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, std::size_t atom_cap) {
  if (mu.dim != nu.dim) throw MeasureError("w1_general: atom dimensions differ");
  mu.validate();
  nu.validate();
  if (mu.size() + nu.size() > atom_cap)
    throw MeasureError("w1_general: " + std::to_string(mu.size() + nu.size()) + " atoms exceed the cap of " +
                       std::to_string(atom_cap) + "; subsample the measures first");
  const int m = mu.dim;
  const TransportPlan plan = solve_transport(mu.weights, nu.weights, [&](std::size_t i, std::size_t j) {
    const auto x = mu.atom(i), y = nu.atom(j);
    if (m == 1) return std::abs(x[0] - y[0]);
    double s = 0.0;
    for (int a = 0; a < m; ++a) s += (x[a] - y[a]) * (x[a] - y[a]);
    return std::sqrt(s);
  });
  return plan.cost;
}

std::vector<TestFunction> default_test_family(int m, int count) {
  if (m < 1 || count < 1) throw MeasureError("test family: need m >= 1 and count >= 1");
  std::vector<std::vector<int>> indices;
  for (int order = 0; static_cast<int>(indices.size()) < count; ++order) {
    // All multi-indices with |j|_1 == order, lexicographic.
    std::vector<int> j(m, 0);
    std::function<void(int, int)> fill = [&](int axis, int rest) {
      if (axis == m - 1) {
        j[axis] = rest;
        indices.push_back(j);
        return;
      }
      for (int v = 0; v <= rest; ++v) {
        j[axis] = v;
        fill(axis + 1, rest - v);
      }
    };
    fill(0, order);
  }
  indices.resize(count);
  std::vector<TestFunction> family;
  for (const auto& j : indices)
    family.emplace_back([j](std::span<const double> x) {
      double r2 = 0.0, prod = 1.0;
      for (std::size_t a = 0; a < j.size(); ++a) {
        prod *= std::cos(j[a] * x[a]);
        r2 += x[a] * x[a];
      }
      return prod * std::exp(-r2);
    });
  return family;
}

double dual_metric(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, const std::vector<TestFunction>& family,
                   int k_max) {
  if (mu.dim != nu.dim) throw MeasureError("dual_metric: atom dimensions differ");
  auto pairing = [](const EmpiricalMeasure& m, const TestFunction& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) s += m.weights[i] * b(m.atom(i));
    return s;
  };
  const int K = std::min<int>(k_max, static_cast<int>(family.size()));
  double total = 0.0, scale = 1.0;
  for (int k = 1; k <= K; ++k) {
    scale *= 0.5;
    total += scale * std::abs(pairing(mu, family[k - 1]) - pairing(nu, family[k - 1]));
  }
  return total;
}

MeasureField::MeasureField(Mesh mesh, int dim, std::vector<double> weights, std::vector<double> atoms)
    : mesh_(std::move(mesh)), dim_(dim), weights_(std::move(weights)), atoms_(std::move(atoms)) {
  if (dim_ < 1) throw MeasureError("measure field: dimension must be >= 1");
  if (atoms_.size() != mesh_.cell_count() * weights_.size() * static_cast<std::size_t>(dim_))
    throw MeasureError("measure field: atom array size mismatch");
}

EmpiricalMeasure MeasureField::cell(std::size_t c) const {
  const std::size_t block = weights_.size() * static_cast<std::size_t>(dim_);
  std::vector<double> a(atoms_.begin() + static_cast<std::ptrdiff_t>(c * block),
                        atoms_.begin() + static_cast<std::ptrdiff_t>((c + 1) * block));
  return {dim_, std::move(a), weights_};
}

MeasureField measure_field_from_runs(const std::vector<std::vector<const ScalarField*>>& runs, const SummationRow& row,
                                     const Mesh& analysis) {
  if (runs.empty()) throw MeasureError("measure field: no runs");
  if (static_cast<int>(runs.size()) != row.N)
    throw MeasureError("measure field: " + std::to_string(runs.size()) + " runs for a row of length " +
                       std::to_string(row.N));
  const int dim = static_cast<int>(runs.front().size());
  if (dim < 1) throw MeasureError("measure field: empty observable");
  const std::size_t N = runs.size(), cells = analysis.cell_count();
  std::vector<double> atoms(cells * N * dim);
  for (std::size_t n = 0; n < N; ++n) {
    if (static_cast<int>(runs[n].size()) != dim) throw MeasureError("measure field: observable size differs");
    for (int i = 0; i < dim; ++i) {
      const ScalarField& f = *runs[n][i];
      if (f.mesh().dim() != analysis.dim()) throw MeasureError("measure field: run lives on a different torus");
      const ScalarField r = f.mesh() == analysis ? f : restrict_to(f, analysis);
      for (std::size_t c = 0; c < cells; ++c) atoms[(c * N + n) * dim + i] = r[c];
    }
  }
  std::vector<double> w(N);
  for (std::size_t n = 0; n < N; ++n) w[n] = row.s[n] / row.N;
  return {analysis, dim, std::move(w), std::move(atoms)};
}

Rect Rect::parse(const std::string& text) {
  Rect r{};
  char tail = 0;
  if (std::sscanf(text.c_str(), "%lf,%lf,%lf,%lf%c", &r.x0, &r.x1, &r.y0, &r.y1, &tail) != 4)
    throw Error("subdomain '" + text + "': expected x0,x1,y0,y1");
  if (!(0.0 <= r.x0 && r.x0 < r.x1 && r.x1 <= 1.0 && 0.0 <= r.y0 && r.y0 < r.y1 && r.y1 <= 1.0))
    throw Error("subdomain '" + text + "': need 0 <= x0 < x1 <= 1 and 0 <= y0 < y1 <= 1");
  return r;
}

std::string Rect::label() const {
  char buf[128];
  std::snprintf(buf, sizeof buf, "%g_%g_%g_%g", x0, x1, y0, y1);
  return buf;
}

void Histogram::write_csv(const std::string& path) const {
  std::ofstream os(path);
  if (!os) throw Error("histogram: cannot open " + path);
  os << "bin_lo,bin_hi,prob\n";
  char buf[96];
  for (std::size_t b = 0; b < prob.size(); ++b) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", edges[b], edges[b + 1], prob[b]);
    os << buf;
  }
}

Histogram Histogram::read_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error("histogram: cannot open " + path);
  std::string line;
  std::getline(is, line);
  if (line != "bin_lo,bin_hi,prob") throw Error("histogram: bad header in " + path);
  Histogram h;
  while (std::getline(is, line)) {
    double lo, hi, p;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &lo, &hi, &p) != 3) throw Error("histogram: bad line " + line);
    if (h.edges.empty()) h.edges.push_back(lo);
    h.edges.push_back(hi);
    h.prob.push_back(p);
  }
  return h;
}

namespace {

std::vector<std::size_t> cells_in(const Mesh& mesh, const Rect& rect) {
  if (mesh.dim() != 2) throw MeasureError("histogram: subdomains are defined for d = 2");
  std::vector<std::size_t> out;
  for (std::size_t c = 0; c < mesh.cell_count(); ++c) {
    const Point x = mesh.center(c);
    if (x[0] >= rect.x0 && x[0] < rect.x1 && x[1] >= rect.y0 && x[1] < rect.y1) out.push_back(c);
  }
  if (out.empty()) throw MeasureError("histogram: no cell centre lies in subdomain " + rect.label());
  return out;
}

}  // namespace

Histogram subdomain_histogram(const MeasureField& mf, const Rect& rect, int bins) {
  if (mf.dim() != 1) throw MeasureError("histogram: needs a scalar observable");
  const auto cells = cells_in(mf.mesh(), rect);
  double lo = INFINITY, hi = -INFINITY;
  for (std::size_t c : cells)
    for (std::size_t n = 0; n < mf.atoms_per_cell(); ++n) {
      if (mf.weights()[n] == 0.0) continue;
      const double v = mf.atoms()[c * mf.atoms_per_cell() + n];
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  if (lo == hi) {
    lo -= 0.5;
    hi += 0.5;
  }
  return subdomain_histogram(mf, rect, bins, lo, hi);
}

Histogram subdomain_histogram(const MeasureField& mf, const Rect& rect, int bins, double lo, double hi) {
  if (mf.dim() != 1) throw MeasureError("histogram: needs a scalar observable");
  if (bins < 1) throw MeasureError("histogram: bins must be >= 1");
  if (!(lo < hi)) throw MeasureError("histogram: empty value range");
  const auto cells = cells_in(mf.mesh(), rect);
  Histogram h;
  h.edges.resize(bins + 1);
  for (int b = 0; b <= bins; ++b) h.edges[b] = lo + (hi - lo) * b / bins;
  h.prob.assign(bins, 0.0);
  const std::size_t N = mf.atoms_per_cell();
  double total = 0.0;
  for (std::size_t c : cells)
    for (std::size_t n = 0; n < N; ++n) {
      const double w = mf.weights()[n];
      const double v = mf.atoms()[c * N + n];
      if (w == 0.0 || v < lo || v > hi) continue;
      const int b = std::min(bins - 1, static_cast<int>((v - lo) / (hi - lo) * bins));
      h.prob[b] += w;
      total += w;
    }
  if (total > 0.0)
    for (double& p : h.prob) p /= total;
  return h;
}

double w1_field_l1(const MeasureField& a, const MeasureField& b) {
  if (!(a.mesh() == b.mesh())) throw MeasureError("w1_field_l1: measure fields live on different meshes");
  if (a.dim() != b.dim()) throw MeasureError("w1_field_l1: observable dimensions differ");
  const std::size_t cells = a.mesh().cell_count();
  std::vector<double> per(cells);
  const bool scalar = a.dim() == 1;
#pragma omp parallel for schedule(dynamic, 64)
  for (std::size_t c = 0; c < cells; ++c) {
    const EmpiricalMeasure ma = a.cell(c), mb = b.cell(c);
    per[c] = scalar ? w1_scalar(ma, mb) : w1_general(ma, mb);
  }
  double s = 0.0;
  for (double v : per) s += v;
  return s * a.mesh().cell_volume();
}

void write_measure_field(const std::string& path, const MeasureField& mf) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("measure dump: cannot open " + path);
  const Mesh& m = mf.mesh();
  os << "VFV-MEASURE v1 d=" << m.dim() << " k=" << m.k() << " dim=" << mf.dim() << "\n";
  const std::size_t N = mf.atoms_per_cell();
  for (std::size_t c = 0; c < m.cell_count(); ++c) {
    detail::put_u64(os, N);
    for (std::size_t n = 0; n < N; ++n) {
      detail::put_le(os, mf.weights()[n]);
      for (int i = 0; i < mf.dim(); ++i) detail::put_le(os, mf.atoms()[(c * N + n) * mf.dim() + i]);
    }
  }
  if (!os) throw Error("measure dump: write failed for " + path);
}

MeasureField read_measure_field(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("measure dump: cannot open " + path);
  std::string header;
  std::getline(is, header);
  int d = 0, k = 0, dim = 0;
  if (std::sscanf(header.c_str(), "VFV-MEASURE v1 d=%d k=%d dim=%d", &d, &k, &dim) != 3 || dim < 1)
    throw Error("measure dump: bad header in " + path);
  Mesh mesh(k, d);
  std::vector<double> weights, atoms;
  for (std::size_t c = 0; c < mesh.cell_count(); ++c) {
    const std::uint64_t N = detail::get_u64(is, "measure dump");
    if (c == 0) weights.resize(N);
    else if (N != weights.size()) throw Error("measure dump: cells carry different atom counts");
    for (std::size_t n = 0; n < N; ++n) {
      const double w = detail::get_le(is, "measure dump");
      if (c == 0) weights[n] = w;
      else if (w != weights[n]) throw Error("measure dump: cells carry different weights");
      for (int i = 0; i < dim; ++i) atoms.push_back(detail::get_le(is, "measure dump"));
    }
  }
  return {mesh, dim, std::move(weights), std::move(atoms)};
}

}  // namespace vfv
