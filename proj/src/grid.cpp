#include "vfv/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <sstream>

namespace vfv {

Mesh::Mesh(int k, int d) : k_(k), d_(d), n_(1) {
  if (k < 1) throw GridError("mesh: k must be positive, got " + std::to_string(k));
  if (d < 1 || d > kMaxDim) throw GridError("mesh: dimension must be 1..3, got " + std::to_string(d));
  for (int a = 0; a < d; ++a) n_ *= static_cast<std::size_t>(k);
  std::size_t s = 1;
  for (int a = d - 1; a >= 0; --a) {
    strides_[a] = s;
    s *= static_cast<std::size_t>(k);
  }
}

double Mesh::cell_volume() const { return std::pow(h(), d_); }
double Mesh::face_area() const { return std::pow(h(), d_ - 1); }

std::size_t Mesh::index(std::span<const int> coords) const {
  std::size_t idx = 0;
  for (int a = 0; a < d_; ++a) {
    int c = coords[a] % k_;
    if (c < 0) c += k_;
    idx += static_cast<std::size_t>(c) * strides_[a];
  }
  return idx;
}

std::size_t Mesh::neighbor(std::size_t cell, int axis, int dir) const {
  const int c = coord(cell, axis);
  const std::size_t s = strides_[axis];
  if (dir > 0) return c == k_ - 1 ? cell - static_cast<std::size_t>(k_ - 1) * s : cell + s;
  return c == 0 ? cell + static_cast<std::size_t>(k_ - 1) * s : cell - s;
}

Point Mesh::center(std::size_t cell) const {
  Point x{};
  for (int a = 0; a < d_; ++a) x[a] = (coord(cell, a) + 0.5) * h();
  return x;
}

Face Mesh::face(std::size_t face_id) const {
  Face f;
  f.axis = static_cast<int>(face_id / n_);
  f.inward = face_id % n_;
  f.outward = neighbor(f.inward, f.axis, +1);
  f.normal[f.axis] = 1.0;
  return f;
}

// ---------------------------------------------------------------------------

ScalarField::ScalarField(const Mesh& mesh, double value)
    : mesh_(mesh), values_(mesh.cell_count(), value) {}

ScalarField::ScalarField(const Mesh& mesh, std::vector<double> values)
    : mesh_(mesh), values_(std::move(values)) {
  if (values_.size() != mesh_.cell_count())
    throw GridError("scalar field: expected " + std::to_string(mesh_.cell_count()) +
                    " values, got " + std::to_string(values_.size()));
}

double ScalarField::integral() const {
  double s = 0.0;
  for (double v : values_) s += v;
  return s * mesh_.cell_volume();
}

double ScalarField::min() const { return *std::min_element(values_.begin(), values_.end()); }
double ScalarField::max() const { return *std::max_element(values_.begin(), values_.end()); }

void ScalarField::require_finite(const char* what) const {
  for (std::size_t i = 0; i < values_.size(); ++i)
    if (!std::isfinite(values_[i]))
      throw GridError(std::string(what) + ": non-finite value in cell " + std::to_string(i));
}

VectorField::VectorField(const Mesh& mesh, double value)
    : mesh_(mesh), data_(mesh.cell_count() * static_cast<std::size_t>(mesh.dim()), value) {}

VectorField::VectorField(const Mesh& mesh, std::vector<double> data)
    : mesh_(mesh), data_(std::move(data)) {
  if (data_.size() != mesh_.cell_count() * static_cast<std::size_t>(mesh_.dim()))
    throw GridError("vector field: wrong value count " + std::to_string(data_.size()));
}

ScalarField VectorField::component_field(int a) const {
  auto c = component(a);
  return ScalarField(mesh_, std::vector<double>(c.begin(), c.end()));
}

void VectorField::require_finite(const char* what) const {
  for (std::size_t i = 0; i < data_.size(); ++i)
    if (!std::isfinite(data_[i]))
      throw GridError(std::string(what) + ": non-finite value in cell " +
                      std::to_string(i % mesh_.cell_count()) + ", component " +
                      std::to_string(i / mesh_.cell_count()));
}

// ---------------------------------------------------------------------------
// Projection

std::vector<ScalarField> project_components(const MultiPointFunction& f, int components,
                                            const Mesh& mesh, int q) {
  if (q < 1) throw GridError("project: q must be >= 1");
  const int d = mesh.dim();
  const double h = mesh.h();
  std::size_t samples = 1;
  for (int a = 0; a < d; ++a) samples *= static_cast<std::size_t>(q);

  std::vector<std::vector<double>> out(components, std::vector<double>(mesh.cell_count()));
  std::vector<double> acc(components), val(components);
  for (std::size_t c = 0; c < mesh.cell_count(); ++c) {
    std::fill(acc.begin(), acc.end(), 0.0);
    for (std::size_t s = 0; s < samples; ++s) {
      Point x{};
      std::size_t rem = s;
      for (int a = d - 1; a >= 0; --a) {
        const int sub = static_cast<int>(rem % static_cast<std::size_t>(q));
        rem /= static_cast<std::size_t>(q);
        x[a] = (mesh.coord(c, a) + (sub + 0.5) / q) * h;
      }
      f(x, val);
      for (int j = 0; j < components; ++j) {
        if (!std::isfinite(val[j])) {
          std::ostringstream os;
          os << "project: non-finite sample in cell " << c << " (component " << j << ")";
          throw GridError(os.str());
        }
        acc[j] += val[j];
      }
    }
    for (int j = 0; j < components; ++j) out[j][c] = acc[j] / static_cast<double>(samples);
  }

  std::vector<ScalarField> fields;
  fields.reserve(components);
  for (auto& v : out) fields.emplace_back(mesh, std::move(v));
  return fields;
}

ScalarField project(const PointFunction& f, const Mesh& mesh, int q) {
  auto fields = project_components(
      [&](const Point& x, std::span<double> out) { out[0] = f(x); }, 1, mesh, q);
  return std::move(fields.front());
}

// ---------------------------------------------------------------------------
// Overlap geometry

namespace {

struct Segment {
  int ia;
  int ib;
  double length;
};

// 1D common refinement of the partitions {i/ka} and {j/kb} of [0,1).
// Breakpoints are merged on the integer scale ka*kb, so equality is exact.
std::vector<Segment> overlap_segments(int ka, int kb) {
  std::vector<Segment> segs;
  segs.reserve(static_cast<std::size_t>(ka + kb));
  const std::int64_t scale = static_cast<std::int64_t>(ka) * kb;
  std::int64_t pos = 0;
  int ia = 0, ib = 0;
  while (pos < scale) {
    const std::int64_t next_a = static_cast<std::int64_t>(ia + 1) * kb;
    const std::int64_t next_b = static_cast<std::int64_t>(ib + 1) * ka;
    const std::int64_t next = std::min(next_a, next_b);
    segs.push_back({ia, ib, static_cast<double>(next - pos) / static_cast<double>(scale)});
    pos = next;
    if (next == next_a) ++ia;
    if (next == next_b) ++ib;
  }
  return segs;
}

template <class Fn>
void for_each_overlap(const Mesh& ma, const Mesh& mb, Fn&& fn) {
  if (ma.dim() != mb.dim())
    throw GridError("overlap: meshes live on tori of different dimension");
  const int d = ma.dim();
  const auto segs = overlap_segments(ma.k(), mb.k());
  // Odometer over d copies of the same 1D segment list.
  std::array<std::size_t, kMaxDim> pos{};
  const std::size_t ns = segs.size();
  while (true) {
    std::size_t ia = 0, ib = 0;
    double w = 1.0;
    for (int a = 0; a < d; ++a) {
      const Segment& s = segs[pos[a]];
      ia += static_cast<std::size_t>(s.ia) * ma.stride(a);
      ib += static_cast<std::size_t>(s.ib) * mb.stride(a);
      w *= s.length;
    }
    fn(ia, ib, w);
    int a = d - 1;
    while (a >= 0 && ++pos[a] == ns) pos[a--] = 0;
    if (a < 0) break;
  }
}

}  // namespace

double overlap_integrate_l1(const ScalarField& a, const ScalarField& b) {
  double s = 0.0;
  for_each_overlap(a.mesh(), b.mesh(), [&](std::size_t ia, std::size_t ib, double w) {
    s += w * std::abs(a[ia] - b[ib]);
  });
  return s;
}

double overlap_integrate_product(const ScalarField& a, const ScalarField& b) {
  double s = 0.0;
  for_each_overlap(a.mesh(), b.mesh(),
                   [&](std::size_t ia, std::size_t ib, double w) { s += w * a[ia] * b[ib]; });
  return s;
}

namespace {

// Common refinement of the partitions {i/k_f} for every k_f in `ks`, clipped
// to [lo, hi). Breakpoints are merged on the integer scale lcm(ks).
struct MultiSegments {
  std::vector<int> index;  // segment s, field f at s * nf + f
  std::vector<double> length;
};

MultiSegments multi_segments(const std::vector<int>& ks, double lo, double hi) {
  std::int64_t scale = 1;
  for (int k : ks) scale = std::lcm(scale, static_cast<std::int64_t>(k));
  const std::size_t nf = ks.size();
  MultiSegments out;
  std::vector<int> idx(nf, 0);
  std::int64_t pos = 0;
  while (pos < scale) {
    std::int64_t next = scale;
    for (std::size_t f = 0; f < nf; ++f) next = std::min(next, (idx[f] + 1) * (scale / ks[f]));
    const double x0 = static_cast<double>(pos) / scale, x1 = static_cast<double>(next) / scale;
    const double len = std::min(x1, hi) - std::max(x0, lo);
    if (len > 0.0) {
      out.index.insert(out.index.end(), idx.begin(), idx.end());
      out.length.push_back(len);
    }
    for (std::size_t f = 0; f < nf; ++f)
      if (next == (idx[f] + 1) * (scale / ks[f])) ++idx[f];
    pos = next;
  }
  return out;
}

}  // namespace

double integrate_pointwise(const std::vector<const ScalarField*>& fields, const PointwiseCombiner& g) {
  const double lo[kMaxDim] = {0.0, 0.0, 0.0}, hi[kMaxDim] = {1.0, 1.0, 1.0};
  return integrate_pointwise(fields, g, lo, hi);
}

double integrate_pointwise(const std::vector<const ScalarField*>& fields, const PointwiseCombiner& g,
                           std::span<const double> lo, std::span<const double> hi) {
  if (fields.empty()) throw GridError("integrate_pointwise: no fields");
  const int d = fields.front()->mesh().dim();
  std::vector<int> ks;
  for (const ScalarField* f : fields) {
    if (f->mesh().dim() != d) throw GridError("integrate_pointwise: fields live on tori of different dimension");
    ks.push_back(f->mesh().k());
  }
  std::vector<MultiSegments> axes;
  for (int a = 0; a < d; ++a) {
    if (!(lo[a] >= 0.0 && hi[a] <= 1.0 && lo[a] < hi[a]))
      throw GridError("box: need 0 <= lo < hi <= 1 on every axis");
    axes.push_back(multi_segments(ks, lo[a], hi[a]));
  }
  const std::size_t nf = fields.size();
  std::vector<double> values(nf);
  std::array<std::size_t, kMaxDim> pos{};
  double total = 0.0;
  while (true) {
    double w = 1.0;
    for (int a = 0; a < d; ++a) w *= axes[a].length[pos[a]];
    for (std::size_t f = 0; f < nf; ++f) {
      const Mesh& m = fields[f]->mesh();
      std::size_t cell = 0;
      for (int a = 0; a < d; ++a) cell += static_cast<std::size_t>(axes[a].index[pos[a] * nf + f]) * m.stride(a);
      values[f] = (*fields[f])[cell];
    }
    total += w * g(values);
    int a = d - 1;
    while (a >= 0 && ++pos[a] == axes[a].length.size()) pos[a--] = 0;
    if (a < 0) break;
  }
  return total;
}

ScalarField restrict_to(const ScalarField& a, const Mesh& target) {
  if (a.mesh() == target) return a;
  ScalarField out(target, 0.0);
  for_each_overlap(a.mesh(), target,
                   [&](std::size_t ia, std::size_t it, double w) { out[it] += w * a[ia]; });
  const double inv_vol = 1.0 / target.cell_volume();
  for (double& v : out.values()) v *= inv_vol;
  return out;
}

double integrate_abs_over_box(const ScalarField& a, std::span<const double> lo,
                              std::span<const double> hi) {
  const Mesh& m = a.mesh();
  const int d = m.dim();
  // Per-axis overlap length of each cell row with [lo, hi).
  std::vector<std::vector<double>> len(d, std::vector<double>(m.k(), 0.0));
  for (int ax = 0; ax < d; ++ax) {
    if (!(lo[ax] >= 0.0 && hi[ax] <= 1.0 && lo[ax] < hi[ax]))
      throw GridError("box: need 0 <= lo < hi <= 1 on every axis");
    for (int i = 0; i < m.k(); ++i) {
      const double c0 = i * m.h(), c1 = (i + 1) * m.h();
      len[ax][i] = std::max(0.0, std::min(c1, hi[ax]) - std::max(c0, lo[ax]));
    }
  }
  double s = 0.0;
  for (std::size_t c = 0; c < m.cell_count(); ++c) {
    double w = 1.0;
    for (int ax = 0; ax < d; ++ax) w *= len[ax][m.coord(c, ax)];
    if (w > 0.0) s += w * std::abs(a[c]);
  }
  return s;
}

}  // namespace vfv
