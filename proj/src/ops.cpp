#include "vfv/ops.hpp"

namespace vfv::ops {

FluxParams::FluxParams(double eps_, double h_) : eps(eps_), h(h_) {
  if (!(eps > -1.0)) throw Error("flux params: eps must be > -1");
  if (!(h > 0.0)) throw Error("flux params: h must be positive");
}

double upwind_flux(const FaceTrace<double>& r, const FaceTrace<Point>& u, const FluxParams& fp) {
  double un = 0.0;
  for (int a = 0; a < kMaxDim; ++a) un += 0.5 * (u.in[a] + u.out[a]) * u.normal[a];
  return upwind_flux_normal(r.in, r.out, un, fp.diffusion());
}

namespace {

// Neighbour indices along one axis, computed arithmetically so the kernels do
// not go through Mesh::neighbor (the serial reference does).
struct AxisWalk {
  std::size_t stride;
  std::size_t k;
  std::size_t wrap;  // (k - 1) * stride

  AxisWalk(const Mesh& m, int axis)
      : stride(m.stride(axis)),
        k(static_cast<std::size_t>(m.k())),
        wrap(static_cast<std::size_t>(m.k() - 1) * m.stride(axis)) {}

  std::size_t coord(std::size_t c) const { return (c / stride) % k; }
  std::size_t plus(std::size_t c) const { return coord(c) == k - 1 ? c - wrap : c + stride; }
  std::size_t minus(std::size_t c) const { return coord(c) == 0 ? c + wrap : c - stride; }
};

using Faces = std::vector<std::vector<double>>;

template <class FaceFn>
Faces face_pass(const Mesh& m, FaceFn&& fn) {
  const std::size_t n = m.cell_count();
  Faces f(m.dim(), std::vector<double>(n));
  for (int a = 0; a < m.dim(); ++a) {
    const AxisWalk w(m, a);
    double* out = f[a].data();
#pragma omp parallel for schedule(static)
    for (std::size_t c = 0; c < n; ++c) out[c] = fn(a, c, w.plus(c));
  }
  return f;
}

}  // namespace

VectorField grad_h(const ScalarField& r) {
  const Mesh& m = r.mesh();
  const std::size_t n = m.cell_count();
  const double inv_h = m.k();
  const Faces avg = face_pass(m, [&](int, std::size_t c, std::size_t p) { return 0.5 * (r[c] + r[p]); });
  VectorField g(m);
  for (int a = 0; a < m.dim(); ++a) {
    const AxisWalk w(m, a);
    auto out = g.component(a);
    const double* fa = avg[a].data();
#pragma omp parallel for schedule(static)
    for (std::size_t c = 0; c < n; ++c) out[c] = (fa[c] - fa[w.minus(c)]) * inv_h;
  }
  return g;
}

ScalarField div_h(const VectorField& v) {
  const Mesh& m = v.mesh();
  const std::size_t n = m.cell_count();
  const double inv_h = m.k();
  const Faces avg = face_pass(m, [&](int a, std::size_t c, std::size_t p) {
    return 0.5 * (v.at(c, a) + v.at(p, a));
  });
  ScalarField out(m, 0.0);
  for (int a = 0; a < m.dim(); ++a) {
    const AxisWalk w(m, a);
    const double* fa = avg[a].data();
#pragma omp parallel for schedule(static)
    for (std::size_t c = 0; c < n; ++c) out[c] += (fa[c] - fa[w.minus(c)]) * inv_h;
  }
  return out;
}

ScalarField laplace_h(const ScalarField& r) {
  const Mesh& m = r.mesh();
  const std::size_t n = m.cell_count();
  const double inv_h2 = static_cast<double>(m.k()) * m.k();
  const Faces jmp = face_pass(m, [&](int, std::size_t c, std::size_t p) { return r[p] - r[c]; });
  ScalarField out(m, 0.0);
  for (int a = 0; a < m.dim(); ++a) {
    const AxisWalk w(m, a);
    const double* fa = jmp[a].data();
#pragma omp parallel for schedule(static)
    for (std::size_t c = 0; c < n; ++c) out[c] += fa[c] - fa[w.minus(c)];
  }
#pragma omp parallel for schedule(static)
  for (std::size_t c = 0; c < n; ++c) out[c] *= inv_h2;
  return out;
}

FaceField grad_D(const ScalarField& r) {
  const Mesh& m = r.mesh();
  const double inv_h = m.k();
  return {m, face_pass(m, [&](int, std::size_t c, std::size_t p) { return (r[p] - r[c]) * inv_h; })};
}

namespace {

Faces normal_velocity(const VectorField& u) {
  return face_pass(u.mesh(), [&](int a, std::size_t c, std::size_t p) {
    return 0.5 * (u.at(c, a) + u.at(p, a));
  });
}

void div_up_into(std::span<const double> r, const Faces& un, double diffusion, const Mesh& m,
                 std::span<double> out) {
  const std::size_t n = m.cell_count();
  const double inv_h = m.k();
  const Faces flux = face_pass(m, [&](int a, std::size_t c, std::size_t p) {
    return upwind_flux_normal(r[c], r[p], un[a][c], diffusion);
  });
  for (std::size_t c = 0; c < n; ++c) out[c] = 0.0;
  for (int a = 0; a < m.dim(); ++a) {
    const AxisWalk w(m, a);
    const double* fa = flux[a].data();
#pragma omp parallel for schedule(static)
    for (std::size_t c = 0; c < n; ++c) out[c] += (fa[c] - fa[w.minus(c)]) * inv_h;
  }
}

}  // namespace

ScalarField div_up(const ScalarField& r, const VectorField& u, const FluxParams& fp) {
  ScalarField out(r.mesh());
  div_up_into(r.values(), normal_velocity(u), fp.diffusion(), r.mesh(), out.values());
  return out;
}

VectorField div_up(const VectorField& r, const VectorField& u, const FluxParams& fp) {
  VectorField out(r.mesh());
  const Faces un = normal_velocity(u);
  for (int b = 0; b < r.dim(); ++b)
    div_up_into(r.component(b), un, fp.diffusion(), r.mesh(), out.component(b));
  return out;
}

VectorField viscous_term(const VectorField& u, double mu, double nu) {
  const Mesh& m = u.mesh();
  const VectorField gd = grad_h(div_h(u));
  VectorField out(m);
  for (int a = 0; a < m.dim(); ++a) {
    const ScalarField lap = laplace_h(u.component_field(a));
    auto o = out.component(a);
    auto g = gd.component(a);
#pragma omp parallel for schedule(static)
    for (std::size_t c = 0; c < m.cell_count(); ++c) o[c] = mu * lap[c] + nu * g[c];
  }
  return out;
}

double grad_D_norm_sq(const ScalarField& r) {
  const Mesh& m = r.mesh();
  const FaceField g = grad_D(r);
  double s = 0.0;
  for (const auto& axis : g.value)
    for (double v : axis) s += v * v;
  // (1/h) |sigma| [[r]]^2 = h |sigma| ([[r]]/h)^2
  return s * m.h() * m.face_area();
}

double grad_D_norm_sq(const VectorField& u) {
  double s = 0.0;
  for (int a = 0; a < u.dim(); ++a) s += grad_D_norm_sq(u.component_field(a));
  return s;
}

double div_norm_sq(const VectorField& u) {
  const ScalarField d = div_h(u);
  double s = 0.0;
  for (double v : d.values()) s += v * v;
  return s * u.mesh().cell_volume();
}

double flux_magnitude_sum(const ScalarField& r, const VectorField& u, const FluxParams& fp) {
  const Mesh& m = r.mesh();
  const Faces un = normal_velocity(u);
  const double diffusion = fp.diffusion();
  const Faces flux = face_pass(m, [&](int a, std::size_t c, std::size_t p) {
    return upwind_flux_normal(r[c], r[p], un[a][c], diffusion);
  });
  double s = 0.0;
  for (const auto& axis : flux)
    for (double v : axis) s += std::abs(v);
  return s * m.face_area();
}

}  // namespace vfv::ops
