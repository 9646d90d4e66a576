// Serial reference kernels. Same face formulas and accumulation order as the
// OpenMP kernels in ops.cpp, written as plain loops over Mesh::neighbor.

#include "vfv/ops.hpp"

namespace vfv::ops::serial {

VectorField grad_h(const ScalarField& r) {
  const Mesh& m = r.mesh();
  const double inv_h = m.k();
  VectorField g(m);
  for (std::size_t c = 0; c < m.cell_count(); ++c)
    for (int a = 0; a < m.dim(); ++a) {
      const std::size_t p = m.neighbor(c, a, +1), q = m.neighbor(c, a, -1);
      g.at(c, a) = (0.5 * (r[c] + r[p]) - 0.5 * (r[q] + r[c])) * inv_h;
    }
  return g;
}

ScalarField div_h(const VectorField& v) {
  const Mesh& m = v.mesh();
  const double inv_h = m.k();
  ScalarField out(m, 0.0);
  for (std::size_t c = 0; c < m.cell_count(); ++c)
    for (int a = 0; a < m.dim(); ++a) {
      const std::size_t p = m.neighbor(c, a, +1), q = m.neighbor(c, a, -1);
      out[c] += (0.5 * (v.at(c, a) + v.at(p, a)) - 0.5 * (v.at(q, a) + v.at(c, a))) * inv_h;
    }
  return out;
}

ScalarField laplace_h(const ScalarField& r) {
  const Mesh& m = r.mesh();
  const double inv_h2 = static_cast<double>(m.k()) * m.k();
  ScalarField out(m, 0.0);
  for (std::size_t c = 0; c < m.cell_count(); ++c) {
    for (int a = 0; a < m.dim(); ++a) {
      const std::size_t p = m.neighbor(c, a, +1), q = m.neighbor(c, a, -1);
      out[c] += (r[p] - r[c]) - (r[c] - r[q]);
    }
    out[c] *= inv_h2;
  }
  return out;
}

FaceField grad_D(const ScalarField& r) {
  const Mesh& m = r.mesh();
  FaceField f{m, std::vector<std::vector<double>>(m.dim(), std::vector<double>(m.cell_count()))};
  for (std::size_t id = 0; id < m.face_count(); ++id) {
    const Face face = m.face(id);
    f.value[face.axis][face.inward] = (r[face.outward] - r[face.inward]) * static_cast<double>(m.k());
  }
  return f;
}

namespace {

void div_up_into(std::span<const double> r, const VectorField& u, double diffusion,
                 std::span<double> out) {
  const Mesh& m = u.mesh();
  const double inv_h = m.k();
  auto flux = [&](std::size_t in, std::size_t outc, int a) {
    const double un = 0.5 * (u.at(in, a) + u.at(outc, a));
    return upwind_flux_normal(r[in], r[outc], un, diffusion);
  };
  for (std::size_t c = 0; c < m.cell_count(); ++c) {
    out[c] = 0.0;
    for (int a = 0; a < m.dim(); ++a) {
      const std::size_t p = m.neighbor(c, a, +1), q = m.neighbor(c, a, -1);
      out[c] += (flux(c, p, a) - flux(q, c, a)) * inv_h;
    }
  }
}

}  // namespace

ScalarField div_up(const ScalarField& r, const VectorField& u, const FluxParams& fp) {
  ScalarField out(r.mesh());
  div_up_into(r.values(), u, fp.diffusion(), out.values());
  return out;
}

VectorField div_up(const VectorField& r, const VectorField& u, const FluxParams& fp) {
  VectorField out(r.mesh());
  for (int b = 0; b < r.dim(); ++b) div_up_into(r.component(b), u, fp.diffusion(), out.component(b));
  return out;
}

VectorField viscous_term(const VectorField& u, double mu, double nu) {
  const Mesh& m = u.mesh();
  const VectorField gd = grad_h(div_h(u));
  VectorField out(m);
  for (int a = 0; a < m.dim(); ++a) {
    const ScalarField lap = laplace_h(u.component_field(a));
    for (std::size_t c = 0; c < m.cell_count(); ++c) out.at(c, a) = mu * lap[c] + nu * gd.at(c, a);
  }
  return out;
}

}  // namespace vfv::ops::serial
