#pragma once

// Discrete differential operators on piecewise-constant fields.
//
// Every operator is written as a sum over the faces of a cell of
// (|sigma|/|K|) times a face quantity. On the uniform grid |sigma|/|K| = 1/h.
// Face quantities are evaluated once per geometric face and gathered per cell,
// so each cell result is computed in a fixed order and the OpenMP kernels in
// vfv::ops are bit-identical to the serial reference kernels in vfv::ops::serial.

#include <cmath>
#include <vector>

#include "vfv/grid.hpp"

namespace vfv::ops {

/// Values on the two sides of one face. `normal` fixes the jump sign.
template <class T>
struct FaceTrace {
  T in{};
  T out{};
  Point normal{};
};

inline double average(const FaceTrace<double>& t) { return 0.5 * (t.in + t.out); }
inline double jump(const FaceTrace<double>& t) { return t.out - t.in; }

/// Flux diffusion h^eps of the upwind flux.
struct FluxParams {
  double eps = 0.5;
  double h = 1.0;

  FluxParams() = default;
  FluxParams(double eps_, double h_);
  double diffusion() const { return std::pow(h, eps); }
};

/// F_h for given traces of r and a normal velocity un = <u>.n on the face:
///   <r> un - (h^eps + |un|/2) [[r]]
inline double upwind_flux_normal(double r_in, double r_out, double un, double diffusion) {
  return 0.5 * (r_in + r_out) * un - (diffusion + 0.5 * std::abs(un)) * (r_out - r_in);
}

double upwind_flux(const FaceTrace<double>& r, const FaceTrace<Point>& u, const FluxParams& fp);

/// Per-face scalar data: value[axis][cell] lives on the face between `cell`
/// and its +axis neighbour, with normal +e_axis.
struct FaceField {
  Mesh mesh{1};
  std::vector<std::vector<double>> value;
};

VectorField grad_h(const ScalarField& r);
ScalarField div_h(const VectorField& v);
ScalarField laplace_h(const ScalarField& r);
/// Normal component [[r]]/h of (grad_D r) on every face.
FaceField grad_D(const ScalarField& r);
/// Upwind divergence div_h^up(r, u).
ScalarField div_up(const ScalarField& r, const VectorField& u, const FluxParams& fp);
/// Componentwise upwind divergence of a vector quantity transported by u.
VectorField div_up(const VectorField& r, const VectorField& u, const FluxParams& fp);
/// mu * laplace_h(u) + nu * grad_h(div_h(u)).
VectorField viscous_term(const VectorField& u, double mu, double nu);

/// ||grad_D u||^2 = (1/h) sum_sigma |sigma| |[[u]]|^2, summed over components.
double grad_D_norm_sq(const VectorField& u);
double grad_D_norm_sq(const ScalarField& r);
/// ||div_h u||^2_{L^2} = sum_K |K| (div_h u)_K^2.
double div_norm_sq(const VectorField& u);

/// Sum over all faces of |sigma| |F_h| (scale for telescoping checks).
double flux_magnitude_sum(const ScalarField& r, const VectorField& u, const FluxParams& fp);

namespace serial {

VectorField grad_h(const ScalarField& r);
ScalarField div_h(const VectorField& v);
ScalarField laplace_h(const ScalarField& r);
FaceField grad_D(const ScalarField& r);
ScalarField div_up(const ScalarField& r, const VectorField& u, const FluxParams& fp);
VectorField div_up(const VectorField& r, const VectorField& u, const FluxParams& fp);
VectorField viscous_term(const VectorField& u, double mu, double nu);

}  // namespace serial

}  // namespace vfv::ops
