#pragma once

// Uniform periodic Cartesian mesh of the unit torus and piecewise-constant
// cell data living on it.
//
// Cells are indexed row-major over (i_0, ..., i_{d-1}); the last axis varies
// fastest. Face (axis a, cell c) is the face between c and its +a neighbour,
// so enumerating (a, c) for all a and c visits every geometric face once.

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "vfv/errors.hpp"

namespace vfv {

inline constexpr int kMaxDim = 3;

using Point = std::array<double, kMaxDim>;

struct Face {
  int axis = 0;
  std::size_t inward = 0;   // cell on the -normal side
  std::size_t outward = 0;  // cell on the +normal side
  Point normal{};           // +axis unit vector
};

class Mesh {
 public:
  explicit Mesh(int k, int d = 2);

  int k() const { return k_; }
  int dim() const { return d_; }
  double h() const { return 1.0 / k_; }

  std::size_t cell_count() const { return n_; }
  std::size_t face_count() const { return static_cast<std::size_t>(d_) * n_; }
  double cell_volume() const;
  double face_area() const;

  /// Index distance between neighbours along `axis` (k^{d-1-axis}).
  std::size_t stride(int axis) const { return strides_[axis]; }
  int coord(std::size_t cell, int axis) const {
    return static_cast<int>((cell / strides_[axis]) % static_cast<std::size_t>(k_));
  }
  std::size_t index(std::span<const int> coords) const;

  /// Periodic neighbour of `cell` in direction dir = +1 / -1 along `axis`.
  std::size_t neighbor(std::size_t cell, int axis, int dir) const;

  Point center(std::size_t cell) const;
  Face face(std::size_t face_id) const;

  friend bool operator==(const Mesh&, const Mesh&) = default;

 private:
  int k_;
  int d_;
  std::size_t n_;
  std::array<std::size_t, kMaxDim> strides_{};
};

class ScalarField {
 public:
  explicit ScalarField(const Mesh& mesh, double value = 0.0);
  ScalarField(const Mesh& mesh, std::vector<double> values);

  const Mesh& mesh() const { return mesh_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  /// Integral over the torus, sum_K |K| v_K.
  double integral() const;
  double min() const;
  double max() const;
  /// Throws GridError naming the first non-finite cell.
  void require_finite(const char* what) const;

 private:
  Mesh mesh_;
  std::vector<double> values_;
};

/// d components per cell stored component-major: all of component 0, then 1, ...
class VectorField {
 public:
  explicit VectorField(const Mesh& mesh, double value = 0.0);
  VectorField(const Mesh& mesh, std::vector<double> data);

  const Mesh& mesh() const { return mesh_; }
  int dim() const { return mesh_.dim(); }
  std::span<const double> component(int a) const {
    return {data_.data() + static_cast<std::size_t>(a) * mesh_.cell_count(), mesh_.cell_count()};
  }
  std::span<double> component(int a) {
    return {data_.data() + static_cast<std::size_t>(a) * mesh_.cell_count(), mesh_.cell_count()};
  }
  double at(std::size_t cell, int a) const {
    return data_[static_cast<std::size_t>(a) * mesh_.cell_count() + cell];
  }
  double& at(std::size_t cell, int a) {
    return data_[static_cast<std::size_t>(a) * mesh_.cell_count() + cell];
  }
  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }

  ScalarField component_field(int a) const;
  void require_finite(const char* what) const;

 private:
  Mesh mesh_;
  std::vector<double> data_;
};

using PointFunction = std::function<double(const Point&)>;
/// Writes `out.size()` component values at a point.
using MultiPointFunction = std::function<void(const Point&, std::span<double> out)>;

/// Cell averages of f over a q^d tensor midpoint subgrid of every cell.
ScalarField project(const PointFunction& f, const Mesh& mesh, int q = 8);

/// Same subsampling for several components evaluated together.
std::vector<ScalarField> project_components(const MultiPointFunction& f, int components,
                                            const Mesh& mesh, int q = 8);

/// Exact integral of |a - b| over the torus. Meshes may differ in k.
double overlap_integrate_l1(const ScalarField& a, const ScalarField& b);

/// Exact integral of a * b over the torus. Meshes may differ in k.
double overlap_integrate_product(const ScalarField& a, const ScalarField& b);

/// Pointwise combination of several field values, e.g. |sum_i c_i f_i|.
using PointwiseCombiner = std::function<double(std::span<const double> values)>;

/// Exact integral of g(f_1(x), ..., f_n(x)) over the torus, evaluated on the
/// common refinement of the fields' meshes (which may differ in k).
double integrate_pointwise(const std::vector<const ScalarField*>& fields, const PointwiseCombiner& g);

/// Same, restricted to the box prod_axis [lo, hi) with 0 <= lo < hi <= 1.
double integrate_pointwise(const std::vector<const ScalarField*>& fields, const PointwiseCombiner& g,
                           std::span<const double> lo, std::span<const double> hi);

/// Conservative area-weighted projection onto `target`.
ScalarField restrict_to(const ScalarField& a, const Mesh& target);

/// Exact integral of |a| over the axis-aligned box prod_axis [lo, hi),
/// 0 <= lo < hi <= 1 per axis.
double integrate_abs_over_box(const ScalarField& a, std::span<const double> lo,
                              std::span<const double> hi);

}  // namespace vfv
