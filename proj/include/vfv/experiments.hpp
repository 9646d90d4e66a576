#pragma once

// Kelvin-Helmholtz shear-layer data on the unit torus.
//
// The band I_1(x) < x_2 < I_2(x) carries the inner state, the rest the outer
// state, with perturbed interfaces I_j(x) = J_j + eps * Y_j(x_1),
// Y_j(x_1) = sum_n a_j^n cos(b_j^n + 2 n pi x_1) and sum_n a_j^n = 1.

#include <cstdint>
#include <string>
#include <vector>

#include "vfv/grid.hpp"
#include "vfv/scheme.hpp"

namespace vfv {

struct KHParams {
  double J1 = 0.25;
  double J2 = 0.75;
  double eps_perturb = 0.01;
  int modes = 10;
  std::vector<double> a1, a2;  // normalized amplitudes, one per mode
  std::vector<double> b1, b2;  // phases in [-pi, pi]
  std::uint64_t seed = 0;
  double rho_inner = 2.0, u_inner = -0.5;
  double rho_outer = 1.0, u_outer = 0.5;

  double interface(int j, double x1) const;
  /// Throws Error when the amplitude normalization or array sizes are off.
  void validate() const;
  /// Human-readable block with every coefficient printed exactly.
  std::string to_config_block() const;
};

/// Deterministic coefficient draw: a_j^n uniform in [0,1] then normalized,
/// b_j^n uniform in [-pi, pi]. Uses a fixed 64-bit generator.
KHParams draw_kh_params(std::uint64_t seed, int modes = 10, double eps_perturb = 0.01);

struct PrimitiveState {
  double rho;
  Point u;
};

PrimitiveState kh_state(const Point& x, const KHParams& p);

/// Projected density and momentum, momentum = cell average of rho * u.
State make_initial_state(const KHParams& p, const Mesh& mesh, int q = 8);

/// rho = 1 + amplitude sin(2 pi x_1), u = 0.
State make_smooth_state(const Mesh& mesh, double amplitude = 0.1, int q = 8);

}  // namespace vfv
