#pragma once

// Viscosity finite volume time stepper for the barotropic Euler system
//
//   D_t rho + div_up(rho, u) = 0
//   D_t (rho u) + div_up(rho u, u) + grad_h p = mu Lap_h u + nu grad_h div_h u
//
// with p = a rho^gamma, mu = c_mu h^alpha, nu = mu / 3.

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "vfv/grid.hpp"
#include "vfv/ops.hpp"

namespace vfv {

enum class TimeMode { Implicit, Explicit };

struct SchemeParams {
  double gamma = 1.4;
  double a = 1.0;       // pressure coefficient
  double alpha = 0.9;   // viscosity exponent
  double eps = 0.5;     // flux diffusion exponent
  double c_mu = 1.0;    // shear viscosity prefactor
  double cfl = 0.4;     // explicit mode only
  double dt_ratio = 0.1;  // dt = dt_ratio * h
  TimeMode mode = TimeMode::Implicit;
  double picard_tol = 1e-10;
  int picard_max = 200;

  /// Throws Error on out-of-range values.
  void validate() const;
  /// Non-empty when alpha violates the Euler-limit exponent bound for dimension d.
  std::optional<std::string> alpha_warning(int d) const;
};

struct Viscosity {
  double mu;
  double nu;
};

Viscosity viscosity(double h, const SchemeParams& params);

struct State {
  ScalarField rho{Mesh(1)};
  VectorField mom{Mesh(1)};
  double time = 0.0;

  const Mesh& mesh() const { return rho.mesh(); }
  VectorField velocity() const;
  /// Positive finite density and finite velocity.
  void validate() const;
};

struct StepReport {
  double mass = 0.0;
  double energy = 0.0;
  double energy_prev = 0.0;
  double dissipation = 0.0;  // mu ||grad_D u||^2 + nu ||div_h u||^2 at the new level
  double dt = 0.0;
  int picard_iterations = 0;
  double residual = 0.0;
  double min_density = 0.0;

  /// D_t E + dissipation; nonpositive for an exact implicit solve.
  double energy_balance() const { return (energy - energy_prev) / dt + dissipation; }
};

ScalarField pressure(const ScalarField& rho, const SchemeParams& params);

/// sum_K |K| (|m|^2 / (2 rho) + a rho^gamma / (gamma - 1))
double total_energy(const State& s, const SchemeParams& params);

/// Max-norm residuals of the discrete mass and momentum equations for the
/// pair (prev -> next) over a step of length dt.
struct Residual {
  double mass;
  double momentum;
  double max() const { return mass > momentum ? mass : momentum; }
};
Residual scheme_residual(const State& prev, const State& next, double dt, const SchemeParams& params);

/// Mesh-bound stepper; keeps the constant viscous operator between steps.
class Stepper {
 public:
  Stepper(const Mesh& mesh, const SchemeParams& params);
  ~Stepper();
  Stepper(Stepper&&) noexcept;
  Stepper& operator=(Stepper&&) noexcept;

  const Mesh& mesh() const;
  const SchemeParams& params() const;
  Viscosity viscosity() const;

  /// Nominal dt_ratio * h, reduced in explicit mode to the stability bound.
  double time_step(const State& s) const;
  /// One step of length dt. Throws SolverError on Picard failure or loss of positivity.
  std::pair<State, StepReport> step(const State& s, double dt) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// One step with the nominal time step of `params` on mesh width h.
std::pair<State, StepReport> step(const State& s, const SchemeParams& params, double h);

struct RunOptions {
  std::vector<double> save_times;  // snapshot when a step lands on or passes one of these
  int save_every_steps = 0;         // 0 disables
  bool record_density = false;      // keep rho at every time level for concentration analysis
};

struct Snapshot {
  int step = 0;
  State state;
};

/// Piecewise-constant-in-time record of a run.
struct Trajectory {
  Mesh mesh{1};
  double final_time = 0.0;
  State final_state;
  std::vector<StepReport> reports;
  std::vector<Snapshot> snapshots;
  /// rho at t_0 .. t_{n-1} with the matching step lengths, when recorded.
  std::vector<ScalarField> densities;
  std::vector<double> step_lengths;
};

using StepObserver = std::function<void(const State& next, const StepReport& report, int step)>;

Trajectory run(const State& initial, const SchemeParams& params, double final_time,
               const RunOptions& options = {}, const StepObserver& observer = {});

struct Concentration {
  double raw = 0.0;      // (space-time cells with rho >= rho_bar) * h^{d+1}
  double measure = 0.0;  // space-time volume of those cells
  double fraction = 0.0; // measure / final_time
};

/// Size of the space-time set where the density reaches rho_bar.
Concentration concentration_fraction(const Trajectory& trajectory, double rho_bar);

}  // namespace vfv
