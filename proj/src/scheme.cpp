#include "vfv/scheme.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <sstream>

namespace vfv {

using SpMat = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Triplet = Eigen::Triplet<double>;
using EVec = Eigen::VectorXd;

void SchemeParams::validate() const {
  auto fail = [](const std::string& m) { throw Error("scheme params: " + m); };
  if (!(gamma > 1.0)) fail("gamma must be > 1");
  if (!(a > 0.0)) fail("a must be > 0");
  if (!(alpha >= 0.0)) fail("alpha must be >= 0");
  if (!(eps > -1.0)) fail("eps must be > -1");
  if (!(c_mu > 0.0)) fail("c_mu must be > 0");
  if (!(cfl > 0.0 && cfl <= 1.0)) fail("cfl must lie in (0, 1]");
  if (!(dt_ratio > 0.0)) fail("dt_ratio must be > 0");
  if (!(picard_tol > 0.0)) fail("picard_tol must be > 0");
  if (picard_max < 1) fail("picard_max must be >= 1");
}

std::optional<std::string> SchemeParams::alpha_warning(int d) const {
  const double bound = gamma >= 2.0 ? 2.0 - d / gamma : 2.0 - (d / 3.0 + 1.0 + eps) / gamma;
  if (alpha > 0.0 && alpha < bound) return std::nullopt;
  std::ostringstream os;
  os << "alpha = " << alpha << " lies outside the Euler-limit range (0, " << bound
     << ") for gamma = " << gamma << ", d = " << d;
  return os.str();
}

Viscosity viscosity(double h, const SchemeParams& params) {
  if (!(h > 0.0 && h < 1.0) && h != 1.0) throw Error("viscosity: h must lie in (0, 1]");
  const double mu = params.c_mu * std::pow(h, params.alpha);
  return {mu, mu / 3.0};
}

VectorField State::velocity() const {
  VectorField u(mesh());
  for (int a = 0; a < mesh().dim(); ++a) {
    auto m = mom.component(a);
    auto out = u.component(a);
    for (std::size_t c = 0; c < mesh().cell_count(); ++c) out[c] = m[c] / rho[c];
  }
  return u;
}

void State::validate() const {
  if (!(mom.mesh() == rho.mesh())) throw Error("state: density and momentum on different meshes");
  rho.require_finite("state density");
  mom.require_finite("state momentum");
  for (std::size_t c = 0; c < rho.size(); ++c)
    if (!(rho[c] > 0.0))
      throw Error("state: nonpositive density " + std::to_string(rho[c]) + " in cell " +
                  std::to_string(c));
}

ScalarField pressure(const ScalarField& rho, const SchemeParams& params) {
  ScalarField p(rho.mesh());
  for (std::size_t c = 0; c < rho.size(); ++c) {
    if (!(rho[c] > 0.0))
      throw Error("pressure: nonpositive density in cell " + std::to_string(c));
    p[c] = params.a * std::pow(rho[c], params.gamma);
  }
  return p;
}

double total_energy(const State& s, const SchemeParams& params) {
  const Mesh& m = s.mesh();
  const double pot = params.a / (params.gamma - 1.0);
  double e = 0.0;
  for (std::size_t c = 0; c < m.cell_count(); ++c) {
    double m2 = 0.0;
    for (int a = 0; a < m.dim(); ++a) m2 += s.mom.at(c, a) * s.mom.at(c, a);
    e += 0.5 * m2 / s.rho[c] + pot * std::pow(s.rho[c], params.gamma);
  }
  return e * m.cell_volume();
}

namespace {

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

VectorField times_density(const VectorField& u, const ScalarField& rho) {
  VectorField m(u.mesh());
  for (int a = 0; a < u.dim(); ++a) {
    auto in = u.component(a);
    auto out = m.component(a);
    for (std::size_t c = 0; c < rho.size(); ++c) out[c] = rho[c] * in[c];
  }
  return m;
}

// Mass defect (rho - rho_old)/dt + div_up(rho, w) for transport velocity w.
ScalarField mass_defect(const ScalarField& rho, const ScalarField& rho_old, const VectorField& w,
                        double dt, const ops::FluxParams& fp) {
  ScalarField r = ops::div_up(rho, w, fp);
  for (std::size_t c = 0; c < r.size(); ++c) r[c] += (rho[c] - rho_old[c]) / dt;
  return r;
}

// Momentum defect for velocity u at density rho with transport velocity w.
VectorField momentum_defect(const VectorField& u, const ScalarField& rho, const VectorField& mom_old,
                            const VectorField& w, double dt, const ops::FluxParams& fp,
                            const Viscosity& v, const SchemeParams& params) {
  const VectorField m = times_density(u, rho);
  VectorField r = ops::div_up(m, w, fp);
  const VectorField gp = ops::grad_h(pressure(rho, params));
  const VectorField visc = ops::viscous_term(u, v.mu, v.nu);
  for (int a = 0; a < u.dim(); ++a) {
    auto ra = r.component(a);
    auto ma = m.component(a);
    auto oa = mom_old.component(a);
    auto ga = gp.component(a);
    auto va = visc.component(a);
    for (std::size_t c = 0; c < rho.size(); ++c) ra[c] += (ma[c] - oa[c]) / dt + ga[c] - va[c];
  }
  return r;
}

}  // namespace

Residual scheme_residual(const State& prev, const State& next, double dt, const SchemeParams& params) {
  const Mesh& m = next.mesh();
  const ops::FluxParams fp(params.eps, m.h());
  const VectorField u = next.velocity();
  const ScalarField rm = mass_defect(next.rho, prev.rho, u, dt, fp);
  const VectorField ru = momentum_defect(u, next.rho, prev.mom, u, dt, fp, viscosity(m.h(), params), params);
  return {max_abs(rm.values()), max_abs(ru.data())};
}

// ---------------------------------------------------------------------------

struct Stepper::Impl {
  Mesh mesh;
  SchemeParams params;
  Viscosity visc;
  ops::FluxParams fp;
  SpMat viscous;  // mu blockdiag(L) + nu G D, acting on component-major u

  Impl(const Mesh& m, const SchemeParams& p)
      : mesh(m), params(p), visc(vfv::viscosity(m.h(), p)), fp(p.eps, m.h()) {
    params.validate();
    if (params.mode == TimeMode::Implicit) build_viscous();
  }

  void build_viscous() {
    const std::size_t n = mesh.cell_count();
    const int d = mesh.dim();
    const double k = mesh.k();
    const auto dn = static_cast<Eigen::Index>(d * n);
    std::vector<Triplet> tl, tg, td;
    for (std::size_t c = 0; c < n; ++c)
      for (int a = 0; a < d; ++a) {
        const auto p = static_cast<Eigen::Index>(mesh.neighbor(c, a, +1));
        const auto q = static_cast<Eigen::Index>(mesh.neighbor(c, a, -1));
        const auto ci = static_cast<Eigen::Index>(c);
        const auto off = static_cast<Eigen::Index>(a * n);
        tl.emplace_back(ci, p, k * k);
        tl.emplace_back(ci, q, k * k);
        tl.emplace_back(ci, ci, -2.0 * k * k);
        tg.emplace_back(off + ci, p, 0.5 * k);
        tg.emplace_back(off + ci, q, -0.5 * k);
        td.emplace_back(ci, off + p, 0.5 * k);
        td.emplace_back(ci, off + q, -0.5 * k);
      }
    const auto ni = static_cast<Eigen::Index>(n);
    SpMat lap(ni, ni), grad(dn, ni), div(ni, dn);
    lap.setFromTriplets(tl.begin(), tl.end());
    grad.setFromTriplets(tg.begin(), tg.end());
    div.setFromTriplets(td.begin(), td.end());

    std::vector<Triplet> tv;
    for (int b = 0; b < d; ++b) {
      const auto off = static_cast<Eigen::Index>(b * n);
      for (Eigen::Index r = 0; r < lap.outerSize(); ++r)
        for (SpMat::InnerIterator it(lap, r); it; ++it)
          tv.emplace_back(off + it.row(), off + it.col(), visc.mu * it.value());
    }
    SpMat gd = grad * div;
    for (Eigen::Index r = 0; r < gd.outerSize(); ++r)
      for (SpMat::InnerIterator it(gd, r); it; ++it)
        tv.emplace_back(it.row(), it.col(), visc.nu * it.value());
    viscous.resize(dn, dn);
    viscous.setFromTriplets(tv.begin(), tv.end());
  }

  // Entries of the frozen-transport upwind operator r -> div_up(r, w),
  // as (row, col, value) with the column scaled by col_scale (if given).
  void upwind_triplets(const VectorField& w, std::vector<Triplet>& out, Eigen::Index offset,
                       const ScalarField* col_scale) const {
    const std::size_t n = mesh.cell_count();
    const double k = mesh.k();
    const double diff = fp.diffusion();
    for (int a = 0; a < mesh.dim(); ++a) {
      auto wa = w.component(a);
      for (std::size_t c = 0; c < n; ++c) {
        const std::size_t p = mesh.neighbor(c, a, +1);
        const double un = 0.5 * (wa[c] + wa[p]);
        double ain = k * (0.5 * un + diff + 0.5 * std::abs(un));
        double aout = k * (0.5 * un - diff - 0.5 * std::abs(un));
        if (col_scale) {
          ain *= (*col_scale)[c];
          aout *= (*col_scale)[p];
        }
        const auto ci = offset + static_cast<Eigen::Index>(c);
        const auto pi = offset + static_cast<Eigen::Index>(p);
        out.emplace_back(ci, ci, ain);
        out.emplace_back(ci, pi, aout);
        out.emplace_back(pi, ci, -ain);
        out.emplace_back(pi, pi, -aout);
      }
    }
  }

  static void solve(const SpMat& a, std::span<const double> rhs, std::span<double> x, const char* what) {
    Eigen::BiCGSTAB<SpMat, Eigen::DiagonalPreconditioner<double>> solver;
    solver.setTolerance(1e-8);
    solver.setMaxIterations(1000);
    solver.compute(a);
    if (solver.info() != Eigen::Success) throw SolverError(std::string(what) + ": preconditioner setup failed");
    Eigen::Map<const EVec> b(rhs.data(), static_cast<Eigen::Index>(rhs.size()));
    Eigen::Map<EVec> sol(x.data(), static_cast<Eigen::Index>(x.size()));
    sol = solver.solve(b);
    if (solver.info() != Eigen::Success && solver.error() > 1e-6)
      throw SolverError(std::string(what) + ": linear solve failed", solver.error());
  }

  std::pair<State, StepReport> step_explicit(const State& s, double dt) const {
    const VectorField u = s.velocity();
    State next{s.rho, s.mom, s.time + dt};
    const ScalarField fr = ops::div_up(s.rho, u, fp);
    const VectorField fm = ops::div_up(s.mom, u, fp);
    const VectorField gp = ops::grad_h(pressure(s.rho, params));
    const VectorField visc_term = ops::viscous_term(u, visc.mu, visc.nu);
    for (std::size_t c = 0; c < mesh.cell_count(); ++c) next.rho[c] = s.rho[c] - dt * fr[c];
    for (int a = 0; a < mesh.dim(); ++a) {
      auto mn = next.mom.component(a);
      auto mo = s.mom.component(a);
      auto f = fm.component(a);
      auto g = gp.component(a);
      auto v = visc_term.component(a);
      for (std::size_t c = 0; c < mesh.cell_count(); ++c) mn[c] = mo[c] - dt * (f[c] + g[c] - v[c]);
    }
    StepReport rep;
    rep.picard_iterations = 0;
    return {std::move(next), rep};
  }

  std::pair<State, StepReport> step_implicit(const State& s, double dt) const {
    const std::size_t n = mesh.cell_count();
    const int d = mesh.dim();
    const auto ni = static_cast<Eigen::Index>(n);
    const auto dn = static_cast<Eigen::Index>(d * n);

    ScalarField rho = s.rho;
    VectorField u = s.velocity();
    std::vector<double> delta_rho(n), delta_u(d * n), rhs_u(d * n);
    std::vector<Triplet> trip;
    double res = 0.0;

    for (int it = 1; it <= params.picard_max; ++it) {
      const VectorField w = u;  // frozen transport velocity

      // Mass: (1/dt) I + Up(w), applied as a defect correction.
      trip.clear();
      upwind_triplets(w, trip, 0, nullptr);
      for (Eigen::Index c = 0; c < ni; ++c) trip.emplace_back(c, c, 1.0 / dt);
      SpMat am(ni, ni);
      am.setFromTriplets(trip.begin(), trip.end());
      ScalarField rm = mass_defect(rho, s.rho, w, dt, fp);
      for (double& v : rm.values()) v = -v;
      solve(am, rm.values(), delta_rho, "mass update");
      for (std::size_t c = 0; c < n; ++c) rho[c] += delta_rho[c];
      for (std::size_t c = 0; c < n; ++c)
        if (!(rho[c] > 0.0))
          throw SolverError("implicit step: nonpositive density in cell " + std::to_string(c) +
                            " at Picard iteration " + std::to_string(it), res);

      // Momentum in terms of u: diag(rho)/dt + Up(w) diag(rho) - viscous.
      trip.clear();
      for (int b = 0; b < d; ++b) {
        const auto off = static_cast<Eigen::Index>(b * n);
        upwind_triplets(w, trip, off, &rho);
        for (std::size_t c = 0; c < n; ++c)
          trip.emplace_back(off + static_cast<Eigen::Index>(c), off + static_cast<Eigen::Index>(c), rho[c] / dt);
      }
      SpMat au(dn, dn);
      au.setFromTriplets(trip.begin(), trip.end());
      au -= viscous;
      const VectorField ru = momentum_defect(u, rho, s.mom, w, dt, fp, visc, params);
      for (std::size_t i = 0; i < rhs_u.size(); ++i) rhs_u[i] = -ru.data()[i];
      solve(au, rhs_u, delta_u, "momentum update");
      for (std::size_t i = 0; i < delta_u.size(); ++i) u.data()[i] += delta_u[i];

      State trial{rho, times_density(u, rho), s.time + dt};
      res = scheme_residual(s, trial, dt, params).max();
      if (!std::isfinite(res)) throw SolverError("implicit step: residual is not finite", res);
      if (res <= params.picard_tol) {
        StepReport rep;
        rep.picard_iterations = it;
        rep.residual = res;
        return {std::move(trial), rep};
      }
    }
    std::ostringstream os;
    os << "implicit step: Picard iteration did not converge in " << params.picard_max
       << " iterations (residual " << res << ")";
    throw SolverError(os.str(), res);
  }
};

Stepper::Stepper(const Mesh& mesh, const SchemeParams& params)
    : impl_(std::make_unique<Impl>(mesh, params)) {}
Stepper::~Stepper() = default;
Stepper::Stepper(Stepper&&) noexcept = default;
Stepper& Stepper::operator=(Stepper&&) noexcept = default;

const Mesh& Stepper::mesh() const { return impl_->mesh; }
const SchemeParams& Stepper::params() const { return impl_->params; }
Viscosity Stepper::viscosity() const { return impl_->visc; }

double Stepper::time_step(const State& s) const {
  const Mesh& m = impl_->mesh;
  const SchemeParams& p = impl_->params;
  const double h = m.h();
  double dt = p.dt_ratio * h;
  if (p.mode == TimeMode::Implicit) return dt;

  const int d = m.dim();
  double wave = 0.0;
  for (std::size_t c = 0; c < m.cell_count(); ++c) {
    double u2 = 0.0;
    for (int a = 0; a < d; ++a) {
      const double ua = s.mom.at(c, a) / s.rho[c];
      u2 += ua * ua;
    }
    const double cs = std::sqrt(p.gamma * p.a * std::pow(s.rho[c], p.gamma - 1.0));
    wave = std::max(wave, std::sqrt(u2) + cs);
  }
  const double rho_min = s.rho.min();
  const Viscosity& v = impl_->visc;
  const double rate = d * wave + 2.0 * d * impl_->fp.diffusion() +
                      (4.0 * d * v.mu + d * v.nu) / (rho_min * h);
  return std::min(dt, p.cfl * h / rate);
}

std::pair<State, StepReport> Stepper::step(const State& s, double dt) const {
  if (!(s.mesh() == impl_->mesh)) throw Error("step: state lives on a different mesh");
  if (!(dt > 0.0)) throw Error("step: dt must be positive");
  auto [next, rep] = impl_->params.mode == TimeMode::Implicit ? impl_->step_implicit(s, dt)
                                                               : impl_->step_explicit(s, dt);
  const double rmin = next.rho.min();
  if (!(rmin > 0.0)) throw SolverError("step: density lost positivity (min " + std::to_string(rmin) + ")");
  next.mom.require_finite("step momentum");

  const SchemeParams& p = impl_->params;
  const VectorField u = next.velocity();
  rep.dt = dt;
  rep.mass = next.rho.integral();
  rep.energy_prev = total_energy(s, p);
  rep.energy = total_energy(next, p);
  rep.dissipation = impl_->visc.mu * ops::grad_D_norm_sq(u) + impl_->visc.nu * ops::div_norm_sq(u);
  rep.min_density = rmin;
  if (p.mode == TimeMode::Explicit) rep.residual = 0.0;
  return {std::move(next), rep};
}

std::pair<State, StepReport> step(const State& s, const SchemeParams& params, double h) {
  if (std::abs(h - s.mesh().h()) > 1e-15) throw Error("step: h does not match the state mesh");
  Stepper stepper(s.mesh(), params);
  return stepper.step(s, stepper.time_step(s));
}

// ---------------------------------------------------------------------------

Trajectory run(const State& initial, const SchemeParams& params, double final_time,
               const RunOptions& options, const StepObserver& observer) {
  if (!(final_time > 0.0)) throw Error("run: final time must be positive");
  initial.validate();
  Stepper stepper(initial.mesh(), params);

  std::vector<double> saves = options.save_times;
  std::sort(saves.begin(), saves.end());
  std::vector<double> stops = saves;
  stops.erase(std::remove_if(stops.begin(), stops.end(),
                             [&](double t) { return !(t > initial.time && t < final_time); }),
              stops.end());
  stops.push_back(final_time);

  Trajectory traj;
  traj.mesh = initial.mesh();
  traj.final_time = final_time;
  State s = initial;
  std::size_t next_stop = 0;
  int n = 0;
  const double tol = 1e-12 * final_time;
  while (s.time < final_time - tol) {
    double dt = stepper.time_step(s);
    bool at_stop = false;
    if (s.time + dt >= stops[next_stop] - tol) {
      dt = stops[next_stop] - s.time;
      at_stop = true;
    }
    if (options.record_density) {
      traj.densities.push_back(s.rho);
      traj.step_lengths.push_back(dt);
    }
    auto [next, rep] = stepper.step(s, dt);
    ++n;
    if (at_stop) {
      next.time = stops[next_stop];
      ++next_stop;
    }
    s = std::move(next);
    traj.reports.push_back(rep);
    const bool save = (at_stop && std::binary_search(saves.begin(), saves.end(), s.time)) ||
                      (options.save_every_steps > 0 && n % options.save_every_steps == 0);
    if (save) traj.snapshots.push_back({n, s});
    if (observer) observer(s, rep, n);
  }
  traj.final_state = std::move(s);
  return traj;
}

Concentration concentration_fraction(const Trajectory& trajectory, double rho_bar) {
  if (!(rho_bar > 0.0)) throw Error("concentration: rho_bar must be positive");
  if (trajectory.densities.size() != trajectory.step_lengths.size())
    throw Error("concentration: trajectory has no recorded densities");
  const Mesh& m = trajectory.mesh;
  const double hd = m.cell_volume();
  Concentration out;
  double count = 0.0;
  for (std::size_t i = 0; i < trajectory.densities.size(); ++i) {
    std::size_t hits = 0;
    for (double v : trajectory.densities[i].values())
      if (v >= rho_bar) ++hits;
    count += static_cast<double>(hits);
    out.measure += static_cast<double>(hits) * hd * trajectory.step_lengths[i];
  }
  out.raw = count * hd * m.h();
  out.fraction = out.measure / trajectory.final_time;
  return out;
}

}  // namespace vfv
