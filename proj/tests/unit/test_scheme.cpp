#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "support.hpp"
#include "vfv/experiments.hpp"
#include "vfv/scheme.hpp"

using namespace vfv;

namespace {

State uniform_state(const Mesh& m, double rho, double ux, double uy) {
  State s{ScalarField(m, rho), VectorField(m), 0.0};
  for (std::size_t c = 0; c < m.cell_count(); ++c) {
    s.mom.at(c, 0) = rho * ux;
    s.mom.at(c, 1) = rho * uy;
  }
  return s;
}

State random_state(const Mesh& m, std::mt19937_64& g) {
  State s{test::random_scalar(m, g, 0.8, 1.6), VectorField(m), 0.0};
  for (std::size_t c = 0; c < m.cell_count(); ++c)
    for (int a = 0; a < m.dim(); ++a) s.mom.at(c, a) = s.rho[c] * test::uniform(g, -0.4, 0.4);
  return s;
}

SchemeParams explicit_params() {
  SchemeParams p;
  p.mode = TimeMode::Explicit;
  return p;
}

}  // namespace

TEST_CASE("pressure") {
  SchemeParams p;
  for (const auto res = pressure(ScalarField(Mesh(3), 1.0), p); double v : res.values()) CHECK(v == 1.0);
  p.gamma = 2.0;
  CHECK(pressure(ScalarField(Mesh(1), 2.0), p)[0] == 4.0);
  p.a = 0.0;
  CHECK(pressure(ScalarField(Mesh(1), 2.0), p)[0] == 0.0);
  ScalarField bad(Mesh(2), 1.0);
  bad[3] = 0.0;
  CHECK_THROWS_WITH_AS(pressure(bad, SchemeParams{}), doctest::Contains("cell 3"), Error);
}

TEST_CASE("total energy") {
  SchemeParams p;
  p.gamma = 2.0;
  const Mesh m(4);
  CHECK(total_energy(uniform_state(m, 1.0, 0.0, 0.0), p) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(total_energy(uniform_state(m, 2.0, 0.0, 0.0), p) == doctest::Approx(4.0).epsilon(1e-15));
  std::mt19937_64 g(1);
  CHECK(total_energy(random_state(m, g), p) >= 0.0);
}

TEST_CASE("viscosity law") {
  SchemeParams p;
  const Viscosity v = viscosity(0.01, p);
  CHECK(v.mu == doctest::Approx(std::pow(10.0, -1.8)).epsilon(1e-14));
  CHECK(v.mu == doctest::Approx(1.5849e-2).epsilon(1e-4));
  CHECK(v.nu == v.mu / 3.0);
  p.alpha = 0.0;
  p.c_mu = 0.7;
  CHECK(viscosity(0.001, p).mu == 0.7);
}

TEST_CASE("alpha warning follows the exponent bound") {
  SchemeParams p;
  CHECK(p.alpha_warning(2).has_value());  // 0.9 > 2 - (2/3 + 1.5)/1.4
  p.alpha = 0.4;
  CHECK_FALSE(p.alpha_warning(2).has_value());
  p.gamma = 2.0;
  p.alpha = 0.9;
  CHECK_FALSE(p.alpha_warning(2).has_value());  // bound 1
  p.alpha = 1.1;
  CHECK(p.alpha_warning(2).has_value());
}

TEST_CASE("uniform states are steady") {
  const Mesh m(6);
  for (TimeMode mode : {TimeMode::Implicit, TimeMode::Explicit}) {
    SchemeParams p;
    p.mode = mode;
    for (const State& s0 : {uniform_state(m, 1.3, 0.0, 0.0), uniform_state(m, 0.7, 0.4, -0.2)}) {
      auto [s1, rep] = step(s0, p, m.h());
      CHECK(rep.dissipation == 0.0);
      for (std::size_t c = 0; c < m.cell_count(); ++c) {
        CHECK(s1.rho[c] == doctest::Approx(s0.rho[c]).epsilon(1e-14));
        CHECK(s1.mom.at(c, 0) == doctest::Approx(s0.mom.at(c, 0)).epsilon(1e-14));
        CHECK(s1.mom.at(c, 1) == doctest::Approx(s0.mom.at(c, 1)).epsilon(1e-14));
      }
    }
  }
}

namespace {

// Term-by-term forward Euler update on a k x k periodic grid, written from the
// scheme's definition with plain 2D indexing.
State brute_force_explicit(const State& s, double dt, const SchemeParams& p) {
  const int k = s.mesh().k();
  const double h = 1.0 / k;
  const double D = std::pow(h, p.eps);
  const double mu = p.c_mu * std::pow(h, p.alpha), nu = mu / 3.0;
  auto id = [k](int i, int j) { return static_cast<std::size_t>(((i % k + k) % k) * k + (j % k + k) % k); };
  auto rho = [&](int i, int j) { return s.rho[id(i, j)]; };
  auto u = [&](int i, int j, int a) { return s.mom.at(id(i, j), a) / rho(i, j); };
  auto mom = [&](int i, int j, int a) { return s.mom.at(id(i, j), a); };
  auto pr = [&](int i, int j) { return p.a * std::pow(rho(i, j), p.gamma); };
  const int di[2] = {1, 0}, dj[2] = {0, 1};

  // Flux through the face between (i,j) and its +axis neighbour.
  auto flux = [&](auto&& q, int i, int j, int axis) {
    const int i2 = i + di[axis], j2 = j + dj[axis];
    const double un = 0.5 * (u(i, j, axis) + u(i2, j2, axis));
    const double qin = q(i, j), qout = q(i2, j2);
    return 0.5 * (qin + qout) * un - (D + 0.5 * std::abs(un)) * (qout - qin);
  };
  auto divergence = [&](int i, int j) {
    double d = 0.0;
    for (int a = 0; a < 2; ++a) d += (u(i + di[a], j + dj[a], a) - u(i - di[a], j - dj[a], a)) / (2 * h);
    return d;
  };

  State out = s;
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) {
      double fr = 0.0;
      for (int a = 0; a < 2; ++a) fr += (flux(rho, i, j, a) - flux(rho, i - di[a], j - dj[a], a)) / h;
      out.rho[id(i, j)] = rho(i, j) - dt * fr;
      for (int b = 0; b < 2; ++b) {
        auto mb = [&](int x, int y) { return mom(x, y, b); };
        double fm = 0.0;
        for (int a = 0; a < 2; ++a) fm += (flux(mb, i, j, a) - flux(mb, i - di[a], j - dj[a], a)) / h;
        const double gp = (pr(i + di[b], j + dj[b]) - pr(i - di[b], j - dj[b])) / (2 * h);
        const double lap = (u(i + 1, j, b) + u(i - 1, j, b) + u(i, j + 1, b) + u(i, j - 1, b) - 4 * u(i, j, b)) / (h * h);
        const double gd = (divergence(i + di[b], j + dj[b]) - divergence(i - di[b], j - dj[b])) / (2 * h);
        out.mom.at(id(i, j), b) = mom(i, j, b) - dt * (fm + gp - mu * lap - nu * gd);
      }
    }
  out.time = s.time + dt;
  return out;
}

}  // namespace

TEST_CASE("explicit step matches a brute-force k=4 oracle") {
  const Mesh m(4);
  State s{ScalarField(m), VectorField(m), 0.0};
  // Hand-specified 16-cell state.
  const double rho[16] = {1.0, 1.2, 0.9, 1.1, 1.3, 0.8, 1.0, 1.05, 0.95, 1.15, 1.25, 0.85, 1.1, 0.9, 1.2, 1.0};
  const double ux[16] = {0.1, -0.2, 0.3, 0.0, 0.25, -0.1, 0.05, 0.15, -0.3, 0.2, 0.0, -0.05, 0.1, 0.3, -0.25, 0.05};
  const double uy[16] = {-0.1, 0.05, 0.0, 0.2, -0.15, 0.1, 0.3, -0.2, 0.05, 0.0, -0.1, 0.25, 0.15, -0.3, 0.1, 0.0};
  for (std::size_t c = 0; c < 16; ++c) {
    s.rho[c] = rho[c];
    s.mom.at(c, 0) = rho[c] * ux[c];
    s.mom.at(c, 1) = rho[c] * uy[c];
  }
  const SchemeParams p = explicit_params();
  const double dt = 0.004;
  const Stepper stepper(m, p);
  const State got = stepper.step(s, dt).first;
  const State want = brute_force_explicit(s, dt, p);
  for (std::size_t c = 0; c < 16; ++c) {
    CHECK(std::abs(got.rho[c] - want.rho[c]) <= 1e-13);
    CHECK(std::abs(got.mom.at(c, 0) - want.mom.at(c, 0)) <= 1e-13);
    CHECK(std::abs(got.mom.at(c, 1) - want.mom.at(c, 1)) <= 1e-13);
  }
}

TEST_CASE("explicit time step respects the acoustic CFL bound") {
  std::mt19937_64 g(2);
  const Mesh m(16);
  const SchemeParams p = explicit_params();
  const State s = random_state(m, g);
  const double dt = Stepper(m, p).time_step(s);
  CHECK(dt <= p.dt_ratio * m.h());
  double wave = 0.0;
  for (std::size_t c = 0; c < m.cell_count(); ++c) {
    const double u = std::hypot(s.mom.at(c, 0), s.mom.at(c, 1)) / s.rho[c];
    wave = std::max(wave, u + std::sqrt(p.gamma * p.a * std::pow(s.rho[c], p.gamma - 1)));
  }
  CHECK(dt * wave / m.h() <= p.cfl);
}

TEST_CASE("implicit steps conserve mass, keep density positive and dissipate energy") {
  const Mesh m(16);
  SchemeParams p;
  p.a = 2.5;
  State s = make_initial_state(draw_kh_params(3), m);
  const double m0 = s.rho.integral();
  const Stepper stepper(m, p);
  for (int n = 0; n < 8; ++n) {
    const double dt = stepper.time_step(s);
    auto [next, rep] = stepper.step(s, dt);
    CHECK(std::abs(rep.mass - m0) <= 1e-12 * m0);
    CHECK(rep.min_density > 0.0);
    CHECK(rep.energy_balance() <= 10 * p.picard_tol * (1 + rep.energy));
    CHECK(rep.residual <= p.picard_tol);
    CHECK(scheme_residual(s, next, dt, p).max() <= p.picard_tol);
    CHECK(rep.picard_iterations >= 1);
    s = std::move(next);
  }
}

TEST_CASE("Picard iteration reports non-convergence with its residual") {
  const Mesh m(8);
  SchemeParams p;
  p.picard_max = 1;
  std::mt19937_64 g(4);
  const State s = random_state(m, g);
  try {
    Stepper(m, p).step(s, 0.01);
    FAIL("expected a SolverError");
  } catch (const SolverError& e) {
    CHECK(e.residual() > p.picard_tol);
  }
}

TEST_CASE("run") {
  SUBCASE("final time below one step gives one clipped step") {
    const Mesh m(8);
    const Trajectory t = run(uniform_state(m, 1.0, 0.1, 0.0), SchemeParams{}, 0.001);
    REQUIRE(t.reports.size() == 1);
    CHECK(t.reports[0].dt == 0.001);
    CHECK(t.final_state.time == 0.001);
  }
  SUBCASE("uniform state to T = 2") {
    const Mesh m(4);
    const State s0 = uniform_state(m, 1.1, 0.0, 0.0);
    const Trajectory t = run(s0, SchemeParams{}, 2.0);
    CHECK(t.final_state.time == 2.0);
    for (std::size_t c = 0; c < m.cell_count(); ++c) CHECK(t.final_state.rho[c] == doctest::Approx(1.1).epsilon(1e-14));
  }
  SUBCASE("mass is conserved for random data in both modes") {
    std::mt19937_64 g(5);
    for (TimeMode mode : {TimeMode::Implicit, TimeMode::Explicit}) {
      SchemeParams p;
      p.mode = mode;
      const State s0 = random_state(Mesh(10), g);
      const Trajectory t = run(s0, p, 0.2);
      CHECK(std::abs(t.final_state.rho.integral() - s0.rho.integral()) <= 1e-12 * s0.rho.integral());
    }
  }
  SUBCASE("snapshots land exactly on save times") {
    const Mesh m(8);
    RunOptions o;
    o.save_times = {0.05, 0.1};
    std::mt19937_64 g(6);
    const Trajectory t = run(random_state(m, g), SchemeParams{}, 0.1, o);
    REQUIRE(t.snapshots.size() == 2);
    CHECK(t.snapshots[0].state.time == 0.05);
    CHECK(t.snapshots[1].state.time == 0.1);
  }
  SUBCASE("identical inputs give bit-identical trajectories") {
    std::mt19937_64 g(7);
    const State s0 = random_state(Mesh(12), g);
    const Trajectory a = run(s0, SchemeParams{}, 0.05), b = run(s0, SchemeParams{}, 0.05);
    CHECK(std::equal(a.final_state.rho.values().begin(), a.final_state.rho.values().end(),
                     b.final_state.rho.values().begin()));
    CHECK(std::equal(a.final_state.mom.data().begin(), a.final_state.mom.data().end(),
                     b.final_state.mom.data().begin()));
  }
}

TEST_CASE("concentration fraction") {
  Trajectory t;
  t.mesh = Mesh(2);
  t.final_time = 1.0;
  t.step_lengths = {0.5, 0.5};
  SUBCASE("nothing reaches the threshold") {
    t.densities = {ScalarField(t.mesh, 1.0), ScalarField(t.mesh, 1.0)};
    CHECK(concentration_fraction(t, 2.0).fraction == 0.0);
  }
  SUBCASE("everything reaches it") {
    t.densities = {ScalarField(t.mesh, 3.0), ScalarField(t.mesh, 3.0)};
    const Concentration c = concentration_fraction(t, 2.0);
    CHECK(c.measure == 1.0);
    CHECK(c.fraction == 1.0);
    CHECK(c.raw == 8 * 0.25 * 0.5);
  }
  SUBCASE("half of the cells at every step") {
    t.densities = {ScalarField(t.mesh, {3, 1, 3, 1}), ScalarField(t.mesh, {1, 1, 3, 3})};
    CHECK(concentration_fraction(t, 2.0).fraction == 0.5);
  }
  SUBCASE("recorded by run") {
    RunOptions o;
    o.record_density = true;
    const Trajectory r = run(uniform_state(Mesh(4), 2.0, 0.0, 0.0), SchemeParams{}, 0.1, o);
    CHECK(concentration_fraction(r, 1.0).fraction == doctest::Approx(1.0).epsilon(1e-14));
  }
}
