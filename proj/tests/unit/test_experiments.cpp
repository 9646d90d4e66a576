#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "support.hpp"
#include "vfv/experiments.hpp"

using namespace vfv;

namespace {

Point at(double x1, double x2) {
  Point p{};
  p[0] = x1;
  p[1] = x2;
  return p;
}

}  // namespace

TEST_CASE("kh_state picks the band state") {
  const KHParams p = draw_kh_params(1);
  const PrimitiveState in = kh_state(at(0.37, 0.5), p), out = kh_state(at(0.37, 0.1), p);
  CHECK(in.rho == 2.0);
  CHECK(in.u[0] == -0.5);
  CHECK(in.u[1] == 0.0);
  CHECK(out.rho == 1.0);
  CHECK(out.u[0] == 0.5);
  CHECK(out.u[1] == 0.0);
  CHECK(kh_state(at(0.1, 0.9), p).rho == 1.0);
}

TEST_CASE("draw_kh_params") {
  const KHParams a = draw_kh_params(1), b = draw_kh_params(1);
  CHECK(a.a1 == b.a1);
  CHECK(a.a2 == b.a2);
  CHECK(a.b1 == b.b1);
  CHECK(a.b2 == b.b2);
  CHECK(a.modes == 10);
  CHECK(a.eps_perturb == 0.01);
  CHECK_NOTHROW(a.validate());

  for (std::uint64_t seed : {1u, 2u, 99u}) {
    const KHParams p = draw_kh_params(seed);
    double s1 = 0.0, s2 = 0.0;
    for (int n = 0; n < p.modes; ++n) {
      s1 += p.a1[n];
      s2 += p.a2[n];
      CHECK(p.a1[n] >= 0.0);
      CHECK(std::abs(p.b1[n]) <= std::numbers::pi);
      CHECK(std::abs(p.b2[n]) <= std::numbers::pi);
    }
    CHECK(std::abs(s1 - 1.0) <= 1e-12);
    CHECK(std::abs(s2 - 1.0) <= 1e-12);
  }

  // Regression fixtures for the generator.
  const KHParams s1 = draw_kh_params(1), s2 = draw_kh_params(2);
  CHECK(s1.a1[0] == 0.035652573502735638);
  CHECK(s1.a2[9] == 0.06481142918855036);
  CHECK(s1.b1[0] == -1.3443389221237096);
  CHECK(s1.b2[3] == -0.63855690473902382);
  CHECK(s2.a1[0] == 0.18501732113987412);
  CHECK(s2.b1[0] == -2.7815983170728686);
  CHECK(s1.b1 != s2.b1);

  KHParams bad = s1;
  bad.a1[0] += 0.1;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("interfaces stay within eps of their mean heights") {
  const KHParams p = draw_kh_params(5);
  std::mt19937_64 g(1);
  double worst = 0.0;
  for (int i = 0; i < 1000000; ++i) {
    const double x = test::uniform(g);
    worst = std::max({worst, std::abs(p.interface(1, x) - p.J1), std::abs(p.interface(2, x) - p.J2)});
  }
  CHECK(worst <= p.eps_perturb);
}

TEST_CASE("kh_state is periodic in x1") {
  const KHParams p = draw_kh_params(3);
  std::mt19937_64 g(2);
  for (int i = 0; i < 2000; ++i) {
    const double x1 = test::uniform(g), x2 = test::uniform(g);
    CHECK(p.interface(1, x1) == doctest::Approx(p.interface(1, x1 + 1.0)).epsilon(1e-13));
    CHECK(p.interface(2, x1) == doctest::Approx(p.interface(2, x1 - 1.0)).epsilon(1e-13));
    // Away from the interfaces the state is unchanged by a period shift.
    if (std::abs(x2 - p.interface(1, x1)) > 1e-9 && std::abs(x2 - p.interface(2, x1)) > 1e-9)
      CHECK(kh_state(at(x1, x2), p).rho == kh_state(at(x1 + 1.0, x2), p).rho);
  }
}

TEST_CASE("initial state") {
  SUBCASE("straight layer") {
    const KHParams p = draw_kh_params(1, 10, 0.0);
    const Mesh m(8);
    const State s = make_initial_state(p, m);
    for (std::size_t c = 0; c < m.cell_count(); ++c) {
      const int row = m.coord(c, 1);
      const bool inside = row >= 2 && row <= 5;
      CHECK(s.rho[c] == (inside ? 2.0 : 1.0));
      CHECK(s.mom.at(c, 0) == (inside ? -1.0 : 0.5));
      CHECK(s.mom.at(c, 1) == 0.0);
    }
  }
  SUBCASE("mass matches a subsample count") {
    const KHParams p = draw_kh_params(4);
    const int k = 16, q = 8;
    const Mesh m(k);
    const State s = make_initial_state(p, m, q);
    long inner = 0, total = 0;
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j)
        for (int a = 0; a < q; ++a)
          for (int b = 0; b < q; ++b) {
            const double x1 = (i + (a + 0.5) / q) / k, x2 = (j + (b + 0.5) / q) / k;
            inner += p.interface(1, x1) < x2 && x2 < p.interface(2, x1);
            ++total;
          }
    const double expect = (2.0 * inner + 1.0 * (total - inner)) / total;
    CHECK(std::abs(s.rho.integral() - expect) <= 1e-12);
    double lo = INFINITY;
    for (double v : s.rho.values()) lo = std::min(lo, v);
    CHECK(lo == 1.0);
  }
  SUBCASE("smooth data") {
    const Mesh m(16);
    const State s = make_smooth_state(m);
    CHECK(s.rho.integral() == doctest::Approx(1.0).epsilon(1e-14));
    for (double v : s.mom.data()) CHECK(v == 0.0);
  }
  CHECK_THROWS_AS(make_initial_state(draw_kh_params(1), Mesh(8, 1)), Error);
}

TEST_CASE("manifest block prints every coefficient exactly") {
  const KHParams p = draw_kh_params(1);
  const std::string block = p.to_config_block();
  CHECK(block.find("seed = 1") != std::string::npos);
  CHECK(block.find("-1.3443389221237096") != std::string::npos);
}

TEST_CASE("KH smoke run at k = 32") {
  const Mesh m(32);
  SchemeParams sp;
  sp.a = 2.5;
  const State s0 = make_initial_state(draw_kh_params(1), m);
  const Trajectory t = run(s0, sp, 0.1);
  CHECK(t.final_state.time == 0.1);
  const double m0 = s0.rho.integral();
  for (const auto& r : t.reports) {
    CHECK(std::abs(r.mass - m0) <= 1e-12 * m0);
    CHECK(r.min_density > 0.0);
    CHECK(r.energy_balance() <= 10 * sp.picard_tol * (1 + r.energy));
    CHECK(r.residual <= sp.picard_tol);
  }
}
