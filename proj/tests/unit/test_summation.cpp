#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "support.hpp"
#include "vfv/summation.hpp"

using namespace vfv;

TEST_CASE("weight functions") {
  CHECK(WeightFunction::named("equal")(0.3) == 1.0);
  CHECK(WeightFunction::named("quad")(0.5) == 0.25);
  CHECK(WeightFunction::named("sin2")(0.5) == doctest::Approx(1.0).epsilon(1e-15));
  const WeightFunction e = WeightFunction::named("exp");
  CHECK(e(0.0) == 0.0);
  CHECK(e(1.0) == 0.0);
  CHECK(e(0.5) == doctest::Approx(std::exp(-4.0)).epsilon(1e-15));
  CHECK_THROWS_AS(WeightFunction::named("cubic"), Error);
  CHECK(builtin_weight_names().size() == 4);
}

TEST_CASE("summation_row examples") {
  SUBCASE("equal") {
    const SummationRow r = summation_row(WeightFunction::named("equal"), 3);
    CHECK(r.s == std::vector<double>{1.0, 1.0, 1.0});
    CHECK_FALSE(r.fallback);
  }
  SUBCASE("quad, N = 3") {
    // w(1/3) = w(2/3) = 2/9 and w(1) = 0.
    const SummationRow r = summation_row(WeightFunction::named("quad"), 3);
    CHECK(r.s[0] == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(r.s[1] == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(r.s[2] == 0.0);
    CHECK(r.at(4) == 0.0);
    CHECK(r.at(0) == 0.0);
  }
  SUBCASE("exp, N = 1 falls back to the identity row") {
    const SummationRow r = summation_row(WeightFunction::named("exp"), 1);
    CHECK(r.fallback);
    CHECK(r.s == std::vector<double>{1.0});
  }
  SUBCASE("quad, N = 1 also falls back") {
    CHECK(summation_row(WeightFunction::named("quad"), 1).fallback);
    CHECK_FALSE(summation_row(WeightFunction::named("quad"), 2).fallback);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(summation_row(WeightFunction::named("equal"), 0), Error);
    CHECK_THROWS_AS(WeightFunction::tabulated({{0.0, 1.0}, {0.5, -1.0}, {1.0, 1.0}}), Error);
  }
}

TEST_CASE("rows are regular for every built-in weight up to N = 1024") {
  for (const auto& name : builtin_weight_names()) {
    const WeightFunction w = WeightFunction::named(name);
    double worst_sum = 0.0, worst_entry = 0.0;
    bool nonneg = true;
    for (int N = 1; N <= 1024; ++N) {
      const SummationRow r = summation_row(w, N);
      REQUIRE(r.s.size() == static_cast<std::size_t>(N));
      worst_sum = std::max(worst_sum, std::abs(r.sum() - N));
      worst_entry = std::max(worst_entry, r.max());
      for (double v : r.s) nonneg = nonneg && v >= 0.0;
    }
    INFO(name);
    CHECK(worst_sum <= 1e-9);
    CHECK(nonneg);
    CHECK(worst_entry <= 6.0);
  }
}

TEST_CASE("fallback is taken exactly when the sampled weights vanish") {
  const WeightFunction bump = WeightFunction::tabulated({{0.0, 0.0}, {0.2, 0.0}, {0.3, 1.0}, {0.4, 0.0}, {1.0, 0.0}});
  for (int N = 1; N <= 40; ++N) {
    double total = 0.0;
    for (int n = 1; n <= N; ++n) total += bump(static_cast<double>(n) / N);
    CHECK(summation_row(bump, N).fallback == (total == 0.0));
  }
}

TEST_CASE("tabulated and custom weights") {
  const WeightFunction t = WeightFunction::tabulated({{0.0, 0.0}, {0.5, 2.0}, {1.0, 0.0}}, "tent");
  CHECK(t.name() == "tent");
  CHECK(t(0.25) == 1.0);
  CHECK(t(0.75) == 1.0);
  CHECK_THROWS_AS(WeightFunction::tabulated({{0.1, 1.0}, {1.0, 1.0}}), Error);

  const auto path = std::filesystem::temp_directory_path() / "vfv_weight.txt";
  {
    std::ofstream out(path);
    out << "0 1\n0.5 3\n1 1\n";
  }
  const WeightFunction c = WeightFunction::parse("custom:" + path.string());
  CHECK(c(0.25) == 2.0);
  CHECK(WeightFunction::parse("sin2").name() == "sin2");
  std::filesystem::remove(path);
  CHECK_THROWS_AS(WeightFunction::parse("custom:/nonexistent/weights.txt"), Error);
}

TEST_CASE("weighted_average") {
  const Mesh m(4);
  std::mt19937_64 g(1);
  const ScalarField f = test::random_scalar(m, g);
  SUBCASE("identical items") {
    const SummationRow r = summation_row(WeightFunction::named("sin2"), 5);
    const ScalarField avg = weighted_average({&f, &f, &f, &f, &f}, r, m);
    for (std::size_t c = 0; c < m.cell_count(); ++c) CHECK(avg[c] == doctest::Approx(f[c]).epsilon(1e-14));
  }
  SUBCASE("two constants") {
    const ScalarField z(m, 0.0), two(Mesh(8), 2.0);
    for (const auto res = weighted_average({&z, &two}, summation_row(WeightFunction::named("equal"), 2), m); double v : res.values())
      CHECK(v == 1.0);
  }
  SUBCASE("quad row drops the last item") {
    const ScalarField a = test::random_scalar(m, g), b = test::random_scalar(m, g), c = test::random_scalar(m, g);
    const ScalarField avg = weighted_average({&a, &b, &c}, summation_row(WeightFunction::named("quad"), 3), m);
    for (std::size_t i = 0; i < m.cell_count(); ++i) CHECK(avg[i] == doctest::Approx((a[i] + b[i]) / 2).epsilon(1e-14));
  }
  SUBCASE("Cesaro mean is reproduced bit-exactly") {
    std::vector<ScalarField> items;
    for (int n = 0; n < 7; ++n) items.push_back(test::random_scalar(m, g));
    std::vector<const ScalarField*> ptrs;
    for (const auto& it : items) ptrs.push_back(&it);
    const ScalarField avg = weighted_average(ptrs, summation_row(WeightFunction::named("equal"), 7), m);
    for (std::size_t c = 0; c < m.cell_count(); ++c) {
      double s = 0.0;
      for (const auto& it : items) s += it[c];
      CHECK(avg[c] == s / 7);
    }
  }
  SUBCASE("linear in the items") {
    const ScalarField a1 = test::random_scalar(m, g), a2 = test::random_scalar(m, g);
    const ScalarField b1 = test::random_scalar(m, g), b2 = test::random_scalar(m, g);
    ScalarField c1(m), c2(m);
    for (std::size_t c = 0; c < m.cell_count(); ++c) {
      c1[c] = 2 * a1[c] - 3 * b1[c];
      c2[c] = 2 * a2[c] - 3 * b2[c];
    }
    const SummationRow r = summation_row(WeightFunction::named("sin2"), 2);
    const ScalarField lhs = weighted_average({&c1, &c2}, r, m);
    const ScalarField pa = weighted_average({&a1, &a2}, r, m), pb = weighted_average({&b1, &b2}, r, m);
    for (std::size_t c = 0; c < m.cell_count(); ++c) CHECK(lhs[c] == doctest::Approx(2 * pa[c] - 3 * pb[c]).epsilon(1e-12));
  }
  SUBCASE("coarse items are restricted to the analysis mesh") {
    const ScalarField coarse(Mesh(2), {1.0, 2.0, 3.0, 4.0});
    const ScalarField avg = weighted_average({&coarse}, summation_row(WeightFunction::named("equal"), 1), m);
    CHECK(avg[0] == 1.0);
    CHECK(avg[m.cell_count() - 1] == 4.0);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(weighted_average({&f, &f}, summation_row(WeightFunction::named("equal"), 3), m), Error);
    const ScalarField three_d(Mesh(4, 3), 1.0);
    CHECK_THROWS_AS(weighted_average({&three_d}, summation_row(WeightFunction::named("equal"), 1), m), Error);
  }
}

TEST_CASE("first_variance") {
  const Mesh m(4);
  const SummationRow eq2 = summation_row(WeightFunction::named("equal"), 2);
  const ScalarField z(m, 0.0), two(m, 2.0);
  for (const auto res = first_variance({&z, &two}, eq2, m); double v : res.values()) CHECK(v == 1.0);
  for (const auto res = first_variance({&two, &two}, eq2, m); double v : res.values()) CHECK(v == 0.0);

  std::mt19937_64 g(3);
  const ScalarField a = test::random_scalar(m, g), b = test::random_scalar(m, g), c = test::random_scalar(m, g);
  ScalarField as = a, bs = b, cs = c;
  for (ScalarField* f : {&as, &bs, &cs})
    for (double& v : f->values()) v += 7.25;
  const SummationRow r = summation_row(WeightFunction::named("sin2"), 3);
  const ScalarField v0 = first_variance({&a, &b, &c}, r, m), v1 = first_variance({&as, &bs, &cs}, r, m);
  for (std::size_t i = 0; i < m.cell_count(); ++i) CHECK(v1[i] == doctest::Approx(v0[i]).epsilon(1e-12));
}
