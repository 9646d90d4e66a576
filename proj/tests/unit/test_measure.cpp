#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "support.hpp"
#include "vfv/measure.hpp"

using namespace vfv;

namespace {

EmpiricalMeasure random_measure(std::mt19937_64& g, int dim, int n, double spread = 3.0) {
  std::vector<double> x(static_cast<std::size_t>(n) * dim), w(n);
  double total = 0.0;
  for (double& v : x) v = test::uniform(g, -spread, spread);
  for (double& v : w) total += (v = test::uniform(g, 0.01, 1.0));
  for (double& v : w) v /= total;
  return EmpiricalMeasure(dim, x, w);
}

EmpiricalMeasure dirac(std::vector<double> x) {
  const int d = static_cast<int>(x.size());
  return EmpiricalMeasure(d, std::move(x), {1.0});
}

}  // namespace

TEST_CASE("empirical measures validate their weights") {
  CHECK_NOTHROW(EmpiricalMeasure(1, {0.0, 1.0}, {0.25, 0.75}));
  CHECK_THROWS_AS(EmpiricalMeasure(1, {0.0, 1.0}, {0.5, 0.6}).validate(), MeasureError);
  CHECK_THROWS_AS(EmpiricalMeasure(1, {0.0, 1.0}, {1.5, -0.5}).validate(), MeasureError);
  CHECK_THROWS_AS(EmpiricalMeasure(2, {0.0, 1.0, 2.0}, {1.0}), MeasureError);
  const EmpiricalMeasure u = EmpiricalMeasure::uniform({1.0, 2.0, 3.0, 4.0});
  CHECK(u.weights == std::vector<double>(4, 0.25));
}

TEST_CASE("w1_scalar examples") {
  const EmpiricalMeasure a = EmpiricalMeasure::uniform({0.3, -1.0, 2.0});
  CHECK(w1_scalar(a, a) == 0.0);
  CHECK(w1_scalar(dirac({0.0}), dirac({1.0})) == 1.0);
  CHECK(w1_scalar(EmpiricalMeasure(1, {0.0, 2.0}, {0.5, 0.5}), dirac({1.0})) == 1.0);
  CHECK_THROWS_AS(w1_scalar(dirac({0.0, 0.0}), dirac({1.0, 0.0})), MeasureError);
  CHECK_THROWS_AS(w1_scalar(EmpiricalMeasure(1, {0.0, 1.0}, {0.5, 0.6}), dirac({1.0})), MeasureError);
  CHECK_THROWS_AS(w1_general(EmpiricalMeasure(1, {0.0, 1.0}, {0.5, 0.6}), dirac({1.0})), MeasureError);
}

TEST_CASE("w1_general examples") {
  CHECK(w1_general(dirac({0.0, 0.0}), dirac({3.0, 4.0})) == 5.0);
  std::mt19937_64 g(1);
  const EmpiricalMeasure m = random_measure(g, 3, 9);
  CHECK(std::abs(w1_general(m, m)) <= 1e-14);
  // Two unit masses split evenly between two targets on a line.
  const EmpiricalMeasure src(2, {0, 0, 0, 1}, {0.5, 0.5}), dst(2, {1, 0, 1, 1}, {0.5, 0.5});
  CHECK(w1_general(src, dst) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("w1_general agrees with the scalar CDF formula on 1000 instances") {
  std::mt19937_64 g(2);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const EmpiricalMeasure a = random_measure(g, 1, 1 + static_cast<int>(g() % 20));
    const EmpiricalMeasure b = random_measure(g, 1, 1 + static_cast<int>(g() % 20));
    worst = std::max(worst, std::abs(w1_general(a, b) - w1_scalar(a, b)));
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("w1_general is a metric") {
  std::mt19937_64 g(3);
  for (int trial = 0; trial < 200; ++trial) {
    const int d = 1 + trial % 3;
    const EmpiricalMeasure a = random_measure(g, d, 1 + static_cast<int>(g() % 8));
    const EmpiricalMeasure b = random_measure(g, d, 1 + static_cast<int>(g() % 8));
    const EmpiricalMeasure c = random_measure(g, d, 1 + static_cast<int>(g() % 8));
    const double ab = w1_general(a, b), ba = w1_general(b, a);
    CHECK(ab >= 0.0);
    CHECK(std::abs(ab - ba) <= 1e-12 * std::max(1.0, ab));
    CHECK(w1_general(a, c) <= ab + w1_general(b, c) + 1e-9);
  }
}

TEST_CASE("w1 of Diracs is the Euclidean distance and scales with dilation") {
  std::mt19937_64 g(4);
  for (int trial = 0; trial < 50; ++trial) {
    const double x0 = test::uniform(g, -5, 5), x1 = test::uniform(g, -5, 5);
    const double y0 = test::uniform(g, -5, 5), y1 = test::uniform(g, -5, 5);
    const double dx = x0 - y0, dy = x1 - y1;
    CHECK(w1_general(dirac({x0, x1}), dirac({y0, y1})) == std::sqrt(dx * dx + dy * dy));

    const EmpiricalMeasure a = random_measure(g, 2, 6), b = random_measure(g, 2, 5);
    const double c = test::uniform(g, 0.1, 4.0);
    EmpiricalMeasure ca = a, cb = b;
    for (double& v : ca.atoms) v *= c;
    for (double& v : cb.atoms) v *= c;
    CHECK(w1_general(ca, cb) == doctest::Approx(c * w1_general(a, b)).epsilon(1e-10));
  }
}

TEST_CASE("w1_general refuses inputs above the atom cap") {
  std::mt19937_64 g(5);
  const EmpiricalMeasure a = random_measure(g, 1, 30), b = random_measure(g, 1, 30);
  CHECK_THROWS_WITH_AS(w1_general(a, b, 50), doctest::Contains("subsampl"), MeasureError);
  CHECK_NOTHROW(w1_general(a, b, 60));
}

TEST_CASE("dual metric") {
  const auto family = default_test_family(1);
  REQUIRE(family.size() == 16);
  const EmpiricalMeasure mu(1, {0.0, 1.0}, {0.5, 0.5}), nu = dirac({0.5});
  CHECK(dual_metric(mu, mu, family) == 0.0);

  // b_k(x) = cos((k - 1) x) exp(-x^2)
  double hand = 0.0;
  for (int k = 1; k <= 16; ++k) {
    const double j = k - 1;
    const double pm = 0.5 * 1.0 + 0.5 * std::cos(j) * std::exp(-1.0);
    const double pn = std::cos(0.5 * j) * std::exp(-0.25);
    hand += std::ldexp(std::abs(pm - pn), -k);
  }
  CHECK(dual_metric(mu, nu, family) == doctest::Approx(hand).epsilon(1e-14));
  CHECK(dual_metric(mu, nu, family, 3) < dual_metric(mu, nu, family));

  std::mt19937_64 g(6);
  const auto fam2 = default_test_family(2);
  for (int trial = 0; trial < 50; ++trial) {
    const double v = dual_metric(random_measure(g, 2, 5, 1.0), random_measure(g, 2, 7, 1.0), fam2);
    CHECK(v >= 0.0);
    CHECK(v <= 2.0 * (1.0 - std::ldexp(1.0, -16)));
  }
  // Family members are bounded by 1.
  for (const auto& b : fam2)
    for (double x = -3; x <= 3; x += 0.25) {
      const double p[2] = {x, 0.5 * x};
      CHECK(std::abs(b(p)) <= 1.0);
    }
}

TEST_CASE("measure fields from runs") {
  const Mesh m(4);
  const ScalarField z(m, 0.0), two(m, 2.0);
  SUBCASE("one run gives Diracs") {
    const MeasureField mf = measure_field_from_runs({{&two}}, summation_row(WeightFunction::named("equal"), 1), m);
    const EmpiricalMeasure c = mf.cell(5);
    CHECK(c.weights == std::vector<double>{1.0});
    CHECK(c.atoms == std::vector<double>{2.0});
  }
  SUBCASE("two constant runs") {
    const MeasureField mf =
        measure_field_from_runs({{&z}, {&two}}, summation_row(WeightFunction::named("equal"), 2), m);
    for (std::size_t c = 0; c < m.cell_count(); ++c) {
      const EmpiricalMeasure e = mf.cell(c);
      CHECK(e.weights == std::vector<double>{0.5, 0.5});
      CHECK(e.atoms == std::vector<double>{0.0, 2.0});
    }
  }
  SUBCASE("joint observables") {
    const MeasureField mf =
        measure_field_from_runs({{&z, &two}, {&two, &z}}, summation_row(WeightFunction::named("equal"), 2), m);
    CHECK(mf.dim() == 2);
    CHECK(mf.cell(0).atoms == std::vector<double>{0.0, 2.0, 2.0, 0.0});
  }
  SUBCASE("row length must match") {
    CHECK_THROWS(measure_field_from_runs({{&z}}, summation_row(WeightFunction::named("equal"), 2), m));
  }
}

TEST_CASE("subdomain histograms") {
  const Mesh m(10);
  const Rect r = Rect::parse("0.2,0.6,0.3,0.5");
  CHECK(r.label() == "0.2_0.6_0.3_0.5");
  CHECK_THROWS_AS(Rect::parse("0.6,0.2,0,1"), Error);
  CHECK_THROWS_AS(Rect::parse("0,1,0"), Error);

  SUBCASE("Dirac field") {
    const ScalarField c(m, 1.3);
    const MeasureField mf = measure_field_from_runs({{&c}}, summation_row(WeightFunction::named("equal"), 1), m);
    const Histogram h = subdomain_histogram(mf, r, 5);
    int occupied = 0;
    for (std::size_t b = 0; b < h.prob.size(); ++b)
      if (h.prob[b] > 0) {
        ++occupied;
        CHECK(h.prob[b] == 1.0);
        CHECK(h.edges[b] <= 1.3);
        CHECK(h.edges[b + 1] >= 1.3);
      }
    CHECK(occupied == 1);
  }
  SUBCASE("two atoms in two bins") {
    const ScalarField z(m, 0.0), two(m, 2.0);
    const MeasureField mf =
        measure_field_from_runs({{&z}, {&two}}, summation_row(WeightFunction::named("equal"), 2), m);
    const Histogram h = subdomain_histogram(mf, r, 2, 0.0, 2.0);
    CHECK(h.prob == std::vector<double>{0.5, 0.5});
    CHECK(h.edges == std::vector<double>{0.0, 1.0, 2.0});

    const auto path = (std::filesystem::temp_directory_path() / "vfv_hist.csv").string();
    h.write_csv(path);
    const Histogram back = Histogram::read_csv(path);
    CHECK(back.prob == h.prob);
    CHECK(back.edges == h.edges);
    std::filesystem::remove(path);
  }
  SUBCASE("probabilities sum to one on random data") {
    std::mt19937_64 g(7);
    std::vector<ScalarField> runs;
    for (int n = 0; n < 6; ++n) runs.push_back(test::random_scalar(m, g));
    std::vector<std::vector<const ScalarField*>> ptrs;
    for (const auto& f : runs) ptrs.push_back({&f});
    const MeasureField mf = measure_field_from_runs(ptrs, summation_row(WeightFunction::named("sin2"), 6), m);
    const Histogram h = subdomain_histogram(mf, r, 7);
    double s = 0.0;
    for (double p : h.prob) s += p;
    CHECK(s == doctest::Approx(1.0).epsilon(1e-14));
  }
  SUBCASE("a region without cell centres is an error") {
    const ScalarField c(m, 1.0);
    const MeasureField mf = measure_field_from_runs({{&c}}, summation_row(WeightFunction::named("equal"), 1), m);
    CHECK_THROWS_AS(subdomain_histogram(mf, Rect::parse("0.01,0.02,0.01,0.02"), 4), MeasureError);
  }
}

TEST_CASE("w1_field_l1") {
  std::mt19937_64 g(8);
  const Mesh m(6);
  const ScalarField a = test::random_scalar(m, g), b = test::random_scalar(m, g);
  const SummationRow one = summation_row(WeightFunction::named("equal"), 1);
  const MeasureField ma = measure_field_from_runs({{&a}}, one, m), mb = measure_field_from_runs({{&b}}, one, m);
  CHECK(w1_field_l1(ma, ma) == 0.0);
  CHECK(w1_field_l1(ma, mb) == doctest::Approx(overlap_integrate_l1(a, b)).epsilon(1e-13));

  // The same coarse data viewed on a refined analysis mesh.
  const MeasureField fa = measure_field_from_runs({{&a}}, one, Mesh(12)), fb = measure_field_from_runs({{&b}}, one, Mesh(12));
  CHECK(w1_field_l1(fa, fb) == doctest::Approx(w1_field_l1(ma, mb)).epsilon(1e-13));

  CHECK_THROWS_AS(w1_field_l1(ma, fb), MeasureError);
}

TEST_CASE("measure field dumps round-trip") {
  std::mt19937_64 g(9);
  const Mesh m(3);
  std::vector<ScalarField> runs;
  for (int n = 0; n < 4; ++n) runs.push_back(test::random_scalar(m, g));
  const MeasureField mf = measure_field_from_runs({{&runs[0], &runs[1]}, {&runs[2], &runs[3]}},
                                                  summation_row(WeightFunction::named("quad"), 2), m);
  const auto path = (std::filesystem::temp_directory_path() / "vfv_measure.bin").string();
  write_measure_field(path, mf);
  const MeasureField back = read_measure_field(path);
  CHECK(back.mesh() == mf.mesh());
  CHECK(back.dim() == 2);
  CHECK(back.weights() == mf.weights());
  CHECK(back.atoms() == mf.atoms());
  std::filesystem::remove(path);
}
