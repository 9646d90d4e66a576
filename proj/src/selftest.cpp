#include "vfv/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <ostream>
#include <random>

#include "vfv/commands.hpp"
#include "vfv/experiments.hpp"
#include "vfv/measure.hpp"
#include "vfv/ops.hpp"
#include "vfv/scheme.hpp"
#include "vfv/summation.hpp"

namespace vfv {

namespace {

double uniform(std::mt19937_64& g, double lo, double hi) {
  return lo + (hi - lo) * static_cast<double>(g() >> 11) * 0x1.0p-53;
}

ScalarField random_scalar(const Mesh& m, std::mt19937_64& g, double lo, double hi) {
  ScalarField f(m);
  for (double& v : f.values()) v = uniform(g, lo, hi);
  return f;
}

VectorField random_vector(const Mesh& m, std::mt19937_64& g, double lo, double hi) {
  VectorField f(m);
  for (double& v : f.data()) v = uniform(g, lo, hi);
  return f;
}

std::string fmt(const char* f, double v) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

using DivUp = std::function<ScalarField(const ScalarField&, const VectorField&, const ops::FluxParams&)>;

// Face fluxes gathered with a flipped sign on the minus face.
ScalarField div_up_flux_sign_mutant(const ScalarField& r, const VectorField& u, const ops::FluxParams& fp) {
  const Mesh& m = r.mesh();
  ScalarField out(m, 0.0);
  for (std::size_t c = 0; c < m.cell_count(); ++c)
    for (int a = 0; a < m.dim(); ++a) {
      const std::size_t p = m.neighbor(c, a, +1), q = m.neighbor(c, a, -1);
      const double fp_plus = ops::upwind_flux_normal(r[c], r[p], 0.5 * (u.at(c, a) + u.at(p, a)), fp.diffusion());
      const double fp_minus = ops::upwind_flux_normal(r[q], r[c], 0.5 * (u.at(q, a) + u.at(c, a)), fp.diffusion());
      out[c] += (fp_plus + fp_minus) * m.k();
    }
  return out;
}

struct Suite {
  std::vector<SelftestResult> results;
  void check(const std::string& name, bool ok, const std::string& detail) { results.push_back({name, ok, detail}); }
};

}  // namespace

std::vector<SelftestResult> run_selftests(const std::string& mutate) {
  if (!mutate.empty() && mutate != "flux-sign") throw Error("unknown mutation '" + mutate + "'");
  const DivUp div_up = mutate == "flux-sign" ? DivUp(div_up_flux_sign_mutant)
                                             : DivUp([](const ScalarField& r, const VectorField& u,
                                                        const ops::FluxParams& fp) { return ops::div_up(r, u, fp); });
  Suite s;
  std::mt19937_64 gen(20240611);

  {  // sum_K div_up = 0 on the torus
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      const Mesh m(12, 2);
      const ScalarField r = random_scalar(m, gen, 0.5, 2.0);
      const VectorField u = random_vector(m, gen, -1.0, 1.0);
      const ScalarField d = div_up(r, u, ops::FluxParams(0.5, m.h()));
      double sum = 0.0, scale = 0.0;
      for (double v : d.values()) {
        sum += v;
        scale += std::abs(v);
      }
      worst = std::max(worst, std::abs(sum) / std::max(scale, 1.0));
    }
    s.check("upwind divergence telescopes", worst <= 1e-12, fmt("max relative sum %.3e", worst));
  }
  {  // sum r div_h v = - sum grad_h r . v
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      const Mesh m(10, 2);
      const ScalarField r = random_scalar(m, gen, -1.0, 1.0);
      const VectorField v = random_vector(m, gen, -1.0, 1.0);
      const ScalarField dv = ops::div_h(v);
      const VectorField gr = ops::grad_h(r);
      double lhs = 0.0, rhs = 0.0, scale = 0.0;
      for (std::size_t c = 0; c < m.cell_count(); ++c) {
        lhs += r[c] * dv[c];
        for (int a = 0; a < 2; ++a) rhs -= gr.at(c, a) * v.at(c, a);
        scale += std::abs(r[c] * dv[c]);
      }
      worst = std::max(worst, std::abs(lhs - rhs) / std::max(scale, 1.0));
    }
    s.check("gradient-divergence duality", worst <= 1e-12, fmt("max relative defect %.3e", worst));
  }
  {  // parallel kernels reproduce the serial reference bit for bit
    const Mesh m(17, 2);
    const ScalarField r = random_scalar(m, gen, 0.5, 2.0);
    const VectorField u = random_vector(m, gen, -1.0, 1.0);
    const ops::FluxParams fp(0.5, m.h());
    const auto eq = [&](std::span<const double> a, std::span<const double> b) {
      return std::equal(a.begin(), a.end(), b.begin(), b.end());
    };
    bool same = eq(ops::div_up(r, u, fp).values(), ops::serial::div_up(r, u, fp).values());
    same = same && eq(ops::grad_h(r).data(), ops::serial::grad_h(r).data());
    same = same && eq(ops::laplace_h(r).values(), ops::serial::laplace_h(r).values());
    same = same && eq(ops::div_h(u).values(), ops::serial::div_h(u).values());
    same = same && eq(ops::viscous_term(u, 0.1, 0.03).data(), ops::serial::viscous_term(u, 0.1, 0.03).data());
    s.check("parallel kernels match serial reference", same, same ? "bit-identical" : "outputs differ");
  }
  {  // implicit steps on KH data
    const Mesh m(16, 2);
    SchemeParams p;
    p.a = 2.5;
    State st = make_initial_state(draw_kh_params(7), m);
    const double m0 = st.rho.integral();
    const Stepper stepper(m, p);
    double drift = 0.0, balance = -INFINITY, min_rho = INFINITY;
    for (int n = 0; n < 5; ++n) {
      auto [next, rep] = stepper.step(st, stepper.time_step(st));
      drift = std::max(drift, std::abs(next.rho.integral() - m0) / m0);
      balance = std::max(balance, rep.energy_balance() - 10.0 * p.picard_tol * (1.0 + rep.energy));
      min_rho = std::min(min_rho, rep.min_density);
      st = std::move(next);
    }
    s.check("mass conservation", drift <= 1e-12, fmt("relative drift %.3e", drift));
    s.check("density positivity", min_rho > 0.0, fmt("min density %.6g", min_rho));
    s.check("energy dissipation", balance <= 0.0, fmt("max excess %.3e", balance));
  }
  {  // regular summation rows
    double worst_sum = 0.0, worst_max = 0.0;
    bool nonneg = true;
    for (const auto& name : builtin_weight_names())
      for (int N = 1; N <= 256; ++N) {
        const SummationRow row = summation_row(WeightFunction::named(name), N);
        worst_sum = std::max(worst_sum, std::abs(row.sum() - N));
        worst_max = std::max(worst_max, row.max());
        for (double v : row.s) nonneg = nonneg && v >= 0.0;
      }
    s.check("summation rows are regular", worst_sum <= 1e-9 && nonneg && worst_max <= 6.0,
            fmt("max |sum - N| %.3e", worst_sum) + fmt(", max entry %.4g", worst_max));
  }
  {  // exact transport against the scalar CDF formula
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      auto draw = [&](int n) {
        std::vector<double> x(n), w(n);
        double t = 0.0;
        for (int i = 0; i < n; ++i) {
          x[i] = uniform(gen, -3.0, 3.0);
          t += (w[i] = uniform(gen, 0.01, 1.0));
        }
        for (double& v : w) v /= t;
        return EmpiricalMeasure(1, x, w);
      };
      const EmpiricalMeasure a = draw(1 + static_cast<int>(gen() % 12)), b = draw(1 + static_cast<int>(gen() % 12));
      worst = std::max(worst, std::abs(w1_general(a, b) - w1_scalar(a, b)));
    }
    s.check("W1 solver matches scalar formula", worst <= 1e-10, fmt("max difference %.3e", worst));
  }
  {
    const double d = w1_general(EmpiricalMeasure(2, {0.0, 0.0}, {1.0}), EmpiricalMeasure(2, {3.0, 4.0}, {1.0}));
    const double c = w1_scalar(EmpiricalMeasure(1, {0.0, 2.0}, {0.5, 0.5}), EmpiricalMeasure(1, {1.0}, {1.0}));
    s.check("W1 closed forms", d == 5.0 && c == 1.0, fmt("dirac pair %.17g", d) + fmt(", split mass %.17g", c));
  }
  return s.results;
}

int cmd_selftest(const SelftestOptions& options, std::ostream& out) {
  std::vector<SelftestResult> results;
  try {
    results = run_selftests(options.mutate);
  } catch (const Error& e) {
    out << "selftest: " << e.what() << "\n";
    return exit_code::usage;
  }
  int failed = 0;
  for (const auto& r : results) {
    out << (r.passed ? "PASS  " : "FAIL  ") << r.name << "  (" << r.detail << ")\n";
    failed += !r.passed;
  }
  out << results.size() - failed << "/" << results.size() << " invariants hold\n";
  return failed ? exit_code::solver : exit_code::ok;
}

}  // namespace vfv
