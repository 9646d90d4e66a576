#include "vfv/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <sstream>

namespace vfv {

namespace {

// Uniform double in [0, 1) from the top 53 bits; avoids the
// implementation-defined std::uniform_real_distribution.
double unit_draw(std::mt19937_64& gen) { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }

std::string exact(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

double KHParams::interface(int j, double x1) const {
  const auto& a = j == 1 ? a1 : a2;
  const auto& b = j == 1 ? b1 : b2;
  double y = 0.0;
  for (int n = 0; n < modes; ++n)
    y += a[n] * std::cos(b[n] + 2.0 * (n + 1) * std::numbers::pi * x1);
  return (j == 1 ? J1 : J2) + eps_perturb * y;
}

void KHParams::validate() const {
  for (const auto* v : {&a1, &a2, &b1, &b2})
    if (static_cast<int>(v->size()) != modes) throw Error("KH params: coefficient count != modes");
  for (const auto* a : {&a1, &a2}) {
    double s = 0.0;
    for (double x : *a) {
      if (x < 0.0 || x > 1.0) throw Error("KH params: amplitude outside [0, 1]");
      s += x;
    }
    if (modes > 0 && std::abs(s - 1.0) > 1e-12) throw Error("KH params: amplitudes do not sum to 1");
  }
  for (const auto* b : {&b1, &b2})
    for (double x : *b)
      if (std::abs(x) > std::numbers::pi) throw Error("KH params: phase outside [-pi, pi]");
}

std::string KHParams::to_config_block() const {
  std::ostringstream os;
  os << "[kh]\n";
  os << "seed = " << seed << "\n";
  os << "J1 = " << exact(J1) << "\nJ2 = " << exact(J2) << "\n";
  os << "eps_perturb = " << exact(eps_perturb) << "\nmodes = " << modes << "\n";
  auto list = [&](const char* name, const std::vector<double>& v) {
    os << name << " = ";
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << exact(v[i]);
    os << "\n";
  };
  list("a1", a1);
  list("a2", a2);
  list("b1", b1);
  list("b2", b2);
  return os.str();
}

KHParams draw_kh_params(std::uint64_t seed, int modes, double eps_perturb) {
  KHParams p;
  p.seed = seed;
  p.modes = modes;
  p.eps_perturb = eps_perturb;
  std::mt19937_64 gen(seed);
  for (auto* a : {&p.a1, &p.a2}) {
    a->resize(modes);
    double s = 0.0;
    for (double& x : *a) s += (x = unit_draw(gen));
    for (double& x : *a) x /= s;
  }
  for (auto* b : {&p.b1, &p.b2}) {
    b->resize(modes);
    for (double& x : *b) x = std::numbers::pi * (2.0 * unit_draw(gen) - 1.0);
  }
  return p;
}

PrimitiveState kh_state(const Point& x, const KHParams& p) {
  const bool inner = p.interface(1, x[0]) < x[1] && x[1] < p.interface(2, x[0]);
  PrimitiveState s{};
  s.rho = inner ? p.rho_inner : p.rho_outer;
  s.u[0] = inner ? p.u_inner : p.u_outer;
  return s;
}

State make_initial_state(const KHParams& p, const Mesh& mesh, int q) {
  if (mesh.dim() < 2) throw Error("KH data needs d >= 2");
  p.validate();
  const int d = mesh.dim();
  auto fields = project_components(
      [&](const Point& x, std::span<double> out) {
        const PrimitiveState s = kh_state(x, p);
        out[0] = s.rho;
        for (int a = 0; a < d; ++a) out[1 + a] = s.rho * s.u[a];
      },
      1 + d, mesh, q);
  State st{fields[0], VectorField(mesh), 0.0};
  for (int a = 0; a < d; ++a) {
    auto c = st.mom.component(a);
    std::copy(fields[1 + a].values().begin(), fields[1 + a].values().end(), c.begin());
  }
  return st;
}

State make_smooth_state(const Mesh& mesh, double amplitude, int q) {
  const ScalarField rho = project(
      [&](const Point& x) { return 1.0 + amplitude * std::sin(2.0 * std::numbers::pi * x[0]); }, mesh, q);
  return State{rho, VectorField(mesh), 0.0};
}

}  // namespace vfv
