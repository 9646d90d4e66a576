#include "vfv/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vfv/errors.hpp"

namespace vfv {

// Nodes: source S, supply nodes 0..m-1, demand nodes m..m+n-1, sink T.
// Forward arcs i -> j have unbounded capacity; their reverse arcs j -> i carry
// the current flow. Dijkstra runs on reduced costs with node potentials, dense
// O(V^2) since the bipartite graph is complete.
TransportPlan solve_transport(const std::vector<double>& supply, const std::vector<double>& demand,
                              const std::function<double(std::size_t, std::size_t)>& cost) {
  const std::size_t m = supply.size(), n = demand.size();
  if (m == 0 || n == 0) throw MeasureError("transport: empty marginal");

  std::vector<double> c(m * n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double v = cost(i, j);
      if (!(v >= 0.0) || !std::isfinite(v)) throw MeasureError("transport: costs must be finite and >= 0");
      c[i * n + j] = v;
    }

  double total = 0.0;
  for (double s : supply) total += s;
  const double tol = 1e-15 * std::max(total, 1.0);

  std::vector<double> left = supply, need = demand;
  TransportPlan plan;
  plan.flow.assign(m * n, 0.0);

  constexpr double inf = std::numeric_limits<double>::infinity();
  const std::size_t V = m + n;  // S and T handled implicitly
  std::vector<double> pot(V, 0.0), dist(V);
  std::vector<std::ptrdiff_t> parent(V);  // -1: from S; otherwise predecessor node
  std::vector<char> done(V);

  auto remaining = [&](const std::vector<double>& v) {
    double r = 0.0;
    for (double x : v)
      if (x > tol) r += x;
    return r;
  };

  while (remaining(left) > tol && remaining(need) > tol) {
    std::fill(dist.begin(), dist.end(), inf);
    std::fill(done.begin(), done.end(), 0);
    for (std::size_t i = 0; i < m; ++i)
      if (left[i] > tol) {
        dist[i] = -pot[i];  // reduced cost of S -> i with pot(S) = 0
        parent[i] = -1;
      }
    for (;;) {
      std::size_t u = V;
      for (std::size_t v = 0; v < V; ++v)
        if (!done[v] && dist[v] < inf && (u == V || dist[v] < dist[u])) u = v;
      if (u == V) break;
      done[u] = 1;
      if (u < m) {
        for (std::size_t j = 0; j < n; ++j) {
          const std::size_t v = m + j;
          const double nd = dist[u] + c[u * n + j] + pot[u] - pot[v];
          if (!done[v] && nd < dist[v]) {
            dist[v] = nd;
            parent[v] = static_cast<std::ptrdiff_t>(u);
          }
        }
      } else {
        const std::size_t j = u - m;
        for (std::size_t i = 0; i < m; ++i) {
          if (plan.flow[i * n + j] <= tol) continue;
          const double nd = dist[u] - c[i * n + j] + pot[u] - pot[i];
          if (!done[i] && nd < dist[i]) {
            dist[i] = nd;
            parent[i] = static_cast<std::ptrdiff_t>(u);
          }
        }
      }
    }

    // Closest demand node with unmet demand in true path length.
    std::size_t target = V;
    double best = inf;
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t v = m + j;
      if (need[j] <= tol || dist[v] == inf) continue;
      const double len = dist[v] + pot[v];
      if (len < best) {
        best = len;
        target = v;
      }
    }
    if (target == V) throw MeasureError("transport: no augmenting path (marginals inconsistent)");

    double dmax = 0.0;
    for (std::size_t v = 0; v < V; ++v)
      if (dist[v] < inf) dmax = std::max(dmax, dist[v]);
    for (std::size_t v = 0; v < V; ++v) pot[v] += dist[v] < inf ? dist[v] : dmax;

    double amount = need[target - m];
    std::size_t v = target;
    while (parent[v] >= 0) {
      const auto u = static_cast<std::size_t>(parent[v]);
      if (u >= m) amount = std::min(amount, plan.flow[v * n + (u - m)]);  // backward arc u=j -> v=i
      v = u;
    }
    amount = std::min(amount, left[v]);

    v = target;
    while (parent[v] >= 0) {
      const auto u = static_cast<std::size_t>(parent[v]);
      if (u < m) {
        plan.flow[u * n + (v - m)] += amount;
      } else {
        double& f = plan.flow[v * n + (u - m)];
        f -= amount;
        if (f < tol) f = 0.0;
      }
      v = u;
    }
    left[v] -= amount;
    need[target - m] -= amount;
    ++plan.augmentations;
    if (plan.augmentations > 4 * (m + n) * (m + n) + 16)
      throw MeasureError("transport: augmentation limit exceeded");
  }

  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) plan.cost += plan.flow[i * n + j] * c[i * n + j];
  return plan;
}

}  // namespace vfv
