#pragma once

// Exact discrete optimal transport by successive shortest augmenting paths.

#include <cstddef>
#include <functional>
#include <vector>

namespace vfv {

struct TransportPlan {
  double cost = 0.0;
  std::size_t augmentations = 0;
  /// flow[i * n_target + j]
  std::vector<double> flow;
};

/// Minimizes sum_ij pi_ij cost(i, j) over couplings of `supply` and `demand`
/// (nonnegative, equal totals up to rounding). Costs must be nonnegative.
TransportPlan solve_transport(const std::vector<double>& supply, const std::vector<double>& demand,
                              const std::function<double(std::size_t, std::size_t)>& cost);

}  // namespace vfv
