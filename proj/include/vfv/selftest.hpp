#pragma once

#include <string>
#include <vector>

namespace vfv {

struct SelftestResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Embedded invariant suite. `mutate == "flux-sign"` swaps in a divergence
/// whose face fluxes enter both neighbours with the same sign.
std::vector<SelftestResult> run_selftests(const std::string& mutate = {});

}  // namespace vfv
