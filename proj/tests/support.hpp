#pragma once

#include <cstdint>
#include <random>

#include "vfv/grid.hpp"

namespace vfv::test {

inline double uniform(std::mt19937_64& g, double lo = 0.0, double hi = 1.0) {
  return lo + (hi - lo) * static_cast<double>(g() >> 11) * 0x1.0p-53;
}

inline ScalarField random_scalar(const Mesh& m, std::mt19937_64& g, double lo = -1.0, double hi = 1.0) {
  ScalarField f(m);
  for (double& v : f.values()) v = uniform(g, lo, hi);
  return f;
}

inline VectorField random_vector(const Mesh& m, std::mt19937_64& g, double lo = -1.0, double hi = 1.0) {
  VectorField f(m);
  for (double& v : f.data()) v = uniform(g, lo, hi);
  return f;
}

}  // namespace vfv::test
