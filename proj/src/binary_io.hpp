#pragma once

#include <bit>
#include <cstdint>
#include <istream>
#include <ostream>

#include "vfv/errors.hpp"

namespace vfv::detail {

inline void put_u64(std::ostream& os, std::uint64_t bits) {
  unsigned char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>(bits >> (8 * i));
  os.write(reinterpret_cast<const char*>(buf), 8);
}

inline std::uint64_t get_u64(std::istream& is, const char* what) {
  unsigned char buf[8];
  is.read(reinterpret_cast<char*>(buf), 8);
  if (!is) throw Error(std::string(what) + ": truncated payload");
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  return bits;
}

inline void put_le(std::ostream& os, double v) { put_u64(os, std::bit_cast<std::uint64_t>(v)); }

inline double get_le(std::istream& is, const char* what) { return std::bit_cast<double>(get_u64(is, what)); }

}  // namespace vfv::detail
