#pragma once

// Field dump format:
//
//   VFV-FIELD v1 d=<d> k=<k> comps=<c>\n
//   <c * k^d little-endian float64, component-major, row-major cells>
//
// The CSV variant writes `x1,x2[,x3],value...` with one line per cell centre.

#include <filesystem>
#include <vector>

#include "vfv/grid.hpp"

namespace vfv {

struct FieldDump {
  Mesh mesh{1};
  std::vector<ScalarField> components;
};

void write_field(const std::filesystem::path& path, const Mesh& mesh,
                 const std::vector<const ScalarField*>& components);
void write_field(const std::filesystem::path& path, const ScalarField& field);

FieldDump read_field(const std::filesystem::path& path);

void write_field_csv(const std::filesystem::path& path, const Mesh& mesh,
                     const std::vector<const ScalarField*>& components);

}  // namespace vfv
