#include "vfv/field_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "binary_io.hpp"

namespace vfv {

void write_field(const std::filesystem::path& path, const Mesh& mesh,
                 const std::vector<const ScalarField*>& components) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw GridError("field dump: cannot open " + path.string());
  os << "VFV-FIELD v1 d=" << mesh.dim() << " k=" << mesh.k() << " comps=" << components.size()
     << "\n";
  for (const ScalarField* c : components) {
    if (!(c->mesh() == mesh)) throw GridError("field dump: component on a different mesh");
    for (double v : c->values()) detail::put_le(os, v);
  }
  if (!os) throw GridError("field dump: write failed for " + path.string());
}

void write_field(const std::filesystem::path& path, const ScalarField& field) {
  write_field(path, field.mesh(), {&field});
}

FieldDump read_field(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw GridError("field dump: cannot open " + path.string());
  std::string header;
  std::getline(is, header);
  int d = 0, k = 0, comps = 0;
  if (std::sscanf(header.c_str(), "VFV-FIELD v1 d=%d k=%d comps=%d", &d, &k, &comps) != 3 ||
      comps < 1)
    throw GridError("field dump: bad header in " + path.string());
  FieldDump dump{Mesh(k, d), {}};
  for (int c = 0; c < comps; ++c) {
    std::vector<double> v(dump.mesh.cell_count());
    for (double& x : v) x = detail::get_le(is, "field dump");
    dump.components.emplace_back(dump.mesh, std::move(v));
  }
  return dump;
}

void write_field_csv(const std::filesystem::path& path, const Mesh& mesh,
                     const std::vector<const ScalarField*>& components) {
  std::ofstream os(path);
  if (!os) throw GridError("field csv: cannot open " + path.string());
  char buf[64];
  for (int a = 0; a < mesh.dim(); ++a) os << (a ? "," : "") << "x" << a + 1;
  for (std::size_t c = 0; c < components.size(); ++c) os << ",value" << c;
  os << "\n";
  for (std::size_t i = 0; i < mesh.cell_count(); ++i) {
    const Point x = mesh.center(i);
    for (int a = 0; a < mesh.dim(); ++a) {
      std::snprintf(buf, sizeof buf, "%.17g", x[a]);
      os << (a ? "," : "") << buf;
    }
    for (const ScalarField* c : components) {
      std::snprintf(buf, sizeof buf, "%.17g", (*c)[i]);
      os << "," << buf;
    }
    os << "\n";
  }
}

}  // namespace vfv
