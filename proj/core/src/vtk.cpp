#include "angio/vtk.hpp"

#include <fstream>

namespace angio {

namespace {

std::ofstream open(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw InputError("cannot write " + path.string());
  }
  out.precision(12);
  return out;
}

}  // namespace

void write_vtk(const std::filesystem::path& path, const TetMesh& mesh, const std::vector<NamedField>& fields,
               const std::vector<std::pair<std::string, const std::vector<Vec3>*>>& cell_vectors) {
  auto out = open(path);
  out << "# vtk DataFile Version 3.0\nangio tissue fields\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << mesh.num_nodes() << " double\n";
  for (const auto& x : mesh.nodes()) {
    out << x[0] << ' ' << x[1] << ' ' << x[2] << '\n';
  }
  out << "CELLS " << mesh.num_tets() << ' ' << 5 * mesh.num_tets() << '\n';
  for (const auto& t : mesh.tets()) {
    out << "4 " << t[0] << ' ' << t[1] << ' ' << t[2] << ' ' << t[3] << '\n';
  }
  out << "CELL_TYPES " << mesh.num_tets() << '\n';
  for (int i = 0; i < mesh.num_tets(); ++i) {
    out << "10\n";
  }
  if (!fields.empty()) {
    out << "POINT_DATA " << mesh.num_nodes() << '\n';
    for (const auto& f : fields) {
      if (f.values->size() != mesh.num_nodes()) {
        throw InputError("VTK field '" + f.name + "' does not match the mesh");
      }
      out << "SCALARS " << f.name << " double 1\nLOOKUP_TABLE default\n";
      for (int i = 0; i < mesh.num_nodes(); ++i) {
        out << (*f.values)[i] << '\n';
      }
    }
  }
  if (!cell_vectors.empty()) {
    out << "CELL_DATA " << mesh.num_tets() << '\n';
    for (const auto& [name, v] : cell_vectors) {
      if (static_cast<int>(v->size()) != mesh.num_tets()) {
        throw InputError("VTK cell field '" + name + "' does not match the mesh");
      }
      out << "VECTORS " << name << " double\n";
      for (const auto& x : *v) {
        out << x[0] << ' ' << x[1] << ' ' << x[2] << '\n';
      }
    }
  }
}

void write_vtk_network(const std::filesystem::path& path, const VesselNetwork& net) {
  auto out = open(path);
  out << "# vtk DataFile Version 3.0\nangio vessel network\nASCII\nDATASET POLYDATA\n";
  out << "POINTS " << net.num_junctions() << " double\n";
  for (const auto& j : net.junctions()) {
    out << j.position[0] << ' ' << j.position[1] << ' ' << j.position[2] << '\n';
  }
  out << "LINES " << net.num_segments() << ' ' << 3 * net.num_segments() << '\n';
  for (const auto& s : net.segments()) {
    out << "2 " << s.junctions[0] << ' ' << s.junctions[1] << '\n';
  }
  out << "CELL_DATA " << net.num_segments() << "\nSCALARS birth_time double 1\nLOOKUP_TABLE default\n";
  for (const auto& s : net.segments()) {
    out << s.birth_time << '\n';
  }
}

}  // namespace angio
