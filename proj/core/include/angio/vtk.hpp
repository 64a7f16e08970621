#pragma once

#include "angio/common.hpp"
#include "angio/mesh.hpp"
#include "angio/vessel_network.hpp"

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace angio {

struct NamedField {
  std::string name;
  const NodalField* values;
};

/// Legacy ASCII unstructured grid with point data.
void write_vtk(const std::filesystem::path& path, const TetMesh& mesh, const std::vector<NamedField>& fields,
               const std::vector<std::pair<std::string, const std::vector<Vec3>*>>& cell_vectors = {});

/// Network as VTK polylines, one line per segment, with birth time cell data.
void write_vtk_network(const std::filesystem::path& path, const VesselNetwork& net);

}  // namespace angio
