#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "handfit/container.hpp"
#include "handfit/mesh.hpp"

namespace handfit {

/// Signed distances sampled at the centres of a cubic grid, negative inside.
/// Cell (i, j, k) has centre origin + (i + 0.5, j + 0.5, k + 0.5) * cell_size
/// and is stored at values[i + resolution * (j + resolution * k)].
struct VoxelSdf {
  int resolution = 0;
  Eigen::Vector3d origin = Eigen::Vector3d::Zero();
  double cell_size = 0.0;
  std::vector<double> values;

  double at(int i, int j, int k) const {
    return values[static_cast<std::size_t>(i + resolution * (j + resolution * k))];
  }
  Eigen::Vector3d cell_center(int i, int j, int k) const {
    return origin + (Eigen::Vector3d(i, j, k).array() + 0.5).matrix() * cell_size;
  }

  /// Trilinear interpolation of the cell-centre samples; empty when p lies
  /// outside the box spanned by the outermost centres.
  std::optional<double> interpolate(const Eigen::Vector3d& p) const;
};

/// Voxelizes a watertight mesh. The grid is a cube centred on the mesh
/// bounding box whose longest side spans resolution - 2 * padding cells.
/// Throws NonWatertightError for open or non-manifold meshes.
VoxelSdf voxelize_sdf(const Mesh& mesh, int resolution = 32, int padding = 1);

/// Positive inside depth: -min(sdf(p), 0). Points outside the grid give 0.
double phi(const VoxelSdf& sdf, const Eigen::Vector3d& p);

/// Inside test by ray parity along +x, +y and +z with a majority vote.
/// Exposed for testing; voxelize_sdf uses the same rule per cell centre.
bool inside_by_parity(const Mesh& mesh, const Eigen::Vector3d& p);

std::vector<Section> sdf_sections(const VoxelSdf& sdf);
VoxelSdf sdf_from_sections(const SectionMap& sections);
void save_sdf(const std::filesystem::path& path, const VoxelSdf& sdf);
VoxelSdf load_sdf(const std::filesystem::path& path);

}  // namespace handfit
