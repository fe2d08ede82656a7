#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace handfit {

/// Row-major n x 3 array of points; millimetres throughout.
using Points = Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>;
using Faces = Eigen::Matrix<std::int32_t, Eigen::Dynamic, 3, Eigen::RowMajor>;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using Edge = std::array<int, 2>;

/// Triangle mesh. Faces are shared verbatim with the generating model.
struct Mesh {
  Points vertices;
  Faces faces;

  int num_vertices() const { return static_cast<int>(vertices.rows()); }
  int num_faces() const { return static_cast<int>(faces.rows()); }
  Eigen::Vector3d vertex(int i) const { return vertices.row(i).transpose(); }
};

/// Sorted unique undirected edges (a < b).
std::vector<Edge> unique_edges(const Faces& faces);

/// Edges not shared by exactly two faces.
std::vector<Edge> non_manifold_edges(const Faces& faces);

bool is_watertight(const Faces& faces);

/// Throws NonWatertightError listing the offending edges.
void require_watertight(const Mesh& mesh);

/// Enclosed volume; positive for outward-oriented closed meshes.
double signed_volume(const Mesh& mesh);

Eigen::Vector3d face_normal(const Mesh& mesh, int face);

/// Subdivided icosahedron projected onto a sphere.
Mesh make_icosphere(double radius, int subdivisions,
                    const Eigen::Vector3d& center = Eigen::Vector3d::Zero());

/// Mirror across the x = 0 plane, flipping winding so normals stay outward.
Mesh mirror_x(const Mesh& mesh);

Mesh translated(const Mesh& mesh, const Eigen::Vector3d& offset);

void write_obj(std::ostream& out, const Mesh& mesh);
void save_obj(const std::filesystem::path& path, const Mesh& mesh);
/// Reads v/f records; polygon faces are fan-triangulated.
Mesh load_obj(const std::filesystem::path& path);

}  // namespace handfit
