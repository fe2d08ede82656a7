#pragma once

#include <vector>

#include "handfit/mesh.hpp"

namespace handfit {

/// Closest point on triangle (a, b, c) to p.
Eigen::Vector3d closest_point_on_triangle(const Eigen::Vector3d& p, const Eigen::Vector3d& a,
                                          const Eigen::Vector3d& b, const Eigen::Vector3d& c);

double point_triangle_distance(const Eigen::Vector3d& p, const Eigen::Vector3d& a,
                               const Eigen::Vector3d& b, const Eigen::Vector3d& c);

/// Brute-force minimum over all faces. Throws InputError on an empty face set.
double point_mesh_distance(const Eigen::Vector3d& p, const Mesh& mesh);

/// Bounding-volume hierarchy over the faces of a mesh, answering the same
/// query as point_mesh_distance. Holds a copy of the mesh; immutable and
/// safe to query from several threads.
class MeshDistanceQuery {
 public:
  explicit MeshDistanceQuery(Mesh mesh);

  double distance(const Eigen::Vector3d& p) const;
  const Mesh& mesh() const noexcept { return mesh_; }

 private:
  struct Node {
    Eigen::Vector3d lo, hi;
    int left = -1, right = -1;  // children, or -1 for a leaf
    int begin = 0, end = 0;     // face range in order_ for leaves
  };

  int build(int begin, int end);
  double face_distance(const Eigen::Vector3d& p, int face) const;

  Mesh mesh_;
  std::vector<int> order_;
  std::vector<Node> nodes_;
};

}  // namespace handfit
