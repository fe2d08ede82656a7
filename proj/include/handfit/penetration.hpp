#pragma once

#include <vector>

#include "handfit/mesh.hpp"
#include "handfit/mesh_distance.hpp"
#include "handfit/sdf.hpp"

namespace handfit {

/// Vertices of one mesh lying inside another.
struct PenetrationReport {
  std::vector<int> indices;   // penetrating vertices, ascending
  std::vector<double> depths;  // mm, distance to the penetrated surface
  double a_pd = 0.0;          // mean depth over penetrating vertices, 0 if none
  double m_pd = 0.0;          // max depth, 0 if none
  double a_pd_all = 0.0;      // mean depth over all vertices (non-penetrating count as 0)
  int num_vertices = 0;
};

struct PenetrationPair {
  PenetrationReport a_into_b;
  PenetrationReport b_into_a;
};

/// A vertex penetrates when phi of the other mesh's grid is positive there.
/// Its depth is the exact distance to the other surface.
PenetrationReport penetration_into(const Points& vertices, const VoxelSdf& other_sdf,
                                   const MeshDistanceQuery& other_surface);

/// Both directions, voxelizing each mesh at `resolution`.
PenetrationPair penetration(const Mesh& a, const Mesh& b, int resolution = 32);

/// Pools the vertices of two reports into one.
PenetrationReport combine(const PenetrationReport& first, const PenetrationReport& second);

/// Sum of the two per-direction mean depths; each is 0 when its set is empty.
double loss_pene(const PenetrationPair& pair);
double loss_pene(const Mesh& left, const Mesh& right, int resolution = 32);

}  // namespace handfit
