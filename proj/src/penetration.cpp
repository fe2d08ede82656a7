#include "handfit/penetration.hpp"

#include <algorithm>

namespace handfit {

namespace {

void summarize(PenetrationReport& r) {
  r.a_pd = r.m_pd = r.a_pd_all = 0.0;
  if (r.depths.empty()) return;
  double sum = 0.0;
  for (double d : r.depths) {
    sum += d;
    r.m_pd = std::max(r.m_pd, d);
  }
  r.a_pd = sum / static_cast<double>(r.depths.size());
  r.a_pd_all = sum / static_cast<double>(r.num_vertices);
}

}  // namespace

PenetrationReport penetration_into(const Points& vertices, const VoxelSdf& other_sdf,
                                   const MeshDistanceQuery& other_surface) {
  PenetrationReport report;
  report.num_vertices = static_cast<int>(vertices.rows());
  for (int i = 0; i < report.num_vertices; ++i) {
    const Eigen::Vector3d v = vertices.row(i).transpose();
    if (phi(other_sdf, v) > 0.0) {
      report.indices.push_back(i);
      report.depths.push_back(other_surface.distance(v));
    }
  }
  summarize(report);
  return report;
}

PenetrationPair penetration(const Mesh& a, const Mesh& b, int resolution) {
  const VoxelSdf sdf_a = voxelize_sdf(a, resolution);
  const VoxelSdf sdf_b = voxelize_sdf(b, resolution);
  const MeshDistanceQuery surface_a(a);
  const MeshDistanceQuery surface_b(b);
  return {penetration_into(a.vertices, sdf_b, surface_b), penetration_into(b.vertices, sdf_a, surface_a)};
}

PenetrationReport combine(const PenetrationReport& first, const PenetrationReport& second) {
  PenetrationReport r;
  r.num_vertices = first.num_vertices + second.num_vertices;
  r.indices = first.indices;
  r.depths = first.depths;
  for (int idx : second.indices) r.indices.push_back(idx + first.num_vertices);
  r.depths.insert(r.depths.end(), second.depths.begin(), second.depths.end());
  summarize(r);
  return r;
}

double loss_pene(const PenetrationPair& pair) { return pair.a_into_b.a_pd + pair.b_into_a.a_pd; }

double loss_pene(const Mesh& left, const Mesh& right, int resolution) {
  return loss_pene(penetration(left, right, resolution));
}

}  // namespace handfit
