#include "handfit/mesh_distance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <utility>

#include "handfit/errors.hpp"

namespace handfit {

namespace {

constexpr int kLeafSize = 4;

Eigen::Vector3d corner(const Mesh& mesh, int face, int k) {
  return mesh.vertices.row(mesh.faces(face, k)).transpose();
}

double box_distance_sq(const Eigen::Vector3d& p, const Eigen::Vector3d& lo, const Eigen::Vector3d& hi) {
  const Eigen::Vector3d d = (lo - p).cwiseMax(p - hi).cwiseMax(0.0);
  return d.squaredNorm();
}

}  // namespace

// Region-based closest point (Ericson, Real-Time Collision Detection 5.1.5).
Eigen::Vector3d closest_point_on_triangle(const Eigen::Vector3d& p, const Eigen::Vector3d& a,
                                          const Eigen::Vector3d& b, const Eigen::Vector3d& c) {
  const Eigen::Vector3d ab = b - a, ac = c - a, ap = p - a;
  const double d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0.0 && d2 <= 0.0) return a;

  const Eigen::Vector3d bp = p - b;
  const double d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0.0 && d4 <= d3) return b;

  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) return a + ab * (d1 / (d1 - d3));

  const Eigen::Vector3d cp = p - c;
  const double d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0.0 && d5 <= d6) return c;

  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) return a + ac * (d2 / (d2 - d6));

  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    return b + (c - b) * ((d4 - d3) / ((d4 - d3) + (d5 - d6)));
  }

  const double denom = va + vb + vc;
  if (!(std::abs(denom) > 0.0)) return a;  // zero-area triangle reduced to a vertex
  return a + ab * (vb / denom) + ac * (vc / denom);
}

double point_triangle_distance(const Eigen::Vector3d& p, const Eigen::Vector3d& a,
                               const Eigen::Vector3d& b, const Eigen::Vector3d& c) {
  return (closest_point_on_triangle(p, a, b, c) - p).norm();
}

double point_mesh_distance(const Eigen::Vector3d& p, const Mesh& mesh) {
  if (mesh.num_faces() == 0) throw InputError("point_mesh_distance: mesh has no faces");
  double best = std::numeric_limits<double>::infinity();
  for (int f = 0; f < mesh.num_faces(); ++f) {
    best = std::min(best, point_triangle_distance(p, corner(mesh, f, 0), corner(mesh, f, 1),
                                                  corner(mesh, f, 2)));
  }
  return best;
}

MeshDistanceQuery::MeshDistanceQuery(Mesh mesh) : mesh_(std::move(mesh)) {
  if (mesh_.num_faces() == 0) throw InputError("MeshDistanceQuery: mesh has no faces");
  order_.resize(static_cast<std::size_t>(mesh_.num_faces()));
  std::iota(order_.begin(), order_.end(), 0);
  nodes_.reserve(2 * order_.size() / kLeafSize + 1);
  build(0, static_cast<int>(order_.size()));
}

int MeshDistanceQuery::build(int begin, int end) {
  Node node;
  node.lo.setConstant(std::numeric_limits<double>::infinity());
  node.hi.setConstant(-std::numeric_limits<double>::infinity());
  Eigen::Vector3d clo = node.lo, chi = node.hi;
  for (int i = begin; i < end; ++i) {
    const int f = order_[static_cast<std::size_t>(i)];
    Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
    for (int k = 0; k < 3; ++k) {
      const Eigen::Vector3d v = corner(mesh_, f, k);
      node.lo = node.lo.cwiseMin(v);
      node.hi = node.hi.cwiseMax(v);
      centroid += v / 3.0;
    }
    clo = clo.cwiseMin(centroid);
    chi = chi.cwiseMax(centroid);
  }
  node.begin = begin;
  node.end = end;
  const int index = static_cast<int>(nodes_.size());
  nodes_.push_back(node);
  if (end - begin <= kLeafSize) return index;

  int axis = 0;
  (chi - clo).maxCoeff(&axis);
  const int mid = begin + (end - begin) / 2;
  auto key = [&](int f) {
    return (mesh_.vertices(mesh_.faces(f, 0), axis) + mesh_.vertices(mesh_.faces(f, 1), axis) +
            mesh_.vertices(mesh_.faces(f, 2), axis));
  };
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](int x, int y) { return key(x) < key(y) || (key(x) == key(y) && x < y); });
  const int left = build(begin, mid);
  const int right = build(mid, end);
  nodes_[static_cast<std::size_t>(index)].left = left;
  nodes_[static_cast<std::size_t>(index)].right = right;
  return index;
}

double MeshDistanceQuery::face_distance(const Eigen::Vector3d& p, int face) const {
  return point_triangle_distance(p, corner(mesh_, face, 0), corner(mesh_, face, 1),
                                 corner(mesh_, face, 2));
}

double MeshDistanceQuery::distance(const Eigen::Vector3d& p) const {
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> stack{0};
  stack.reserve(64);
  while (!stack.empty()) {
    const Node& node = nodes_[static_cast<std::size_t>(stack.back())];
    stack.pop_back();
    if (box_distance_sq(p, node.lo, node.hi) >= best * best) continue;
    if (node.left < 0) {
      for (int i = node.begin; i < node.end; ++i) {
        best = std::min(best, face_distance(p, order_[static_cast<std::size_t>(i)]));
      }
      continue;
    }
    const Node& l = nodes_[static_cast<std::size_t>(node.left)];
    const Node& r = nodes_[static_cast<std::size_t>(node.right)];
    // Visit the nearer child first so the farther one is more likely pruned.
    if (box_distance_sq(p, l.lo, l.hi) < box_distance_sq(p, r.lo, r.hi)) {
      stack.push_back(node.right);
      stack.push_back(node.left);
    } else {
      stack.push_back(node.left);
      stack.push_back(node.right);
    }
  }
  return best;
}

}  // namespace handfit
