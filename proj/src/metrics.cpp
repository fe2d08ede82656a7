#include "handfit/metrics.hpp"

#include <cmath>

#include "handfit/errors.hpp"

namespace handfit {

namespace {

void require_same_count(const Points& pred, const Points& gt, const char* what) {
  if (pred.rows() != gt.rows()) {
    throw InputError(std::string(what) + ": count mismatch (" + std::to_string(pred.rows()) +
                     " vs " + std::to_string(gt.rows()) + ")");
  }
  if (pred.rows() == 0) throw InputError(std::string(what) + ": empty input");
}

void require_same_topology(const Mesh& pred, const Mesh& gt, const char* what) {
  if (pred.num_vertices() != gt.num_vertices() || pred.faces.rows() != gt.faces.rows() ||
      pred.faces != gt.faces) {
    throw InputError(std::string(what) + ": meshes do not share face topology");
  }
}

double mean_distance(const Points& pred, const Points& gt, const Eigen::Vector3d& pred_shift,
                     const Eigen::Vector3d& gt_shift) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < pred.rows(); ++i) {
    sum += ((pred.row(i).transpose() - pred_shift) - (gt.row(i).transpose() - gt_shift)).norm();
  }
  return sum / static_cast<double>(pred.rows());
}

}  // namespace

std::string to_string(Alignment mode) {
  return mode == Alignment::raw ? "raw" : "root-relative";
}

Alignment alignment_from_string(const std::string& name) {
  if (name == "raw") return Alignment::raw;
  if (name == "root" || name == "root-relative") return Alignment::root_relative;
  throw InputError("unknown alignment '" + name + "' (expected raw or root)");
}

double mpjpe(const Points& pred, const Points& gt, Alignment mode) {
  require_same_count(pred, gt, "mpjpe");
  return mpvpe(pred, gt, mode, pred.row(0).transpose(), gt.row(0).transpose());
}

double mpvpe(const Points& pred, const Points& gt, Alignment mode) {
  require_same_count(pred, gt, "mpvpe");
  return mpvpe(pred, gt, mode, pred.row(0).transpose(), gt.row(0).transpose());
}

double mpvpe(const Points& pred, const Points& gt, Alignment mode,
             const Eigen::Vector3d& pred_root, const Eigen::Vector3d& gt_root) {
  require_same_count(pred, gt, "mpvpe");
  if (mode == Alignment::raw) {
    return mean_distance(pred, gt, Eigen::Vector3d::Zero(), Eigen::Vector3d::Zero());
  }
  return mean_distance(pred, gt, pred_root, gt_root);
}

double edge_error(const Mesh& pred, const Mesh& gt) {
  require_same_topology(pred, gt, "edge_error");
  const std::vector<Edge> edges = unique_edges(gt.faces);
  if (edges.empty()) throw InputError("edge_error: mesh has no edges");
  double sum = 0.0;
  for (const Edge& e : edges) {
    const double lp = (pred.vertices.row(e[0]) - pred.vertices.row(e[1])).norm();
    const double lg = (gt.vertices.row(e[0]) - gt.vertices.row(e[1])).norm();
    sum += std::abs(lp - lg);
  }
  return sum / static_cast<double>(edges.size());
}

double normal_error(const Mesh& pred, const Mesh& gt) {
  require_same_topology(pred, gt, "normal_error");
  if (gt.num_faces() == 0) throw InputError("normal_error: mesh has no faces");
  double sum = 0.0;
  for (int f = 0; f < gt.num_faces(); ++f) {
    const Eigen::Vector3d n = face_normal(gt, f);
    const double len = n.norm();
    if (!(len > 1e-12)) {
      throw InputError("normal_error: degenerate ground-truth face " + std::to_string(f));
    }
    const Eigen::Vector3d unit_n = n / len;
    for (int k = 0; k < 3; ++k) {
      const Eigen::Vector3d e =
          pred.vertex(gt.faces(f, (k + 1) % 3)) - pred.vertex(gt.faces(f, k));
      const double el = e.norm();
      if (el > 0.0) sum += std::abs(e.dot(unit_n)) / el;
    }
  }
  return sum / (3.0 * gt.num_faces());
}

}  // namespace handfit
