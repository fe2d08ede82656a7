#pragma once

#include <string>

#include <Eigen/Core>

#include "handfit/mesh.hpp"

namespace handfit {

/// Whether positions are compared as-is or after subtracting the root.
enum class Alignment { raw, root_relative };

std::string to_string(Alignment mode);
/// Accepts "raw", "root", "root-relative".
Alignment alignment_from_string(const std::string& name);

/// Mean per-joint position error; the root is row 0 of each array.
double mpjpe(const Points& pred, const Points& gt, Alignment mode);

/// Mean per-vertex position error; the root is row 0 of each array.
double mpvpe(const Points& pred, const Points& gt, Alignment mode);

/// Mean per-vertex position error relative to explicit roots (usually the wrist joints).
double mpvpe(const Points& pred, const Points& gt, Alignment mode,
             const Eigen::Vector3d& pred_root, const Eigen::Vector3d& gt_root);

/// Mean over unique edges of | |e_pred| - |e_gt| |.
double edge_error(const Mesh& pred, const Mesh& gt);

/// Mean over faces and their three edges of |<unit pred edge, unit gt face normal>|.
/// Throws InputError naming the face when a ground-truth face is degenerate.
double normal_error(const Mesh& pred, const Mesh& gt);

}  // namespace handfit
