#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "handfit/mesh.hpp"
#include "handfit/rotation.hpp"

namespace handfit {

inline constexpr int kNumJoints = 16;
inline constexpr int kNumTips = 5;
inline constexpr int kNumRegressedJoints = kNumJoints + kNumTips;

/// MANO kinematic tree: wrist, then index, middle, pinky, ring, thumb
/// (three joints each, proximal first).
inline constexpr std::array<int, kNumJoints> kManoParents = {
    -1, 0, 1, 2, 0, 4, 5, 0, 7, 8, 0, 10, 11, 0, 13, 14};

/// Parent joint of each fingertip row (thumb, index, middle, ring, pinky).
inline constexpr std::array<int, kNumTips> kManoTipParents = {15, 3, 6, 12, 9};

/// Parametric hand model. All lengths in millimetres.
///
/// Blend shapes are stored flattened: row k of shape_blendshapes is the
/// displacement field (x0 y0 z0 x1 ...) of one unit coefficient. Pose
/// correctives are either empty or 9 * (J - 1) rows driven by the
/// entries of (R_j - I) for every non-root joint.
struct HandModel {
  Points template_vertices;
  Faces faces;
  RowMatrix shape_blendshapes;
  RowMatrix pose_blendshapes;
  RowMatrix skinning_weights;  // N x J
  RowMatrix joint_regressor;   // K x N, first J rows articulated
  std::vector<int> parents;
  std::array<int, kNumTips> tip_parents = kManoTipParents;

  int num_vertices() const { return static_cast<int>(template_vertices.rows()); }
  int num_faces() const { return static_cast<int>(faces.rows()); }
  int num_shape_dims() const { return static_cast<int>(shape_blendshapes.rows()); }
  int num_joints() const { return static_cast<int>(parents.size()); }

  bool operator==(const HandModel& other) const;
};

/// Checks every model invariant; throws InvariantError naming the section.
void validate(const HandModel& model);

/// Parents before children. Throws InvariantError("parents") unless the
/// array describes a single-rooted tree.
std::vector<int> kinematic_order(std::span<const int> parents);

struct Shape {
  Eigen::VectorXd beta;

  static Shape zero(int dims) { return {Eigen::VectorXd::Zero(dims)}; }
};

/// Soft validity messages (|beta_i| > 5); empty when the shape is typical.
std::vector<std::string> shape_warnings(const Shape& shape);

struct Pose {
  Eigen::Vector3d root_translation = Eigen::Vector3d::Zero();
  std::vector<Rotation> local_rotations;  // index 0 is the global orientation

  static Pose identity(int joints = kNumJoints) {
    Pose p;
    p.local_rotations.assign(static_cast<std::size_t>(joints), Rotation::identity());
    return p;
  }
};

/// T-hat + B_S(beta) + B_P(theta).
Points shaped_template(const HandModel& model, const Shape& shape, const Pose& pose);

/// T-hat + B_S(beta), no pose correctives.
Points shaped_template(const HandModel& model, const Shape& shape);

/// Regressor applied to the shaped template: 21 rows, articulated joints first.
Points rest_joints(const HandModel& model, const Shape& shape);

struct ForwardResult {
  Mesh mesh;
  Points joints;  // 21 x 3: kinematic joint centres, then rigidly carried tips
};

/// Linear blend skinning about the rest joints. The translation is an
/// offset: the posed wrist sits at rest wrist + root_translation.
ForwardResult forward(const HandModel& model, const Shape& shape, const Pose& pose);

/// J-hat = regressor * V for an arbitrary mesh with the model's vertex count.
Points regress_joints(const Mesh& mesh, const HandModel& model);

struct GapReport {
  std::vector<double> per_joint;  // articulated joints only
  double mean = 0.0;
};

/// Distance between the regressor applied to the posed mesh and the
/// kinematic joints. Zero at rest; positive once fingers articulate.
GapReport rest_pose_gap(const HandModel& model, const Shape& shape, const Pose& pose);

/// d(posed joints)/d(root rotation vector), 3K x 3 with joint k in rows 3k..3k+2.
Eigen::MatrixXd root_rotation_jacobian(const HandModel& model, const Shape& shape,
                                       const Pose& pose);

/// For each articulated joint, the row (0..20) of the joint its bone points
/// to: the first articulated child, else its fingertip, else -1.
std::vector<int> bone_children(const HandModel& model);

/// Palm normal of the rest joints, cross(pinky MCP dir, index MCP dir).
Eigen::Vector3d palm_normal(const Points& rest_joints);

/// Pose corrective features: (R_j - I) row-major for j = 1..J-1.
Eigen::VectorXd pose_feature(const Pose& pose);

}  // namespace handfit
