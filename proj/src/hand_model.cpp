#include "handfit/hand_model.hpp"

#include <cmath>
#include <queue>
#include <sstream>

#include <Eigen/Geometry>

#include "handfit/errors.hpp"

namespace handfit {

namespace {

constexpr double kRowSumTolerance = 1e-6;

void check_stochastic_rows(const RowMatrix& m, const char* section) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    if (m.row(r).minCoeff() < -1e-12) {
      throw InvariantError(section, "negative weight in row " + std::to_string(r));
    }
    const double sum = m.row(r).sum();
    if (std::abs(sum - 1.0) > kRowSumTolerance) {
      std::ostringstream msg;
      msg << "row " << r << " sums to " << sum << ", expected 1";
      throw InvariantError(section, msg.str());
    }
  }
}

void check_finite(const auto& m, const char* section) {
  if (!m.allFinite()) throw InvariantError(section, "non-finite entries");
}

struct Kinematics {
  std::vector<Eigen::Isometry3d> global;  // joint frame: rotation + posed joint centre
  std::vector<Eigen::Isometry3d> skinning;  // global * translate(-rest joint)
};

Kinematics compute_kinematics(const HandModel& model, const Points& rest, const Pose& pose) {
  const int nj = model.num_joints();
  if (static_cast<int>(pose.local_rotations.size()) != nj) {
    throw InputError("pose has " + std::to_string(pose.local_rotations.size()) +
                     " rotations, model expects " + std::to_string(nj));
  }
  Kinematics k;
  k.global.resize(static_cast<std::size_t>(nj));
  k.skinning.resize(static_cast<std::size_t>(nj));
  for (int j : kinematic_order(model.parents)) {
    const int p = model.parents[static_cast<std::size_t>(j)];
    Eigen::Isometry3d local = Eigen::Isometry3d::Identity();
    local.linear() = pose.local_rotations[static_cast<std::size_t>(j)].matrix();
    const Eigen::Vector3d rj = rest.row(j).transpose();
    if (p < 0) {
      local.translation() = rj;
      k.global[static_cast<std::size_t>(j)] = local;
    } else {
      local.translation() = rj - rest.row(p).transpose();
      k.global[static_cast<std::size_t>(j)] = k.global[static_cast<std::size_t>(p)] * local;
    }
    Eigen::Isometry3d skin = k.global[static_cast<std::size_t>(j)];
    skin.translation() -= skin.linear() * rj;
    k.skinning[static_cast<std::size_t>(j)] = skin;
  }
  return k;
}

void check_shape(const HandModel& model, const Shape& shape) {
  if (shape.beta.size() != model.num_shape_dims()) {
    throw InputError("shape has " + std::to_string(shape.beta.size()) +
                     " coefficients, model expects " + std::to_string(model.num_shape_dims()));
  }
  if (!shape.beta.allFinite()) throw InputError("shape coefficients must be finite");
}

}  // namespace

bool HandModel::operator==(const HandModel& o) const {
  auto same = [](const auto& a, const auto& b) {
    return a.rows() == b.rows() && a.cols() == b.cols() && (a.size() == 0 || a == b);
  };
  return same(template_vertices, o.template_vertices) && same(faces, o.faces) &&
         same(shape_blendshapes, o.shape_blendshapes) &&
         same(pose_blendshapes, o.pose_blendshapes) &&
         same(skinning_weights, o.skinning_weights) &&
         same(joint_regressor, o.joint_regressor) && parents == o.parents &&
         tip_parents == o.tip_parents;
}

std::vector<int> kinematic_order(std::span<const int> parents) {
  const int n = static_cast<int>(parents.size());
  std::vector<std::vector<int>> children(static_cast<std::size_t>(n));
  int root = -1;
  for (int j = 0; j < n; ++j) {
    const int p = parents[static_cast<std::size_t>(j)];
    if (p == -1) {
      if (root != -1) throw InvariantError("parents", "more than one root");
      root = j;
    } else if (p < 0 || p >= n || p == j) {
      throw InvariantError("parents", "joint " + std::to_string(j) + " has invalid parent " +
                                          std::to_string(p));
    } else {
      children[static_cast<std::size_t>(p)].push_back(j);
    }
  }
  if (root == -1) throw InvariantError("parents", "no root joint");
  std::vector<int> order;
  order.reserve(static_cast<std::size_t>(n));
  std::queue<int> open;
  open.push(root);
  while (!open.empty()) {
    const int j = open.front();
    open.pop();
    order.push_back(j);
    for (int c : children[static_cast<std::size_t>(j)]) open.push(c);
  }
  if (static_cast<int>(order.size()) != n) {
    throw InvariantError("parents", "kinematic tree contains a cycle");
  }
  return order;
}

void validate(const HandModel& model) {
  const Eigen::Index n = model.template_vertices.rows();
  if (n == 0) throw InvariantError("template", "no vertices");
  check_finite(model.template_vertices, "template");

  if (model.faces.rows() == 0) throw InvariantError("faces", "no faces");
  if (model.faces.minCoeff() < 0 || model.faces.maxCoeff() >= n) {
    throw InvariantError("faces", "face index out of range");
  }

  if (model.shape_blendshapes.rows() > 0 && model.shape_blendshapes.cols() != 3 * n) {
    throw InvariantError("shape_blendshapes", "expected " + std::to_string(3 * n) + " columns");
  }
  check_finite(model.shape_blendshapes, "shape_blendshapes");

  if (static_cast<int>(model.parents.size()) != kNumJoints) {
    throw InvariantError("parents", "expected " + std::to_string(kNumJoints) + " joints, got " +
                                        std::to_string(model.parents.size()));
  }
  kinematic_order(model.parents);
  const Eigen::Index nj = kNumJoints;

  if (model.pose_blendshapes.rows() != 0) {
    if (model.pose_blendshapes.rows() != 9 * (nj - 1) || model.pose_blendshapes.cols() != 3 * n) {
      throw InvariantError("pose_blendshapes", "expected " + std::to_string(9 * (nj - 1)) + " x " +
                                                   std::to_string(3 * n));
    }
    check_finite(model.pose_blendshapes, "pose_blendshapes");
  }

  if (model.skinning_weights.rows() != n || model.skinning_weights.cols() != nj) {
    throw InvariantError("skinning_weights", "expected " + std::to_string(n) + " x " +
                                                 std::to_string(nj));
  }
  check_finite(model.skinning_weights, "skinning_weights");
  check_stochastic_rows(model.skinning_weights, "skinning_weights");

  if (model.joint_regressor.rows() != kNumRegressedJoints || model.joint_regressor.cols() != n) {
    throw InvariantError("joint_regressor", "expected " + std::to_string(kNumRegressedJoints) +
                                                " x " + std::to_string(n));
  }
  check_finite(model.joint_regressor, "joint_regressor");
  check_stochastic_rows(model.joint_regressor, "joint_regressor");

  for (int p : model.tip_parents) {
    if (p < 0 || p >= nj) throw InvariantError("tip_parents", "tip parent out of range");
  }
}

std::vector<std::string> shape_warnings(const Shape& shape) {
  std::vector<std::string> out;
  for (Eigen::Index i = 0; i < shape.beta.size(); ++i) {
    if (std::abs(shape.beta[i]) > 5.0) {
      std::ostringstream msg;
      msg << "beta[" << i << "] = " << shape.beta[i] << " is outside [-5, 5]";
      out.push_back(msg.str());
    }
  }
  return out;
}

Eigen::VectorXd pose_feature(const Pose& pose) {
  const std::size_t nj = pose.local_rotations.size();
  Eigen::VectorXd f(9 * static_cast<Eigen::Index>(nj > 0 ? nj - 1 : 0));
  for (std::size_t j = 1; j < nj; ++j) {
    const Eigen::Matrix3d d = pose.local_rotations[j].matrix() - Eigen::Matrix3d::Identity();
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) f[static_cast<Eigen::Index>(9 * (j - 1)) + 3 * r + c] = d(r, c);
    }
  }
  return f;
}

Points shaped_template(const HandModel& model, const Shape& shape) {
  check_shape(model, shape);
  Points t = model.template_vertices;
  if (model.num_shape_dims() > 0) {
    const Eigen::RowVectorXd offset = shape.beta.transpose() * model.shape_blendshapes;
    t += Eigen::Map<const Points>(offset.data(), t.rows(), 3);
  }
  return t;
}

Points shaped_template(const HandModel& model, const Shape& shape, const Pose& pose) {
  Points t = shaped_template(model, shape);
  if (model.pose_blendshapes.rows() > 0) {
    if (static_cast<int>(pose.local_rotations.size()) != model.num_joints()) {
      throw InputError("pose joint count does not match model");
    }
    const Eigen::RowVectorXd offset = pose_feature(pose).transpose() * model.pose_blendshapes;
    t += Eigen::Map<const Points>(offset.data(), t.rows(), 3);
  }
  return t;
}

Points rest_joints(const HandModel& model, const Shape& shape) {
  return model.joint_regressor * shaped_template(model, shape);
}

ForwardResult forward(const HandModel& model, const Shape& shape, const Pose& pose) {
  const Points rest = rest_joints(model, shape);
  const Points tpl = shaped_template(model, shape, pose);
  const Kinematics kin = compute_kinematics(model, rest, pose);
  const Eigen::Vector3d trans = pose.root_translation;
  if (!trans.allFinite()) throw InputError("root translation must be finite");

  ForwardResult out;
  out.mesh.faces = model.faces;
  out.mesh.vertices.resize(tpl.rows(), 3);
  const int nj = model.num_joints();
  for (Eigen::Index v = 0; v < tpl.rows(); ++v) {
    Eigen::Matrix<double, 3, 4> blend = Eigen::Matrix<double, 3, 4>::Zero();
    for (int j = 0; j < nj; ++j) {
      const double w = model.skinning_weights(v, j);
      if (w != 0.0) blend += w * kin.skinning[static_cast<std::size_t>(j)].matrix().topRows<3>();
    }
    const Eigen::Vector3d p = blend.leftCols<3>() * tpl.row(v).transpose() + blend.col(3);
    out.mesh.vertices.row(v) = (p + trans).transpose();
  }

  out.joints.resize(kNumRegressedJoints, 3);
  for (int j = 0; j < nj; ++j) {
    out.joints.row(j) = (kin.global[static_cast<std::size_t>(j)].translation() + trans).transpose();
  }
  for (int t = 0; t < kNumTips; ++t) {
    const int p = model.tip_parents[static_cast<std::size_t>(t)];
    const Eigen::Vector3d tip = rest.row(nj + t).transpose();
    out.joints.row(nj + t) = (kin.skinning[static_cast<std::size_t>(p)] * tip + trans).transpose();
  }
  return out;
}

Points regress_joints(const Mesh& mesh, const HandModel& model) {
  if (mesh.num_vertices() != model.num_vertices()) {
    throw InputError("mesh has " + std::to_string(mesh.num_vertices()) +
                     " vertices, regressor expects " + std::to_string(model.num_vertices()));
  }
  return model.joint_regressor * mesh.vertices;
}

GapReport rest_pose_gap(const HandModel& model, const Shape& shape, const Pose& pose) {
  const ForwardResult fwd = forward(model, shape, pose);
  const Points regressed = regress_joints(fwd.mesh, model);
  GapReport gap;
  const int nj = model.num_joints();
  gap.per_joint.resize(static_cast<std::size_t>(nj));
  double sum = 0.0;
  for (int j = 0; j < nj; ++j) {
    const double d = (regressed.row(j) - fwd.joints.row(j)).norm();
    gap.per_joint[static_cast<std::size_t>(j)] = d;
    sum += d;
  }
  gap.mean = sum / nj;
  return gap;
}

Eigen::MatrixXd root_rotation_jacobian(const HandModel& model, const Shape& shape,
                                       const Pose& pose) {
  const ForwardResult fwd = forward(model, shape, pose);
  const Points rest = rest_joints(model, shape);
  const int root = kinematic_order(model.parents).front();
  const Rotation& r0 = pose.local_rotations[static_cast<std::size_t>(root)];
  const Eigen::Matrix3d rm = r0.matrix();
  const Eigen::Matrix3d jr = so3_right_jacobian(r0.rotation_vector());
  const Eigen::Vector3d pivot = rest.row(root).transpose() + pose.root_translation;

  Eigen::MatrixXd jac(3 * fwd.joints.rows(), 3);
  for (Eigen::Index k = 0; k < fwd.joints.rows(); ++k) {
    // Offset from the pivot expressed in the root frame; independent of the root rotation.
    const Eigen::Vector3d local = rm.transpose() * (fwd.joints.row(k).transpose() - pivot);
    jac.block<3, 3>(3 * k, 0) = -rm * skew(local) * jr;
  }
  return jac;
}

std::vector<int> bone_children(const HandModel& model) {
  const int nj = model.num_joints();
  std::vector<int> child(static_cast<std::size_t>(nj), -1);
  for (int j = nj - 1; j >= 0; --j) {
    const int p = model.parents[static_cast<std::size_t>(j)];
    if (p >= 0) child[static_cast<std::size_t>(p)] = j;  // lowest index wins
  }
  for (int t = 0; t < kNumTips; ++t) {
    const int p = model.tip_parents[static_cast<std::size_t>(t)];
    if (child[static_cast<std::size_t>(p)] == -1) child[static_cast<std::size_t>(p)] = nj + t;
  }
  return child;
}

Eigen::Vector3d palm_normal(const Points& rest) {
  const Eigen::Vector3d wrist = rest.row(0).transpose();
  const Eigen::Vector3d index = rest.row(1).transpose() - wrist;
  const Eigen::Vector3d pinky = rest.row(7).transpose() - wrist;
  const Eigen::Vector3d n = pinky.cross(index);
  if (n.norm() < 1e-12) throw InputError("palm normal undefined: index and pinky collinear");
  return n.normalized();
}

}  // namespace handfit
