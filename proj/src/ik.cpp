#include "handfit/ik.hpp"

#include <cmath>

#include <Eigen/SVD>

#include "handfit/errors.hpp"
#include "handfit/metrics.hpp"

namespace handfit {

namespace {

constexpr double kBoneLengthTolerance = 0.10;

int twist_slot(int joint, int root) { return joint > root ? joint - 1 : joint; }

Rotation kabsch(const std::vector<Eigen::Vector3d>& from, const std::vector<Eigen::Vector3d>& to) {
  if (from.size() == 1) return align_vectors(from[0], to[0]);
  Eigen::Matrix3d h = Eigen::Matrix3d::Zero();
  for (std::size_t i = 0; i < from.size(); ++i) {
    h += from[i].normalized() * to[i].normalized().transpose();
  }
  const Eigen::JacobiSVD<Eigen::Matrix3d> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix3d d = Eigen::Matrix3d::Identity();
  d(2, 2) = (svd.matrixV() * svd.matrixU().transpose()).determinant() < 0.0 ? -1.0 : 1.0;
  return Rotation::from_matrix(svd.matrixV() * d * svd.matrixU().transpose());
}

}  // namespace

IkResult ik_swing_twist(const HandModel& model, const IkInput& input) {
  const int nj = model.num_joints();
  if (input.joints.rows() != kNumRegressedJoints) {
    throw InputError("ik: expected " + std::to_string(kNumRegressedJoints) + " target joints, got " +
                     std::to_string(input.joints.rows()));
  }
  if (!input.joints.allFinite()) throw InputError("ik: target joints must be finite");
  if (static_cast<int>(input.twists.size()) != nj - 1) {
    throw InputError("ik: expected " + std::to_string(nj - 1) + " twist angles, got " +
                     std::to_string(input.twists.size()));
  }

  const Points rest = rest_joints(model, input.shape);
  const std::vector<int> child = bone_children(model);
  const std::vector<int> order = kinematic_order(model.parents);
  const int root = order.front();

  auto target = [&](int row) -> Eigen::Vector3d { return input.joints.row(row).transpose(); };
  auto rest_at = [&](int row) -> Eigen::Vector3d { return rest.row(row).transpose(); };

  IkResult result;
  auto check_bone = [&](int from, int to) {
    const double lt = (target(to) - target(from)).norm();
    if (!(lt > 1e-9)) throw DegenerateBoneError(to, "target coincides with its parent joint");
    const double lr = (rest_at(to) - rest_at(from)).norm();
    if (std::abs(lt - lr) > kBoneLengthTolerance * lr) {
      result.inconsistent = true;
      result.inconsistent_joints.push_back(from);
    }
  };
  for (int j = 0; j < nj; ++j) {
    const int p = model.parents[static_cast<std::size_t>(j)];
    if (p >= 0) check_bone(p, j);
  }
  for (int t = 0; t < kNumTips; ++t) check_bone(model.tip_parents[static_cast<std::size_t>(t)], nj + t);

  std::vector<Eigen::Vector3d> rest_dirs, target_dirs;
  for (int j = 0; j < nj; ++j) {
    if (model.parents[static_cast<std::size_t>(j)] != root) continue;
    rest_dirs.push_back(rest_at(j) - rest_at(root));
    target_dirs.push_back(target(j) - target(root));
  }
  if (rest_dirs.empty()) throw InputError("ik: root joint has no children");

  Pose& pose = result.pose;
  pose = Pose::identity(nj);
  pose.root_translation = target(root) - rest_at(root);
  pose.local_rotations[static_cast<std::size_t>(root)] = kabsch(rest_dirs, target_dirs);

  std::vector<Rotation> global(static_cast<std::size_t>(nj));
  global[static_cast<std::size_t>(root)] = pose.local_rotations[static_cast<std::size_t>(root)];
  for (int j : order) {
    if (j == root) continue;
    const Rotation& parent_global = global[static_cast<std::size_t>(model.parents[static_cast<std::size_t>(j)])];
    const int c = child[static_cast<std::size_t>(j)];
    Rotation local;
    if (c >= 0) {
      const Eigen::Vector3d rest_bone = rest_at(c) - rest_at(j);
      const Eigen::Vector3d wanted = parent_global.inverse() * (target(c) - target(j));
      const double twist = input.twists[static_cast<std::size_t>(twist_slot(j, root))].radians();
      local = align_vectors(rest_bone, wanted) *
              Rotation::from_axis_angle(rest_bone.normalized(), twist);
    }
    pose.local_rotations[static_cast<std::size_t>(j)] = local;
    global[static_cast<std::size_t>(j)] = parent_global * local;
  }
  return result;
}

std::vector<TwistAngle> twist_extract(const HandModel& model, const Shape& shape, const Pose& pose) {
  const int nj = model.num_joints();
  if (static_cast<int>(pose.local_rotations.size()) != nj) {
    throw InputError("twist_extract: pose joint count does not match model");
  }
  const Points rest = rest_joints(model, shape);
  const std::vector<int> child = bone_children(model);
  const int root = kinematic_order(model.parents).front();
  std::vector<TwistAngle> twists(static_cast<std::size_t>(nj - 1));
  for (int j = 0; j < nj; ++j) {
    const int c = child[static_cast<std::size_t>(j)];
    if (j == root || c < 0) continue;
    const Eigen::Vector3d axis = (rest.row(c) - rest.row(j)).transpose().normalized();
    twists[static_cast<std::size_t>(twist_slot(j, root))] =
        swing_twist_decompose(pose.local_rotations[static_cast<std::size_t>(j)], axis).twist;
  }
  return twists;
}

std::string to_string(TwistMode mode) {
  switch (mode) {
    case TwistMode::estimated:
      return "estimated";
    case TwistMode::zero:
      return "zero";
    case TwistMode::random:
      return "random";
  }
  return "unknown";
}

TwistMode twist_mode_from_string(const std::string& name) {
  if (name == "estimated") return TwistMode::estimated;
  if (name == "zero") return TwistMode::zero;
  if (name == "random") return TwistMode::random;
  throw InputError("unknown twist mode '" + name + "'");
}

TwistAblationRow twist_ablation(const HandModel& model, const Shape& shape,
                                const std::vector<Pose>& poses, TwistMode mode,
                                std::mt19937_64& rng) {
  if (poses.empty()) throw InputError("twist_ablation: no poses");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  TwistAblationRow row;
  row.mode = mode;
  for (const Pose& pose : poses) {
    const ForwardResult truth = forward(model, shape, pose);
    IkInput input{truth.joints, {}, shape};
    switch (mode) {
      case TwistMode::estimated:
        input.twists = twist_extract(model, shape, pose);
        break;
      case TwistMode::zero:
        input.twists.assign(static_cast<std::size_t>(model.num_joints() - 1), TwistAngle(0.0));
        break;
      case TwistMode::random:
        for (int j = 1; j < model.num_joints(); ++j) input.twists.emplace_back(unit(rng));
        break;
    }
    const ForwardResult rebuilt = forward(model, shape, ik_swing_twist(model, input).pose);
    row.mpjpe += mpjpe(rebuilt.joints, truth.joints, Alignment::raw);
    row.mpvpe += mpvpe(rebuilt.mesh.vertices, truth.mesh.vertices, Alignment::raw);
  }
  row.mpjpe /= static_cast<double>(poses.size());
  row.mpvpe /= static_cast<double>(poses.size());
  return row;
}

}  // namespace handfit
