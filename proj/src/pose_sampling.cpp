#include "handfit/pose_sampling.hpp"

namespace handfit {

namespace {

struct BoneFrame {
  Eigen::Vector3d dir;
  Eigen::Vector3d normal;
};

std::vector<BoneFrame> bone_frames(const HandModel& model, const Shape& shape) {
  const Points rest = rest_joints(model, shape);
  const Eigen::Vector3d n = palm_normal(rest);
  const std::vector<int> child = bone_children(model);
  std::vector<BoneFrame> frames(static_cast<std::size_t>(model.num_joints()),
                                BoneFrame{Eigen::Vector3d::UnitY(), n});
  for (int j = 0; j < model.num_joints(); ++j) {
    const int c = child[static_cast<std::size_t>(j)];
    if (model.parents[static_cast<std::size_t>(j)] < 0 || c < 0) continue;
    frames[static_cast<std::size_t>(j)].dir = (rest.row(c) - rest.row(j)).transpose().normalized();
  }
  return frames;
}

bool is_proximal(const HandModel& model, int j) {
  const int p = model.parents[static_cast<std::size_t>(j)];
  return p >= 0 && model.parents[static_cast<std::size_t>(p)] < 0;
}

}  // namespace

Rotation articulate_bone(const Eigen::Vector3d& bone_dir, const Eigen::Vector3d& palm_normal,
                         double flexion, double abduction, double twist) {
  const Eigen::Vector3d d = bone_dir.normalized();
  Eigen::Vector3d n = palm_normal - palm_normal.dot(d) * d;
  n.normalize();
  const Eigen::Vector3d lateral = d.cross(n);
  const Eigen::Vector3d target = Rotation::from_axis_angle(lateral, flexion) *
                                 (Rotation::from_axis_angle(n, abduction) * d);
  return align_vectors(d, target) * Rotation::from_axis_angle(d, twist);
}

Pose sample_pose(const HandModel& model, const Shape& shape, const PoseSamplingSpec& spec,
                 std::mt19937_64& rng) {
  const std::vector<BoneFrame> frames = bone_frames(model, shape);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  Pose pose = Pose::identity(model.num_joints());
  for (int j = 0; j < model.num_joints(); ++j) {
    if (model.parents[static_cast<std::size_t>(j)] < 0) continue;
    const double flex = spec.max_flexion * unit(rng);
    const double abd = is_proximal(model, j) ? spec.max_abduction * (2.0 * unit(rng) - 1.0) : 0.0;
    double twist = 0.0;
    switch (spec.twist) {
      case TwistDistribution::zero:
        break;
      case TwistDistribution::normal:
        twist = spec.twist_scale * gauss(rng);
        break;
      case TwistDistribution::uniform:
        twist = spec.twist_scale * (2.0 * unit(rng) - 1.0);
        break;
    }
    const BoneFrame& f = frames[static_cast<std::size_t>(j)];
    pose.local_rotations[static_cast<std::size_t>(j)] = articulate_bone(f.dir, f.normal, flex, abd, twist);
  }
  const int root = kinematic_order(model.parents).front();
  if (spec.random_root) pose.local_rotations[static_cast<std::size_t>(root)] = random_rotation(rng);
  for (int c = 0; c < 3; ++c) pose.root_translation[c] = spec.translation_sigma * gauss(rng);
  return pose;
}

Pose flexion_pose(const HandModel& model, const Shape& shape, double flexion) {
  const std::vector<BoneFrame> frames = bone_frames(model, shape);
  Pose pose = Pose::identity(model.num_joints());
  for (int j = 0; j < model.num_joints(); ++j) {
    if (model.parents[static_cast<std::size_t>(j)] < 0) continue;
    const BoneFrame& f = frames[static_cast<std::size_t>(j)];
    pose.local_rotations[static_cast<std::size_t>(j)] = articulate_bone(f.dir, f.normal, flexion, 0.0, 0.0);
  }
  return pose;
}

Shape sample_shape(int dims, double sigma, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, sigma);
  Shape s = Shape::zero(dims);
  for (int i = 0; i < dims; ++i) s.beta[i] = gauss(rng);
  return s;
}

Rotation random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::Quaterniond q;
  do {
    const double w = gauss(rng);
    const double x = gauss(rng);
    const double y = gauss(rng);
    const double z = gauss(rng);
    q = Eigen::Quaterniond(w, x, y, z);
  } while (q.norm() < 1e-6);
  return Rotation::from_quaternion(q);
}

}  // namespace handfit
