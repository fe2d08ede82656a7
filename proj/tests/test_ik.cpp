#include <random>

#include "doctest.h"

#include "handfit/errors.hpp"
#include "handfit/ik.hpp"
#include "handfit/metrics.hpp"
#include "handfit/pose_sampling.hpp"
#include "handfit/synthetic.hpp"

using namespace handfit;

namespace {

const HandModel& model() {
  static const HandModel m = generate_synthetic_model(7);
  return m;
}

double max_row_error(const Points& a, const Points& b) { return (a - b).rowwise().norm().maxCoeff(); }

}  // namespace

TEST_CASE("round trip through IK with extracted twists is exact") {
  const HandModel& m = model();
  std::mt19937_64 rng(1);
  for (int i = 0; i < 100; ++i) {
    const Shape s = sample_shape(m.num_shape_dims(), 1.0, rng);
    const Pose p = sample_pose(m, s, PoseSamplingSpec{}, rng);
    const ForwardResult truth = forward(m, s, p);
    const IkResult ik = ik_swing_twist(m, {truth.joints, twist_extract(m, s, p), s});
    CHECK_FALSE(ik.inconsistent);
    const ForwardResult back = forward(m, s, ik.pose);
    CHECK(max_row_error(back.joints, truth.joints) < 1e-6);
    CHECK(max_row_error(back.mesh.vertices, truth.mesh.vertices) < 1e-6);
  }
}

TEST_CASE("twist extraction recovers the sampled twist") {
  const HandModel& m = model();
  const Shape s = Shape::zero(m.num_shape_dims());
  const Points rest = rest_joints(m, s);
  const Eigen::Vector3d n = palm_normal(rest);
  const std::vector<int> child = bone_children(m);
  Pose p = Pose::identity();
  std::vector<double> truth(15);
  for (int j = 1; j < 16; ++j) {
    const Eigen::Vector3d d = (rest.row(child[static_cast<std::size_t>(j)]) - rest.row(j)).transpose();
    truth[static_cast<std::size_t>(j - 1)] = 0.03 * j - 0.2;
    p.local_rotations[static_cast<std::size_t>(j)] = articulate_bone(d, n, 0.4, 0.1, truth[static_cast<std::size_t>(j - 1)]);
  }
  const std::vector<TwistAngle> got = twist_extract(m, s, p);
  REQUIRE(got.size() == 15);
  for (std::size_t i = 0; i < got.size(); ++i) CHECK(got[i].radians() == doctest::Approx(truth[i]).epsilon(1e-9));
}

TEST_CASE("twist leaves joints in place but moves the surface") {
  const HandModel& m = model();
  std::mt19937_64 rng(2);
  const Shape s = Shape::zero(m.num_shape_dims());
  PoseSamplingSpec spec;
  spec.twist = TwistDistribution::uniform;
  spec.twist_scale = 0.4;
  const Pose p = sample_pose(m, s, spec, rng);
  const ForwardResult truth = forward(m, s, p);
  const std::vector<TwistAngle> zero(15);
  const ForwardResult back = forward(m, s, ik_swing_twist(m, {truth.joints, zero, s}).pose);
  CHECK(max_row_error(back.joints, truth.joints) < 1e-6);
  CHECK(max_row_error(back.mesh.vertices, truth.mesh.vertices) > 0.1);
}

TEST_CASE("root translation and orientation") {
  const HandModel& m = model();
  std::mt19937_64 rng(3);
  const Shape s = sample_shape(m.num_shape_dims(), 1.0, rng);
  const Pose p = sample_pose(m, s, PoseSamplingSpec{}, rng);
  const ForwardResult truth = forward(m, s, p);
  const IkResult ik = ik_swing_twist(m, {truth.joints, twist_extract(m, s, p), s});
  CHECK((ik.pose.root_translation - (truth.joints.row(0) - rest_joints(m, s).row(0)).transpose()).norm() < 1e-9);
  CHECK(rotation_distance(ik.pose.local_rotations[0], p.local_rotations[0]) < 1e-9);
}

TEST_CASE("stretched target bones raise the consistency flag") {
  const HandModel& m = model();
  const Shape s = Shape::zero(m.num_shape_dims());
  const ForwardResult truth = forward(m, s, Pose::identity());
  Points targets = truth.joints;
  // Lengthen the middle finger's distal bone (joint 6 -> tip row 18) by 20%.
  targets.row(18) = targets.row(6) + 1.2 * (targets.row(18) - targets.row(6));
  const IkResult ik = ik_swing_twist(m, {targets, std::vector<TwistAngle>(15), s});
  CHECK(ik.inconsistent);
  REQUIRE(ik.inconsistent_joints.size() == 1);
  CHECK(ik.inconsistent_joints[0] == 6);
  // Directions are still honoured.
  const ForwardResult back = forward(m, s, ik.pose);
  const Eigen::Vector3d want = (targets.row(18) - targets.row(6)).normalized();
  const Eigen::Vector3d got = (back.joints.row(18) - back.joints.row(6)).normalized();
  CHECK((want - got).norm() < 1e-9);
}

TEST_CASE("degenerate and malformed inputs") {
  const HandModel& m = model();
  const Shape s = Shape::zero(m.num_shape_dims());
  Points targets = forward(m, s, Pose::identity()).joints;
  targets.row(5) = targets.row(4);
  try {
    ik_swing_twist(m, {targets, std::vector<TwistAngle>(15), s});
    FAIL("expected DegenerateBoneError");
  } catch (const DegenerateBoneError& e) {
    CHECK(e.joint() == 5);
  }
  const Points good = forward(m, s, Pose::identity()).joints;
  CHECK_THROWS_AS(ik_swing_twist(m, {good, std::vector<TwistAngle>(14), s}), InputError);
  CHECK_THROWS_AS(ik_swing_twist(m, {good.topRows(16), std::vector<TwistAngle>(15), s}), InputError);
  Points nan = good;
  nan(3, 1) = std::nan("");
  CHECK_THROWS_AS(ik_swing_twist(m, {nan, std::vector<TwistAngle>(15), s}), InputError);
}

TEST_CASE("twist modes parse and print") {
  for (TwistMode mode : {TwistMode::estimated, TwistMode::zero, TwistMode::random}) {
    CHECK(twist_mode_from_string(to_string(mode)) == mode);
  }
  CHECK_THROWS_AS(twist_mode_from_string("sideways"), InputError);
}

TEST_CASE("ablation orders random above zero above estimated") {
  const HandModel& m = model();
  const Shape s = Shape::zero(m.num_shape_dims());
  std::mt19937_64 rng(4);
  std::vector<Pose> poses;
  for (int i = 0; i < 40; ++i) poses.push_back(sample_pose(m, s, PoseSamplingSpec{}, rng));
  const TwistAblationRow est = twist_ablation(m, s, poses, TwistMode::estimated, rng);
  const TwistAblationRow zero = twist_ablation(m, s, poses, TwistMode::zero, rng);
  const TwistAblationRow rnd = twist_ablation(m, s, poses, TwistMode::random, rng);
  CHECK(est.mpvpe < 1e-6);
  CHECK(zero.mpvpe > est.mpvpe);
  CHECK(rnd.mpvpe > 1.5 * zero.mpvpe);
  // Joints never depend on twist.
  CHECK(std::max({est.mpjpe, zero.mpjpe, rnd.mpjpe}) < 1e-6);
  CHECK_THROWS_AS(twist_ablation(m, s, {}, TwistMode::zero, rng), InputError);
}
