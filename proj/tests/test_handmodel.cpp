#include <cstdlib>
#include <filesystem>
#include <random>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"

#include "handfit/container.hpp"
#include "handfit/errors.hpp"
#include "handfit/mesh.hpp"
#include "handfit/model_io.hpp"
#include "handfit/pose_sampling.hpp"
#include "handfit/synthetic.hpp"

using namespace handfit;

namespace {

const HandModel& synthetic() {
  static const HandModel model = generate_synthetic_model(7);
  return model;
}

HandModel with_pose_correctives(HandModel m, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 0.5);
  m.pose_blendshapes.resize(9 * (m.num_joints() - 1), 3 * m.num_vertices());
  for (Eigen::Index i = 0; i < m.pose_blendshapes.size(); ++i) m.pose_blendshapes.data()[i] = g(rng);
  return m;
}

std::string serialize(const HandModel& m) {
  std::ostringstream out;
  save_model(out, m);
  return out.str();
}

}  // namespace

TEST_CASE("synthetic model is valid, closed and outward facing") {
  const HandModel& m = synthetic();
  CHECK_NOTHROW(validate(m));
  CHECK(m.num_vertices() == 766);
  CHECK(m.num_joints() == kNumJoints);
  CHECK(m.parents == std::vector<int>(kManoParents.begin(), kManoParents.end()));
  const Mesh rest{m.template_vertices, m.faces};
  CHECK(is_watertight(rest.faces));
  CHECK_NOTHROW(require_watertight(rest));
  CHECK(signed_volume(rest) > 0.0);
  // Every directed edge appears once, so orientation is consistent.
  std::set<std::pair<int, int>> directed;
  for (int f = 0; f < rest.num_faces(); ++f) {
    for (int k = 0; k < 3; ++k) CHECK(directed.insert({rest.faces(f, k), rest.faces(f, (k + 1) % 3)}).second);
  }
}

TEST_CASE("synthetic generation is deterministic per seed") {
  CHECK(generate_synthetic_model(7) == synthetic());
  CHECK(serialize(generate_synthetic_model(7)) == serialize(synthetic()));
  CHECK_FALSE(generate_synthetic_model(8) == synthetic());
}

TEST_CASE("layout follows the vertex budget") {
  CHECK(choose_layout(778).vertex_count() == 766);
  CHECK(std::abs(choose_layout(2000).vertex_count() - 2000) < 200);
  CHECK(generate_synthetic_model(1, 300, 4).num_vertices() == choose_layout(300).vertex_count());
  CHECK_THROWS_AS(choose_layout(50), InputError);
}

TEST_CASE("identity pose reproduces the shaped template and rest joints") {
  const HandModel& m = synthetic();
  std::mt19937_64 rng(2);
  const Shape s = sample_shape(m.num_shape_dims(), 1.0, rng);
  const ForwardResult fr = forward(m, s, Pose::identity());
  CHECK((fr.mesh.vertices - shaped_template(m, s)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((fr.joints - rest_joints(m, s)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("translation is an offset of the whole hand") {
  const HandModel& m = synthetic();
  std::mt19937_64 rng(4);
  const Shape s = Shape::zero(m.num_shape_dims());
  Pose p = sample_pose(m, s, PoseSamplingSpec{}, rng);
  const ForwardResult a = forward(m, s, p);
  p.root_translation += Eigen::Vector3d(3, -1, 2);
  const ForwardResult b = forward(m, s, p);
  CHECK(((b.mesh.vertices - a.mesh.vertices).rowwise() - Eigen::RowVector3d(3, -1, 2)).cwiseAbs().maxCoeff() < 1e-12);
  p.root_translation = Eigen::Vector3d(5, 6, 7);
  CHECK((forward(m, s, p).joints.row(0) - rest_joints(m, s).row(0) - Eigen::RowVector3d(5, 6, 7)).norm() < 1e-12);
}

TEST_CASE("LBS matches the per-vertex loop oracle, with pose correctives") {
  const HandModel m = with_pose_correctives(synthetic(), 9);
  std::mt19937_64 rng(21);
  for (int i = 0; i < 10; ++i) {
    const Shape s = sample_shape(m.num_shape_dims(), 1.0, rng);
    const Pose p = sample_pose(m, s, PoseSamplingSpec{}, rng);
    const ForwardResult fr = forward(m, s, p);
    const oracle::Posed ref = oracle::naive_forward(m, s, p);
    CHECK((fr.mesh.vertices - ref.vertices).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((fr.joints - ref.joints).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("pose feature is zero at identity") {
  CHECK(pose_feature(Pose::identity()).size() == 135);
  CHECK(pose_feature(Pose::identity()).isZero(0.0));
}

TEST_CASE("root rotation Jacobian agrees with central differences") {
  const HandModel& m = synthetic();
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 5; ++trial) {
    const Shape s = sample_shape(m.num_shape_dims(), 1.0, rng);
    const Pose p = sample_pose(m, s, PoseSamplingSpec{}, rng);
    const Eigen::MatrixXd jac = root_rotation_jacobian(m, s, p);
    REQUIRE(jac.rows() == 3 * kNumRegressedJoints);
    const Eigen::Vector3d w = p.local_rotations[0].rotation_vector();
    const double h = 1e-6;
    Eigen::MatrixXd fd(jac.rows(), 3);
    for (int k = 0; k < 3; ++k) {
      Pose plus = p, minus = p;
      plus.local_rotations[0] = Rotation::from_rotation_vector(w + h * Eigen::Vector3d::Unit(k));
      minus.local_rotations[0] = Rotation::from_rotation_vector(w - h * Eigen::Vector3d::Unit(k));
      const Points d = (forward(m, s, plus).joints - forward(m, s, minus).joints) / (2 * h);
      for (int j = 0; j < kNumRegressedJoints; ++j) fd.block<3, 1>(3 * j, k) = d.row(j).transpose();
    }
    CHECK((jac - fd).norm() / fd.norm() < 1e-4);
  }
}

TEST_CASE("validate names the broken section") {
  auto expect_section = [](const HandModel& m, const std::string& section) {
    try {
      validate(m);
      FAIL("expected InvariantError for " << section);
    } catch (const InvariantError& e) {
      CHECK(e.section() == section);
    }
  };
  HandModel m = synthetic();
  m.skinning_weights(3, 0) += 0.01;
  expect_section(m, "skinning_weights");

  m = synthetic();
  m.joint_regressor(5, 0) += 0.01;
  expect_section(m, "joint_regressor");

  m = synthetic();
  m.parents[2] = 3;
  m.parents[3] = 2;
  expect_section(m, "parents");

  m = synthetic();
  m.faces(0, 1) = m.num_vertices();
  expect_section(m, "faces");

  m = synthetic();
  m.shape_blendshapes.conservativeResize(Eigen::NoChange, 12);
  expect_section(m, "shape_blendshapes");

  m = synthetic();
  m.tip_parents[0] = 40;
  expect_section(m, "tip_parents");
}

TEST_CASE("kinematic order lists parents first") {
  const std::vector<int> order = kinematic_order(kManoParents);
  REQUIRE(order.size() == 16);
  CHECK(order.front() == 0);
  std::vector<int> position(16);
  for (int i = 0; i < 16; ++i) position[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] = i;
  for (int j = 1; j < 16; ++j) CHECK(position[static_cast<std::size_t>(kManoParents[static_cast<std::size_t>(j)])] < position[static_cast<std::size_t>(j)]);
  const std::vector<int> two_roots{-1, -1, 0};
  CHECK_THROWS_AS(kinematic_order(two_roots), InvariantError);
}

TEST_CASE("shape warnings flag atypical coefficients") {
  Shape s = Shape::zero(10);
  CHECK(shape_warnings(s).empty());
  s.beta(3) = 6.0;
  CHECK(shape_warnings(s).size() == 1);
  CHECK_THROWS_AS(forward(synthetic(), Shape::zero(3), Pose::identity()), InputError);
}

TEST_CASE("rest pose gap is zero at rest and grows with flexion") {
  const HandModel& m = synthetic();
  const Shape s = Shape::zero(m.num_shape_dims());
  CHECK(rest_pose_gap(m, s, Pose::identity()).mean < 1e-9);
  double previous = -1.0;
  for (double f = 0.0; f <= 1.2001; f += 0.2) {
    const double gap = rest_pose_gap(m, s, flexion_pose(m, s, f)).mean;
    CHECK(gap >= previous);
    previous = gap;
  }
  CHECK(previous > 0.1);
}

TEST_CASE("bone children and palm normal") {
  const HandModel& m = synthetic();
  const std::vector<int> child = bone_children(m);
  CHECK(child[0] == 1);
  CHECK(child[1] == 2);
  CHECK(child[3] == 17);   // index tip
  CHECK(child[15] == 16);  // thumb tip
  const Eigen::Vector3d n = palm_normal(rest_joints(m, Shape::zero(m.num_shape_dims())));
  CHECK(n.norm() == doctest::Approx(1.0));
}

TEST_CASE("container round trip and error handling") {
  std::vector<Section> sections{
      {"alpha", 2, 2, std::vector<double>{1.5, -2.0, 3.25, 1e-300}},
      {"beta", 3, 1, std::vector<std::int32_t>{7, -1, 42}},
  };
  std::stringstream buf;
  write_container(buf, sections);
  const std::string bytes = buf.str();
  const SectionMap back = read_container(buf);
  CHECK(back.at("alpha").f64() == sections[0].f64());
  CHECK(back.at("beta").i32() == sections[1].i32());

  std::stringstream truncated(bytes.substr(0, bytes.size() - 3));
  CHECK_THROWS_AS(read_container(truncated), ParseError);

  std::stringstream dup;
  write_container(dup, {sections[0]});
  dup << bytes.substr(bytes.find('\n') + 1);  // same sections again without the magic line
  CHECK_THROWS_AS(read_container(dup), ParseError);

  std::stringstream bad("NOT-A-CONTAINER\n");
  CHECK_THROWS_AS(read_container(bad), ParseError);
}

TEST_CASE("model save and load is bit exact") {
  const HandModel m = with_pose_correctives(synthetic(), 1);
  std::stringstream buf;
  save_model(buf, m);
  const std::string first = buf.str();
  const HandModel back = load_model(buf);
  CHECK(back == m);
  CHECK(serialize(back) == first);

  // Unknown sections are ignored, missing ones are named.
  std::vector<Section> extra{{"notes", 1, 1, std::vector<double>{1.0}}};
  std::stringstream with_extra;
  with_extra << first;
  std::stringstream tail;
  write_container(tail, extra);
  with_extra << tail.str().substr(tail.str().find('\n') + 1);
  CHECK(load_model(with_extra) == m);

  std::stringstream empty;
  write_container(empty, {});
  try {
    load_model(empty);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK_FALSE(e.section().empty());
  }
}

TEST_CASE("OBJ round trip and icosphere") {
  const Mesh sphere = make_icosphere(10.0, 3, Eigen::Vector3d(1, 2, 3));
  CHECK(sphere.num_vertices() == 642);
  CHECK(is_watertight(sphere.faces));
  CHECK(signed_volume(sphere) > 0.0);
  for (int i = 0; i < sphere.num_vertices(); ++i) CHECK((sphere.vertex(i) - Eigen::Vector3d(1, 2, 3)).norm() == doctest::Approx(10.0));
  const auto path = std::filesystem::temp_directory_path() / "handfit_test_sphere.obj";
  save_obj(path, sphere);
  const Mesh back = load_obj(path);
  CHECK(back.faces == sphere.faces);
  CHECK((back.vertices - sphere.vertices).cwiseAbs().maxCoeff() == 0.0);
  std::filesystem::remove(path);

  Mesh open = sphere;
  open.faces.conservativeResize(open.num_faces() - 1, Eigen::NoChange);
  CHECK_FALSE(is_watertight(open.faces));
  try {
    require_watertight(open);
    FAIL("expected NonWatertightError");
  } catch (const NonWatertightError& e) {
    CHECK(e.boundary_edges().size() == 3);
  }
}

TEST_CASE("user-supplied MANO model: gap is positive on articulated poses") {
  const char* path = std::getenv("HANDFIT_MANO_MODEL");
  if (path == nullptr || *path == '\0') {
    MESSAGE("HANDFIT_MANO_MODEL not set; skipping");
    return;
  }
  const HandModel m = load_model(std::filesystem::path(path));
  CHECK(m.num_vertices() == 778);
  const Shape s = Shape::zero(m.num_shape_dims());
  CHECK(rest_pose_gap(m, s, Pose::identity()).mean < 1e-9);
  std::mt19937_64 rng(1);
  for (int i = 0; i < 10; ++i) CHECK(rest_pose_gap(m, s, sample_pose(m, s, PoseSamplingSpec{}, rng)).mean > 0.0);
}
