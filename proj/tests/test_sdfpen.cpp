#include <atomic>
#include <filesystem>
#include <random>

#include "doctest.h"
#include "oracles.hpp"

#include "handfit/errors.hpp"
#include "handfit/mesh_distance.hpp"
#include "handfit/parallel.hpp"
#include "handfit/penetration.hpp"
#include "handfit/sdf.hpp"
#include "handfit/synthetic.hpp"

using namespace handfit;

namespace {

const Mesh& hand_mesh() {
  static const Mesh mesh = [] {
    const HandModel m = generate_synthetic_model(7);
    return Mesh{m.template_vertices, m.faces};
  }();
  return mesh;
}

double min_vertex_radius(const Mesh& m, const Eigen::Vector3d& c) {
  return (m.vertices.rowwise() - c.transpose()).rowwise().norm().minCoeff();
}

}  // namespace

TEST_CASE("point-triangle distance by region") {
  const Eigen::Vector3d a(0, 0, 0), b(4, 0, 0), c(0, 4, 0);
  CHECK(point_triangle_distance({1, 1, 3}, a, b, c) == doctest::Approx(3.0));   // face
  CHECK(point_triangle_distance({-3, -4, 0}, a, b, c) == doctest::Approx(5.0));  // vertex a
  CHECK(point_triangle_distance({2, -2, 0}, a, b, c) == doctest::Approx(2.0));   // edge ab
  CHECK(point_triangle_distance({3, 3, 0}, a, b, c) == doctest::Approx(std::sqrt(2.0)));  // edge bc
  CHECK(point_triangle_distance({1, 1, 0}, a, b, c) == 0.0);
}

TEST_CASE("point-triangle distance matches the projection oracle") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g(0.0, 3.0);
  auto v = [&] { return Eigen::Vector3d(g(rng), g(rng), g(rng)); };
  for (int i = 0; i < 2000; ++i) {
    const Eigen::Vector3d a = v(), b = v(), c = v(), p = v();
    if ((b - a).cross(c - a).norm() < 1e-3) continue;
    CHECK(point_triangle_distance(p, a, b, c) == doctest::Approx(oracle::triangle_distance(p, a, b, c)).epsilon(1e-9));
  }
}

TEST_CASE("BVH query matches brute force") {
  const Mesh& mesh = hand_mesh();
  const MeshDistanceQuery query(mesh);
  std::mt19937_64 rng(6);
  std::normal_distribution<double> g(0.0, 60.0);
  for (int i = 0; i < 300; ++i) {
    const Eigen::Vector3d p(g(rng), g(rng) + 60.0, g(rng) * 0.3);
    CHECK(std::abs(query.distance(p) - point_mesh_distance(p, mesh)) <= 1e-9);
  }
  for (int i = 0; i < mesh.num_vertices(); i += 37) CHECK(query.distance(mesh.vertex(i)) == 0.0);
  CHECK_THROWS_AS(point_mesh_distance(Eigen::Vector3d::Zero(), Mesh{}), InputError);
}

TEST_CASE("sphere SDF against the analytic sphere") {
  const double r = 20.0;
  const Eigen::Vector3d c(5, -3, 2);
  const Mesh sphere = make_icosphere(r, 3, c);
  const VoxelSdf sdf = voxelize_sdf(sphere, 32);
  CHECK(sdf.resolution == 32);
  CHECK(sdf.cell_size == doctest::Approx(2 * r / 30).epsilon(1e-6));
  const double center_value = *sdf.interpolate(c);
  CHECK(std::abs(center_value + r) <= 1.5 * sdf.cell_size);
  CHECK(std::abs(phi(sdf, c) - r) <= 1.5 * sdf.cell_size);
  CHECK(std::abs(phi(sdf, sphere.vertex(0))) <= sdf.cell_size);
  CHECK(phi(sdf, c + Eigen::Vector3d(500, 0, 0)) == 0.0);

  const double diagonal = std::sqrt(3.0) * sdf.cell_size;
  int inside = 0;
  for (int k = 0; k < 32; ++k) {
    for (int j = 0; j < 32; ++j) {
      for (int i = 0; i < 32; ++i) {
        const Eigen::Vector3d p = sdf.cell_center(i, j, k);
        const double value = sdf.at(i, j, k);
        const double analytic = (p - c).norm() - r;
        // Sign agrees with the analytic sphere away from the tessellation band.
        if (std::abs(analytic) > 0.5) CHECK((value < 0) == (analytic < 0));
        if (std::abs(analytic) < 0.5 * sdf.cell_size) CHECK(std::abs(value) <= diagonal);
        inside += value < 0;
      }
    }
  }
  CHECK(inside > 0);
}

TEST_CASE("voxelization is translation equivariant") {
  const Mesh& hand = hand_mesh();
  const Eigen::Vector3d t(12.5, -7.25, 3.0);
  const VoxelSdf a = voxelize_sdf(hand, 24);
  const VoxelSdf b = voxelize_sdf(translated(hand, t), 24);
  CHECK((b.origin - a.origin - t).norm() < 1e-9);
  double worst = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) worst = std::max(worst, std::abs(a.values[i] - b.values[i]));
  CHECK(worst < 1e-9);
}

TEST_CASE("parity inside test") {
  const Mesh sphere = make_icosphere(10.0, 2);
  CHECK(inside_by_parity(sphere, Eigen::Vector3d::Zero()));
  CHECK(inside_by_parity(sphere, Eigen::Vector3d(5, 5, 0)));
  CHECK_FALSE(inside_by_parity(sphere, Eigen::Vector3d(11, 0, 0)));
  // Rays through vertices and edges: cell-aligned axis points on the pole.
  CHECK(inside_by_parity(sphere, Eigen::Vector3d(0, 0, 3)));
  const Mesh& hand = hand_mesh();
  const VoxelSdf sdf = voxelize_sdf(hand, 20);
  for (int k = 0; k < 20; k += 3) {
    for (int j = 0; j < 20; j += 3) {
      for (int i = 0; i < 20; i += 3) CHECK((sdf.at(i, j, k) < 0) == inside_by_parity(hand, sdf.cell_center(i, j, k)));
    }
  }
}

TEST_CASE("voxelization rejects bad input") {
  Mesh open = make_icosphere(5.0, 1);
  open.faces.conservativeResize(open.num_faces() - 2, Eigen::NoChange);
  CHECK_THROWS_AS(voxelize_sdf(open), NonWatertightError);
  CHECK_THROWS_AS(voxelize_sdf(make_icosphere(5.0, 1), 32, 0), InputError);
  CHECK_THROWS_AS(voxelize_sdf(make_icosphere(5.0, 1), 3, 1), InputError);
}

TEST_CASE("SDF dump round trip") {
  const VoxelSdf sdf = voxelize_sdf(make_icosphere(5.0, 2), 12);
  const auto path = std::filesystem::temp_directory_path() / "handfit_test_sdf.hfc";
  save_sdf(path, sdf);
  const VoxelSdf back = load_sdf(path);
  std::filesystem::remove(path);
  CHECK(back.resolution == sdf.resolution);
  CHECK(back.origin == sdf.origin);
  CHECK(back.cell_size == sdf.cell_size);
  CHECK(back.values == sdf.values);
}

TEST_CASE("disjoint meshes do not penetrate") {
  const Mesh a = make_icosphere(10.0, 3);
  const Mesh b = make_icosphere(10.0, 3, Eigen::Vector3d(30, 0, 0));
  const PenetrationPair pair = penetration(a, b);
  CHECK(pair.a_into_b.indices.empty());
  CHECK(pair.b_into_a.indices.empty());
  CHECK(pair.a_into_b.a_pd == 0.0);
  CHECK(pair.a_into_b.m_pd == 0.0);
  CHECK(loss_pene(a, b) == 0.0);
}

TEST_CASE("contained sphere depth matches the analytic gap") {
  const double big = 30.0, small = 10.0;
  const Mesh outer = make_icosphere(big, 3);
  const Mesh inner = make_icosphere(small, 3);
  const PenetrationPair pair = penetration(inner, outer);
  const double cell = voxelize_sdf(outer).cell_size;
  CHECK(static_cast<int>(pair.a_into_b.indices.size()) == inner.num_vertices());
  CHECK(pair.b_into_a.indices.empty());
  CHECK(std::abs(pair.a_into_b.m_pd - (big - small)) <= 2 * cell);
  CHECK(pair.a_into_b.m_pd >= pair.a_into_b.a_pd);
  CHECK(pair.a_into_b.a_pd_all == doctest::Approx(pair.a_into_b.a_pd));
}

TEST_CASE("overlapping copies give symmetric reports") {
  const Mesh a = make_icosphere(15.0, 3);
  const Mesh b = translated(mirror_x(a), Eigen::Vector3d(12, 0, 0));
  const Mesh a_shift = translated(a, Eigen::Vector3d(0, 0, 0));
  const PenetrationPair pair = penetration(a_shift, b);
  REQUIRE_FALSE(pair.a_into_b.indices.empty());
  CHECK(pair.a_into_b.indices.size() == pair.b_into_a.indices.size());
  std::vector<double> da = pair.a_into_b.depths, db = pair.b_into_a.depths;
  std::sort(da.begin(), da.end());
  std::sort(db.begin(), db.end());
  for (std::size_t i = 0; i < da.size(); ++i) CHECK(da[i] == doctest::Approx(db[i]).epsilon(1e-6));
  CHECK(loss_pene(a_shift, b) == doctest::Approx(loss_pene(b, a_shift)));
  CHECK(loss_pene(pair) == doctest::Approx(pair.a_into_b.a_pd + pair.b_into_a.a_pd));
}

TEST_CASE("depths shrink as spheres separate") {
  const Mesh a = make_icosphere(15.0, 3);
  double previous = INFINITY;
  const double cell = voxelize_sdf(a).cell_size;
  for (double d = 10.0; d <= 32.0; d += 2.0) {
    const PenetrationPair pair = penetration(a, make_icosphere(15.0, 3, Eigen::Vector3d(d, 0, 0)));
    const double m = std::max(pair.a_into_b.m_pd, pair.b_into_a.m_pd);
    CHECK(m <= previous + 2 * cell);
    previous = m;
    CHECK((loss_pene(pair) == 0.0) == (pair.a_into_b.indices.empty() && pair.b_into_a.indices.empty()));
  }
  CHECK(previous == 0.0);
}

TEST_CASE("doubling the resolution moves A-PD by less than a cell") {
  const Mesh outer = make_icosphere(30.0, 3);
  const Mesh inner = make_icosphere(12.0, 3, Eigen::Vector3d(22, 0, 0));
  const double cell = voxelize_sdf(outer, 32).cell_size;
  const double coarse = penetration(inner, outer, 32).a_into_b.a_pd;
  const double fine = penetration(inner, outer, 64).a_into_b.a_pd;
  CHECK(coarse > 0.0);
  CHECK(std::abs(coarse - fine) < cell);
}

TEST_CASE("combine pools two reports") {
  PenetrationReport a, b;
  a.num_vertices = 4;
  a.indices = {1};
  a.depths = {2.0};
  b.num_vertices = 6;
  b.indices = {0, 5};
  b.depths = {1.0, 6.0};
  const PenetrationReport c = combine(a, b);
  CHECK(c.indices == std::vector<int>{1, 4, 9});
  CHECK(c.a_pd == doctest::Approx(3.0));
  CHECK(c.m_pd == 6.0);
  CHECK(c.a_pd_all == doctest::Approx(0.9));
}

TEST_CASE("parallel_for visits every index once and rethrows") {
  std::vector<std::atomic<int>> hits(1000);
  parallel_for(1000, [&](int i) { hits[static_cast<std::size_t>(i)]++; });
  for (const auto& h : hits) CHECK(h.load() == 1);
  CHECK_THROWS_AS(parallel_for(10, [](int i) {
                    if (i == 7) throw InputError("boom");
                  }),
                  InputError);
}
