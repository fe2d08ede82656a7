#include "handfit/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "handfit/errors.hpp"

namespace handfit {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kBlocks = 5;

// Blocks run thumb, index, middle, ring, pinky from -x to +x.
constexpr double kBlockPitch = 17.0;
constexpr double kPalmLength = 85.0;
constexpr double kPalmHalfThickness = 12.0;
constexpr double kWristDrop = 6.0;
constexpr double kSkinSigma = 6.0;
constexpr double kWeightCutoff = 1e-3;

struct FingerGeometry {
  double radius;
  double tilt;  // rotation about +z; positive leans toward -x
  std::array<double, 3> lengths;
  std::array<int, 3> joints;
};

constexpr std::array<FingerGeometry, kBlocks> kFingers = {{
    {8.5, 0.70, {38.0, 30.0, 26.0}, {13, 14, 15}},
    {7.5, 0.10, {42.0, 26.0, 22.0}, {1, 2, 3}},
    {7.8, 0.00, {46.0, 29.0, 24.0}, {4, 5, 6}},
    {7.3, -0.08, {43.0, 27.0, 23.0}, {10, 11, 12}},
    {6.5, -0.18, {34.0, 21.0, 19.0}, {7, 8, 9}},
}};

double block_centre(int k) { return (k - 2) * kBlockPitch; }

double segment_distance(const Eigen::Vector3d& p, const Eigen::Vector3d& a,
                        const Eigen::Vector3d& b) {
  const Eigen::Vector3d ab = b - a;
  const double t = std::clamp((p - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

class HandBuilder {
 public:
  explicit HandBuilder(const SyntheticLayout& layout) : layout_(layout) {}

  int add(const Eigen::Vector3d& p) {
    verts_.push_back(p);
    return static_cast<int>(verts_.size()) - 1;
  }

  // Band between two rings of equal size; `lower` precedes `upper` along the tube axis.
  void band(const std::vector<int>& lower, const std::vector<int>& upper) {
    const std::size_t n = lower.size();
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t j = (i + 1) % n;
      faces_.push_back({lower[i], lower[j], upper[j]});
      faces_.push_back({lower[i], upper[j], upper[i]});
    }
  }

  void cap(const std::vector<int>& ring, int pole, bool pole_above) {
    const std::size_t n = ring.size();
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t j = (i + 1) % n;
      if (pole_above) {
        faces_.push_back({ring[i], ring[j], pole});
      } else {
        faces_.push_back({ring[j], ring[i], pole});
      }
    }
  }

  void triangle(int a, int b, int c) { faces_.push_back({a, b, c}); }

  const std::vector<Eigen::Vector3d>& vertices() const { return verts_; }
  const std::vector<std::array<int, 3>>& faces() const { return faces_; }
  const SyntheticLayout& layout() const { return layout_; }

 private:
  SyntheticLayout layout_;
  std::vector<Eigen::Vector3d> verts_;
  std::vector<std::array<int, 3>> faces_;
};

struct BuiltHand {
  Mesh mesh;
  std::vector<std::vector<int>> palm_rings;       // bottom to top
  int wrist_pole = -1;
  std::array<std::vector<std::vector<int>>, kBlocks> finger_rings;  // ring 0 = junction
  std::array<int, kBlocks> tip_poles{};
  std::array<std::array<Eigen::Vector3d, 4>, kBlocks> chain{};  // MCP, PIP, DIP, tip
};

BuiltHand build_surface(const SyntheticLayout& layout) {
  const int m = layout.ring_half;
  const int n = kBlocks * m;  // vertices per palm side
  HandBuilder b(layout);
  BuiltHand hand;

  // Ring angle j within a block: x offset -cos, |z| factor sin.
  auto block_angle = [m](int j) { return (j + 0.5) * kPi / m; };

  // Palm loop: front (z > 0) left to right, then back right to left.
  auto palm_point = [&](int loop, double y, double s) {
    const bool front = loop < n;
    const int g = front ? loop : 2 * n - 1 - loop;
    const int k = g / m;
    const double a = block_angle(g % m);
    const double x = (block_centre(k) - kFingers[static_cast<std::size_t>(k)].radius * std::cos(a)) *
                     (0.8 + 0.2 * s);
    const double z = kPalmHalfThickness * ((1.0 - s) + s * std::sin(a));
    return Eigen::Vector3d(x, y, front ? z : -z);
  };

  for (int p = 0; p < layout.palm_rings; ++p) {
    const double s = static_cast<double>(p) / (layout.palm_rings - 1);
    std::vector<int> ring;
    for (int l = 0; l < 2 * n; ++l) ring.push_back(b.add(palm_point(l, kPalmLength * s, s)));
    hand.palm_rings.push_back(std::move(ring));
  }
  hand.wrist_pole = b.add(Eigen::Vector3d(0.0, -kWristDrop, 0.0));
  b.cap(hand.palm_rings.front(), hand.wrist_pole, false);
  for (int p = 0; p + 1 < layout.palm_rings; ++p) {
    b.band(hand.palm_rings[static_cast<std::size_t>(p)], hand.palm_rings[static_cast<std::size_t>(p + 1)]);
  }
  const std::vector<int>& top = hand.palm_rings.back();

  const int q = layout.rings_per_phalanx;
  for (int k = 0; k < kBlocks; ++k) {
    const FingerGeometry& fg = kFingers[static_cast<std::size_t>(k)];
    const Eigen::Vector3d dir(-std::sin(fg.tilt), std::cos(fg.tilt), 0.0);
    const Eigen::Vector3d normal = Eigen::Vector3d::UnitZ();
    const Eigen::Vector3d lateral = dir.cross(normal);

    auto& chain = hand.chain[static_cast<std::size_t>(k)];
    chain[0] = Eigen::Vector3d(block_centre(k), kPalmLength, 0.0);
    for (int s = 0; s < 3; ++s) {
      chain[static_cast<std::size_t>(s + 1)] = chain[static_cast<std::size_t>(s)] + fg.lengths[static_cast<std::size_t>(s)] * dir;
    }
    const double total = fg.lengths[0] + fg.lengths[1] + fg.lengths[2];

    auto& rings = hand.finger_rings[static_cast<std::size_t>(k)];
    std::vector<int> junction;
    for (int i = 0; i < 2 * m; ++i) {
      const int loop = i < m ? k * m + i : 2 * n - (k + 1) * m + (i - m);
      junction.push_back(top[static_cast<std::size_t>(loop)]);
    }
    rings.push_back(junction);

    double travelled = 0.0;
    for (int s = 0; s < 3; ++s) {
      const double len = fg.lengths[static_cast<std::size_t>(s)];
      const double span = s < 2 ? len : len - 0.8 * fg.radius;
      for (int r = 1; r <= q; ++r) {
        const double along = travelled + span * r / q;
        const Eigen::Vector3d centre = chain[0] + along * dir;
        const double rho = fg.radius * (1.0 - 0.15 * along / total);
        std::vector<int> ring;
        for (int i = 0; i < 2 * m; ++i) {
          const double a = i < m ? kPi - block_angle(i) : -block_angle(i - m);
          ring.push_back(b.add(centre + rho * (std::cos(a) * lateral + std::sin(a) * normal)));
        }
        b.band(rings.back(), ring);
        rings.push_back(std::move(ring));
      }
      travelled += len;
    }
    const int pole = b.add(chain[3]);
    hand.tip_poles[static_cast<std::size_t>(k)] = pole;
    b.cap(rings.back(), pole, true);
  }

  // Webs between neighbouring finger openings on the palm top.
  for (int k = 0; k + 1 < kBlocks; ++k) {
    const int f0 = top[static_cast<std::size_t>(k * m + m - 1)];
    const int f1 = top[static_cast<std::size_t>((k + 1) * m)];
    const int b0 = top[static_cast<std::size_t>(2 * n - 1 - (k * m + m - 1))];
    const int b1 = top[static_cast<std::size_t>(2 * n - 1 - (k + 1) * m)];
    b.triangle(f0, b1, b0);
    b.triangle(f0, f1, b1);
  }

  const auto& verts = b.vertices();
  const auto& faces = b.faces();
  hand.mesh.vertices.resize(static_cast<Eigen::Index>(verts.size()), 3);
  for (std::size_t i = 0; i < verts.size(); ++i) {
    hand.mesh.vertices.row(static_cast<Eigen::Index>(i)) = verts[i].transpose();
  }
  hand.mesh.faces.resize(static_cast<Eigen::Index>(faces.size()), 3);
  for (std::size_t i = 0; i < faces.size(); ++i) {
    for (int c = 0; c < 3; ++c) hand.mesh.faces(static_cast<Eigen::Index>(i), c) = faces[i][static_cast<std::size_t>(c)];
  }
  return hand;
}

RowMatrix skinning_weights(const BuiltHand& hand) {
  const Points& v = hand.mesh.vertices;
  const double half_width = 0.5 * kBlocks * kBlockPitch;
  RowMatrix w(v.rows(), kNumJoints);
  std::vector<double> dist(kNumJoints);
  for (Eigen::Index i = 0; i < v.rows(); ++i) {
    const Eigen::Vector3d p = v.row(i).transpose();
    // Root drives the palm slab x in [-hw, hw], y in [0, palm length], z = 0.
    const Eigen::Vector3d nearest(std::clamp(p.x(), -half_width, half_width),
                                  std::clamp(p.y(), 0.0, kPalmLength), 0.0);
    dist[0] = (p - nearest).norm();
    for (int k = 0; k < kBlocks; ++k) {
      const auto& chain = hand.chain[static_cast<std::size_t>(k)];
      for (int s = 0; s < 3; ++s) {
        dist[static_cast<std::size_t>(kFingers[static_cast<std::size_t>(k)].joints[static_cast<std::size_t>(s)])] =
            segment_distance(p, chain[static_cast<std::size_t>(s)], chain[static_cast<std::size_t>(s + 1)]);
      }
    }
    const double dmin = *std::min_element(dist.begin(), dist.end());
    double sum = 0.0;
    for (int j = 0; j < kNumJoints; ++j) {
      const double d = dist[static_cast<std::size_t>(j)];
      const double wj = std::exp(-(d * d - dmin * dmin) / (2.0 * kSkinSigma * kSkinSigma));
      w(i, j) = wj;
      sum += wj;
    }
    w.row(i) /= sum;
    for (int j = 0; j < kNumJoints; ++j) {
      if (w(i, j) < kWeightCutoff) w(i, j) = 0.0;
    }
    w.row(i) /= w.row(i).sum();
  }
  return w;
}

RowMatrix joint_regressor(const BuiltHand& hand, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> jitter(-0.3, 0.3);
  RowMatrix reg = RowMatrix::Zero(kNumRegressedJoints, hand.mesh.num_vertices());

  auto spread = [&](int row, const std::vector<int>& ids, double share) {
    for (int id : ids) reg(row, id) += share / static_cast<double>(ids.size()) * (1.0 + jitter(rng));
  };

  const auto& palm = hand.palm_rings;
  spread(0, palm[0], 0.5);
  spread(0, palm[1], 0.3);
  spread(0, {hand.wrist_pole}, 0.2);

  const int q = hand.finger_rings[0].size() > 1 ? static_cast<int>(hand.finger_rings[0].size() - 1) / 3 : 1;
  for (int k = 0; k < kBlocks; ++k) {
    const auto& rings = hand.finger_rings[static_cast<std::size_t>(k)];
    const auto& joints = kFingers[static_cast<std::size_t>(k)].joints;
    for (int s = 0; s < 3; ++s) {
      const int row = joints[static_cast<std::size_t>(s)];
      const std::size_t at = static_cast<std::size_t>(s * q);
      spread(row, rings[at], 0.5);
      spread(row, at == 0 ? palm[palm.size() - 2] : rings[at - 1], 0.25);
      spread(row, rings[at + 1], 0.25);
    }
    reg(kNumJoints + k, hand.tip_poles[static_cast<std::size_t>(k)]) = 1.0;
  }
  for (Eigen::Index r = 0; r < reg.rows(); ++r) reg.row(r) /= reg.row(r).sum();
  return reg;
}

RowMatrix shape_bases(const Mesh& mesh, int dims, std::mt19937_64& rng) {
  const Eigen::Index n = mesh.num_vertices();
  RowMatrix bases(dims, 3 * n);
  if (dims == 0) return bases;

  std::vector<std::vector<int>> neighbours(static_cast<std::size_t>(n));
  for (const Edge& e : unique_edges(mesh.faces)) {
    neighbours[static_cast<std::size_t>(e[0])].push_back(e[1]);
    neighbours[static_cast<std::size_t>(e[1])].push_back(e[0]);
  }

  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int k = 0; k < dims; ++k) {
    Points field(n, 3);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (int c = 0; c < 3; ++c) field(i, c) = gauss(rng);
    }
    for (int it = 0; it < 12; ++it) {
      Points next(n, 3);
      for (Eigen::Index i = 0; i < n; ++i) {
        Eigen::RowVector3d acc = field.row(i);
        for (int nb : neighbours[static_cast<std::size_t>(i)]) acc += field.row(nb);
        next.row(i) = acc / static_cast<double>(neighbours[static_cast<std::size_t>(i)].size() + 1);
      }
      field = std::move(next);
    }
    bases.row(k) = Eigen::Map<const Eigen::RowVectorXd>(field.data(), 3 * n);
  }
  // Modified Gram-Schmidt, then 1 mm RMS per vertex.
  for (int k = 0; k < dims; ++k) {
    for (int j = 0; j < k; ++j) bases.row(k) -= bases.row(k).dot(bases.row(j)) * bases.row(j);
    const double norm = bases.row(k).norm();
    if (norm < 1e-12) throw InputError("too many shape dimensions for this mesh");
    bases.row(k) /= norm;
  }
  return bases * std::sqrt(static_cast<double>(n));
}

}  // namespace

int SyntheticLayout::vertex_count() const {
  return 6 + 10 * ring_half * palm_rings + 30 * ring_half * rings_per_phalanx;
}

SyntheticLayout choose_layout(int n_vertices) {
  if (n_vertices < 100) {
    throw InputError("synthetic model needs at least 100 vertices, got " + std::to_string(n_vertices));
  }
  SyntheticLayout layout;
  layout.ring_half = std::clamp(static_cast<int>(std::lround(std::sqrt(n_vertices / 50.0))), 2, 8);
  const int per_ring_unit = 10 * layout.ring_half;
  // vertex_count = 6 + per_ring_unit * (palm_rings + 3 * rings_per_phalanx)
  const int units = std::max(5, static_cast<int>(std::lround((n_vertices - 6) / static_cast<double>(per_ring_unit))));
  layout.rings_per_phalanx = std::max(1, static_cast<int>(std::lround(units / 4.2)));
  while (units - 3 * layout.rings_per_phalanx < 2) --layout.rings_per_phalanx;
  layout.palm_rings = units - 3 * layout.rings_per_phalanx;
  return layout;
}

HandModel generate_synthetic_model(std::uint64_t seed, int n_vertices, int n_shape_dims) {
  const SyntheticLayout layout = choose_layout(n_vertices);
  if (n_shape_dims < 0) throw InputError("shape dimension count must be non-negative");
  std::mt19937_64 rng(seed);

  const BuiltHand hand = build_surface(layout);
  HandModel model;
  model.template_vertices = hand.mesh.vertices;
  model.faces = hand.mesh.faces;
  model.parents.assign(kManoParents.begin(), kManoParents.end());
  model.tip_parents = kManoTipParents;
  model.skinning_weights = skinning_weights(hand);
  model.joint_regressor = joint_regressor(hand, rng);
  model.shape_blendshapes = shape_bases(hand.mesh, n_shape_dims, rng);
  validate(model);
  return model;
}

}  // namespace handfit
