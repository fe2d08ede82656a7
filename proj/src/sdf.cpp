#include "handfit/sdf.hpp"

#include <algorithm>
#include <cmath>

#include "handfit/errors.hpp"
#include "handfit/mesh_distance.hpp"
#include "handfit/parallel.hpp"

namespace handfit {

namespace {

struct Point2 {
  double u, v;
};

// Sign of the 2D edge function of (a, b) at p, with p nudged by (eps, eps^2)
// so that points on an edge or vertex fall on exactly one side. The edge is
// evaluated in a canonical endpoint order so both triangles sharing it see
// exactly opposite signs.
int edge_sign(Point2 a, Point2 b, Point2 p) {
  bool swapped = false;
  if (b.u < a.u || (b.u == a.u && b.v < a.v)) {
    std::swap(a, b);
    swapped = true;
  }
  const double w = (b.u - a.u) * (p.v - a.v) - (b.v - a.v) * (p.u - a.u);
  int s = 0;
  if (w > 0.0) {
    s = 1;
  } else if (w < 0.0) {
    s = -1;
  } else if (b.v != a.v) {
    s = (b.v - a.v) > 0.0 ? -1 : 1;
  } else if (b.u != a.u) {
    s = (b.u - a.u) > 0.0 ? 1 : -1;
  }
  return swapped ? -s : s;
}

double edge_value(Point2 a, Point2 b, Point2 p) {
  return (b.u - a.u) * (p.v - a.v) - (b.v - a.v) * (p.u - a.u);
}

// Coordinate along `axis` where the line through p (in the other two axes)
// crosses triangle `face`, if it does.
std::optional<double> crossing(const Mesh& mesh, int face, int axis, Point2 p) {
  const int ua = (axis + 1) % 3, va = (axis + 2) % 3;
  Point2 t[3];
  double h[3];
  for (int k = 0; k < 3; ++k) {
    const auto v = mesh.vertices.row(mesh.faces(face, k));
    t[k] = {v(ua), v(va)};
    h[k] = v(axis);
  }
  const double area = edge_value(t[0], t[1], t[2]);
  if (area == 0.0) return std::nullopt;
  const int s0 = edge_sign(t[1], t[2], p);
  const int s1 = edge_sign(t[2], t[0], p);
  const int s2 = edge_sign(t[0], t[1], p);
  if (s0 == 0 || s0 != s1 || s1 != s2) return std::nullopt;
  const double w0 = edge_value(t[1], t[2], p) / area;
  const double w1 = edge_value(t[2], t[0], p) / area;
  return w0 * h[0] + w1 * h[1] + (1.0 - w0 - w1) * h[2];
}

bool odd_above(const std::vector<double>& sorted, double x) {
  const auto above = sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), x);
  return (above % 2) == 1;
}

}  // namespace

std::optional<double> VoxelSdf::interpolate(const Eigen::Vector3d& p) const {
  const Eigen::Vector3d u = (p - origin) / cell_size - Eigen::Vector3d::Constant(0.5);
  const double hi = resolution - 1;
  if (!u.allFinite() || (u.array() < 0.0).any() || (u.array() > hi).any()) return std::nullopt;
  int i[3];
  double t[3];
  for (int a = 0; a < 3; ++a) {
    i[a] = std::min(static_cast<int>(std::floor(u(a))), resolution - 2);
    t[a] = u(a) - i[a];
  }
  double result = 0.0;
  for (int c = 0; c < 8; ++c) {
    const int dx = c & 1, dy = (c >> 1) & 1, dz = (c >> 2) & 1;
    const double w = (dx ? t[0] : 1.0 - t[0]) * (dy ? t[1] : 1.0 - t[1]) * (dz ? t[2] : 1.0 - t[2]);
    result += w * at(i[0] + dx, i[1] + dy, i[2] + dz);
  }
  return result;
}

bool inside_by_parity(const Mesh& mesh, const Eigen::Vector3d& p) {
  int votes = 0;
  for (int axis = 0; axis < 3; ++axis) {
    const Point2 q{p((axis + 1) % 3), p((axis + 2) % 3)};
    int count = 0;
    for (int f = 0; f < mesh.num_faces(); ++f) {
      const auto c = crossing(mesh, f, axis, q);
      if (c && *c > p(axis)) ++count;
    }
    votes += count % 2;
  }
  return votes >= 2;
}

VoxelSdf voxelize_sdf(const Mesh& mesh, int resolution, int padding) {
  if (padding < 1) throw InputError("voxelize_sdf: padding must be at least one cell");
  if (resolution < 2 * padding + 2) throw InputError("voxelize_sdf: resolution too small for padding");
  require_watertight(mesh);

  const Eigen::Vector3d lo = mesh.vertices.colwise().minCoeff().transpose();
  const Eigen::Vector3d hi = mesh.vertices.colwise().maxCoeff().transpose();
  const double extent = (hi - lo).maxCoeff();
  if (!(extent > 0.0) || !std::isfinite(extent)) throw InputError("voxelize_sdf: degenerate mesh extent");

  VoxelSdf sdf;
  sdf.resolution = resolution;
  sdf.cell_size = extent / (resolution - 2 * padding);
  sdf.origin = 0.5 * (lo + hi) - Eigen::Vector3d::Constant(0.5 * resolution * sdf.cell_size);
  const auto n = static_cast<std::size_t>(resolution);
  sdf.values.assign(n * n * n, 0.0);

  // Inside votes per cell, one scanline family per axis. Each triangle is
  // binned to the lines its projected bounding box covers.
  std::vector<int> votes(sdf.values.size(), 0);
  for (int axis = 0; axis < 3; ++axis) {
    const int ua = (axis + 1) % 3, va = (axis + 2) % 3;
    std::vector<std::vector<double>> lines(n * n);
    for (int f = 0; f < mesh.num_faces(); ++f) {
      double umin = INFINITY, umax = -INFINITY, vmin = INFINITY, vmax = -INFINITY;
      for (int k = 0; k < 3; ++k) {
        const auto v = mesh.vertices.row(mesh.faces(f, k));
        umin = std::min(umin, v(ua));
        umax = std::max(umax, v(ua));
        vmin = std::min(vmin, v(va));
        vmax = std::max(vmax, v(va));
      }
      auto first = [&](double x, int a) {
        return std::max(0, static_cast<int>(std::floor((x - sdf.origin(a)) / sdf.cell_size - 0.5)));
      };
      auto last = [&](double x, int a) {
        return std::min(resolution - 1,
                        static_cast<int>(std::ceil((x - sdf.origin(a)) / sdf.cell_size - 0.5)));
      };
      for (int iv = first(vmin, va); iv <= last(vmax, va); ++iv) {
        for (int iu = first(umin, ua); iu <= last(umax, ua); ++iu) {
          const Point2 q{sdf.origin(ua) + (iu + 0.5) * sdf.cell_size,
                         sdf.origin(va) + (iv + 0.5) * sdf.cell_size};
          if (const auto c = crossing(mesh, f, axis, q)) {
            lines[static_cast<std::size_t>(iu + resolution * iv)].push_back(*c);
          }
        }
      }
    }
    for (auto& line : lines) std::sort(line.begin(), line.end());

    for (int iv = 0; iv < resolution; ++iv) {
      for (int iu = 0; iu < resolution; ++iu) {
        const auto& line = lines[static_cast<std::size_t>(iu + resolution * iv)];
        if (line.empty()) continue;
        for (int ia = 0; ia < resolution; ++ia) {
          int idx[3];
          idx[axis] = ia;
          idx[ua] = iu;
          idx[va] = iv;
          const double x = sdf.origin(axis) + (ia + 0.5) * sdf.cell_size;
          if (odd_above(line, x)) {
            ++votes[static_cast<std::size_t>(idx[0] + resolution * (idx[1] + resolution * idx[2]))];
          }
        }
      }
    }
  }

  const MeshDistanceQuery query(mesh);
  parallel_for(resolution, [&](int k) {
    for (int j = 0; j < resolution; ++j) {
      for (int i = 0; i < resolution; ++i) {
        const auto idx = static_cast<std::size_t>(i + resolution * (j + resolution * k));
        const double d = query.distance(sdf.cell_center(i, j, k));
        sdf.values[idx] = votes[idx] >= 2 ? -d : d;
      }
    }
  });
  return sdf;
}

double phi(const VoxelSdf& sdf, const Eigen::Vector3d& p) {
  const auto value = sdf.interpolate(p);
  if (!value) return 0.0;
  return -std::min(*value, 0.0);
}

std::vector<Section> sdf_sections(const VoxelSdf& sdf) {
  Section grid{"sdf_grid", 1, 5,
               std::vector<double>{static_cast<double>(sdf.resolution), sdf.origin.x(), sdf.origin.y(),
                                   sdf.origin.z(), sdf.cell_size}};
  Section values{"sdf_values", static_cast<std::int64_t>(sdf.values.size()), 1, sdf.values};
  return {grid, values};
}

VoxelSdf sdf_from_sections(const SectionMap& sections) {
  const auto grid = sections.find("sdf_grid");
  if (grid == sections.end()) throw ParseError("sdf_grid", "missing section");
  const auto values = sections.find("sdf_values");
  if (values == sections.end()) throw ParseError("sdf_values", "missing section");
  if (!grid->second.is_f64() || grid->second.rows != 1 || grid->second.cols != 5) {
    throw ParseError("sdf_grid", "expected 1 x 5 f64");
  }
  const auto& g = grid->second.f64();
  VoxelSdf sdf;
  sdf.resolution = static_cast<int>(g[0]);
  sdf.origin = Eigen::Vector3d(g[1], g[2], g[3]);
  sdf.cell_size = g[4];
  if (sdf.resolution < 2 || static_cast<double>(sdf.resolution) != g[0] || !(sdf.cell_size > 0.0)) {
    throw ParseError("sdf_grid", "invalid resolution or cell size");
  }
  const auto n = static_cast<std::size_t>(sdf.resolution);
  if (!values->second.is_f64() || values->second.f64().size() != n * n * n) {
    throw ParseError("sdf_values", "expected resolution^3 f64 values");
  }
  sdf.values = values->second.f64();
  return sdf;
}

void save_sdf(const std::filesystem::path& path, const VoxelSdf& sdf) {
  write_container(path, sdf_sections(sdf));
}

VoxelSdf load_sdf(const std::filesystem::path& path) { return sdf_from_sections(read_container(path)); }

}  // namespace handfit
