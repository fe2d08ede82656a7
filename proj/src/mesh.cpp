#include "handfit/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>

#include "handfit/errors.hpp"

namespace handfit {

namespace {

std::vector<Edge> all_edges(const Faces& faces) {
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(faces.rows()) * 3);
  for (Eigen::Index f = 0; f < faces.rows(); ++f) {
    for (int k = 0; k < 3; ++k) {
      int a = faces(f, k);
      int b = faces(f, (k + 1) % 3);
      if (a > b) std::swap(a, b);
      edges.push_back({a, b});
    }
  }
  std::sort(edges.begin(), edges.end());
  return edges;
}

}  // namespace

std::vector<Edge> unique_edges(const Faces& faces) {
  std::vector<Edge> edges = all_edges(faces);
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

std::vector<Edge> non_manifold_edges(const Faces& faces) {
  const std::vector<Edge> edges = all_edges(faces);
  std::vector<Edge> bad;
  for (std::size_t i = 0; i < edges.size();) {
    std::size_t j = i;
    while (j < edges.size() && edges[j] == edges[i]) ++j;
    if (j - i != 2) bad.push_back(edges[i]);
    i = j;
  }
  return bad;
}

bool is_watertight(const Faces& faces) {
  return faces.rows() > 0 && non_manifold_edges(faces).empty();
}

void require_watertight(const Mesh& mesh) {
  if (mesh.faces.rows() == 0) throw NonWatertightError({}, "mesh has no faces");
  std::vector<Edge> bad = non_manifold_edges(mesh.faces);
  if (bad.empty()) return;
  std::ostringstream msg;
  msg << "mesh is not watertight: " << bad.size() << " boundary or non-manifold edges";
  const std::size_t shown = std::min<std::size_t>(bad.size(), 8);
  msg << " [";
  for (std::size_t i = 0; i < shown; ++i) {
    msg << (i ? " " : "") << bad[i][0] << "-" << bad[i][1];
  }
  if (shown < bad.size()) msg << " ...";
  msg << "]";
  throw NonWatertightError(std::move(bad), msg.str());
}

double signed_volume(const Mesh& mesh) {
  double v = 0.0;
  for (int f = 0; f < mesh.num_faces(); ++f) {
    const Eigen::Vector3d a = mesh.vertex(mesh.faces(f, 0));
    const Eigen::Vector3d b = mesh.vertex(mesh.faces(f, 1));
    const Eigen::Vector3d c = mesh.vertex(mesh.faces(f, 2));
    v += a.dot(b.cross(c));
  }
  return v / 6.0;
}

Eigen::Vector3d face_normal(const Mesh& mesh, int face) {
  const Eigen::Vector3d a = mesh.vertex(mesh.faces(face, 0));
  const Eigen::Vector3d b = mesh.vertex(mesh.faces(face, 1));
  const Eigen::Vector3d c = mesh.vertex(mesh.faces(face, 2));
  return (b - a).cross(c - a);
}

Mesh make_icosphere(double radius, int subdivisions, const Eigen::Vector3d& center) {
  if (!(radius > 0.0) || subdivisions < 0) {
    throw InputError("icosphere: radius must be positive and subdivisions >= 0");
  }
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Eigen::Vector3d> verts = {
      {-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0},
      {0, -1, t}, {0, 1, t}, {0, -1, -t}, {0, 1, -t},
      {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  for (auto& v : verts) v.normalize();
  std::vector<std::array<int, 3>> tris = {
      {0, 11, 5}, {0, 5, 1}, {0, 1, 7}, {0, 7, 10}, {0, 10, 11},
      {1, 5, 9}, {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
      {3, 9, 4}, {3, 4, 2}, {3, 2, 6}, {3, 6, 8}, {3, 8, 9},
      {4, 9, 5}, {2, 4, 11}, {6, 2, 10}, {8, 6, 7}, {9, 8, 1}};

  for (int s = 0; s < subdivisions; ++s) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      verts.push_back((verts[a] + verts[b]).normalized());
      const int id = static_cast<int>(verts.size()) - 1;
      midpoint.emplace(key, id);
      return id;
    };
    std::vector<std::array<int, 3>> next;
    next.reserve(tris.size() * 4);
    for (const auto& [a, b, c] : tris) {
      const int ab = mid(a, b);
      const int bc = mid(b, c);
      const int ca = mid(c, a);
      next.push_back({a, ab, ca});
      next.push_back({b, bc, ab});
      next.push_back({c, ca, bc});
      next.push_back({ab, bc, ca});
    }
    tris = std::move(next);
  }

  Mesh mesh;
  mesh.vertices.resize(static_cast<Eigen::Index>(verts.size()), 3);
  for (std::size_t i = 0; i < verts.size(); ++i) {
    mesh.vertices.row(static_cast<Eigen::Index>(i)) = (center + radius * verts[i]).transpose();
  }
  mesh.faces.resize(static_cast<Eigen::Index>(tris.size()), 3);
  for (std::size_t i = 0; i < tris.size(); ++i) {
    for (int k = 0; k < 3; ++k) mesh.faces(static_cast<Eigen::Index>(i), k) = tris[i][k];
  }
  return mesh;
}

Mesh mirror_x(const Mesh& mesh) {
  Mesh out = mesh;
  out.vertices.col(0) = -out.vertices.col(0);
  out.faces.col(1).swap(out.faces.col(2));
  return out;
}

Mesh translated(const Mesh& mesh, const Eigen::Vector3d& offset) {
  Mesh out = mesh;
  out.vertices.rowwise() += offset.transpose();
  return out;
}

void write_obj(std::ostream& out, const Mesh& mesh) {
  out << std::setprecision(17);
  for (int i = 0; i < mesh.num_vertices(); ++i) {
    out << "v " << mesh.vertices(i, 0) << ' ' << mesh.vertices(i, 1) << ' '
        << mesh.vertices(i, 2) << '\n';
  }
  for (int f = 0; f < mesh.num_faces(); ++f) {
    out << "f " << mesh.faces(f, 0) + 1 << ' ' << mesh.faces(f, 1) + 1 << ' '
        << mesh.faces(f, 2) + 1 << '\n';
  }
}

void save_obj(const std::filesystem::path& path, const Mesh& mesh) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot open '" + path.string() + "' for writing");
  write_obj(out, mesh);
  if (!out) throw InputError("failed writing '" + path.string() + "'");
}

Mesh load_obj(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  std::vector<Eigen::Vector3d> verts;
  std::vector<std::array<int, 3>> tris;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag)) continue;
    if (tag == "v") {
      Eigen::Vector3d v;
      if (!(ls >> v.x() >> v.y() >> v.z())) {
        throw ParseError("obj", "bad vertex record at line " + std::to_string(line_no));
      }
      verts.push_back(v);
    } else if (tag == "f") {
      std::vector<int> poly;
      std::string tok;
      while (ls >> tok) {
        int idx = 0;
        try {
          idx = std::stoi(tok.substr(0, tok.find('/')));
        } catch (const std::exception&) {
          throw ParseError("obj", "bad face record at line " + std::to_string(line_no));
        }
        poly.push_back(idx > 0 ? idx - 1 : static_cast<int>(verts.size()) + idx);
      }
      if (poly.size() < 3) {
        throw ParseError("obj", "face with fewer than 3 vertices at line " + std::to_string(line_no));
      }
      for (std::size_t k = 1; k + 1 < poly.size(); ++k) tris.push_back({poly[0], poly[k], poly[k + 1]});
    }
  }
  Mesh mesh;
  mesh.vertices.resize(static_cast<Eigen::Index>(verts.size()), 3);
  for (std::size_t i = 0; i < verts.size(); ++i) mesh.vertices.row(static_cast<Eigen::Index>(i)) = verts[i].transpose();
  mesh.faces.resize(static_cast<Eigen::Index>(tris.size()), 3);
  for (std::size_t i = 0; i < tris.size(); ++i) {
    for (int k = 0; k < 3; ++k) {
      if (tris[i][k] < 0 || tris[i][k] >= static_cast<int>(verts.size())) {
        throw ParseError("obj", "face index out of range");
      }
      mesh.faces(static_cast<Eigen::Index>(i), k) = tris[i][k];
    }
  }
  return mesh;
}

}  // namespace handfit
