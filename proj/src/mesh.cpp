#include "helmdd/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <unordered_map>

namespace helmdd {

double Mesh::triangle_area(int t) const {
  const auto& tri = triangles[t];
  const Point& a = vertices[tri[0]];
  const Point& b = vertices[tri[1]];
  const Point& c = vertices[tri[2]];
  return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x()));
}

Point Mesh::triangle_centroid(int t) const {
  const auto& tri = triangles[t];
  return (vertices[tri[0]] + vertices[tri[1]] + vertices[tri[2]]) / 3.0;
}

Mesh build_unit_square_mesh(int n_glob) {
  if (n_glob < 2) throw std::invalid_argument("build_unit_square_mesh: n_glob must be >= 2");

  Mesh mesh;
  mesh.n_glob = n_glob;
  mesh.h = 1.0 / (n_glob - 1);

  mesh.vertices.reserve(static_cast<std::size_t>(n_glob) * n_glob);
  for (int iy = 0; iy < n_glob; ++iy)
    for (int ix = 0; ix < n_glob; ++ix)
      mesh.vertices.emplace_back(ix * mesh.h, iy * mesh.h);

  const int cells = n_glob - 1;
  mesh.triangles.reserve(static_cast<std::size_t>(2) * cells * cells);
  for (int j = 0; j < cells; ++j) {
    for (int i = 0; i < cells; ++i) {
      const int v00 = mesh.vertex_index(i, j);
      const int v10 = mesh.vertex_index(i + 1, j);
      const int v01 = mesh.vertex_index(i, j + 1);
      const int v11 = mesh.vertex_index(i + 1, j + 1);
      if ((i + j) % 2 == 0) {
        // diagonal v00 -- v11
        mesh.triangles.push_back({v00, v10, v11});
        mesh.triangles.push_back({v00, v11, v01});
      } else {
        // diagonal v10 -- v01
        mesh.triangles.push_back({v00, v10, v01});
        mesh.triangles.push_back({v10, v11, v01});
      }
    }
  }

  mesh.boundary_edges = classify_boundary(mesh);
  return mesh;
}

std::vector<BoundaryEdge> classify_boundary(const Mesh& mesh) {
  // Boundary edges are those incident to exactly one triangle.
  std::unordered_map<std::uint64_t, int> edge_count;
  edge_count.reserve(mesh.triangles.size() * 3);
  auto key = [](int a, int b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
  };
  for (const auto& tri : mesh.triangles)
    for (int e = 0; e < 3; ++e) ++edge_count[key(tri[e], tri[(e + 1) % 3])];

  auto on_vertical_wall = [&](int v) {
    const int ix = mesh.vertex_ix(v);
    return ix == 0 || ix == mesh.n_glob - 1;
  };

  std::vector<BoundaryEdge> edges;
  for (const auto& [k, count] : edge_count) {
    if (count != 1) continue;
    const int a = static_cast<int>(k >> 32);
    const int b = static_cast<int>(k & 0xffffffffu);
    const bool dirichlet = on_vertical_wall(a) && on_vertical_wall(b);
    edges.push_back({a, b, dirichlet ? BoundaryTag::Dirichlet : BoundaryTag::Robin});
  }
  // Deterministic order: by (a, b).
  std::sort(edges.begin(), edges.end(), [](const BoundaryEdge& x, const BoundaryEdge& y) {
    return x.a != y.a ? x.a < y.a : x.b < y.b;
  });
  return edges;
}

void write_mesh(const Mesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_mesh: cannot open " + path);
  out.precision(17);
  for (const auto& v : mesh.vertices) out << "v " << v.x() << ' ' << v.y() << '\n';
  for (const auto& t : mesh.triangles) out << "t " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  for (const auto& e : mesh.boundary_edges)
    out << "b " << e.a << ' ' << e.b << ' '
        << (e.tag == BoundaryTag::Dirichlet ? "Dirichlet" : "Robin") << '\n';
  if (!out) throw std::runtime_error("write_mesh: write failed for " + path);
}

} // namespace helmdd
