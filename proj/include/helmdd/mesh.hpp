#pragma once

#include <array>
#include <string>
#include <vector>

#include "helmdd/types.hpp"

namespace helmdd {

enum class BoundaryTag { Dirichlet, Robin };

struct BoundaryEdge {
  int a = 0;
  int b = 0;
  BoundaryTag tag = BoundaryTag::Robin;
};

/// Structured P1 triangulation of the unit square wave guide.
///
/// The grid has n_glob points per direction with spacing h = 1/(n_glob-1).
/// Vertices are numbered row by row (y slow, x fast), so vertex (ix, iy)
/// has index iy*n_glob + ix. Each grid cell is split into two triangles,
/// alternating the diagonal in a checkerboard pattern. The left/right
/// boundaries x in {0,1} carry the Dirichlet tag, top/bottom carry Robin.
struct Mesh {
  int n_glob = 0;
  double h = 0.0;
  std::vector<Point> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<BoundaryEdge> boundary_edges;

  int vertex_index(int ix, int iy) const { return iy * n_glob + ix; }
  int vertex_ix(int v) const { return v % n_glob; }
  int vertex_iy(int v) const { return v / n_glob; }

  /// Vertex lies on x in {0,1}; such vertices are eliminated as Dirichlet.
  bool on_dirichlet_boundary(int v) const {
    const int ix = vertex_ix(v);
    return ix == 0 || ix == n_glob - 1;
  }

  /// Vertex lies anywhere on the boundary of the unit square.
  bool on_global_boundary(int v) const {
    const int ix = vertex_ix(v);
    const int iy = vertex_iy(v);
    return ix == 0 || ix == n_glob - 1 || iy == 0 || iy == n_glob - 1;
  }

  double triangle_area(int t) const;
  Point triangle_centroid(int t) const;
};

/// Builds the alternating-diagonal triangulation; cell (i,j) uses the
/// bottom-left to top-right diagonal when i+j is even.
Mesh build_unit_square_mesh(int n_glob);

/// Recovers the boundary edges of a triangulation (edges incident to exactly
/// one triangle) and tags each one: Dirichlet when both endpoints lie on
/// x in {0,1}, Robin otherwise.
std::vector<BoundaryEdge> classify_boundary(const Mesh& mesh);

/// Plain-text dump: "v x y" per vertex, "t i j k" per triangle,
/// "b i j TAG" per boundary edge.
void write_mesh(const Mesh& mesh, const std::string& path);

} // namespace helmdd
