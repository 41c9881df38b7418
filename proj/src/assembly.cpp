#include "helmdd/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace helmdd {

DofMap build_dof_map(const Mesh& mesh) {
  DofMap map;
  const int nv = static_cast<int>(mesh.vertices.size());
  map.vertex_to_dof.assign(nv, -1);
  for (int v = 0; v < nv; ++v) {
    if (mesh.on_dirichlet_boundary(v)) continue;
    map.vertex_to_dof[v] = map.free_count++;
    map.dof_to_vertex.push_back(v);
  }
  return map;
}

namespace {

// P1 stiffness and mass on one triangle: K_ij = (b_i b_j + c_i c_j)/(4T),
// M_ij = T/12 (1 + delta_ij), with b_i = y_j - y_k, c_i = x_k - x_j.
void element_matrices(const Mesh& mesh, int t, Eigen::Matrix3d& stiffness,
                      Eigen::Matrix3d& mass) {
  const auto& tri = mesh.triangles[t];
  const Point p[3] = {mesh.vertices[tri[0]], mesh.vertices[tri[1]], mesh.vertices[tri[2]]};
  double b[3], c[3];
  for (int i = 0; i < 3; ++i) {
    const int j = (i + 1) % 3, k = (i + 2) % 3;
    b[i] = p[j].y() - p[k].y();
    c[i] = p[k].x() - p[j].x();
  }
  const double area2 = b[0] * c[1] - b[1] * c[0]; // 2T
  const double area = 0.5 * area2;
  if (!(area > 0.0)) throw std::runtime_error("assemble: non-positive triangle area");
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      stiffness(i, j) = (b[i] * b[j] + c[i] * c[j]) / (2.0 * area2);
      mass(i, j) = area / 12.0 * (i == j ? 2.0 : 1.0);
    }
}

} // namespace

SparseMatrix assemble_on_patch(const Mesh& mesh, const MediumSpec& medium,
                               const std::vector<int>& patch_triangles,
                               const std::vector<BoundaryEdge>& robin_edges,
                               const std::vector<int>& vertex_to_index, int index_count) {
  std::vector<Triplet> trips;
  trips.reserve(patch_triangles.size() * 9 + robin_edges.size() * 4);

  Eigen::Matrix3d stiffness, mass;
  for (int t : patch_triangles) {
    element_matrices(mesh, t, stiffness, mass);
    const double kt = wavenumber_at(medium, mesh.triangle_centroid(t));
    if (!(kt > 0.0)) throw std::invalid_argument("assemble: wave number must be positive");
    const auto& tri = mesh.triangles[t];
    for (int i = 0; i < 3; ++i) {
      const int p = vertex_to_index[tri[i]];
      if (p < 0) continue;
      for (int j = 0; j < 3; ++j) {
        const int q = vertex_to_index[tri[j]];
        if (q < 0) continue;
        trips.emplace_back(p, q, Complex(stiffness(i, j) - kt * kt * mass(i, j), 0.0));
      }
    }
  }

  for (const auto& edge : robin_edges) {
    if (edge.tag != BoundaryTag::Robin) continue;
    const Point pa = mesh.vertices[edge.a];
    const Point pb = mesh.vertices[edge.b];
    const double len = (pb - pa).norm();
    const double ke = wavenumber_at(medium, 0.5 * (pa + pb));
    const int idx[2] = {vertex_to_index[edge.a], vertex_to_index[edge.b]};
    const double m[2][2] = {{len / 3.0, len / 6.0}, {len / 6.0, len / 3.0}};
    for (int i = 0; i < 2; ++i) {
      if (idx[i] < 0) continue;
      for (int j = 0; j < 2; ++j) {
        if (idx[j] < 0) continue;
        trips.emplace_back(idx[i], idx[j], Complex(0.0, ke * m[i][j]));
      }
    }
  }

  // Stable sort keeps the insertion (element) order within each entry, so
  // (p,q) and (q,p) accumulate identical summands in identical order.
  std::stable_sort(trips.begin(), trips.end(), [](const Triplet& x, const Triplet& y) {
    return x.col() != y.col() ? x.col() < y.col() : x.row() < y.row();
  });
  std::vector<Triplet> unique;
  unique.reserve(trips.size());
  for (const auto& trip : trips) {
    if (!unique.empty() && unique.back().row() == trip.row() && unique.back().col() == trip.col())
      unique.back() = Triplet(trip.row(), trip.col(), unique.back().value() + trip.value());
    else
      unique.push_back(trip);
  }

  SparseMatrix A(index_count, index_count);
  A.setFromTriplets(unique.begin(), unique.end());
  A.makeCompressed();
  return A;
}

SparseMatrix assemble_system(const Mesh& mesh, const MediumSpec& medium, const DofMap& dofmap) {
  bool has_robin = false;
  for (const auto& e : mesh.boundary_edges)
    if (e.tag == BoundaryTag::Robin) has_robin = true;
  if (!has_robin)
    throw std::invalid_argument("assemble_system: mesh has no Robin boundary (ill-posed)");
  if (dofmap.free_count <= 0)
    throw std::invalid_argument("assemble_system: no free dofs");

  std::vector<int> all_triangles(mesh.triangles.size());
  std::iota(all_triangles.begin(), all_triangles.end(), 0);
  return assemble_on_patch(mesh, medium, all_triangles, mesh.boundary_edges,
                           dofmap.vertex_to_dof, dofmap.free_count);
}

std::pair<SparseMatrix, DofMap> assemble_system(const Mesh& mesh, const MediumSpec& medium) {
  DofMap dofmap = build_dof_map(mesh);
  SparseMatrix A = assemble_system(mesh, medium, dofmap);
  return {std::move(A), std::move(dofmap)};
}

Vector assemble_point_source(const Mesh& mesh, const DofMap& dofmap, const Point& location) {
  if (!(location.x() > 0.0 && location.x() < 1.0 && location.y() > 0.0 && location.y() < 1.0))
    throw std::invalid_argument("assemble_point_source: location must lie in the open unit square");
  if (dofmap.free_count <= 0)
    throw std::invalid_argument("assemble_point_source: no free dofs");

  int best = -1;
  double best_dist = std::numeric_limits<double>::infinity();
  for (int d = 0; d < dofmap.free_count; ++d) {
    const double dist = (mesh.vertices[dofmap.dof_to_vertex[d]] - location).squaredNorm();
    if (dist < best_dist) {
      best_dist = dist;
      best = d;
    }
  }
  Vector f = Vector::Zero(dofmap.free_count);
  f[best] = Complex(1.0, 0.0);
  return f;
}

void write_matrix_market(const SparseMatrix& A, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_matrix_market: cannot open " + path);
  out.precision(17);
  out << "%%MatrixMarket matrix coordinate complex general\n";
  out << A.rows() << ' ' << A.cols() << ' ' << A.nonZeros() << '\n';
  for (int col = 0; col < A.outerSize(); ++col)
    for (SparseMatrix::InnerIterator it(A, col); it; ++it)
      out << it.row() + 1 << ' ' << it.col() + 1 << ' ' << it.value().real() << ' '
          << it.value().imag() << '\n';
  if (!out) throw std::runtime_error("write_matrix_market: write failed for " + path);
}

} // namespace helmdd
