#pragma once

#include <string>
#include <utility>
#include <vector>

#include "helmdd/medium.hpp"
#include "helmdd/mesh.hpp"
#include "helmdd/types.hpp"

namespace helmdd {

/// Maps mesh vertices to free dof indices; Dirichlet vertices map to -1.
struct DofMap {
  std::vector<int> vertex_to_dof;
  std::vector<int> dof_to_vertex;
  int free_count = 0;
};

DofMap build_dof_map(const Mesh& mesh);

/// Assembles the complex-symmetric bilinear form
///   sum_T (stiffness - k_T^2 mass) + sum_{Robin edges} i k_e (edge mass)
/// over the given triangles and Robin edges, with k evaluated at triangle
/// centroids and edge midpoints. Rows/columns follow vertex_to_index;
/// vertices mapped to -1 are eliminated (homogeneous Dirichlet). Duplicate
/// contributions are accumulated in triangle/edge order, which makes the
/// result exactly symmetric and bit-reproducible.
SparseMatrix assemble_on_patch(const Mesh& mesh, const MediumSpec& medium,
                               const std::vector<int>& patch_triangles,
                               const std::vector<BoundaryEdge>& robin_edges,
                               const std::vector<int>& vertex_to_index, int index_count);

/// Global Helmholtz system on the free dofs.
SparseMatrix assemble_system(const Mesh& mesh, const MediumSpec& medium, const DofMap& dofmap);
std::pair<SparseMatrix, DofMap> assemble_system(const Mesh& mesh, const MediumSpec& medium);

/// Point source: unit nodal load at the free vertex nearest to `location`
/// (ties broken by lowest dof index).
Vector assemble_point_source(const Mesh& mesh, const DofMap& dofmap, const Point& location);

/// MatrixMarket coordinate export, complex general, 1-based indices.
void write_matrix_market(const SparseMatrix& A, const std::string& path);

} // namespace helmdd
