#include "helmdd/schwarz.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <numeric>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "helmdd/parallel.hpp"

namespace helmdd {

namespace {

std::uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

// Submatrix of A on the given (sorted) dof set.
SparseMatrix extract_submatrix(const SparseMatrix& A, const std::vector<int>& dofs,
                               const std::vector<int>& global_to_local) {
  const int n = static_cast<int>(dofs.size());
  std::vector<Triplet> trips;
  for (int lc = 0; lc < n; ++lc) {
    for (SparseMatrix::InnerIterator it(A, dofs[lc]); it; ++it) {
      const int lr = global_to_local[it.row()];
      if (lr >= 0) trips.emplace_back(lr, lc, it.value());
    }
  }
  SparseMatrix S(n, n);
  S.setFromTriplets(trips.begin(), trips.end());
  S.makeCompressed();
  return S;
}

// Factor A_II, retrying once with a small complex shift when the pivoting
// runs into a (near-)singular interior problem.
std::optional<SparseFactorization> factor_interior(const SparseMatrix& A_II, double k_max,
                                                   int subdomain) {
  if (A_II.rows() == 0) return std::nullopt;
  try {
    return SparseFactorization(A_II);
  } catch (const std::runtime_error&) {
    SparseMatrix shifted = A_II;
    const Complex shift(0.0, k_max * 1e-8);
    for (int i = 0; i < shifted.rows(); ++i) shifted.coeffRef(i, i) += shift;
    std::cerr << "helmdd: subdomain " << subdomain
              << ": interior matrix near-singular, retrying with shift i*k*1e-8\n";
    return SparseFactorization(shifted);
  }
}

} // namespace

std::vector<LocalProblem> build_local_problems(const SparseMatrix& A, const Mesh& mesh,
                                               const MediumSpec& medium, const DofMap& dofmap,
                                               const Decomposition& decomposition) {
  if (A.rows() != dofmap.free_count)
    throw std::invalid_argument("build_local_problems: matrix/dofmap mismatch");
  if (decomposition.free_count != dofmap.free_count)
    throw std::invalid_argument("build_local_problems: decomposition/dofmap mismatch");

  // vertex -> incident triangles, shared by all subdomains
  std::vector<std::vector<int>> vertex_triangles(mesh.vertices.size());
  for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t)
    for (int v : mesh.triangles[t]) vertex_triangles[v].push_back(t);

  std::unordered_set<std::uint64_t> global_boundary_edges;
  for (const auto& e : mesh.boundary_edges) global_boundary_edges.insert(edge_key(e.a, e.b));

  const int N = decomposition.subdomain_count;
  std::vector<LocalProblem> locals(N);

  parallel_for(N, [&](int j) {
    LocalProblem& lp = locals[j];
    lp.index = j;
    lp.dofs = decomposition.overlapping[j];
    lp.weights = decomposition.weights[j];
    const int n_local = static_cast<int>(lp.dofs.size());
    if (n_local == 0) return;

    std::vector<int> global_to_local(dofmap.free_count, -1);
    for (int i = 0; i < n_local; ++i) global_to_local[lp.dofs[i]] = i;

    // Vertex membership: overlapping dofs plus Dirichlet vertices. The
    // element patch is every triangle whose vertices all belong here.
    std::vector<int> vertex_to_local(mesh.vertices.size(), -1);
    std::vector<char> vertex_in(mesh.vertices.size(), 0);
    for (int i = 0; i < n_local; ++i) {
      const int v = dofmap.dof_to_vertex[lp.dofs[i]];
      vertex_to_local[v] = i;
      vertex_in[v] = 1;
    }
    for (int v = 0; v < static_cast<int>(mesh.vertices.size()); ++v)
      if (mesh.on_dirichlet_boundary(v)) vertex_in[v] = 1;

    std::unordered_set<int> patch_set;
    for (int i = 0; i < n_local; ++i) {
      const int v = dofmap.dof_to_vertex[lp.dofs[i]];
      for (int t : vertex_triangles[v]) {
        const auto& tri = mesh.triangles[t];
        if (vertex_in[tri[0]] && vertex_in[tri[1]] && vertex_in[tri[2]]) patch_set.insert(t);
      }
    }
    lp.patch_triangles.assign(patch_set.begin(), patch_set.end());
    std::sort(lp.patch_triangles.begin(), lp.patch_triangles.end());

    lp.k_max = 0.0;
    for (int t : lp.patch_triangles)
      lp.k_max = std::max(lp.k_max, wavenumber_at(medium, mesh.triangle_centroid(t)));

    // Patch boundary edges: incident to exactly one patch triangle.
    std::unordered_map<std::uint64_t, int> edge_count;
    edge_count.reserve(lp.patch_triangles.size() * 3);
    for (int t : lp.patch_triangles) {
      const auto& tri = mesh.triangles[t];
      for (int e = 0; e < 3; ++e) ++edge_count[edge_key(tri[e], tri[(e + 1) % 3])];
    }

    // Robin edges of the patch are the mesh Robin edges it contains.
    std::vector<BoundaryEdge> robin_edges;
    for (const auto& e : mesh.boundary_edges)
      if (e.tag == BoundaryTag::Robin && edge_count.count(edge_key(e.a, e.b)))
        robin_edges.push_back(e);

    // Interface edges: on the patch boundary but not on the global boundary.
    std::vector<std::pair<int, int>> interface_edges;
    for (const auto& [key, count] : edge_count) {
      if (count != 1 || global_boundary_edges.count(key)) continue;
      interface_edges.emplace_back(static_cast<int>(key >> 32),
                                   static_cast<int>(key & 0xffffffffu));
    }

    // Gamma: dofs whose vertices sit on interface edges but not on the
    // boundary of the unit square.
    std::vector<char> is_gamma(n_local, 0);
    for (const auto& [a, b] : interface_edges) {
      for (int v : {a, b}) {
        if (mesh.on_global_boundary(v)) continue;
        const int local = vertex_to_local[v];
        if (local >= 0) is_gamma[local] = 1;
      }
    }
    for (int i = 0; i < n_local; ++i) (is_gamma[i] ? lp.gamma : lp.interior).push_back(i);

    lp.neumann = assemble_on_patch(mesh, medium, lp.patch_triangles, robin_edges,
                                   vertex_to_local, n_local);

    // Interface mass: 1D P1 mass on the interface edges, restricted to gamma.
    const int n_gamma = static_cast<int>(lp.gamma.size());
    std::vector<int> local_to_gamma(n_local, -1);
    for (int i = 0; i < n_gamma; ++i) local_to_gamma[lp.gamma[i]] = i;
    lp.interface_mass = RealDenseMatrix::Zero(n_gamma, n_gamma);
    for (const auto& [a, b] : interface_edges) {
      const double len = (mesh.vertices[a] - mesh.vertices[b]).norm();
      const int la = vertex_to_local[a] >= 0 ? local_to_gamma[vertex_to_local[a]] : -1;
      const int lb = vertex_to_local[b] >= 0 ? local_to_gamma[vertex_to_local[b]] : -1;
      if (la >= 0) lp.interface_mass(la, la) += len / 3.0;
      if (lb >= 0) lp.interface_mass(lb, lb) += len / 3.0;
      if (la >= 0 && lb >= 0) {
        lp.interface_mass(la, lb) += len / 6.0;
        lp.interface_mass(lb, la) += len / 6.0;
      }
    }

    // Blocks of A^N by (interior, gamma).
    const int n_int = static_cast<int>(lp.interior.size());
    std::vector<int> local_to_interior(n_local, -1);
    for (int i = 0; i < n_int; ++i) local_to_interior[lp.interior[i]] = i;
    std::vector<Triplet> ii_trips, ig_trips;
    for (int col = 0; col < n_local; ++col) {
      for (SparseMatrix::InnerIterator it(lp.neumann, col); it; ++it) {
        const int ri = local_to_interior[it.row()];
        if (ri < 0) continue;
        const int cg = local_to_gamma[col];
        if (cg >= 0)
          ig_trips.emplace_back(ri, cg, it.value());
        else
          ii_trips.emplace_back(ri, local_to_interior[col], it.value());
      }
    }
    SparseMatrix A_II(n_int, n_int);
    A_II.setFromTriplets(ii_trips.begin(), ii_trips.end());
    lp.interior_to_gamma.resize(n_int, n_gamma);
    lp.interior_to_gamma.setFromTriplets(ig_trips.begin(), ig_trips.end());
    lp.interior_to_gamma.makeCompressed();

    lp.dirichlet_solver.emplace(extract_submatrix(A, lp.dofs, global_to_local));
    lp.interior_solver = factor_interior(A_II, lp.k_max, j);
  });

  return locals;
}

std::pair<DenseMatrix, RealDenseMatrix> dtn_schur(const LocalProblem& lp) {
  const int n_gamma = static_cast<int>(lp.gamma.size());
  if (n_gamma == 0) throw std::invalid_argument("dtn_schur: subdomain has empty interface");

  std::vector<int> local_to_gamma(lp.size(), -1);
  for (int i = 0; i < n_gamma; ++i) local_to_gamma[lp.gamma[i]] = i;

  DenseMatrix S = DenseMatrix::Zero(n_gamma, n_gamma);
  for (int col = 0; col < lp.neumann.outerSize(); ++col) {
    const int cg = local_to_gamma[col];
    if (cg < 0) continue;
    for (SparseMatrix::InnerIterator it(lp.neumann, col); it; ++it) {
      const int rg = local_to_gamma[it.row()];
      if (rg >= 0) S(rg, cg) += it.value();
    }
  }

  if (lp.interior_solver) {
    const DenseMatrix X = lp.interior_solver->solve(DenseMatrix(lp.interior_to_gamma));
    S -= lp.interior_to_gamma.transpose() * X;
  }
  return {std::move(S), lp.interface_mass};
}

EigenPairs dtn_select(const EigenPairs& pairs, double k_max, double alpha) {
  const double eta_max = std::pow(k_max, alpha);
  std::vector<int> order(pairs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return pairs.values[a].real() < pairs.values[b].real();
  });
  std::vector<int> kept;
  for (int idx : order)
    if (pairs.values[idx].real() < eta_max) kept.push_back(idx);

  EigenPairs selected;
  selected.values.resize(static_cast<Eigen::Index>(kept.size()));
  selected.vectors.resize(pairs.vectors.rows(), static_cast<Eigen::Index>(kept.size()));
  for (std::size_t i = 0; i < kept.size(); ++i) {
    selected.values[static_cast<Eigen::Index>(i)] = pairs.values[kept[i]];
    selected.vectors.col(static_cast<Eigen::Index>(i)) = pairs.vectors.col(kept[i]);
  }
  return selected;
}

Vector helmholtz_extend(const LocalProblem& lp, const Vector& gamma_values) {
  const int n_gamma = static_cast<int>(lp.gamma.size());
  if (gamma_values.size() != n_gamma)
    throw std::invalid_argument("helmholtz_extend: data size does not match interface");

  Vector local = Vector::Zero(lp.size());
  for (int i = 0; i < n_gamma; ++i) local[lp.gamma[i]] = gamma_values[i];
  if (lp.interior_solver) {
    const Vector v_int = -lp.interior_solver->solve(Vector(lp.interior_to_gamma * gamma_values));
    for (std::size_t i = 0; i < lp.interior.size(); ++i) local[lp.interior[i]] = v_int[i];
  }
  return local;
}

namespace {

Eigen::ColPivHouseholderQR<DenseMatrix> factor_coarse_operator(const SparseMatrix& basis,
                                                               const SparseMatrix& A) {
  const SparseMatrix AZ = A * basis;
  DenseMatrix E = DenseMatrix(basis.adjoint() * AZ);
  Eigen::ColPivHouseholderQR<DenseMatrix> qr;
  qr.setThreshold(1e-12);
  qr.compute(E);
  return qr;
}

} // namespace

CoarseSpace::CoarseSpace(SparseMatrix basis, const SparseMatrix& A,
                         std::vector<int> per_subdomain)
    : basis_(std::move(basis)), per_subdomain_(std::move(per_subdomain)) {
  if (basis_.cols() == 0) return;
  coarse_qr_.emplace(factor_coarse_operator(basis_, A));
  if (coarse_qr_->rank() < basis_.cols())
    throw std::runtime_error("CoarseSpace: basis is rank deficient");
}

Vector CoarseSpace::apply_correction(const Vector& r) const {
  if (empty()) return Vector::Zero(r.size());
  const Vector rc = basis_.adjoint() * r;
  return basis_ * coarse_qr_->solve(rc);
}

CoarseSpace build_coarse_space(const SparseMatrix& A, const std::vector<LocalProblem>& locals,
                               const std::vector<EigenPairs>& selections) {
  if (selections.size() != locals.size())
    throw std::invalid_argument("build_coarse_space: one selection per subdomain required");

  // Column list as (owner subdomain, local values).  Kept out of sparse form
  // so rank-deficient columns can be removed and E refactored.
  std::vector<std::pair<int, Vector>> columns;
  for (std::size_t j = 0; j < locals.size(); ++j) {
    const LocalProblem& lp = locals[j];
    const EigenPairs& sel = selections[j];
    for (Eigen::Index e = 0; e < sel.size(); ++e) {
      Vector local = helmholtz_extend(lp, sel.vectors.col(e));
      local.array() *= lp.weights.array().cast<Complex>();
      const double norm = local.norm();
      if (norm > 0.0) local /= norm;
      columns.emplace_back(static_cast<int>(j), std::move(local));
    }
  }

  CoarseSpace coarse;
  while (!columns.empty()) {
    const int n_cols = static_cast<int>(columns.size());
    std::vector<Triplet> trips;
    for (int c = 0; c < n_cols; ++c) {
      const auto& dofs = locals[columns[c].first].dofs;
      const Vector& local = columns[c].second;
      for (Eigen::Index i = 0; i < local.size(); ++i)
        if (local[i] != Complex(0.0, 0.0)) trips.emplace_back(dofs[i], c, local[i]);
    }
    SparseMatrix Z(A.rows(), n_cols);
    Z.setFromTriplets(trips.begin(), trips.end());
    Z.makeCompressed();

    auto qr = factor_coarse_operator(Z, A);
    const int rank = static_cast<int>(qr.rank());
    if (rank == n_cols) {
      coarse.basis_ = std::move(Z);
      coarse.coarse_qr_.emplace(std::move(qr));
      break;
    }

    // Permutation puts the independent columns first; everything after the
    // rank cut is dropped and E is refactored.
    const auto& perm = qr.colsPermutation().indices();
    std::vector<char> drop(n_cols, 0);
    for (int p = rank; p < n_cols; ++p) {
      drop[perm[p]] = 1;
      std::cerr << "helmdd: coarse space: dropping rank-deficient column " << perm[p]
                << " (subdomain " << columns[perm[p]].first << ")\n";
    }
    std::vector<std::pair<int, Vector>> kept;
    kept.reserve(rank);
    for (int c = 0; c < n_cols; ++c)
      if (!drop[c]) kept.push_back(std::move(columns[c]));
    columns = std::move(kept);
  }

  coarse.per_subdomain_.assign(locals.size(), 0);
  for (const auto& [owner, values] : columns) ++coarse.per_subdomain_[owner];
  return coarse;
}

Vector apply_ras(const std::vector<LocalProblem>& locals, const Vector& r) {
  Vector z = Vector::Zero(r.size());
  for (const LocalProblem& lp : locals) {
    if (!lp.dirichlet_solver) continue;
    Vector r_local(lp.size());
    for (Eigen::Index i = 0; i < lp.size(); ++i) r_local[i] = r[lp.dofs[i]];
    const Vector y = lp.dirichlet_solver->solve(r_local);
    for (Eigen::Index i = 0; i < lp.size(); ++i) z[lp.dofs[i]] += lp.weights[i] * y[i];
  }
  return z;
}

Vector apply_two_level(const std::vector<LocalProblem>& locals, const CoarseSpace& coarse,
                       const SparseMatrix& A, const Vector& r) {
  if (coarse.empty()) return apply_ras(locals, r);
  const Vector coarse_part = coarse.apply_correction(r);
  return apply_ras(locals, r - A * coarse_part) + coarse_part;
}

void write_subdomain_diagnostics(const std::vector<SubdomainDiagnostics>& rows,
                                 const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_subdomain_diagnostics: cannot open " + path);
  out.precision(17);
  out << "j,gamma_dim,k_j,eta_max,selected,min_re_lambda,max_re_lambda\n";
  for (const auto& row : rows)
    out << row.index << ',' << row.gamma_dim << ',' << row.k_max << ',' << row.eta_max << ','
        << row.selected << ',' << row.min_re_lambda << ',' << row.max_re_lambda << '\n';
  if (!out) throw std::runtime_error("write_subdomain_diagnostics: write failed for " + path);
}

} // namespace helmdd
