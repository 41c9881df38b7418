#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/QR>

#include "helmdd/assembly.hpp"
#include "helmdd/linalg.hpp"
#include "helmdd/medium.hpp"
#include "helmdd/mesh.hpp"
#include "helmdd/partition.hpp"
#include "helmdd/types.hpp"

namespace helmdd {

/// All per-subdomain data for the one-level sweep and the coarse space.
///
/// The Dirichlet matrix A_j = R_j A R_j^T is the plain submatrix of the
/// global system on the overlapping dofs. The Neumann matrix A^N is
/// re-assembled over the subdomain's element patch (every triangle whose
/// vertices all belong to the subdomain), keeping the original Robin and
/// Dirichlet conditions where the patch meets the global boundary and
/// leaving the interior interface natural. The interface dofs gamma are
/// those whose vertices lie on the patch boundary but not on the boundary
/// of the unit square.
struct LocalProblem {
  int index = 0;
  std::vector<int> dofs;     // global free dofs, sorted (the rows of R_j)
  RealVector weights;        // D_j, aligned with dofs
  std::vector<int> patch_triangles;
  double k_max = 0.0;        // max element wave number on the patch

  SparseMatrix neumann;          // A^N in local indexing
  std::vector<int> gamma;        // local interface dof indices (sorted)
  std::vector<int> interior;     // complement of gamma (sorted)
  RealDenseMatrix interface_mass;
  SparseMatrix interior_to_gamma; // A^N block I x Gamma

  std::optional<SparseFactorization> dirichlet_solver; // A_j, absent when empty
  std::optional<SparseFactorization> interior_solver;  // A^N_II, absent when no interior

  Eigen::Index size() const { return static_cast<Eigen::Index>(dofs.size()); }
};

std::vector<LocalProblem> build_local_problems(const SparseMatrix& A, const Mesh& mesh,
                                               const MediumSpec& medium, const DofMap& dofmap,
                                               const Decomposition& decomposition);

/// Discrete DtN operator on gamma as the Schur complement of the Neumann
/// matrix, paired with the interface mass matrix:
///   S = A^N_GG - A^N_GI (A^N_II)^{-1} A^N_IG.
std::pair<DenseMatrix, RealDenseMatrix> dtn_schur(const LocalProblem& lp);

/// Keeps the pairs with Re(lambda) < k_max^alpha, sorted by ascending real
/// part (stable, so eigensolver order breaks ties).
EigenPairs dtn_select(const EigenPairs& pairs, double k_max, double alpha);

/// Interior values of the discrete Helmholtz extension of gamma data:
/// v_I = -(A^N_II)^{-1} A^N_IG u_G, returned as the full local vector.
Vector helmholtz_extend(const LocalProblem& lp, const Vector& gamma_values);

class CoarseSpace;

/// Assembles Z from the selected interface eigenvectors: each column is the
/// partition-of-unity-weighted Helmholtz extension R_j^T D_j v, normalized
/// to unit length. Columns that make E = Z^dagger A Z rank deficient
/// (pivots below 1e-12 of scale) are dropped with a warning.
CoarseSpace build_coarse_space(const SparseMatrix& A, const std::vector<LocalProblem>& locals,
                               const std::vector<EigenPairs>& selections);

/// Coarse space Z with factorized coarse operator E = Z^dagger A Z.
/// The direct constructor requires Z of full column rank.
class CoarseSpace {
public:
  CoarseSpace() = default;
  CoarseSpace(SparseMatrix basis, const SparseMatrix& A, std::vector<int> per_subdomain);

  int dim() const { return static_cast<int>(basis_.cols()); }
  bool empty() const { return dim() == 0; }
  const SparseMatrix& basis() const { return basis_; }
  const std::vector<int>& per_subdomain_count() const { return per_subdomain_; }

  /// Q r = Z E^{-1} Z^dagger r (zero when the space is empty).
  Vector apply_correction(const Vector& r) const;

private:
  friend CoarseSpace build_coarse_space(const SparseMatrix&, const std::vector<LocalProblem>&,
                                        const std::vector<EigenPairs>&);

  SparseMatrix basis_;
  std::optional<Eigen::ColPivHouseholderQR<DenseMatrix>> coarse_qr_;
  std::vector<int> per_subdomain_;
};

/// One-level restricted additive Schwarz: z = sum_j R_j^T D_j A_j^{-1} R_j r,
/// accumulated in ascending j.
Vector apply_ras(const std::vector<LocalProblem>& locals, const Vector& r);

/// Adapted deflation: z = M_RAS^{-1} (r - A Q r) + Q r.
Vector apply_two_level(const std::vector<LocalProblem>& locals, const CoarseSpace& coarse,
                       const SparseMatrix& A, const Vector& r);

struct SubdomainDiagnostics {
  int index = 0;
  int gamma_dim = 0;
  double k_max = 0.0;
  double eta_max = 0.0;
  int selected = 0;
  double min_re_lambda = 0.0;
  double max_re_lambda = 0.0;
};

/// CSV dump "j,gamma_dim,k_j,eta_max,selected,min_re_lambda,max_re_lambda".
void write_subdomain_diagnostics(const std::vector<SubdomainDiagnostics>& rows,
                                 const std::string& path);

} // namespace helmdd
