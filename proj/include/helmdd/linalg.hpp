#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/LU>

#include "helmdd/types.hpp"

namespace helmdd {

/// Sparse LU with column reordering; supports repeated and multi-RHS solves.
class SparseFactorization {
public:
  explicit SparseFactorization(const SparseMatrix& A);
  Vector solve(const Vector& b) const;
  DenseMatrix solve(const DenseMatrix& B) const;
  Eigen::Index rows() const { return rows_; }

private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
  Eigen::Index rows_ = 0;
};

/// Dense LU with partial pivoting.
class DenseFactorization {
public:
  explicit DenseFactorization(const DenseMatrix& A);
  Vector solve(const Vector& b) const;
  DenseMatrix solve(const DenseMatrix& B) const;
  Eigen::Index rows() const { return lu_ ? lu_->rows() : 0; }
  /// P^{-1} L U, which reproduces the factored matrix.
  DenseMatrix reconstructed() const { return lu_->reconstructedMatrix(); }

private:
  std::shared_ptr<const Eigen::PartialPivLU<DenseMatrix>> lu_;
};

/// Lower Cholesky factor of a real SPD matrix; throws naming the first
/// non-positive leading minor.
RealDenseMatrix cholesky(const RealDenseMatrix& M);

struct EigenPairs {
  Vector values;       // eigenvalues
  DenseMatrix vectors; // unit 2-norm eigenvectors, one column per value
  Eigen::Index size() const { return values.size(); }
};

/// All eigenpairs of a general complex matrix (Schur-based).
EigenPairs dense_eig(const DenseMatrix& B);

/// Pencil S v = lambda M v with complex-symmetric S and real SPD M, reduced
/// through M = L L^T to a standard problem on L^{-1} S L^{-T}.
EigenPairs generalized_eig(const DenseMatrix& S, const RealDenseMatrix& M);

using LinearOperator = std::function<Vector(const Vector&)>;

struct GmresResult {
  Vector x;
  int iterations = 0;                    // Krylov dimension at termination
  bool converged = false;
  bool breakdown = false;
  double relative_residual = 0.0;        // true residual, recomputed at exit
  std::vector<double> residual_history;  // relative estimates, starts at 1
};

/// Right-preconditioned full GMRES (no restart) on A M z = b, x = M z.
/// Modified Gram-Schmidt with one reorthogonalization pass; the complex
/// inner product conjugates its first argument. Stops when the residual
/// estimate reaches rtol or after max_it Krylov steps; an Arnoldi norm
/// below 1e-14 before convergence returns the current iterate flagged as
/// breakdown.
GmresResult gmres(const LinearOperator& apply_A, const LinearOperator& apply_M, const Vector& b,
                  double rtol, int max_it);

/// CSV dump "iter,residual" of a residual history.
void write_residual_csv(const std::vector<double>& history, const std::string& path);

} // namespace helmdd
