#include "helmdd/linalg.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>

namespace helmdd {

struct SparseFactorization::Impl {
  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
};

SparseFactorization::SparseFactorization(const SparseMatrix& A) {
  if (A.rows() != A.cols()) throw std::invalid_argument("SparseFactorization: matrix not square");
  rows_ = A.rows();
  auto impl = std::make_shared<Impl>();
  SparseMatrix compressed = A;
  compressed.makeCompressed();
  impl->lu.compute(compressed);
  if (impl->lu.info() != Eigen::Success)
    throw std::runtime_error("SparseFactorization: singular pivot (" +
                             impl->lu.lastErrorMessage() + ")");
  impl_ = std::move(impl);
}

Vector SparseFactorization::solve(const Vector& b) const {
  return impl_->lu.solve(b);
}

DenseMatrix SparseFactorization::solve(const DenseMatrix& B) const {
  return impl_->lu.solve(B);
}

DenseFactorization::DenseFactorization(const DenseMatrix& A) {
  if (A.rows() != A.cols()) throw std::invalid_argument("DenseFactorization: matrix not square");
  lu_ = std::make_shared<Eigen::PartialPivLU<DenseMatrix>>(A);
}

Vector DenseFactorization::solve(const Vector& b) const { return lu_->solve(b); }
DenseMatrix DenseFactorization::solve(const DenseMatrix& B) const { return lu_->solve(B); }

RealDenseMatrix cholesky(const RealDenseMatrix& M) {
  if (M.rows() != M.cols()) throw std::invalid_argument("cholesky: matrix not square");
  const Eigen::Index n = M.rows();
  RealDenseMatrix L = RealDenseMatrix::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double d = M(j, j) - L.row(j).head(j).squaredNorm();
    if (!(d > 0.0))
      throw std::runtime_error("cholesky: leading minor of order " + std::to_string(j + 1) +
                               " is not positive definite");
    L(j, j) = std::sqrt(d);
    for (Eigen::Index i = j + 1; i < n; ++i)
      L(i, j) = (M(i, j) - L.row(i).head(j).dot(L.row(j).head(j))) / L(j, j);
  }
  return L;
}

EigenPairs dense_eig(const DenseMatrix& B) {
  if (B.rows() != B.cols()) throw std::invalid_argument("dense_eig: matrix not square");
  EigenPairs pairs;
  if (B.rows() == 0) return pairs;
  Eigen::ComplexEigenSolver<DenseMatrix> solver(B, /*computeEigenvectors=*/true);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("dense_eig: QR iteration failed to converge");
  pairs.values = solver.eigenvalues();
  pairs.vectors = solver.eigenvectors();
  for (Eigen::Index c = 0; c < pairs.vectors.cols(); ++c) {
    const double norm = pairs.vectors.col(c).norm();
    if (norm > 0.0) pairs.vectors.col(c) /= norm;
  }
  return pairs;
}

EigenPairs generalized_eig(const DenseMatrix& S, const RealDenseMatrix& M) {
  if (S.rows() != S.cols() || M.rows() != M.cols() || S.rows() != M.rows())
    throw std::invalid_argument("generalized_eig: dimension mismatch");
  if (S.rows() == 0) return {};

  const RealDenseMatrix L = cholesky(M);
  const DenseMatrix Lc = L.cast<Complex>();
  const auto lower = Lc.triangularView<Eigen::Lower>();
  // B = L^{-1} S L^{-T} = L^{-1} (L^{-1} S)^T for symmetric S
  DenseMatrix X = lower.solve(S);
  DenseMatrix B = lower.solve(X.transpose());
  EigenPairs pairs = dense_eig(B);
  // map back v = L^{-T} w and renormalize
  pairs.vectors = Lc.triangularView<Eigen::Lower>().transpose().solve(pairs.vectors);
  for (Eigen::Index c = 0; c < pairs.vectors.cols(); ++c) {
    const double norm = pairs.vectors.col(c).norm();
    if (norm > 0.0) pairs.vectors.col(c) /= norm;
  }
  return pairs;
}

namespace {

// Complex Givens rotation with c = a/r, s = b/r, r = sqrt(|a|^2+|b|^2):
// [conj(c) conj(s); -s c] maps (a,b) to (r,0).
void make_rotation(Complex a, Complex b, Complex& c, Complex& s) {
  const double r = std::sqrt(std::norm(a) + std::norm(b));
  if (r == 0.0) {
    c = Complex(1.0, 0.0);
    s = Complex(0.0, 0.0);
    return;
  }
  c = a / r;
  s = b / r;
}

} // namespace

GmresResult gmres(const LinearOperator& apply_A, const LinearOperator& apply_M, const Vector& b,
                  double rtol, int max_it) {
  if (!(rtol > 0.0)) throw std::invalid_argument("gmres: rtol must be positive");
  if (max_it < 1) throw std::invalid_argument("gmres: max_it must be >= 1");

  GmresResult result;
  const Eigen::Index n = b.size();
  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    result.x = Vector::Zero(n);
    result.converged = true;
    result.residual_history = {0.0};
    return result;
  }

  constexpr double breakdown_tol = 1e-14;
  Eigen::Index cap = std::min<Eigen::Index>(max_it + 1, 32);
  DenseMatrix V(n, cap);
  DenseMatrix H = DenseMatrix::Zero(cap, cap - 1);
  std::vector<Complex> givens_c, givens_s;
  Vector g = Vector::Zero(cap);

  V.col(0) = b / bnorm;
  g[0] = Complex(bnorm, 0.0);
  result.residual_history.push_back(1.0);

  int m = 0;
  bool estimate_converged = false;
  for (int j = 0; j < max_it; ++j) {
    if (j + 2 > cap) {
      const Eigen::Index grown = std::min<Eigen::Index>(max_it + 1, cap * 2);
      V.conservativeResize(Eigen::NoChange, grown);
      H.conservativeResize(grown, grown - 1);
      H.rightCols(grown - cap).setZero();
      H.block(cap, 0, grown - cap, cap - 1).setZero();
      g.conservativeResize(grown);
      cap = grown;
    }

    Vector w = apply_A(apply_M(V.col(j)));
    // modified Gram-Schmidt with one reorthogonalization pass
    for (int i = 0; i <= j; ++i) {
      const Complex hij = V.col(i).dot(w);
      H(i, j) = hij;
      w -= hij * V.col(i);
    }
    for (int i = 0; i <= j; ++i) {
      const Complex corr = V.col(i).dot(w);
      H(i, j) += corr;
      w -= corr * V.col(i);
    }
    const double wnorm = w.norm();
    H(j + 1, j) = Complex(wnorm, 0.0);

    for (int i = 0; i < j; ++i) {
      const Complex t = std::conj(givens_c[i]) * H(i, j) + std::conj(givens_s[i]) * H(i + 1, j);
      H(i + 1, j) = -givens_s[i] * H(i, j) + givens_c[i] * H(i + 1, j);
      H(i, j) = t;
    }
    Complex c, s;
    make_rotation(H(j, j), H(j + 1, j), c, s);
    givens_c.push_back(c);
    givens_s.push_back(s);
    H(j, j) = std::conj(c) * H(j, j) + std::conj(s) * H(j + 1, j);
    H(j + 1, j) = Complex(0.0, 0.0);
    g[j + 1] = -s * g[j];
    g[j] = std::conj(c) * g[j];

    m = j + 1;
    const double estimate = std::abs(g[j + 1]) / bnorm;
    result.residual_history.push_back(estimate);
    if (estimate <= rtol) {
      estimate_converged = true;
      break;
    }
    if (wnorm < breakdown_tol) {
      result.breakdown = true;
      break;
    }
    if (j + 1 < max_it) V.col(j + 1) = w / wnorm;
  }

  // back substitution on the rotated Hessenberg
  Vector y = Vector::Zero(m);
  for (int i = m - 1; i >= 0; --i) {
    Complex sum = g[i];
    for (int l = i + 1; l < m; ++l) sum -= H(i, l) * y[l];
    // a zero diagonal only occurs in a degenerate breakdown; keep y finite
    y[i] = std::abs(H(i, i)) > 0.0 ? sum / H(i, i) : Complex(0.0, 0.0);
  }
  result.x = apply_M(V.leftCols(m) * y);
  result.iterations = m;
  result.relative_residual = (b - apply_A(result.x)).norm() / bnorm;
  result.converged =
      estimate_converged ? result.relative_residual <= rtol * (1.0 + 1e-8) : false;
  return result;
}

void write_residual_csv(const std::vector<double>& history, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_residual_csv: cannot open " + path);
  out.precision(17);
  out << "iter,residual\n";
  for (std::size_t i = 0; i < history.size(); ++i) out << i << ',' << history[i] << '\n';
  if (!out) throw std::runtime_error("write_residual_csv: write failed for " + path);
}

} // namespace helmdd
