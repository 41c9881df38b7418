#pragma once

#include <complex>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace helmdd {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using DenseMatrix = Eigen::MatrixXcd;
using RealDenseMatrix = Eigen::MatrixXd;
using SparseMatrix = Eigen::SparseMatrix<Complex>;
using Triplet = Eigen::Triplet<Complex>;
using Point = Eigen::Vector2d;

} // namespace helmdd
