#include <doctest.h>

#include <helmdd/linalg.hpp>

#include <Eigen/QR>

#include "test_support.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <string>
#include <vector>

using namespace helmdd;
using helmdd::testing::char_poly_roots;
using helmdd::testing::multiset_distance;
using helmdd::testing::random_complex_matrix;
using helmdd::testing::random_complex_vector;

namespace {

SparseMatrix sparse_from_dense(const DenseMatrix& D) {
    std::vector<Triplet> trips;
    for (int r = 0; r < D.rows(); ++r)
        for (int c = 0; c < D.cols(); ++c)
            if (D(r, c) != Complex(0.0, 0.0)) trips.emplace_back(r, c, D(r, c));
    SparseMatrix A(D.rows(), D.cols());
    A.setFromTriplets(trips.begin(), trips.end());
    return A;
}

DenseMatrix random_diagonally_dominant(int n, unsigned seed) {
    DenseMatrix D = random_complex_matrix(n, seed);
    for (int r = 0; r < n; ++r)
        D(r, r) = Complex(D.row(r).cwiseAbs().sum() + 1.0, 0.5);
    return D;
}

std::vector<Complex> to_std(const Vector& v) {
    return std::vector<Complex>(v.data(), v.data() + v.size());
}

} // namespace

TEST_CASE("sparse factorization solves identity and hand problems") {
    SparseMatrix I(5, 5);
    I.setIdentity();
    const Vector b = random_complex_vector(5, 3);
    CHECK((SparseFactorization(I).solve(b) - b).norm() == 0.0);

    DenseMatrix D(2, 2);
    D << Complex(2, 0), Complex(1, 0), Complex(1, 0), Complex(2, 0);
    const SparseFactorization lu(sparse_from_dense(D));
    Vector rhs(2);
    rhs << Complex(3, 0), Complex(3, 0);
    const Vector x = lu.solve(rhs);
    CHECK(std::abs(x[0] - Complex(1, 0)) <= 1e-14);
    CHECK(std::abs(x[1] - Complex(1, 0)) <= 1e-14);
}

TEST_CASE("sparse factorization reaches direct-solver residuals") {
    const DenseMatrix D = random_diagonally_dominant(50, 42);
    const SparseMatrix A = sparse_from_dense(D);
    const SparseFactorization lu(A);

    const Vector b = random_complex_vector(50, 43);
    const Vector x = lu.solve(b);
    CHECK((A * x - b).norm() / b.norm() <= 1e-10);

    DenseMatrix B(50, 3);
    B.col(0) = random_complex_vector(50, 44);
    B.col(1) = random_complex_vector(50, 45);
    B.col(2) = random_complex_vector(50, 46);
    const DenseMatrix X = lu.solve(B);
    CHECK((A * X - B).norm() / B.norm() <= 1e-10);
}

TEST_CASE("singular and non-square sparse matrices are reported") {
    DenseMatrix D = DenseMatrix::Zero(2, 2);
    D(0, 0) = Complex(1.0, 0.0);
    auto factor_singular = [&] { return SparseFactorization(sparse_from_dense(D)); };
    CHECK_THROWS_WITH_AS(factor_singular(), doctest::Contains("singular"),
                         std::runtime_error);

    auto factor_rectangular = [] { return SparseFactorization(SparseMatrix(2, 3)); };
    CHECK_THROWS_AS(factor_rectangular(), std::invalid_argument);
}

TEST_CASE("dense factorization reconstructs its input") {
    const DenseMatrix A = random_complex_matrix(100, 9);
    const DenseFactorization lu(A);
    CHECK((lu.reconstructed() - A).norm() <= 1e-12 * A.norm());

    const Vector b = random_complex_vector(100, 10);
    const Vector x = lu.solve(b);
    CHECK((A * x - b).norm() / b.norm() <= 1e-10);
}

TEST_CASE("cholesky factors small SPD matrices exactly") {
    const RealDenseMatrix I = RealDenseMatrix::Identity(4, 4);
    CHECK((cholesky(I) - I).norm() == 0.0);

    RealDenseMatrix M(2, 2);
    M << 4.0, 2.0, 2.0, 3.0;
    const RealDenseMatrix L = cholesky(M);
    CHECK(L(0, 0) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(L(0, 1) == 0.0);
    CHECK(L(1, 0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(L(1, 1) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
}

TEST_CASE("cholesky reconstructs random SPD matrices") {
    std::mt19937 rng(21);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    RealDenseMatrix B(20, 20);
    for (int r = 0; r < 20; ++r)
        for (int c = 0; c < 20; ++c) B(r, c) = unif(rng);
    const RealDenseMatrix M = B.transpose() * B + 20.0 * RealDenseMatrix::Identity(20, 20);
    const RealDenseMatrix L = cholesky(M);
    CHECK((L * L.transpose() - M).norm() <= 1e-12 * M.norm());
    for (int r = 0; r < 20; ++r)
        for (int c = r + 1; c < 20; ++c) CHECK(L(r, c) == 0.0);
}

TEST_CASE("cholesky names the first bad leading minor") {
    RealDenseMatrix M(2, 2);
    M << 1.0, 2.0, 2.0, 1.0;
    CHECK_THROWS_WITH_AS(cholesky(M), doctest::Contains("order 2"), std::runtime_error);

    RealDenseMatrix Z = RealDenseMatrix::Zero(1, 1);
    CHECK_THROWS_WITH_AS(cholesky(Z), doctest::Contains("order 1"), std::runtime_error);

    RealDenseMatrix R(2, 3);
    CHECK_THROWS_AS(cholesky(R), std::invalid_argument);
}

TEST_CASE("dense eigensolver recovers diagonal and companion spectra") {
    DenseMatrix D = DenseMatrix::Zero(3, 3);
    D(0, 0) = Complex(1, 0);
    D(1, 1) = Complex(2, 1);
    D(2, 2) = Complex(-3, 0);
    const EigenPairs pairs = dense_eig(D);
    REQUIRE(pairs.size() == 3);
    CHECK(multiset_distance(to_std(pairs.values),
                            {Complex(1, 0), Complex(2, 1), Complex(-3, 0)}) <= 1e-12);
    for (int i = 0; i < 3; ++i) {
        CHECK(pairs.vectors.col(i).norm() == doctest::Approx(1.0).epsilon(1e-13));
        CHECK((D * pairs.vectors.col(i) - pairs.values[i] * pairs.vectors.col(i)).norm() <=
              1e-12 * D.norm());
    }

    DenseMatrix C(2, 2);
    C << Complex(0, 0), Complex(-2, 0), Complex(1, 0), Complex(3, 0);
    const EigenPairs roots = dense_eig(C);
    CHECK(multiset_distance(to_std(roots.values), {Complex(1, 0), Complex(2, 0)}) <= 1e-12);
}

TEST_CASE("dense eigenvalues agree with characteristic polynomial roots") {
    const DenseMatrix B = random_complex_matrix(30, 7);
    const EigenPairs pairs = dense_eig(B);
    const std::vector<Complex> roots = char_poly_roots(B);
    CHECK(multiset_distance(to_std(pairs.values), roots) <= 1e-6);
    for (int i = 0; i < pairs.size(); ++i)
        CHECK((B * pairs.vectors.col(i) - pairs.values[i] * pairs.vectors.col(i)).norm() <=
              1e-10 * B.norm());
}

TEST_CASE("eigenvalues are invariant under diagonal phase similarity") {
    const DenseMatrix B = random_complex_matrix(20, 11);
    std::mt19937 rng(12);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
    Vector phases(20);
    for (int i = 0; i < 20; ++i) {
        const double t = angle(rng);
        phases[i] = Complex(std::cos(t), std::sin(t));
    }
    const DenseMatrix similar =
        phases.asDiagonal() * B * phases.cwiseInverse().asDiagonal();
    CHECK(multiset_distance(to_std(dense_eig(B).values),
                            to_std(dense_eig(similar).values)) <= 1e-8);
}

TEST_CASE("generalized eigensolver reduces through the mass Cholesky") {
    const DenseMatrix S = random_complex_matrix(12, 13);
    const DenseMatrix sym = 0.5 * (S + S.transpose());
    const RealDenseMatrix I = RealDenseMatrix::Identity(12, 12);
    CHECK(multiset_distance(to_std(generalized_eig(sym, I).values),
                            to_std(dense_eig(sym).values)) <= 1e-10);

    std::mt19937 rng(14);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    RealDenseMatrix B(10, 10);
    for (int r = 0; r < 10; ++r)
        for (int c = 0; c < 10; ++c) B(r, c) = unif(rng);
    const RealDenseMatrix M = B.transpose() * B + 10.0 * RealDenseMatrix::Identity(10, 10);
    const DenseMatrix twoM = 2.0 * M.cast<Complex>();
    const EigenPairs doubled = generalized_eig(twoM, M);
    for (int i = 0; i < doubled.size(); ++i)
        CHECK(std::abs(doubled.values[i] - Complex(2.0, 0.0)) <= 1e-8);
}

TEST_CASE("generalized eigensolver recovers a constructed spectrum") {
    const int n = 8;
    std::mt19937 rng(15);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);

    RealDenseMatrix Lmass = RealDenseMatrix::Zero(n, n);
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < r; ++c) Lmass(r, c) = unif(rng);
        Lmass(r, r) = 2.0 + std::abs(unif(rng));
    }
    const RealDenseMatrix M = Lmass * Lmass.transpose();

    RealDenseMatrix G(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) G(r, c) = unif(rng);
    const RealDenseMatrix Q = Eigen::HouseholderQR<RealDenseMatrix>(G)
                                  .householderQ() *
                              RealDenseMatrix::Identity(n, n);

    Vector target(n);
    for (int i = 0; i < n; ++i) target[i] = Complex(i + 1.0, 0.3 * i - 1.0);
    const DenseMatrix B = Q.cast<Complex>() * target.asDiagonal() *
                          Q.transpose().cast<Complex>();
    const DenseMatrix S = Lmass.cast<Complex>() * B * Lmass.transpose().cast<Complex>();

    const EigenPairs pairs = generalized_eig(S, M);
    CHECK(multiset_distance(to_std(pairs.values), to_std(target)) <= 1e-8);

    const DenseMatrix Mc = M.cast<Complex>();
    for (int i = 0; i < pairs.size(); ++i) {
        const Vector v = pairs.vectors.col(i);
        CHECK(v.norm() == doctest::Approx(1.0).epsilon(1e-12));
        const double residual = (S * v - pairs.values[i] * (Mc * v)).norm();
        CHECK(residual <= 1e-8 * (S.norm() + std::abs(pairs.values[i]) * M.norm()));
    }
}

TEST_CASE("generalized eigensolver requires an SPD mass matrix") {
    DenseMatrix S = DenseMatrix::Identity(2, 2);
    RealDenseMatrix M(2, 2);
    M << 1.0, 2.0, 2.0, 1.0;
    CHECK_THROWS_AS(generalized_eig(S, M), std::runtime_error);
    CHECK_THROWS_AS(generalized_eig(S, RealDenseMatrix::Identity(3, 3)),
                    std::invalid_argument);
}

TEST_CASE("gmres converges instantly for trivial operators") {
    const Vector b = random_complex_vector(10, 17);
    auto identity = [](const Vector& v) { return v; };
    const GmresResult r = gmres(identity, identity, b, 1e-10, 50);
    CHECK(r.converged);
    CHECK(r.iterations == 1);
    CHECK((r.x - b).norm() <= 1e-10 * b.norm());
}

TEST_CASE("gmres with an exact preconditioner needs one iteration") {
    const DenseMatrix D = random_diagonally_dominant(40, 18);
    const SparseMatrix A = sparse_from_dense(D);
    const SparseFactorization exact(A);
    const Vector b = random_complex_vector(40, 19);
    const GmresResult r = gmres([&](const Vector& v) { return Vector(A * v); },
                                [&](const Vector& v) { return exact.solve(v); }, b,
                                1e-8, 50);
    CHECK(r.converged);
    CHECK(r.iterations == 1);
    CHECK(r.relative_residual <= 1e-8);
}

TEST_CASE("gmres resolves a two-eigenvalue system in two steps") {
    DenseMatrix D = DenseMatrix::Zero(2, 2);
    D(0, 0) = Complex(2, 0);
    D(1, 1) = Complex(1, 0);
    const SparseMatrix A = sparse_from_dense(D);
    Vector b(2);
    b << Complex(1, 0), Complex(1, 0);
    auto none = [](const Vector& v) { return v; };
    const GmresResult r =
        gmres([&](const Vector& v) { return Vector(A * v); }, none, b, 1e-12, 10);
    CHECK(r.converged);
    CHECK(r.iterations == 2);
    CHECK(std::abs(r.x[0] - Complex(0.5, 0.0)) <= 1e-12);
    CHECK(std::abs(r.x[1] - Complex(1.0, 0.0)) <= 1e-12);
}

TEST_CASE("gmres histories start at one and never increase") {
    const DenseMatrix D = random_diagonally_dominant(60, 23);
    const SparseMatrix A = sparse_from_dense(D);
    const Vector b = random_complex_vector(60, 24);
    auto none = [](const Vector& v) { return v; };
    const GmresResult r =
        gmres([&](const Vector& v) { return Vector(A * v); }, none, b, 1e-10, 200);
    CHECK(r.converged);
    REQUIRE(!r.residual_history.empty());
    CHECK(r.residual_history.front() == 1.0);
    for (std::size_t i = 1; i < r.residual_history.size(); ++i)
        CHECK(r.residual_history[i] <= r.residual_history[i - 1] * (1.0 + 1e-14));

    const double recomputed = (b - A * r.x).norm() / b.norm();
    CHECK(std::abs(recomputed - r.relative_residual) <= 1e-12);
}

TEST_CASE("gmres flags breakdown on rank-deficient operators") {
    DenseMatrix D = DenseMatrix::Zero(3, 3);
    D(0, 0) = Complex(1, 0);
    D(1, 1) = Complex(2, 0);
    const SparseMatrix A = sparse_from_dense(D);
    Vector b(3);
    b << Complex(1, 0), Complex(2, 0), Complex(1, 0);
    b /= b.norm();
    auto none = [](const Vector& v) { return v; };
    const GmresResult r =
        gmres([&](const Vector& v) { return Vector(A * v); }, none, b, 1e-10, 10);
    CHECK(r.breakdown);
    CHECK(!r.converged);
}

TEST_CASE("gmres handles zero right-hand sides and rejects bad settings") {
    auto none = [](const Vector& v) { return v; };
    const Vector zero = Vector::Zero(4);
    const GmresResult r = gmres(none, none, zero, 1e-8, 5);
    CHECK(r.converged);
    CHECK(r.iterations == 0);
    CHECK(r.x.norm() == 0.0);

    const Vector b = random_complex_vector(4, 29);
    CHECK_THROWS_AS(gmres(none, none, b, 0.0, 5), std::invalid_argument);
    CHECK_THROWS_AS(gmres(none, none, b, 1e-8, 0), std::invalid_argument);
}

TEST_CASE("residual histories dump as csv") {
    const std::vector<double> history = {1.0, 0.25, 0.0625};
    const std::string path = "test_linalg_history.csv";
    write_residual_csv(history, path);
    std::ifstream in(path);
    REQUIRE(in.good());
    std::string line;
    std::getline(in, line);
    CHECK(line == "iter,residual");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 3);
    std::remove(path.c_str());
}
