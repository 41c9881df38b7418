// Acceptance gate: one line per criterion, exit code = number of failures.

#include <helmdd/harness.hpp>
#include <helmdd/linalg.hpp>
#include <helmdd/partition.hpp>
#include <helmdd/schwarz.hpp>

#include "test_support.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace helmdd;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

RunRecord run_uniform(int n_glob, const MediumSpec& medium, int subdomains, double alpha) {
    ExperimentConfig cfg;
    cfg.n_glob = n_glob;
    cfg.medium = medium;
    cfg.subdomain_count = subdomains;
    cfg.alpha = alpha;
    const RunRecord record = run(cfg);
    if (record.failed) throw std::runtime_error("run failed: " + record.error);
    if (!record.converged) throw std::runtime_error("run did not converge");
    return record;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0.0;
    double sy = 0.0;
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]);
        const double ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

struct Criterion {
    bool ok = true;
    std::ostringstream detail;

    void require(bool condition, const std::string& label) {
        if (!condition) {
            ok = false;
            detail << " [violated: " << label << "]";
        }
    }
};

// Criterion 3 ladder records, reused for the frequency slope in criterion 8.
std::vector<RunRecord> ladder_records;

bool criterion1() {
    Criterion c;
    const auto start = Clock::now();
    const RunRecord tight = run_uniform(100, MediumSpec::homogeneous(18.5), 25, 1.0);
    const RunRecord rich = run_uniform(100, MediumSpec::homogeneous(18.5), 25, 1.5);
    const double elapsed = seconds_since(start);
    c.detail << "alpha=1: " << tight.iterations << " iterations, coarse " << tight.coarse_dim
             << "; alpha=1.5: " << rich.iterations << " iterations, coarse "
             << rich.coarse_dim << "; " << elapsed << " s";
    c.require(tight.iterations >= 8 && tight.iterations <= 16, "alpha=1 iterations in [8,16]");
    c.require(tight.coarse_dim >= 115 && tight.coarse_dim <= 175,
              "alpha=1 coarse dim in [115,175]");
    c.require(rich.iterations >= 3 && rich.iterations <= 8, "alpha=1.5 iterations in [3,8]");
    c.require(rich.coarse_dim >= 320 && rich.coarse_dim <= 480,
              "alpha=1.5 coarse dim in [320,480]");
    c.require(elapsed < 60.0, "runtime < 1 min");
    std::cout << (c.ok ? "[PASS]" : "[FAIL]")
              << " criterion 1: iteration/coarse bands at n=100 (" << c.detail.str() << ")\n";
    return c.ok;
}

bool criterion2() {
    Criterion c;
    const std::vector<double> alphas = {1.0, 1.1, 1.2, 1.3, 1.4, 1.5};
    for (const auto& [n, k] : {std::pair<int, double>{100, 18.5}, {200, 29.3}}) {
        ExperimentConfig base;
        base.n_glob = n;
        base.medium = MediumSpec::homogeneous(k);
        base.subdomain_count = 25;
        const std::vector<RunRecord> records = sweep(SweepAxis::Alpha, alphas, base);
        c.detail << "n=" << n << " iterations:";
        for (const RunRecord& r : records) {
            if (r.failed) throw std::runtime_error("sweep failed: " + r.error);
            c.detail << ' ' << r.iterations;
        }
        c.detail << " coarse:";
        for (const RunRecord& r : records) c.detail << ' ' << r.coarse_dim;
        c.detail << "; ";
        for (std::size_t i = 1; i < records.size(); ++i) {
            c.require(records[i].iterations <= records[i - 1].iterations,
                      "iterations non-increasing");
            c.require(records[i].coarse_dim > records[i - 1].coarse_dim,
                      "coarse dim strictly increasing");
        }
    }
    std::cout << (c.ok ? "[PASS]" : "[FAIL]")
              << " criterion 2: threshold monotonicity (" << c.detail.str() << ")\n";
    return c.ok;
}

bool criterion3() {
    Criterion c;
    const auto start = Clock::now();
    ExperimentConfig base;
    base.subdomain_count = 25;
    ladder_records = sweep_grid(grid_frequency_ladder(400), base);
    int lo = 1 << 30;
    int hi = 0;
    c.detail << "iterations:";
    for (const RunRecord& r : ladder_records) {
        if (r.failed) throw std::runtime_error("ladder run failed: " + r.error);
        lo = std::min(lo, r.iterations);
        hi = std::max(hi, r.iterations);
        c.detail << ' ' << r.iterations;
    }
    const double elapsed = seconds_since(start);
    c.detail << "; spread " << (hi - lo) << "; " << elapsed << " s";
    c.require(ladder_records.size() == 3, "three ladder rungs");
    c.require(hi - lo <= 3, "iteration spread <= 3");
    c.require(elapsed < 900.0, "runtime < 15 min");
    std::cout << (c.ok ? "[PASS]" : "[FAIL]")
              << " criterion 3: wave-number robustness at alpha=4/3 (" << c.detail.str()
              << ")\n";
    return c.ok;
}

bool criterion4() {
    Criterion c;
    c.detail << "iterations:";
    for (int N : {4, 25, 100, 196}) {
        const RunRecord r = run_uniform(100, MediumSpec::homogeneous(18.5), N, 4.0 / 3.0);
        c.detail << ' ' << r.iterations;
        c.require(r.iterations >= 4 && r.iterations <= 10,
                  "N=" + std::to_string(N) + " iterations in [4,10]");
    }
    std::cout << (c.ok ? "[PASS]" : "[FAIL]") << " criterion 4: N-scalability at n=100 ("
              << c.detail.str() << ")\n";
    return c.ok;
}

bool criterion5() {
    Criterion c;
    auto ladder_iterations = [&](double rho) {
        ExperimentConfig base;
        base.medium = MediumSpec::diagonal_layers(18.5, rho);
        base.subdomain_count = 16;
        std::vector<int> iterations;
        for (const RunRecord& r : sweep_grid(grid_frequency_ladder(400), base)) {
            if (r.failed) throw std::runtime_error("diagonal run failed: " + r.error);
            iterations.push_back(r.iterations);
        }
        return iterations;
    };
    const std::vector<int> at100 = ladder_iterations(100.0);
    const std::vector<int> at1000 = ladder_iterations(1000.0);
    c.detail << "rho=100:";
    for (int it : at100) c.detail << ' ' << it;
    c.detail << "; rho=1000:";
    for (int it : at1000) c.detail << ' ' << it;
    c.require(at100.size() == 3 && at1000.size() == 3, "three ladder rungs");
    c.require(at100[0] < at100[1] && at100[1] < at100[2], "iterations grow monotonically");
    c.require(static_cast<double>(at100.back()) >= 1.5 * static_cast<double>(at100.front()),
              "growth factor >= 1.5");
    for (std::size_t i = 0; i < at100.size(); ++i)
        c.require(std::abs(at100[i] - at1000[i]) <= 2, "rho=100 vs rho=1000 differ <= 2");
    std::cout << (c.ok ? "[PASS]" : "[FAIL]")
              << " criterion 5: heterogeneous diagonal layers (" << c.detail.str() << ")\n";
    return c.ok;
}

bool criterion6() {
    Criterion c;
    auto graph_run = [](int n, double k) {
        ExperimentConfig cfg;
        cfg.n_glob = n;
        cfg.medium = MediumSpec::homogeneous(k);
        cfg.partition = PartitionKind::Graph;
        cfg.subdomain_count = 25;
        const RunRecord r = run(cfg);
        if (r.failed) throw std::runtime_error("graph run failed: " + r.error);
        if (!r.converged) throw std::runtime_error("graph run did not converge");
        return r.iterations;
    };
    const int coarse_grid = graph_run(100, 18.5);
    const int fine_grid = graph_run(400, 46.5);
    c.detail << "iterations n=100: " << coarse_grid << ", n=400: " << fine_grid;
    c.require(fine_grid > coarse_grid, "iterations increase with n");
    c.require(coarse_grid < 30 && fine_grid < 30, "iterations < 30");
    std::cout << (c.ok ? "[PASS]" : "[FAIL]") << " criterion 6: graph partitions ("
              << c.detail.str() << ")\n";
    return c.ok;
}

bool criterion7() {
    Criterion c;

    {  // Partition-of-unity identity on a random ownership.
        const Mesh mesh = build_unit_square_mesh(10);
        const DofMap dofmap = build_dof_map(mesh);
        std::mt19937 rng(77);
        std::vector<int> owner(dofmap.free_count);
        for (int& o : owner) o = static_cast<int>(rng() % 7);
        const Decomposition d = partition_from_ownership(mesh, dofmap, owner);
        std::vector<double> unity(dofmap.free_count, 0.0);
        for (int j = 0; j < d.subdomain_count; ++j)
            for (std::size_t i = 0; i < d.overlapping[j].size(); ++i)
                unity[d.overlapping[j][i]] += d.weights[j][i];
        double worst = 0.0;
        for (double u : unity) worst = std::max(worst, std::abs(u - 1.0));
        c.detail << "partition-of-unity deviation " << worst;
        c.require(worst <= 1e-15, "partition of unity to 1e-15");
    }

    {  // Deflation identities and pencil residuals on a real decomposition.
        const Mesh mesh = build_unit_square_mesh(20);
        const DofMap dofmap = build_dof_map(mesh);
        const MediumSpec medium = MediumSpec::homogeneous(7.0);
        const SparseMatrix A = assemble_system(mesh, medium, dofmap);
        const Decomposition d = uniform_partition(mesh, dofmap, 2, 2);
        const auto locals = build_local_problems(A, mesh, medium, dofmap, d);

        std::vector<EigenPairs> selections(locals.size());
        double worst_pencil = 0.0;
        for (std::size_t j = 0; j < locals.size(); ++j) {
            const auto [S, M] = dtn_schur(locals[j]);
            const EigenPairs pairs = generalized_eig(S, M);
            const DenseMatrix Mc = M.cast<Complex>();
            for (int i = 0; i < pairs.size(); ++i) {
                const Vector v = pairs.vectors.col(i);
                const double res = (S * v - pairs.values[i] * (Mc * v)).norm() /
                                   (S.norm() + std::abs(pairs.values[i]) * M.norm());
                worst_pencil = std::max(worst_pencil, res);
            }
            selections[j] = dtn_select(pairs, locals[j].k_max, 4.0 / 3.0);
        }
        c.detail << "; pencil residual " << worst_pencil;
        c.require(worst_pencil <= 1e-8, "pencil residuals <= 1e-8");

        const CoarseSpace coarse = build_coarse_space(A, locals, selections);
        const DenseMatrix Z(coarse.basis());
        double worst_deflation = 0.0;
        for (int trial = 0; trial < 5; ++trial) {
            const Vector r =
                helmdd::testing::random_complex_vector(dofmap.free_count, 200 + trial);
            const Vector deflated = r - A * coarse.apply_correction(r);
            worst_deflation = std::max(
                worst_deflation, (Z.adjoint() * deflated).norm() / (Z.adjoint() * r).norm());
        }
        double worst_fixed_point = 0.0;
        for (int col = 0; col < coarse.dim(); ++col) {
            const Vector z = Z.col(col);
            worst_fixed_point =
                std::max(worst_fixed_point, (coarse.apply_correction(A * z) - z).norm());
        }
        c.detail << "; deflation " << worst_deflation << "; QAZ-Z " << worst_fixed_point;
        c.require(worst_deflation <= 1e-10, "Z^dagger (I - A Q) r = 0 to 1e-10");
        c.require(worst_fixed_point <= 1e-10, "Q A Z = Z to 1e-10");

        const Vector b = assemble_point_source(mesh, dofmap, {0.5, 0.5});
        const SparseFactorization exact(A);
        const GmresResult g = gmres([&](const Vector& v) { return Vector(A * v); },
                                    [&](const Vector& v) { return exact.solve(v); }, b,
                                    1e-8, 10);
        c.detail << "; exact-preconditioner iterations " << g.iterations;
        c.require(g.converged && g.iterations == 1, "one GMRES iteration");
    }

    {  // Manufactured-solution convergence order.
        const double e21 = helmdd::testing::manufactured_error_at(21, 5.0);
        const double e41 = helmdd::testing::manufactured_error_at(41, 5.0);
        const double e81 = helmdd::testing::manufactured_error_at(81, 5.0);
        const double order = 0.5 * (std::log2(e21 / e41) + std::log2(e41 / e81));
        c.detail << "; FEM order " << order;
        c.require(order >= 1.8 && order <= 2.2, "FEM order 2 +/- 0.2");
    }

    {  // Eigenvalues against the characteristic-polynomial oracle.
        const DenseMatrix B = helmdd::testing::random_complex_matrix(30, 7);
        const EigenPairs pairs = dense_eig(B);
        const std::vector<Complex> roots = helmdd::testing::char_poly_roots(B);
        const double dist = helmdd::testing::multiset_distance(
            std::vector<Complex>(pairs.values.data(), pairs.values.data() + pairs.size()),
            roots);
        c.detail << "; eig-vs-roots distance " << dist;
        c.require(dist <= 1e-6, "eigenvalue multiset to 1e-6");
    }

    std::cout << (c.ok ? "[PASS]" : "[FAIL]") << " criterion 7: property suite ("
              << c.detail.str() << ")\n";
    return c.ok;
}

bool criterion8() {
    Criterion c;
    std::vector<double> subdomain_counts;
    std::vector<double> coarse_dims;
    for (int N : {4, 9, 16, 25, 36, 49}) {
        const RunRecord r = run_uniform(200, MediumSpec::homogeneous(29.3), N, 4.0 / 3.0);
        subdomain_counts.push_back(static_cast<double>(N));
        coarse_dims.push_back(static_cast<double>(r.coarse_dim));
    }
    const double slope_n = loglog_slope(subdomain_counts, coarse_dims);
    c.detail << "coarse-vs-N slope " << slope_n;
    c.require(slope_n >= 0.4 && slope_n <= 0.9, "coarse dim vs N slope in [0.4,0.9]");

    if (ladder_records.size() == 3) {
        std::vector<double> ks;
        std::vector<double> dims;
        for (const RunRecord& r : ladder_records) {
            ks.push_back(r.config.medium.frequency());
            dims.push_back(static_cast<double>(r.coarse_dim));
        }
        const double slope_k = loglog_slope(ks, dims);
        c.detail << "; coarse-vs-k slope " << slope_k;
        c.require(slope_k >= 1.0 && slope_k <= 1.7, "coarse dim vs k slope in [1.0,1.7]");
    } else {
        c.require(false, "ladder records unavailable for the frequency slope");
    }
    std::cout << (c.ok ? "[PASS]" : "[FAIL]") << " criterion 8: coarse-dimension slopes ("
              << c.detail.str() << ")\n";
    return c.ok;
}

} // namespace

int main() {
    const std::function<bool()> criteria[] = {criterion1, criterion2, criterion3,
                                              criterion4, criterion5, criterion6,
                                              criterion7, criterion8};
    int failures = 0;
    int index = 1;
    for (const auto& criterion : criteria) {
        try {
            if (!criterion()) ++failures;
        } catch (const std::exception& e) {
            std::cout << "[FAIL] criterion " << index << ": exception: " << e.what() << "\n";
            ++failures;
        }
        ++index;
    }
    if (failures == 0) {
        std::cout << "all 8 acceptance criteria passed\n";
    } else {
        std::cout << failures << " acceptance criteria failed\n";
    }
    return failures;
}
