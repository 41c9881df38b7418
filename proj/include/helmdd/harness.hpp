#pragma once

#include <string>
#include <utility>
#include <vector>

#include "helmdd/medium.hpp"
#include "helmdd/schwarz.hpp"
#include "helmdd/types.hpp"

namespace helmdd {

enum class PartitionKind { Uniform, Graph, File };

/// One wave-guide solve: medium, decomposition, threshold exponent and
/// solver settings. The source sits at the domain center by default.
struct ExperimentConfig {
  int n_glob = 100;
  MediumSpec medium = MediumSpec::homogeneous(18.5);
  PartitionKind partition = PartitionKind::Uniform;
  int subdomain_count = 25; // uniform partitions need a perfect square
  std::string partition_file;
  // Two node-adjacency layers: neighboring dof sets then share a strip
  // comparable to element-based decompositions with one element layer of
  // overlap, which keeps iteration counts flat for many small subdomains.
  int overlap_layers = 2;
  double alpha = 4.0 / 3.0; // eta_max = k_j^alpha
  double rtol = 1e-6;
  int max_it = 500;
  bool two_level = true;
  Point source = Point(0.5, 0.5);
};

/// Throws std::invalid_argument on out-of-range settings
/// (n_glob >= 2, rtol in (0,1), alpha in [0.5, 2], ...).
void validate_config(const ExperimentConfig& config);

struct PhaseTimings {
  double assemble_seconds = 0.0;
  double setup_seconds = 0.0; // local problems, eigensolves, coarse space
  double solve_seconds = 0.0;
  double total_seconds = 0.0;
};

struct RunRecord {
  ExperimentConfig config;
  int subdomains = 0; // actual count (file partitions fix it from data)
  int iterations = 0;
  bool converged = false;
  bool failed = false; // pipeline threw; message in `error`
  std::string error;
  double relative_residual = 0.0;
  int coarse_dim = 0;
  std::vector<int> eigen_counts; // coarse columns per subdomain
  std::vector<double> residual_history;
  std::vector<SubdomainDiagnostics> diagnostics;
  PhaseTimings timings;
};

/// Full pipeline: mesh, assembly, partition, coarse space, GMRES.
/// Deterministic for a fixed config. Non-convergence is flagged in the
/// record, not thrown.
RunRecord run(const ExperimentConfig& config);

enum class SweepAxis { Alpha, Subdomains, Contrast };

/// One run per value, in order. A failed run is kept in the list with its
/// error message and skipped numbers.
std::vector<RunRecord> sweep(SweepAxis axis, const std::vector<double>& values,
                             const ExperimentConfig& base);

/// Sweep over (n_glob, frequency) pairs; frequency sets k for homogeneous
/// media and omega for layered ones.
std::vector<RunRecord> sweep_grid(const std::vector<std::pair<int, double>>& grid_frequency,
                                  const ExperimentConfig& base);

/// The (n_glob, frequency) ladder used throughout: frequency steps keep
/// n_glob roughly proportional to k^{3/2}, controlling the pollution
/// effect. Entries with n_glob above the cap are dropped.
std::vector<std::pair<int, double>> grid_frequency_ladder(int max_n_glob = 400);

/// CSV columns "n_glob,k_or_omega,rho,variant,N,alpha,iters,coarse_dim,
/// converged,seconds"; doubles at full precision so parsing round-trips.
void emit_csv(const std::vector<RunRecord>& records, const std::string& path);

struct CsvRow {
  int n_glob = 0;
  double k_or_omega = 0.0;
  double rho = 0.0;
  std::string variant;
  int subdomains = 0;
  double alpha = 0.0;
  int iterations = 0;
  int coarse_dim = 0;
  bool converged = false;
  double seconds = 0.0;
};

std::vector<CsvRow> read_csv(const std::string& path);

enum class PlotField { Subdomains, Frequency, NGlob, Alpha, Iterations, CoarseDim };

double plot_value(const RunRecord& record, PlotField field);

/// Static scatter/line SVG of one record field against another, with
/// optional log axes. Failed records and nonpositive values on log axes
/// are skipped.
void emit_svg_plot(const std::vector<RunRecord>& records, PlotField x_field, PlotField y_field,
                   bool log_x, bool log_y, const std::string& path);

} // namespace helmdd
