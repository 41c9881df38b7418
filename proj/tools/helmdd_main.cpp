#include <cmath>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "helmdd/assembly.hpp"
#include "helmdd/harness.hpp"
#include "helmdd/linalg.hpp"
#include "helmdd/mesh.hpp"
#include "helmdd/partition.hpp"
#include "helmdd/schwarz.hpp"

namespace {

struct CliOptions {
  int n_glob = 100;
  std::string medium = "homogeneous";
  double k = 18.5;
  double omega = 18.5;
  double rho = 10.0;
  std::string partition = "uniform";
  std::string partition_file;
  int subdomains = 25;
  int overlap = 2;
  double alpha = 4.0 / 3.0;
  double rtol = 1e-6;
  int max_it = 500;
  bool one_level = false;

  std::string axis; // empty: single run
  std::vector<double> values;
  int max_n_glob = 400;

  std::string out;
  std::string svg;
  std::string svg_x = "N";
  std::string svg_y = "coarse-dim";
  bool log_log = false;
  std::string residual_out;
  std::string diag_out;
  std::string mesh_out;
  std::string matrix_out;
  std::string write_partition;
};

helmdd::ExperimentConfig to_config(const CliOptions& o) {
  helmdd::ExperimentConfig c;
  c.n_glob = o.n_glob;
  switch (helmdd::medium_kind_from_name(o.medium)) {
  case helmdd::MediumKind::Homogeneous:
    c.medium = helmdd::MediumSpec::homogeneous(o.k);
    break;
  case helmdd::MediumKind::AlternatingLayers:
    c.medium = helmdd::MediumSpec::alternating_layers(o.omega, o.rho);
    break;
  case helmdd::MediumKind::DiagonalLayers:
    c.medium = helmdd::MediumSpec::diagonal_layers(o.omega, o.rho);
    break;
  }
  if (o.partition == "uniform")
    c.partition = helmdd::PartitionKind::Uniform;
  else if (o.partition == "graph")
    c.partition = helmdd::PartitionKind::Graph;
  else if (o.partition == "file")
    c.partition = helmdd::PartitionKind::File;
  else
    throw std::invalid_argument("unknown partition kind: " + o.partition);
  c.subdomain_count = o.subdomains;
  c.partition_file = o.partition_file;
  c.overlap_layers = o.overlap;
  c.alpha = o.alpha;
  c.rtol = o.rtol;
  c.max_it = o.max_it;
  c.two_level = !o.one_level;
  return c;
}

helmdd::PlotField plot_field_from_name(const std::string& name) {
  static const std::map<std::string, helmdd::PlotField> fields = {
      {"N", helmdd::PlotField::Subdomains},    {"k", helmdd::PlotField::Frequency},
      {"n-glob", helmdd::PlotField::NGlob},    {"alpha", helmdd::PlotField::Alpha},
      {"iters", helmdd::PlotField::Iterations}, {"coarse-dim", helmdd::PlotField::CoarseDim}};
  const auto it = fields.find(name);
  if (it == fields.end()) throw std::invalid_argument("unknown plot field: " + name);
  return it->second;
}

void print_record(const helmdd::RunRecord& r) {
  if (r.failed) {
    std::cout << "n_glob=" << r.config.n_glob << " failed: " << r.error << '\n';
    return;
  }
  std::cout << "n_glob=" << r.config.n_glob << " medium=" << medium_name(r.config.medium)
            << " freq=" << r.config.medium.frequency() << " N=" << r.subdomains
            << " alpha=" << r.config.alpha << " iters=" << r.iterations
            << " coarse=" << r.coarse_dim << " converged=" << (r.converged ? 1 : 0)
            << " residual=" << r.relative_residual << " seconds=" << r.timings.total_seconds
            << '\n';
  if (!r.converged)
    std::cerr << "warning: GMRES stopped at " << r.iterations
              << " iterations without reaching tolerance\n";
}

int execute(const CliOptions& opts) {
  const helmdd::ExperimentConfig config = to_config(opts);

  if (!opts.mesh_out.empty() || !opts.matrix_out.empty() || !opts.write_partition.empty()) {
    const helmdd::Mesh mesh = helmdd::build_unit_square_mesh(config.n_glob);
    if (!opts.mesh_out.empty()) helmdd::write_mesh(mesh, opts.mesh_out);
    if (!opts.matrix_out.empty()) {
      const auto [A, dofmap] = helmdd::assemble_system(mesh, config.medium);
      helmdd::write_matrix_market(A, opts.matrix_out);
    }
    if (!opts.write_partition.empty()) {
      helmdd::validate_config(config);
      const helmdd::DofMap dofmap = helmdd::build_dof_map(mesh);
      const helmdd::Decomposition decomposition = [&] {
        switch (config.partition) {
        case helmdd::PartitionKind::Uniform: {
          const int s =
              static_cast<int>(std::lround(std::sqrt(double(config.subdomain_count))));
          return helmdd::uniform_partition(mesh, dofmap, s, config.overlap_layers);
        }
        case helmdd::PartitionKind::Graph:
          return helmdd::graph_partition(mesh, dofmap, config.subdomain_count,
                                         config.overlap_layers);
        default:
          return helmdd::partition_from_file(mesh, dofmap, config.partition_file,
                                             config.overlap_layers);
        }
      }();
      helmdd::write_partition_file(decomposition, opts.write_partition);
    }
  }

  std::vector<helmdd::RunRecord> records;
  if (opts.axis.empty()) {
    records.push_back(helmdd::run(config));
    const helmdd::RunRecord& r = records.back();
    if (!opts.residual_out.empty()) helmdd::write_residual_csv(r.residual_history, opts.residual_out);
    if (!opts.diag_out.empty()) helmdd::write_subdomain_diagnostics(r.diagnostics, opts.diag_out);
  } else {
    if (!opts.residual_out.empty() || !opts.diag_out.empty())
      throw std::invalid_argument("--residual-out/--diag-out apply to single runs only");
    if (opts.axis == "grid") {
      if (!opts.values.empty())
        throw std::invalid_argument("--values is not used with the grid axis");
      records = helmdd::sweep_grid(helmdd::grid_frequency_ladder(opts.max_n_glob), config);
    } else {
      static const std::map<std::string, helmdd::SweepAxis> axes = {
          {"alpha", helmdd::SweepAxis::Alpha},
          {"subdomains", helmdd::SweepAxis::Subdomains},
          {"rho", helmdd::SweepAxis::Contrast}};
      records = helmdd::sweep(axes.at(opts.axis), opts.values, config);
    }
  }

  for (const helmdd::RunRecord& r : records) print_record(r);
  if (!opts.out.empty()) helmdd::emit_csv(records, opts.out);
  if (!opts.svg.empty())
    helmdd::emit_svg_plot(records, plot_field_from_name(opts.svg_x),
                          plot_field_from_name(opts.svg_y), opts.log_log, opts.log_log,
                          opts.svg);
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-level Schwarz solver for the heterogeneous Helmholtz wave guide"};
  CliOptions opts;

  app.set_config("--config", "", "key=value config file; command-line flags override it");
  app.add_option("--n-glob", opts.n_glob, "grid points per side")->capture_default_str();
  app.add_option("--medium", opts.medium, "medium variant")
      ->check(CLI::IsMember({"homogeneous", "alternating", "diagonal"}))
      ->capture_default_str();
  app.add_option("--k", opts.k, "wave number (homogeneous medium)")->capture_default_str();
  app.add_option("--omega", opts.omega, "angular frequency (layered media)")
      ->capture_default_str();
  app.add_option("--rho", opts.rho, "wave speed contrast (layered media)")
      ->capture_default_str();
  app.add_option("--partition", opts.partition, "decomposition kind")
      ->check(CLI::IsMember({"uniform", "graph", "file"}))
      ->capture_default_str();
  app.add_option("--partition-file", opts.partition_file,
                 "dof-to-subdomain file for --partition file");
  app.add_option("--subdomains", opts.subdomains,
                 "subdomain count N (uniform partitions need a perfect square)")
      ->capture_default_str();
  app.add_option("--overlap", opts.overlap, "overlap layers")->capture_default_str();
  app.add_option("--alpha", opts.alpha, "threshold exponent in eta_max = k_j^alpha")
      ->capture_default_str();
  app.add_option("--rtol", opts.rtol, "GMRES relative residual tolerance")
      ->capture_default_str();
  app.add_option("--max-it", opts.max_it, "GMRES iteration cap")->capture_default_str();
  app.add_flag("--one-level", opts.one_level, "RAS only, skip the coarse space");

  app.add_option("--axis", opts.axis, "sweep instead of a single run")
      ->check(CLI::IsMember({"alpha", "subdomains", "rho", "grid"}));
  app.add_option("--values", opts.values, "sweep values (axes alpha/subdomains/rho)")
      ->delimiter(',');
  app.add_option("--max-n-glob", opts.max_n_glob, "grid-axis ladder cap")
      ->capture_default_str();

  app.add_option("--out", opts.out, "write run records as CSV");
  app.add_option("--svg", opts.svg, "write an SVG plot of the records");
  app.add_option("--svg-x", opts.svg_x, "plot x field")
      ->check(CLI::IsMember({"N", "k", "n-glob", "alpha", "iters", "coarse-dim"}))
      ->capture_default_str();
  app.add_option("--svg-y", opts.svg_y, "plot y field")
      ->check(CLI::IsMember({"N", "k", "n-glob", "alpha", "iters", "coarse-dim"}))
      ->capture_default_str();
  app.add_flag("--log-log", opts.log_log, "log-log axes for the plot");
  app.add_option("--residual-out", opts.residual_out, "GMRES residual history CSV (single run)");
  app.add_option("--diag-out", opts.diag_out, "per-subdomain diagnostics CSV (single run)");
  app.add_option("--mesh-out", opts.mesh_out, "mesh dump");
  app.add_option("--matrix-out", opts.matrix_out, "system matrix in MatrixMarket form");
  app.add_option("--write-partition", opts.write_partition, "decomposition ownership dump");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1; // help/version keep 0, any parse error is a config error
  }

  try {
    return execute(opts);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
