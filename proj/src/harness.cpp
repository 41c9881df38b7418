#include "helmdd/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "helmdd/assembly.hpp"
#include "helmdd/linalg.hpp"
#include "helmdd/mesh.hpp"
#include "helmdd/parallel.hpp"
#include "helmdd/partition.hpp"

namespace helmdd {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

Decomposition make_decomposition(const Mesh& mesh, const DofMap& dofmap,
                                 const ExperimentConfig& config) {
  switch (config.partition) {
  case PartitionKind::Uniform: {
    const int s = static_cast<int>(std::lround(std::sqrt(double(config.subdomain_count))));
    return uniform_partition(mesh, dofmap, s, config.overlap_layers);
  }
  case PartitionKind::Graph:
    return graph_partition(mesh, dofmap, config.subdomain_count, config.overlap_layers);
  case PartitionKind::File:
    return partition_from_file(mesh, dofmap, config.partition_file, config.overlap_layers);
  }
  throw std::invalid_argument("run: unknown partition kind");
}

void set_frequency(MediumSpec& medium, double frequency) {
  switch (medium.kind) {
  case MediumKind::Homogeneous:
    medium = MediumSpec::homogeneous(frequency);
    break;
  case MediumKind::AlternatingLayers:
    medium = MediumSpec::alternating_layers(frequency, medium.rho);
    break;
  case MediumKind::DiagonalLayers:
    medium = MediumSpec::diagonal_layers(frequency, medium.rho);
    break;
  }
}

void apply_axis(ExperimentConfig& config, SweepAxis axis, double value) {
  switch (axis) {
  case SweepAxis::Alpha:
    config.alpha = value;
    return;
  case SweepAxis::Subdomains: {
    const int n = static_cast<int>(std::lround(value));
    if (std::abs(value - n) > 0.0)
      throw std::invalid_argument("sweep: subdomain counts must be integers");
    config.subdomain_count = n;
    return;
  }
  case SweepAxis::Contrast:
    if (config.medium.kind == MediumKind::Homogeneous)
      throw std::invalid_argument("sweep: contrast sweep needs a layered medium");
    config.medium = config.medium.kind == MediumKind::AlternatingLayers
                        ? MediumSpec::alternating_layers(config.medium.omega, value)
                        : MediumSpec::diagonal_layers(config.medium.omega, value);
    return;
  }
  throw std::invalid_argument("sweep: unknown axis");
}

const char* field_name(PlotField field) {
  switch (field) {
  case PlotField::Subdomains: return "N";
  case PlotField::Frequency: return "k_or_omega";
  case PlotField::NGlob: return "n_glob";
  case PlotField::Alpha: return "alpha";
  case PlotField::Iterations: return "iterations";
  case PlotField::CoarseDim: return "coarse_dim";
  }
  return "?";
}

} // namespace

void validate_config(const ExperimentConfig& config) {
  if (config.n_glob < 2) throw std::invalid_argument("config: n_glob must be at least 2");
  if (!(config.rtol > 0.0 && config.rtol < 1.0))
    throw std::invalid_argument("config: rtol must lie in (0,1)");
  if (!(config.alpha >= 0.5 && config.alpha <= 2.0))
    throw std::invalid_argument("config: alpha must lie in [0.5, 2]");
  if (config.max_it < 1) throw std::invalid_argument("config: max_it must be positive");
  if (config.overlap_layers < 0)
    throw std::invalid_argument("config: overlap_layers must be nonnegative");
  if (config.partition == PartitionKind::File) {
    if (config.partition_file.empty())
      throw std::invalid_argument("config: file partition needs a partition file path");
  } else {
    if (config.subdomain_count < 1)
      throw std::invalid_argument("config: subdomain count must be positive");
    if (config.partition == PartitionKind::Uniform) {
      const int s = static_cast<int>(std::lround(std::sqrt(double(config.subdomain_count))));
      if (s * s != config.subdomain_count)
        throw std::invalid_argument("config: uniform partitions need a square subdomain count");
    }
  }
  if (!(config.source.x() > 0.0 && config.source.x() < 1.0 && config.source.y() > 0.0 &&
        config.source.y() < 1.0))
    throw std::invalid_argument("config: source must lie inside the unit square");
}

RunRecord run(const ExperimentConfig& config) {
  validate_config(config);
  RunRecord record;
  record.config = config;

  const auto t_start = Clock::now();
  const Mesh mesh = build_unit_square_mesh(config.n_glob);
  const auto [A, dofmap] = assemble_system(mesh, config.medium);
  const Vector b = assemble_point_source(mesh, dofmap, config.source);
  record.timings.assemble_seconds = seconds_since(t_start);

  const auto t_setup = Clock::now();
  const Decomposition decomposition = make_decomposition(mesh, dofmap, config);
  record.subdomains = decomposition.subdomain_count;
  const std::vector<LocalProblem> locals =
      build_local_problems(A, mesh, config.medium, dofmap, decomposition);

  CoarseSpace coarse;
  if (config.two_level) {
    std::vector<EigenPairs> selections(locals.size());
    record.diagnostics.assign(locals.size(), SubdomainDiagnostics{});
    parallel_for(static_cast<int>(locals.size()), [&](int j) {
      const LocalProblem& lp = locals[j];
      SubdomainDiagnostics& diag = record.diagnostics[j];
      diag.index = j;
      diag.gamma_dim = static_cast<int>(lp.gamma.size());
      diag.k_max = lp.k_max;
      diag.eta_max = std::pow(lp.k_max, config.alpha);
      if (lp.gamma.empty()) return;
      const auto [S, M] = dtn_schur(lp);
      const EigenPairs pairs = generalized_eig(S, M);
      selections[j] = dtn_select(pairs, lp.k_max, config.alpha);
      diag.selected = static_cast<int>(selections[j].size());
      diag.min_re_lambda = pairs.values.real().minCoeff();
      diag.max_re_lambda = pairs.values.real().maxCoeff();
    });
    coarse = build_coarse_space(A, locals, selections);
    record.coarse_dim = coarse.dim();
    record.eigen_counts = coarse.per_subdomain_count();
  }
  record.timings.setup_seconds = seconds_since(t_setup);

  const auto t_solve = Clock::now();
  const LinearOperator apply_A = [&A](const Vector& x) { return Vector(A * x); };
  const LinearOperator apply_M = [&](const Vector& r) {
    return config.two_level ? apply_two_level(locals, coarse, A, r) : apply_ras(locals, r);
  };
  GmresResult result = gmres(apply_A, apply_M, b, config.rtol, config.max_it);
  record.timings.solve_seconds = seconds_since(t_solve);

  record.iterations = result.iterations;
  record.converged = result.converged;
  record.relative_residual = result.relative_residual;
  record.residual_history = std::move(result.residual_history);
  record.timings.total_seconds = seconds_since(t_start);
  return record;
}

std::vector<RunRecord> sweep(SweepAxis axis, const std::vector<double>& values,
                             const ExperimentConfig& base) {
  if (values.empty()) throw std::invalid_argument("sweep: no values given");
  std::vector<RunRecord> records;
  records.reserve(values.size());
  for (const double value : values) {
    ExperimentConfig config = base;
    try {
      apply_axis(config, axis, value);
      records.push_back(run(config));
    } catch (const std::exception& e) {
      RunRecord failed;
      failed.config = config;
      failed.subdomains = config.subdomain_count;
      failed.failed = true;
      failed.error = e.what();
      records.push_back(std::move(failed));
    }
  }
  return records;
}

std::vector<RunRecord> sweep_grid(const std::vector<std::pair<int, double>>& grid_frequency,
                                  const ExperimentConfig& base) {
  if (grid_frequency.empty()) throw std::invalid_argument("sweep_grid: no values given");
  std::vector<RunRecord> records;
  records.reserve(grid_frequency.size());
  for (const auto& [n_glob, frequency] : grid_frequency) {
    ExperimentConfig config = base;
    config.n_glob = n_glob;
    try {
      set_frequency(config.medium, frequency);
      records.push_back(run(config));
    } catch (const std::exception& e) {
      RunRecord failed;
      failed.config = config;
      failed.subdomains = config.subdomain_count;
      failed.failed = true;
      failed.error = e.what();
      records.push_back(std::move(failed));
    }
  }
  return records;
}

std::vector<std::pair<int, double>> grid_frequency_ladder(int max_n_glob) {
  static const std::vector<std::pair<int, double>> ladder = {
      {100, 18.5}, {200, 29.3}, {400, 46.5}, {800, 73.8}, {1600, 117.2}};
  std::vector<std::pair<int, double>> out;
  for (const auto& entry : ladder)
    if (entry.first <= max_n_glob) out.push_back(entry);
  return out;
}

void emit_csv(const std::vector<RunRecord>& records, const std::string& path) {
  if (records.empty()) throw std::invalid_argument("emit_csv: no records");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("emit_csv: cannot open " + path);
  out.precision(17);
  out << "n_glob,k_or_omega,rho,variant,N,alpha,iters,coarse_dim,converged,seconds\n";
  for (const RunRecord& r : records)
    out << r.config.n_glob << ',' << r.config.medium.frequency() << ',' << r.config.medium.rho
        << ',' << medium_name(r.config.medium) << ',' << r.subdomains << ',' << r.config.alpha
        << ',' << r.iterations << ',' << r.coarse_dim << ',' << (r.converged ? 1 : 0) << ','
        << r.timings.total_seconds << '\n';
  if (!out) throw std::runtime_error("emit_csv: write failed for " + path);
}

std::vector<CsvRow> read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_csv: cannot open " + path);
  std::string line;
  if (!std::getline(in, line) ||
      line != "n_glob,k_or_omega,rho,variant,N,alpha,iters,coarse_dim,converged,seconds")
    throw std::runtime_error("read_csv: unexpected header in " + path);

  std::vector<CsvRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 10) throw std::runtime_error("read_csv: malformed row: " + line);
    CsvRow row;
    row.n_glob = std::stoi(fields[0]);
    row.k_or_omega = std::stod(fields[1]);
    row.rho = std::stod(fields[2]);
    row.variant = fields[3];
    row.subdomains = std::stoi(fields[4]);
    row.alpha = std::stod(fields[5]);
    row.iterations = std::stoi(fields[6]);
    row.coarse_dim = std::stoi(fields[7]);
    row.converged = std::stoi(fields[8]) != 0;
    row.seconds = std::stod(fields[9]);
    rows.push_back(std::move(row));
  }
  return rows;
}

double plot_value(const RunRecord& record, PlotField field) {
  switch (field) {
  case PlotField::Subdomains: return record.subdomains;
  case PlotField::Frequency: return record.config.medium.frequency();
  case PlotField::NGlob: return record.config.n_glob;
  case PlotField::Alpha: return record.config.alpha;
  case PlotField::Iterations: return record.iterations;
  case PlotField::CoarseDim: return record.coarse_dim;
  }
  return 0.0;
}

void emit_svg_plot(const std::vector<RunRecord>& records, PlotField x_field, PlotField y_field,
                   bool log_x, bool log_y, const std::string& path) {
  if (records.empty()) throw std::invalid_argument("emit_svg_plot: no records");

  std::vector<std::pair<double, double>> points;
  for (const RunRecord& r : records) {
    if (r.failed) continue;
    const double x = plot_value(r, x_field);
    const double y = plot_value(r, y_field);
    if ((log_x && x <= 0.0) || (log_y && y <= 0.0)) continue;
    points.emplace_back(log_x ? std::log10(x) : x, log_y ? std::log10(y) : y);
  }
  if (points.empty()) throw std::runtime_error("emit_svg_plot: nothing to plot");
  std::sort(points.begin(), points.end());

  double x_min = points.front().first, x_max = points.back().first;
  double y_min = points.front().second, y_max = points.front().second;
  for (const auto& [x, y] : points) {
    y_min = std::min(y_min, y);
    y_max = std::max(y_max, y);
  }
  if (x_max - x_min < 1e-12) { x_min -= 0.5; x_max += 0.5; }
  if (y_max - y_min < 1e-12) { y_min -= 0.5; y_max += 0.5; }

  const double width = 640.0, height = 480.0;
  const double ml = 70.0, mr = 20.0, mt = 20.0, mb = 50.0;
  const auto px = [&](double x) { return ml + (x - x_min) / (x_max - x_min) * (width - ml - mr); };
  const auto py = [&](double y) {
    return height - mb - (y - y_min) / (y_max - y_min) * (height - mt - mb);
  };
  const auto tick_label = [](double t, bool log_axis) {
    std::ostringstream os;
    os << std::setprecision(3) << (log_axis ? std::pow(10.0, t) : t);
    return os.str();
  };

  std::ofstream out(path);
  if (!out) throw std::runtime_error("emit_svg_plot: cannot open " + path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  const int ticks = 5;
  for (int i = 0; i < ticks; ++i) {
    const double tx = x_min + (x_max - x_min) * i / (ticks - 1);
    const double ty = y_min + (y_max - y_min) * i / (ticks - 1);
    out << "<line x1=\"" << px(tx) << "\" y1=\"" << mt << "\" x2=\"" << px(tx) << "\" y2=\""
        << height - mb << "\" stroke=\"#dddddd\"/>\n"
        << "<line x1=\"" << ml << "\" y1=\"" << py(ty) << "\" x2=\"" << width - mr << "\" y2=\""
        << py(ty) << "\" stroke=\"#dddddd\"/>\n"
        << "<text x=\"" << px(tx) << "\" y=\"" << height - mb + 18
        << "\" font-size=\"11\" text-anchor=\"middle\">" << tick_label(tx, log_x) << "</text>\n"
        << "<text x=\"" << ml - 6 << "\" y=\"" << py(ty) + 4
        << "\" font-size=\"11\" text-anchor=\"end\">" << tick_label(ty, log_y) << "</text>\n";
  }
  out << "<line x1=\"" << ml << "\" y1=\"" << height - mb << "\" x2=\"" << width - mr
      << "\" y2=\"" << height - mb << "\" stroke=\"black\"/>\n"
      << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << height - mb
      << "\" stroke=\"black\"/>\n"
      << "<text x=\"" << (ml + width - mr) / 2 << "\" y=\"" << height - 10
      << "\" font-size=\"13\" text-anchor=\"middle\">" << field_name(x_field)
      << (log_x ? " (log)" : "") << "</text>\n"
      << "<text x=\"16\" y=\"" << (mt + height - mb) / 2
      << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << (mt + height - mb) / 2 << ")\">" << field_name(y_field) << (log_y ? " (log)" : "")
      << "</text>\n";

  out << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\" points=\"";
  for (const auto& [x, y] : points) out << px(x) << ',' << py(y) << ' ';
  out << "\"/>\n";
  for (const auto& [x, y] : points)
    out << "<circle cx=\"" << px(x) << "\" cy=\"" << py(y) << "\" r=\"3\" fill=\"#1f77b4\"/>\n";
  out << "</svg>\n";
  if (!out) throw std::runtime_error("emit_svg_plot: write failed for " + path);
}

} // namespace helmdd
