#include "helmdd/partition.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace helmdd {

namespace {

// Free dofs are adjacent when their vertices share a triangle (the sparsity
// pattern of the assembled matrix).
void build_adjacency(const Mesh& mesh, const DofMap& dofmap, Decomposition& d) {
  std::vector<std::vector<int>> nbrs(dofmap.free_count);
  for (const auto& tri : mesh.triangles) {
    int dofs[3];
    for (int i = 0; i < 3; ++i) dofs[i] = dofmap.vertex_to_dof[tri[i]];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        if (i != j && dofs[i] >= 0 && dofs[j] >= 0) nbrs[dofs[i]].push_back(dofs[j]);
  }
  d.adj_ptr.assign(dofmap.free_count + 1, 0);
  for (int u = 0; u < dofmap.free_count; ++u) {
    auto& list = nbrs[u];
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
    d.adj_ptr[u + 1] = d.adj_ptr[u] + static_cast<int>(list.size());
  }
  d.adj_idx.reserve(d.adj_ptr.back());
  for (auto& list : nbrs) d.adj_idx.insert(d.adj_idx.end(), list.begin(), list.end());
}

Decomposition from_owner_vector(const Mesh& mesh, const DofMap& dofmap,
                                const std::vector<int>& owner, int subdomain_count,
                                int overlap_layers) {
  Decomposition d;
  d.subdomain_count = subdomain_count;
  d.free_count = dofmap.free_count;
  d.owned.assign(subdomain_count, {});
  for (int dof = 0; dof < dofmap.free_count; ++dof) {
    const int j = owner[dof];
    if (j < 0 || j >= subdomain_count)
      throw std::invalid_argument("partition: subdomain index out of range");
    d.owned[j].push_back(dof);
  }
  d.overlapping = d.owned;
  build_adjacency(mesh, dofmap, d);
  return add_overlap(std::move(d), overlap_layers);
}

} // namespace

Decomposition uniform_partition(const Mesh& mesh, const DofMap& dofmap, int boxes_per_side,
                                int overlap_layers) {
  const int s = boxes_per_side;
  if (s < 1) throw std::invalid_argument("uniform_partition: boxes_per_side must be >= 1");
  if (s > mesh.n_glob - 1)
    throw std::invalid_argument("uniform_partition: more boxes than grid cells per side");

  const int segments = mesh.n_glob - 1;
  // Box of grid line i: boundaries sit where i*s is a multiple of n_glob-1;
  // a node exactly on a boundary belongs to the lower box. Integer form of
  // ceil(i*s/(n_glob-1)) - 1.
  auto box_of = [&](int i) { return i == 0 ? 0 : (i * s - 1) / segments; };

  std::vector<int> owner(dofmap.free_count);
  for (int dof = 0; dof < dofmap.free_count; ++dof) {
    const int v = dofmap.dof_to_vertex[dof];
    owner[dof] = box_of(mesh.vertex_iy(v)) * s + box_of(mesh.vertex_ix(v));
  }
  return from_owner_vector(mesh, dofmap, owner, s * s, overlap_layers);
}

Decomposition graph_partition(const Mesh& mesh, const DofMap& dofmap, int subdomain_count,
                              int overlap_layers) {
  const int N = subdomain_count;
  if (N < 1) throw std::invalid_argument("graph_partition: subdomain_count must be >= 1");
  if (N > dofmap.free_count)
    throw std::invalid_argument("graph_partition: more subdomains than free dofs");

  Decomposition scratch;
  build_adjacency(mesh, dofmap, scratch);

  const int n = dofmap.free_count;
  std::vector<int> owner(n, -1);
  int next_seed = 0;
  for (int j = 0; j < N; ++j) {
    int quota = n / N + (j < n % N ? 1 : 0);
    std::deque<int> queue;
    int count = 0;
    while (count < quota) {
      if (queue.empty()) {
        while (owner[next_seed] != -1) ++next_seed;
        owner[next_seed] = j;
        ++count;
        queue.push_back(next_seed);
        continue;
      }
      const int u = queue.front();
      queue.pop_front();
      for (int p = scratch.adj_ptr[u]; p < scratch.adj_ptr[u + 1] && count < quota; ++p) {
        const int v = scratch.adj_idx[p];
        if (owner[v] == -1) {
          owner[v] = j;
          ++count;
          queue.push_back(v);
        }
      }
    }
  }
  return from_owner_vector(mesh, dofmap, owner, N, overlap_layers);
}

Decomposition partition_from_ownership(const Mesh& mesh, const DofMap& dofmap,
                                       const std::vector<int>& owner, int overlap_layers) {
  if (static_cast<int>(owner.size()) != dofmap.free_count)
    throw std::invalid_argument("partition_from_ownership: owner size != free dof count");
  int max_index = -1;
  for (int j : owner) max_index = std::max(max_index, j);
  if (max_index < 0) throw std::invalid_argument("partition_from_ownership: empty ownership");
  return from_owner_vector(mesh, dofmap, owner, max_index + 1, overlap_layers);
}

Decomposition partition_from_file(const Mesh& mesh, const DofMap& dofmap,
                                  const std::string& path, int overlap_layers) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("partition_from_file: cannot open " + path);
  std::vector<int> owner(dofmap.free_count, -1);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    int dof = -1, sub = -1;
    if (!(ss >> dof >> sub))
      throw std::invalid_argument("partition_from_file: malformed line " + std::to_string(lineno));
    if (dof < 0 || dof >= dofmap.free_count)
      throw std::invalid_argument("partition_from_file: dof index out of range at line " +
                                  std::to_string(lineno));
    if (owner[dof] != -1)
      throw std::invalid_argument("partition_from_file: dof assigned twice at line " +
                                  std::to_string(lineno));
    owner[dof] = sub;
  }
  for (int dof = 0; dof < dofmap.free_count; ++dof)
    if (owner[dof] == -1)
      throw std::invalid_argument("partition_from_file: dof " + std::to_string(dof) +
                                  " unassigned");
  return partition_from_ownership(mesh, dofmap, owner, overlap_layers);
}

void write_partition_file(const Decomposition& decomposition, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_partition_file: cannot open " + path);
  for (int j = 0; j < decomposition.subdomain_count; ++j)
    for (int dof : decomposition.owned[j]) out << dof << ' ' << j << '\n';
  if (!out) throw std::runtime_error("write_partition_file: write failed for " + path);
}

Decomposition add_overlap(Decomposition decomposition, int layers) {
  if (layers < 0) throw std::invalid_argument("add_overlap: layers must be >= 0");
  std::vector<char> in_set(decomposition.free_count);
  for (auto& set : decomposition.overlapping) {
    std::fill(in_set.begin(), in_set.end(), 0);
    for (int dof : set) in_set[dof] = 1;
    std::vector<int> frontier = set;
    for (int layer = 0; layer < layers; ++layer) {
      std::vector<int> next;
      for (int u : frontier)
        for (int p = decomposition.adj_ptr[u]; p < decomposition.adj_ptr[u + 1]; ++p) {
          const int v = decomposition.adj_idx[p];
          if (!in_set[v]) {
            in_set[v] = 1;
            next.push_back(v);
          }
        }
      set.insert(set.end(), next.begin(), next.end());
      frontier = std::move(next);
    }
    std::sort(set.begin(), set.end());
  }
  decomposition.weights = partition_of_unity(decomposition);
  return decomposition;
}

std::vector<RealVector> partition_of_unity(const Decomposition& decomposition) {
  std::vector<int> multiplicity(decomposition.free_count, 0);
  for (const auto& set : decomposition.overlapping)
    for (int dof : set) ++multiplicity[dof];
  for (int dof = 0; dof < decomposition.free_count; ++dof)
    if (multiplicity[dof] == 0)
      throw std::runtime_error("partition_of_unity: dof " + std::to_string(dof) +
                               " not covered by any subdomain");
  std::vector<RealVector> weights(decomposition.subdomain_count);
  for (int j = 0; j < decomposition.subdomain_count; ++j) {
    const auto& set = decomposition.overlapping[j];
    weights[j].resize(static_cast<Eigen::Index>(set.size()));
    for (std::size_t i = 0; i < set.size(); ++i) weights[j][i] = 1.0 / multiplicity[set[i]];
  }
  return weights;
}

} // namespace helmdd
