#pragma once

#include <string>
#include <vector>

#include "helmdd/assembly.hpp"
#include "helmdd/mesh.hpp"
#include "helmdd/types.hpp"

namespace helmdd {

/// Overlapping decomposition of the free dofs.
///
/// The owned sets partition the free dofs; each overlapping set contains
/// its owned set (grown by layers of dof adjacency, where two dofs are
/// adjacent when they share a triangle). The diagonal weights D_j hold
/// 1/multiplicity per overlapping dof, so that sum_j R_j^T D_j R_j = I.
struct Decomposition {
  int subdomain_count = 0;
  int free_count = 0;
  std::vector<std::vector<int>> owned;
  std::vector<std::vector<int>> overlapping;
  std::vector<RealVector> weights;
  // free-dof adjacency in CSR form, kept so overlap can be grown later
  std::vector<int> adj_ptr;
  std::vector<int> adj_idx;
};

/// N = s^2 congruent coordinate boxes; nodes on internal box boundaries go
/// to the lower-index box. Overlap defaults to one adjacency layer.
Decomposition uniform_partition(const Mesh& mesh, const DofMap& dofmap, int boxes_per_side,
                                int overlap_layers = 1);

/// Deterministic greedy graph growing: BFS from the lowest-index unassigned
/// dof, filling exact size quotas (n_free/N, remainder spread over the first
/// subdomains).
Decomposition graph_partition(const Mesh& mesh, const DofMap& dofmap, int subdomain_count,
                              int overlap_layers = 1);

/// Ownership supplied externally (e.g. to reproduce a METIS partition).
Decomposition partition_from_ownership(const Mesh& mesh, const DofMap& dofmap,
                                       const std::vector<int>& owner, int overlap_layers = 1);

/// Partition file: one line "dof_index subdomain_index" per free dof, 0-based.
Decomposition partition_from_file(const Mesh& mesh, const DofMap& dofmap,
                                  const std::string& path, int overlap_layers = 1);
void write_partition_file(const Decomposition& decomposition, const std::string& path);

/// Grows every overlapping set by `layers` rounds of adjacency closure and
/// refreshes the partition-of-unity weights.
Decomposition add_overlap(Decomposition decomposition, int layers);

/// Multiplicity weights D_j; throws if some free dof is uncovered.
std::vector<RealVector> partition_of_unity(const Decomposition& decomposition);

} // namespace helmdd
