#pragma once

#include "trustvuln/graph.hpp"
#include "trustvuln/types.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace trustvuln {

/// Disjoint labeling of every node; labels are contiguous 0..k-1.
struct CommunityAssignment {
  std::vector<CommunityId> labels;
  CommunityId community_count = 0;

  NodeId node_count() const { return static_cast<NodeId>(labels.size()); }
  CommunityId operator[](NodeId v) const { return labels[static_cast<std::size_t>(v)]; }

  /// Members per community, each sorted ascending.
  std::vector<std::vector<NodeId>> members() const;

  friend bool operator==(const CommunityAssignment&, const CommunityAssignment&) = default;
};

/// Relabels arbitrary integer labels to 0..k-1 in order of first appearance
/// when scanning nodes by ascending id.
CommunityAssignment compact_labels(std::span<const std::int64_t> raw_labels);

struct LouvainResult {
  CommunityAssignment assignment;
  /// Modularity (at the requested resolution) after each aggregation level.
  std::vector<double> level_modularity;
};

/// Two-phase Louvain: local moving until no single move improves modularity,
/// then aggregation, repeated until a level makes no move. The node visit
/// order of each level is a seeded shuffle.
///
/// Throws std::invalid_argument for an empty graph or resolution <= 0.
LouvainResult louvain_with_trace(const UndirectedView& g, std::uint64_t seed,
                                 double resolution = 1.0);
CommunityAssignment louvain(const UndirectedView& g, std::uint64_t seed, double resolution = 1.0);

/// Asynchronous label propagation. Every node starts with its own label; each
/// sweep visits nodes in a fresh seeded order and moves a node to the
/// neighbor label of largest total edge weight, smallest label on ties.
/// Stops after a sweep with no change or after `max_sweeps`.
CommunityAssignment label_propagation(const UndirectedView& g, std::uint64_t seed,
                                      int max_sweeps = 100);

/// Newman-Girvan modularity sum_c [in_c/2m - (tot_c/2m)^2].
/// Throws std::domain_error when the graph has zero total weight.
double modularity(const UndirectedView& g, const CommunityAssignment& a);

/// Same with a resolution factor on the expected term.
double modularity(const UndirectedView& g, const CommunityAssignment& a, double resolution);

/// Normalized mutual information with arithmetic-mean normalization;
/// 1 when both partitions are trivial.
double normalized_mutual_information(const CommunityAssignment& a, const CommunityAssignment& b);

/// Lines `node_id<TAB>label`. Errors (ParseError): unknown node, duplicate
/// node, node of `g` absent from the file.
CommunityAssignment load_assignment(std::istream& in, const DirectedGraph& g);
CommunityAssignment load_assignment_file(const std::string& path, const DirectedGraph& g);

void write_assignment(std::ostream& out, const DirectedGraph& g, const CommunityAssignment& a);

}  // namespace trustvuln
