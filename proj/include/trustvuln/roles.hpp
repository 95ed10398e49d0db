#pragma once

#include "trustvuln/community.hpp"
#include "trustvuln/graph.hpp"
#include "trustvuln/types.hpp"

#include <iosfwd>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

namespace trustvuln {

/// Which edges make an outside node a neighbor of a community member b.
enum class EdgeSemantics {
  /// b -> n: b follows n, so n's content flows to b.
  kFollowOut,
  /// b -> n or n -> b.
  kAnyAdjacency,
};

std::string_view to_string(EdgeSemantics semantics);
std::optional<EdgeSemantics> parse_edge_semantics(std::string_view text);

/// Neighbor / boundary / core split of one community. All node lists are sorted.
struct RoleSet {
  CommunityId community = 0;
  std::vector<NodeId> members;
  /// Members with at least one outside neighbor.
  std::vector<NodeId> boundary;
  /// Members with no outside neighbor.
  std::vector<NodeId> core;
  /// Union of the outside neighbors of all boundary nodes.
  std::vector<NodeId> neighbors;
  /// boundary_neighbors[i] is the neighbor set of boundary[i]; never empty.
  std::vector<std::vector<NodeId>> boundary_neighbors;

  std::size_t boundary_edge_count() const;
  /// (boundary node, neighbor node) pairs in (boundary, neighbor) order.
  std::vector<std::pair<NodeId, NodeId>> boundary_edges() const;
};

/// Outside neighbors of `v` relative to `a`, sorted.
std::vector<NodeId> outside_neighbors(const DirectedGraph& g, const CommunityAssignment& a, NodeId v,
                                      EdgeSemantics semantics);

/// One RoleSet per community, indexed by community id.
std::vector<RoleSet> classify_roles(const DirectedGraph& g, const CommunityAssignment& a,
                                    EdgeSemantics semantics = EdgeSemantics::kFollowOut);

/// CSV `community,node,role` with role in {boundary, core}.
void write_roles_csv(std::ostream& out, const DirectedGraph& g, const std::vector<RoleSet>& roles);
/// CSV `community,boundary_node,neighbor_node`.
void write_neighbors_csv(std::ostream& out, const DirectedGraph& g, const std::vector<RoleSet>& roles);

}  // namespace trustvuln
