#include "trustvuln/roles.hpp"

#include <algorithm>
#include <ostream>

namespace trustvuln {

std::string_view to_string(EdgeSemantics semantics) {
  return semantics == EdgeSemantics::kFollowOut ? "follow-out" : "any";
}

std::optional<EdgeSemantics> parse_edge_semantics(std::string_view text) {
  if (text == "follow-out") return EdgeSemantics::kFollowOut;
  if (text == "any" || text == "any-adjacency") return EdgeSemantics::kAnyAdjacency;
  return std::nullopt;
}

std::size_t RoleSet::boundary_edge_count() const {
  std::size_t count = 0;
  for (const auto& n : boundary_neighbors) count += n.size();
  return count;
}

std::vector<std::pair<NodeId, NodeId>> RoleSet::boundary_edges() const {
  std::vector<std::pair<NodeId, NodeId>> edges;
  edges.reserve(boundary_edge_count());
  for (std::size_t i = 0; i < boundary.size(); ++i) {
    for (const NodeId n : boundary_neighbors[i]) edges.emplace_back(boundary[i], n);
  }
  return edges;
}

std::vector<NodeId> outside_neighbors(const DirectedGraph& g, const CommunityAssignment& a, NodeId v,
                                      EdgeSemantics semantics) {
  const CommunityId own = a[v];
  std::vector<NodeId> result;
  for (const NodeId n : g.neighbors(v, Direction::kOut).nodes) {
    if (a[n] != own) result.push_back(n);
  }
  if (semantics == EdgeSemantics::kAnyAdjacency) {
    const auto before = result.size();
    for (const NodeId n : g.neighbors(v, Direction::kIn).nodes) {
      if (a[n] != own) result.push_back(n);
    }
    std::inplace_merge(result.begin(), result.begin() + static_cast<std::ptrdiff_t>(before), result.end());
    result.erase(std::unique(result.begin(), result.end()), result.end());
  }
  return result;
}

std::vector<RoleSet> classify_roles(const DirectedGraph& g, const CommunityAssignment& a,
                                    EdgeSemantics semantics) {
  if (a.node_count() != g.node_count()) {
    throw std::invalid_argument("classify_roles: assignment does not cover the graph");
  }
  std::vector<RoleSet> roles(static_cast<std::size_t>(a.community_count));
  for (CommunityId c = 0; c < a.community_count; ++c) roles[static_cast<std::size_t>(c)].community = c;

  for (NodeId v = 0; v < g.node_count(); ++v) {
    auto& role = roles[static_cast<std::size_t>(a[v])];
    role.members.push_back(v);
    auto outside = outside_neighbors(g, a, v, semantics);
    if (outside.empty()) {
      role.core.push_back(v);
    } else {
      role.boundary.push_back(v);
      role.boundary_neighbors.push_back(std::move(outside));
    }
  }

  for (auto& role : roles) {
    for (const auto& n : role.boundary_neighbors) role.neighbors.insert(role.neighbors.end(), n.begin(), n.end());
    std::sort(role.neighbors.begin(), role.neighbors.end());
    role.neighbors.erase(std::unique(role.neighbors.begin(), role.neighbors.end()), role.neighbors.end());
  }
  return roles;
}

void write_roles_csv(std::ostream& out, const DirectedGraph& g, const std::vector<RoleSet>& roles) {
  out << "community,node,role\n";
  for (const auto& role : roles) {
    auto b = role.boundary.begin();
    for (const NodeId v : role.members) {
      const bool is_boundary = b != role.boundary.end() && *b == v;
      if (is_boundary) ++b;
      out << role.community << ',' << g.external_id(v) << ',' << (is_boundary ? "boundary" : "core") << '\n';
    }
  }
}

void write_neighbors_csv(std::ostream& out, const DirectedGraph& g, const std::vector<RoleSet>& roles) {
  out << "community,boundary_node,neighbor_node\n";
  for (const auto& role : roles) {
    for (const auto& [b, n] : role.boundary_edges()) {
      out << role.community << ',' << g.external_id(b) << ',' << g.external_id(n) << '\n';
    }
  }
}

}  // namespace trustvuln
