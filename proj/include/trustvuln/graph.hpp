#pragma once

#include "trustvuln/types.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace trustvuln {

/// Row-major CSR: row u holds the sorted column ids adjacent to u.
using Adjacency = Eigen::SparseMatrix<double, Eigen::RowMajor, NodeId>;

enum class Direction { kOut, kIn };

enum class EdgeListFormat { kTsv, kCsv };

/// One parsed edge. `line` is only used for error reporting.
struct EdgeRecord {
  std::string source;
  std::string target;
  std::optional<double> weight;
  std::size_t line = 0;
};

/// Borrowed view of one adjacency row.
struct NeighborView {
  std::span<const NodeId> nodes;
  std::span<const double> weights;

  std::size_t size() const { return nodes.size(); }
  bool empty() const { return nodes.empty(); }
};

/// Weighted directed graph over dense ids 0..n-1.
///
/// Both directions are stored as compressed CSR: `out_adjacency()` row u lists
/// the nodes u follows, `in_adjacency()` row v lists the followers of v. The
/// two matrices are transposes of each other. Immutable once built.
class DirectedGraph {
 public:
  DirectedGraph() = default;

  NodeId node_count() const { return static_cast<NodeId>(ids_.size()); }
  std::size_t edge_count() const { return static_cast<std::size_t>(out_.nonZeros()); }

  const Adjacency& out_adjacency() const { return out_; }
  const Adjacency& in_adjacency() const { return in_; }

  /// Sorted by NodeId. Throws std::out_of_range for an invalid `v`.
  NeighborView neighbors(NodeId v, Direction direction) const;

  /// Weight of u->v, or 0 when the edge is absent.
  double weight(NodeId u, NodeId v) const;
  bool has_edge(NodeId u, NodeId v) const { return weight(u, v) > 0.0; }

  const std::string& external_id(NodeId v) const;
  std::optional<NodeId> find(std::string_view external_id) const;
  std::span<const std::string> external_ids() const { return ids_; }

 private:
  friend class GraphBuilder;

  std::vector<std::string> ids_;
  std::unordered_map<std::string, NodeId> index_;
  Adjacency out_;
  Adjacency in_;
};

/// Accumulates edges and interns external ids in first-seen order.
class GraphBuilder {
 public:
  NodeId intern(std::string_view external_id);

  /// Self-loops are interned but dropped. A weight that is absent means 1.0;
  /// a non-positive or non-finite weight throws ParseError naming `line`.
  void add_edge(std::string_view source, std::string_view target,
                std::optional<double> weight = std::nullopt, std::size_t line = 0);
  void add_edge(NodeId source, NodeId target, double weight = 1.0);

  void reserve_edges(std::size_t count) { triplets_.reserve(count); }
  NodeId node_count() const { return static_cast<NodeId>(ids_.size()); }

  /// Duplicate (src, dst) pairs are summed. Triplets are sorted first, so the
  /// result does not depend on insertion order once ids are fixed.
  DirectedGraph build() &&;

 private:
  std::vector<std::string> ids_;
  std::unordered_map<std::string, NodeId> index_;
  std::vector<Eigen::Triplet<double, NodeId>> triplets_;
};

DirectedGraph build_graph(std::span<const EdgeRecord> edges);

/// Reads `src<sep>dst[<sep>weight]` lines; `#` lines and blank lines are skipped.
std::vector<EdgeRecord> parse_edge_list(std::istream& in, EdgeListFormat format);
DirectedGraph load_edge_list(std::istream& in, EdgeListFormat format);
DirectedGraph load_edge_list_file(const std::string& path, EdgeListFormat format);

/// Writes every edge as `src<sep>dst<sep>weight` in (src, dst) id order.
void write_edge_list(std::ostream& out, const DirectedGraph& g, EdgeListFormat format);

/// Symmetric weighted adjacency: weight{u,v} = w(u,v) + w(v,u).
struct UndirectedView {
  Adjacency adjacency;
  /// Weighted degree, i.e. row sums of `adjacency`.
  Eigen::VectorXd degree;
  /// Sum of undirected edge weights, each edge counted once (m).
  double total_weight = 0.0;

  NodeId node_count() const { return static_cast<NodeId>(adjacency.rows()); }
  NeighborView neighbors(NodeId v) const;
};

UndirectedView symmetrize(const DirectedGraph& g);

/// Undirected view built straight from (u, v, w) triples; duplicates and both
/// orientations are summed, self-loops dropped.
UndirectedView make_undirected(NodeId node_count,
                               std::span<const Eigen::Triplet<double, NodeId>> edges);

NeighborView row_view(const Adjacency& adjacency, NodeId row);

}  // namespace trustvuln
