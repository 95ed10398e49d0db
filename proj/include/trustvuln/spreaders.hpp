#pragma once

#include "trustvuln/graph.hpp"
#include "trustvuln/types.hpp"

#include <iosfwd>
#include <span>
#include <vector>

namespace trustvuln {

/// Ground-truth spreader nodes (source poster plus re-posters).
class SpreaderSet {
 public:
  SpreaderSet() = default;
  /// Sorts and removes duplicates.
  explicit SpreaderSet(std::vector<NodeId> nodes);

  bool contains(NodeId v) const;
  std::size_t size() const { return nodes_.size(); }
  bool empty() const { return nodes_.empty(); }
  std::span<const NodeId> nodes() const { return nodes_; }

  friend bool operator==(const SpreaderSet&, const SpreaderSet&) = default;

 private:
  std::vector<NodeId> nodes_;
};

/// One external node id per line; `#` and blank lines are skipped. Unknown ids
/// throw ParseError.
SpreaderSet load_spreaders(std::istream& in, const DirectedGraph& g);
SpreaderSet load_spreaders_file(const std::string& path, const DirectedGraph& g);

/// One external id per line, ascending NodeId order.
void write_spreaders(std::ostream& out, const DirectedGraph& g, const SpreaderSet& spreaders);

}  // namespace trustvuln
