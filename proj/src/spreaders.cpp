#include "trustvuln/spreaders.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>

#include <fmt/format.h>

namespace trustvuln {

SpreaderSet::SpreaderSet(std::vector<NodeId> nodes) : nodes_(std::move(nodes)) {
  std::sort(nodes_.begin(), nodes_.end());
  nodes_.erase(std::unique(nodes_.begin(), nodes_.end()), nodes_.end());
}

bool SpreaderSet::contains(NodeId v) const {
  return std::binary_search(nodes_.begin(), nodes_.end(), v);
}

SpreaderSet load_spreaders(std::istream& in, const DirectedGraph& g) {
  std::vector<NodeId> nodes;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto id = g.find(line);
    if (!id) throw ParseError(line_number, fmt::format("unknown spreader node '{}'", line));
    nodes.push_back(*id);
  }
  return SpreaderSet(std::move(nodes));
}

SpreaderSet load_spreaders_file(const std::string& path, const DirectedGraph& g) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(fmt::format("cannot open spreader file '{}'", path));
  return load_spreaders(in, g);
}

void write_spreaders(std::ostream& out, const DirectedGraph& g, const SpreaderSet& spreaders) {
  for (NodeId v : spreaders.nodes()) out << g.external_id(v) << '\n';
}

}  // namespace trustvuln
