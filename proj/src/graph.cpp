#include "trustvuln/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include <fmt/format.h>

namespace trustvuln {

NeighborView row_view(const Adjacency& adjacency, NodeId row) {
  const auto begin = adjacency.outerIndexPtr()[row];
  const auto end = adjacency.outerIndexPtr()[row + 1];
  const auto count = static_cast<std::size_t>(end - begin);
  return {std::span<const NodeId>(adjacency.innerIndexPtr() + begin, count),
          std::span<const double>(adjacency.valuePtr() + begin, count)};
}

NeighborView DirectedGraph::neighbors(NodeId v, Direction direction) const {
  if (v < 0 || v >= node_count()) {
    throw std::out_of_range(fmt::format("node {} out of range [0, {})", v, node_count()));
  }
  return row_view(direction == Direction::kOut ? out_ : in_, v);
}

double DirectedGraph::weight(NodeId u, NodeId v) const {
  const auto row = neighbors(u, Direction::kOut);
  const auto it = std::lower_bound(row.nodes.begin(), row.nodes.end(), v);
  if (it == row.nodes.end() || *it != v) return 0.0;
  return row.weights[static_cast<std::size_t>(it - row.nodes.begin())];
}

const std::string& DirectedGraph::external_id(NodeId v) const {
  if (v < 0 || v >= node_count()) {
    throw std::out_of_range(fmt::format("node {} out of range [0, {})", v, node_count()));
  }
  return ids_[static_cast<std::size_t>(v)];
}

std::optional<NodeId> DirectedGraph::find(std::string_view external_id) const {
  const auto it = index_.find(std::string(external_id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

NodeId GraphBuilder::intern(std::string_view external_id) {
  auto [it, inserted] = index_.try_emplace(std::string(external_id), node_count());
  if (inserted) ids_.emplace_back(external_id);
  return it->second;
}

void GraphBuilder::add_edge(std::string_view source, std::string_view target,
                            std::optional<double> weight, std::size_t line) {
  const double w = weight.value_or(1.0);
  if (!std::isfinite(w) || w <= 0.0) {
    throw ParseError(line, fmt::format("edge weight must be positive and finite, got {}", w));
  }
  if (source.empty() || target.empty()) throw ParseError(line, "empty node id");
  const NodeId u = intern(source);
  const NodeId v = intern(target);
  add_edge(u, v, w);
}

void GraphBuilder::add_edge(NodeId source, NodeId target, double weight) {
  if (source < 0 || source >= node_count() || target < 0 || target >= node_count()) {
    throw std::out_of_range("edge endpoint was not interned");
  }
  if (!std::isfinite(weight) || weight <= 0.0) {
    throw std::invalid_argument(fmt::format("edge weight must be positive and finite, got {}", weight));
  }
  if (source == target) return;
  triplets_.emplace_back(source, target, weight);
}

DirectedGraph GraphBuilder::build() && {
  std::sort(triplets_.begin(), triplets_.end(), [](const auto& a, const auto& b) {
    if (a.row() != b.row()) return a.row() < b.row();
    if (a.col() != b.col()) return a.col() < b.col();
    return a.value() < b.value();
  });

  DirectedGraph g;
  const NodeId n = node_count();
  g.out_.resize(n, n);
  g.out_.setFromTriplets(triplets_.begin(), triplets_.end());
  g.out_.makeCompressed();
  g.in_ = g.out_.transpose();
  g.in_.makeCompressed();
  g.ids_ = std::move(ids_);
  g.index_ = std::move(index_);
  triplets_.clear();
  triplets_.shrink_to_fit();
  return g;
}

DirectedGraph build_graph(std::span<const EdgeRecord> edges) {
  GraphBuilder builder;
  builder.reserve_edges(edges.size());
  std::size_t position = 0;
  for (const auto& e : edges) {
    ++position;
    builder.add_edge(e.source, e.target, e.weight, e.line == 0 ? position : e.line);
  }
  return std::move(builder).build();
}

namespace {

std::vector<std::string_view> split(std::string_view line, char separator) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(separator, start);
    if (pos == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

}  // namespace

std::vector<EdgeRecord> parse_edge_list(std::istream& in, EdgeListFormat format) {
  const char separator = format == EdgeListFormat::kCsv ? ',' : '\t';
  std::vector<EdgeRecord> records;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;

    const auto fields = split(line, separator);
    if (fields.size() < 2 || fields.size() > 3) {
      throw ParseError(line_number, fmt::format("expected 2 or 3 fields, found {}", fields.size()));
    }
    if (fields[0].empty() || fields[1].empty()) throw ParseError(line_number, "empty node id");

    EdgeRecord record{std::string(fields[0]), std::string(fields[1]), std::nullopt, line_number};
    if (fields.size() == 3) {
      const auto text = fields[2];
      double w = 0.0;
      const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), w);
      if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
        throw ParseError(line_number, fmt::format("malformed weight '{}'", text));
      }
      if (!std::isfinite(w) || w <= 0.0) {
        throw ParseError(line_number, fmt::format("edge weight must be positive and finite, got {}", text));
      }
      record.weight = w;
    }
    records.push_back(std::move(record));
  }
  return records;
}

DirectedGraph load_edge_list(std::istream& in, EdgeListFormat format) {
  const auto records = parse_edge_list(in, format);
  return build_graph(records);
}

DirectedGraph load_edge_list_file(const std::string& path, EdgeListFormat format) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(fmt::format("cannot open edge list '{}'", path));
  return load_edge_list(in, format);
}

void write_edge_list(std::ostream& out, const DirectedGraph& g, EdgeListFormat format) {
  const char separator = format == EdgeListFormat::kCsv ? ',' : '\t';
  for (NodeId u = 0; u < g.node_count(); ++u) {
    const auto row = g.neighbors(u, Direction::kOut);
    for (std::size_t i = 0; i < row.size(); ++i) {
      out << g.external_id(u) << separator << g.external_id(row.nodes[i]) << separator
          << fmt::format("{:.17g}", row.weights[i]) << '\n';
    }
  }
}

NeighborView UndirectedView::neighbors(NodeId v) const {
  if (v < 0 || v >= node_count()) {
    throw std::out_of_range(fmt::format("node {} out of range [0, {})", v, node_count()));
  }
  return row_view(adjacency, v);
}

namespace {

UndirectedView finish_view(Adjacency adjacency) {
  UndirectedView view;
  view.adjacency = std::move(adjacency);
  view.adjacency.makeCompressed();
  const auto n = view.adjacency.rows();
  view.degree = Eigen::VectorXd::Zero(n);
  for (Eigen::Index u = 0; u < n; ++u) {
    double d = 0.0;
    for (Adjacency::InnerIterator it(view.adjacency, u); it; ++it) d += it.value();
    view.degree[u] = d;
  }
  double twice = 0.0;
  for (Eigen::Index u = 0; u < n; ++u) twice += view.degree[u];
  view.total_weight = twice / 2.0;
  return view;
}

}  // namespace

UndirectedView symmetrize(const DirectedGraph& g) {
  Adjacency transposed = g.in_adjacency();
  Adjacency sum = g.out_adjacency() + transposed;
  sum.prune(0.0);
  return finish_view(std::move(sum));
}

UndirectedView make_undirected(NodeId node_count,
                               std::span<const Eigen::Triplet<double, NodeId>> edges) {
  std::vector<Eigen::Triplet<double, NodeId>> both;
  both.reserve(edges.size() * 2);
  for (const auto& e : edges) {
    if (e.row() == e.col()) continue;
    both.emplace_back(e.row(), e.col(), e.value());
    both.emplace_back(e.col(), e.row(), e.value());
  }
  std::sort(both.begin(), both.end(), [](const auto& a, const auto& b) {
    if (a.row() != b.row()) return a.row() < b.row();
    if (a.col() != b.col()) return a.col() < b.col();
    return a.value() < b.value();
  });
  Adjacency adjacency(node_count, node_count);
  adjacency.setFromTriplets(both.begin(), both.end());
  return finish_view(std::move(adjacency));
}

}  // namespace trustvuln
