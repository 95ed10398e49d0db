#pragma once

#include "oracles.hpp"

#include "trustvuln/graph.hpp"

#include <random>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace testing_support {

using trustvuln::DirectedGraph;
using trustvuln::GraphBuilder;
using trustvuln::NodeId;

inline DirectedGraph graph_from(const std::vector<std::pair<std::string, std::string>>& edges) {
  GraphBuilder builder;
  for (const auto& [u, v] : edges) builder.add_edge(u, v);
  return std::move(builder).build();
}

inline DirectedGraph graph_from_text(const std::string& text) {
  std::istringstream in(text);
  return trustvuln::load_edge_list(in, trustvuln::EdgeListFormat::kTsv);
}

// Node i is interned first as "i", so NodeId == index.
inline DirectedGraph graph_from(int n, const std::vector<oracle::Edge>& edges) {
  GraphBuilder builder;
  for (int v = 0; v < n; ++v) builder.intern(std::to_string(v));
  for (const auto& e : edges) builder.add_edge(e.from, e.to, e.weight);
  return std::move(builder).build();
}

// Random simple directed graph: distinct ordered pairs, no self-loops.
inline std::vector<oracle::Edge> random_edges(std::mt19937_64& gen, int n, int max_edges, bool weighted = false) {
  std::set<std::pair<int, int>> seen;
  std::vector<oracle::Edge> edges;
  if (n < 2) return edges;
  std::uniform_int_distribution<int> node(0, n - 1);
  std::uniform_int_distribution<int> count(0, max_edges);
  std::uniform_real_distribution<double> weight(0.1, 3.0);
  const int target = std::min(count(gen), n * (n - 1));
  while (static_cast<int>(edges.size()) < target) {
    const int u = node(gen), v = node(gen);
    if (u == v || !seen.insert({u, v}).second) continue;
    edges.push_back({u, v, weighted ? weight(gen) : 1.0});
  }
  return edges;
}

inline std::vector<int> random_labels(std::mt19937_64& gen, int n, int k) {
  std::uniform_int_distribution<int> label(0, k - 1);
  std::vector<int> labels(n);
  for (auto& l : labels) l = label(gen);
  return labels;
}

}  // namespace testing_support
