#include "trustvuln/community.hpp"

#include "trustvuln/rng.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <string>
#include <unordered_map>

#include <fmt/format.h>

namespace trustvuln {

std::vector<std::vector<NodeId>> CommunityAssignment::members() const {
  std::vector<std::vector<NodeId>> groups(static_cast<std::size_t>(community_count));
  for (NodeId v = 0; v < node_count(); ++v) groups[static_cast<std::size_t>((*this)[v])].push_back(v);
  return groups;
}

CommunityAssignment compact_labels(std::span<const std::int64_t> raw_labels) {
  CommunityAssignment a;
  a.labels.resize(raw_labels.size());
  std::unordered_map<std::int64_t, CommunityId> remap;
  for (std::size_t v = 0; v < raw_labels.size(); ++v) {
    auto [it, inserted] = remap.try_emplace(raw_labels[v], a.community_count);
    if (inserted) ++a.community_count;
    a.labels[v] = it->second;
  }
  return a;
}

namespace {

// CSR graph over super-nodes. `loops[i]` is the weight inside super-node i
// counted in both orientations, so degree[i] = loops[i] + sum of row i.
struct WorkGraph {
  std::vector<std::size_t> offsets;
  std::vector<NodeId> targets;
  std::vector<double> weights;
  std::vector<double> loops;
  std::vector<double> degree;

  NodeId size() const { return static_cast<NodeId>(degree.size()); }
};

WorkGraph from_view(const UndirectedView& g) {
  WorkGraph w;
  const NodeId n = g.node_count();
  w.offsets.assign(static_cast<std::size_t>(n) + 1, 0);
  w.targets.reserve(static_cast<std::size_t>(g.adjacency.nonZeros()));
  w.weights.reserve(static_cast<std::size_t>(g.adjacency.nonZeros()));
  for (NodeId u = 0; u < n; ++u) {
    const auto row = g.neighbors(u);
    w.targets.insert(w.targets.end(), row.nodes.begin(), row.nodes.end());
    w.weights.insert(w.weights.end(), row.weights.begin(), row.weights.end());
    w.offsets[static_cast<std::size_t>(u) + 1] = w.targets.size();
  }
  w.loops.assign(static_cast<std::size_t>(n), 0.0);
  w.degree.assign(g.degree.data(), g.degree.data() + n);
  return w;
}

double work_modularity(const WorkGraph& w, const std::vector<NodeId>& community, double resolution,
                       double twice_m) {
  const auto n = static_cast<std::size_t>(w.size());
  std::vector<double> inside(n, 0.0), total(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = static_cast<std::size_t>(community[i]);
    inside[c] += w.loops[i];
    total[c] += w.degree[i];
    for (std::size_t e = w.offsets[i]; e < w.offsets[i + 1]; ++e) {
      if (community[static_cast<std::size_t>(w.targets[e])] == community[i]) inside[c] += w.weights[e];
    }
  }
  double q = 0.0;
  for (std::size_t c = 0; c < n; ++c) {
    if (total[c] == 0.0 && inside[c] == 0.0) continue;
    const double share = total[c] / twice_m;
    q += inside[c] / twice_m - resolution * share * share;
  }
  return q;
}

// Phase one. Returns true if any node changed community.
bool local_moving(const WorkGraph& w, std::vector<NodeId>& community, double resolution,
                  double twice_m, Rng& rng) {
  const auto n = static_cast<std::size_t>(w.size());
  community.resize(n);
  std::iota(community.begin(), community.end(), 0);
  std::vector<double> total(w.degree);
  std::vector<NodeId> order(n);
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order.begin(), order.end());

  std::vector<double> link(n, 0.0);
  std::vector<char> seen(n, 0);
  std::vector<NodeId> touched;

  bool moved_any = false;
  for (;;) {
    std::size_t moves = 0;
    for (const NodeId node : order) {
      const auto i = static_cast<std::size_t>(node);
      const NodeId current = community[i];
      const double k = w.degree[i];

      touched.clear();
      for (std::size_t e = w.offsets[i]; e < w.offsets[i + 1]; ++e) {
        const NodeId c = community[static_cast<std::size_t>(w.targets[e])];
        const auto ci = static_cast<std::size_t>(c);
        if (!seen[ci]) {
          seen[ci] = 1;
          link[ci] = 0.0;
          touched.push_back(c);
        }
        link[ci] += w.weights[e];
      }

      const auto cur = static_cast<std::size_t>(current);
      total[cur] -= k;
      NodeId best = current;
      double best_gain = (seen[cur] ? link[cur] : 0.0) - resolution * total[cur] * k / twice_m;
      const double tolerance = 1e-10 * std::max(k, std::numeric_limits<double>::min());
      for (const NodeId c : touched) {
        const auto ci = static_cast<std::size_t>(c);
        const double gain = link[ci] - resolution * total[ci] * k / twice_m;
        if (gain > best_gain + tolerance) {
          best = c;
          best_gain = gain;
        }
      }
      total[static_cast<std::size_t>(best)] += k;
      for (const NodeId c : touched) seen[static_cast<std::size_t>(c)] = 0;

      if (best != current) {
        community[i] = best;
        ++moves;
      }
    }
    if (moves == 0) break;
    moved_any = true;
  }
  return moved_any;
}

// Renumbers `community` to 0..k-1 by first appearance; returns k.
NodeId renumber(std::vector<NodeId>& community) {
  std::vector<NodeId> remap(community.size(), -1);
  NodeId next = 0;
  for (auto& c : community) {
    auto& slot = remap[static_cast<std::size_t>(c)];
    if (slot < 0) slot = next++;
    c = slot;
  }
  return next;
}

WorkGraph aggregate(const WorkGraph& w, const std::vector<NodeId>& community, NodeId count) {
  const auto k = static_cast<std::size_t>(count);
  std::vector<std::vector<NodeId>> groups(k);
  for (NodeId i = 0; i < w.size(); ++i) groups[static_cast<std::size_t>(community[static_cast<std::size_t>(i)])].push_back(i);

  WorkGraph out;
  out.offsets.assign(k + 1, 0);
  out.loops.assign(k, 0.0);
  out.degree.assign(k, 0.0);
  std::vector<double> acc(k, 0.0);
  std::vector<char> seen(k, 0);
  std::vector<NodeId> touched;
  for (std::size_t c = 0; c < k; ++c) {
    touched.clear();
    for (const NodeId node : groups[c]) {
      const auto i = static_cast<std::size_t>(node);
      out.loops[c] += w.loops[i];
      out.degree[c] += w.degree[i];
      for (std::size_t e = w.offsets[i]; e < w.offsets[i + 1]; ++e) {
        const auto d = static_cast<std::size_t>(community[static_cast<std::size_t>(w.targets[e])]);
        if (d == c) {
          out.loops[c] += w.weights[e];
          continue;
        }
        if (!seen[d]) {
          seen[d] = 1;
          acc[d] = 0.0;
          touched.push_back(static_cast<NodeId>(d));
        }
        acc[d] += w.weights[e];
      }
    }
    std::sort(touched.begin(), touched.end());
    for (const NodeId d : touched) {
      out.targets.push_back(d);
      out.weights.push_back(acc[static_cast<std::size_t>(d)]);
      seen[static_cast<std::size_t>(d)] = 0;
    }
    out.offsets[c + 1] = out.targets.size();
  }
  return out;
}

CommunityAssignment to_assignment(const std::vector<NodeId>& labels) {
  const std::vector<std::int64_t> raw(labels.begin(), labels.end());
  return compact_labels(raw);
}

}  // namespace

LouvainResult louvain_with_trace(const UndirectedView& g, std::uint64_t seed, double resolution) {
  const NodeId n = g.node_count();
  if (n == 0) throw std::invalid_argument("louvain: empty graph");
  if (!(resolution > 0.0) || !std::isfinite(resolution)) {
    throw std::invalid_argument("louvain: resolution must be positive");
  }

  std::vector<NodeId> membership(static_cast<std::size_t>(n));
  std::iota(membership.begin(), membership.end(), 0);
  LouvainResult result;
  const double twice_m = 2.0 * g.total_weight;
  if (twice_m <= 0.0) {
    result.assignment = to_assignment(membership);
    return result;
  }

  Rng rng(seed);
  WorkGraph work = from_view(g);
  std::vector<NodeId> community(static_cast<std::size_t>(n));
  std::iota(community.begin(), community.end(), 0);
  result.level_modularity.push_back(work_modularity(work, community, resolution, twice_m));

  while (local_moving(work, community, resolution, twice_m, rng)) {
    result.level_modularity.push_back(work_modularity(work, community, resolution, twice_m));
    const NodeId count = renumber(community);
    for (auto& m : membership) m = community[static_cast<std::size_t>(m)];
    work = aggregate(work, community, count);
  }

  result.assignment = to_assignment(membership);
  return result;
}

CommunityAssignment louvain(const UndirectedView& g, std::uint64_t seed, double resolution) {
  return louvain_with_trace(g, seed, resolution).assignment;
}

CommunityAssignment label_propagation(const UndirectedView& g, std::uint64_t seed, int max_sweeps) {
  const NodeId n = g.node_count();
  if (n == 0) throw std::invalid_argument("label_propagation: empty graph");
  if (max_sweeps < 1) throw std::invalid_argument("label_propagation: max_sweeps must be >= 1");

  const auto size = static_cast<std::size_t>(n);
  std::vector<NodeId> labels(size);
  std::iota(labels.begin(), labels.end(), 0);
  std::vector<NodeId> order(labels);
  std::vector<double> weight(size, 0.0);
  std::vector<char> seen(size, 0);
  std::vector<NodeId> touched;
  Rng rng(seed);

  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    rng.shuffle(order.begin(), order.end());
    bool changed = false;
    for (const NodeId v : order) {
      const auto row = g.neighbors(v);
      if (row.empty()) continue;
      touched.clear();
      for (std::size_t e = 0; e < row.size(); ++e) {
        const auto label = static_cast<std::size_t>(labels[static_cast<std::size_t>(row.nodes[e])]);
        if (!seen[label]) {
          seen[label] = 1;
          weight[label] = 0.0;
          touched.push_back(static_cast<NodeId>(label));
        }
        weight[label] += row.weights[e];
      }
      NodeId best = touched.front();
      for (const NodeId label : touched) {
        const double w = weight[static_cast<std::size_t>(label)];
        const double b = weight[static_cast<std::size_t>(best)];
        if (w > b || (w == b && label < best)) best = label;
        seen[static_cast<std::size_t>(label)] = 0;
      }
      if (best != labels[static_cast<std::size_t>(v)]) {
        labels[static_cast<std::size_t>(v)] = best;
        changed = true;
      }
    }
    if (!changed) break;
  }
  return to_assignment(labels);
}

double modularity(const UndirectedView& g, const CommunityAssignment& a, double resolution) {
  if (a.node_count() != g.node_count()) {
    throw std::invalid_argument("modularity: assignment does not cover the graph");
  }
  const double twice_m = 2.0 * g.total_weight;
  if (!(twice_m > 0.0)) throw std::domain_error("modularity: graph has zero total weight");

  const auto k = static_cast<std::size_t>(a.community_count);
  std::vector<double> inside(k, 0.0), total(k, 0.0);
  for (NodeId u = 0; u < g.node_count(); ++u) {
    const auto c = static_cast<std::size_t>(a[u]);
    total[c] += g.degree[u];
    const auto row = g.neighbors(u);
    for (std::size_t e = 0; e < row.size(); ++e) {
      if (a[row.nodes[e]] == a[u]) inside[c] += row.weights[e];
    }
  }
  double q = 0.0;
  for (std::size_t c = 0; c < k; ++c) {
    const double share = total[c] / twice_m;
    q += inside[c] / twice_m - resolution * share * share;
  }
  return q;
}

double modularity(const UndirectedView& g, const CommunityAssignment& a) {
  return modularity(g, a, 1.0);
}

double normalized_mutual_information(const CommunityAssignment& a, const CommunityAssignment& b) {
  if (a.node_count() != b.node_count()) throw std::invalid_argument("nmi: size mismatch");
  const auto n = static_cast<double>(a.node_count());
  if (a.node_count() == 0) return 1.0;

  std::map<std::pair<CommunityId, CommunityId>, double> joint;
  std::vector<double> count_a(static_cast<std::size_t>(a.community_count), 0.0);
  std::vector<double> count_b(static_cast<std::size_t>(b.community_count), 0.0);
  for (NodeId v = 0; v < a.node_count(); ++v) {
    joint[{a[v], b[v]}] += 1.0;
    count_a[static_cast<std::size_t>(a[v])] += 1.0;
    count_b[static_cast<std::size_t>(b[v])] += 1.0;
  }
  auto entropy = [n](const std::vector<double>& counts) {
    double h = 0.0;
    for (double c : counts) {
      if (c > 0.0) h -= (c / n) * std::log(c / n);
    }
    return h;
  };
  double mutual = 0.0;
  for (const auto& [key, c] : joint) {
    mutual += (c / n) *
              std::log(n * c / (count_a[static_cast<std::size_t>(key.first)] *
                                count_b[static_cast<std::size_t>(key.second)]));
  }
  const double denominator = entropy(count_a) + entropy(count_b);
  if (denominator <= 0.0) return 1.0;
  return std::clamp(2.0 * mutual / denominator, 0.0, 1.0);
}

CommunityAssignment load_assignment(std::istream& in, const DirectedGraph& g) {
  const auto n = static_cast<std::size_t>(g.node_count());
  std::vector<std::int64_t> raw(n, -1);
  std::unordered_map<std::string, std::int64_t> label_ids;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 == line.size() ||
        line.find('\t', tab + 1) != std::string::npos) {
      throw ParseError(line_number, "expected node_id<TAB>community_label");
    }
    const std::string node = line.substr(0, tab);
    const auto id = g.find(node);
    if (!id) throw ParseError(line_number, fmt::format("unknown node '{}'", node));
    auto& slot = raw[static_cast<std::size_t>(*id)];
    if (slot >= 0) throw ParseError(line_number, fmt::format("duplicate node '{}'", node));
    const auto [it, inserted] =
        label_ids.try_emplace(line.substr(tab + 1), static_cast<std::int64_t>(label_ids.size()));
    slot = it->second;
  }
  for (std::size_t v = 0; v < n; ++v) {
    if (raw[v] < 0) {
      throw ParseError(0, fmt::format("node '{}' missing from assignment",
                                      g.external_id(static_cast<NodeId>(v))));
    }
  }
  return compact_labels(raw);
}

CommunityAssignment load_assignment_file(const std::string& path, const DirectedGraph& g) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(fmt::format("cannot open assignment file '{}'", path));
  return load_assignment(in, g);
}

void write_assignment(std::ostream& out, const DirectedGraph& g, const CommunityAssignment& a) {
  for (NodeId v = 0; v < g.node_count(); ++v) out << g.external_id(v) << '\t' << a[v] << '\n';
}

}  // namespace trustvuln
