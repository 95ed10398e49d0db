#include "trustvuln/vulnerability.hpp"

#include <algorithm>
#include <ostream>

#include <fmt/format.h>
#include <json.hpp>

namespace trustvuln {

double node_vulnerability(const TrustScores& scores, NodeId b, std::span<const NodeId> neighbors) {
  const NodeId n = scores.node_count();
  if (b < 0 || b >= n) throw std::invalid_argument(fmt::format("node {} out of range", b));

  std::vector<NodeId> sorted(neighbors.begin(), neighbors.end());
  if (!std::is_sorted(sorted.begin(), sorted.end())) std::sort(sorted.begin(), sorted.end());
  for (const NodeId v : sorted) {
    if (v < 0 || v >= n) throw std::invalid_argument(fmt::format("neighbor {} out of range", v));
    if (v == b) throw std::invalid_argument(fmt::format("node {} listed as its own neighbor", b));
  }
  const Eigen::VectorXd believabilities = scores.trustworthiness(sorted) * scores.trustingness[b];
  return probability_of_any(believabilities);
}

double community_vulnerability(std::span<const double> node_scores) {
  Eigen::VectorXd sorted = Eigen::Map<const Eigen::VectorXd>(node_scores.data(),
                                                              static_cast<Eigen::Index>(node_scores.size()));
  for (const double s : node_scores) {
    if (!(s >= 0.0 && s <= 1.0)) {
      throw std::invalid_argument(fmt::format("vulnerability score {} outside [0, 1]", s));
    }
  }
  std::sort(sorted.begin(), sorted.end());
  return probability_of_any(sorted);
}

VulnerabilityReport assess(const DirectedGraph& g, const TrustScores& scores,
                           const CommunityAssignment& a, const std::vector<RoleSet>& roles,
                           const ReportParameters& parameters, const SpreaderSet* spreaders) {
  const NodeId n = g.node_count();
  if (scores.trustingness.size() != n || scores.trustworthiness.size() != n) {
    throw std::invalid_argument("assess: trust scores do not match the graph");
  }
  if (a.node_count() != n) throw std::invalid_argument("assess: assignment does not match the graph");
  if (roles.size() != static_cast<std::size_t>(a.community_count)) {
    throw std::invalid_argument("assess: role sets do not match the assignment");
  }
  if (parameters.infected_only && spreaders == nullptr) {
    throw std::invalid_argument("assess: infected-only mode needs a spreader set");
  }

  VulnerabilityReport report;
  report.parameters = parameters;
  report.node_rankings.resize(roles.size());
  report.community_scores.assign(roles.size(), 0.0);

  std::vector<NodeId> restricted;
  std::vector<double> node_scores;
  for (std::size_t c = 0; c < roles.size(); ++c) {
    const RoleSet& role = roles[c];
    if (role.community != static_cast<CommunityId>(c) ||
        role.boundary.size() != role.boundary_neighbors.size()) {
      throw std::invalid_argument("assess: malformed role set");
    }
    auto& ranking = report.node_rankings[c];
    node_scores.clear();
    for (std::size_t i = 0; i < role.boundary.size(); ++i) {
      const NodeId b = role.boundary[i];
      if (b < 0 || b >= n || a[b] != role.community) {
        throw std::invalid_argument("assess: boundary node outside its community");
      }
      std::span<const NodeId> neighbors = role.boundary_neighbors[i];
      if (parameters.infected_only) {
        restricted.clear();
        std::copy_if(neighbors.begin(), neighbors.end(), std::back_inserter(restricted),
                     [&](NodeId v) { return spreaders->contains(v); });
        neighbors = restricted;
      }
      const double v = node_vulnerability(scores, b, neighbors);
      ranking.push_back({b, role.community, v});
      node_scores.push_back(v);
    }
    report.community_scores[c] = community_vulnerability(node_scores);
    std::sort(ranking.begin(), ranking.end(), [](const auto& x, const auto& y) {
      return x.score != y.score ? x.score > y.score : x.node < y.node;
    });
    report.community_ranking.push_back(
        {role.community, report.community_scores[c], role.boundary.size(), std::nullopt});
  }
  std::sort(report.community_ranking.begin(), report.community_ranking.end(),
            [](const auto& x, const auto& y) {
              return x.score != y.score ? x.score > y.score : x.community < y.community;
            });
  return report;
}

void annotate_spreaders(VulnerabilityReport& report, const std::vector<RoleSet>& roles,
                        const SpreaderSet& spreaders) {
  for (auto& entry : report.community_ranking) {
    const auto& boundary = roles.at(static_cast<std::size_t>(entry.community)).boundary;
    entry.spreader_boundary_count = static_cast<std::size_t>(
        std::count_if(boundary.begin(), boundary.end(), [&](NodeId v) { return spreaders.contains(v); }));
  }
}

void write_report_json(std::ostream& out, const DirectedGraph& g, const VulnerabilityReport& report) {
  using nlohmann::ordered_json;
  ordered_json doc;
  doc["parameters"] = {
      {"involvement", report.parameters.involvement},
      {"edge_semantics", std::string(to_string(report.parameters.semantics))},
      {"detector", report.parameters.detector},
      {"infected_only", report.parameters.infected_only},
  };
  ordered_json communities = ordered_json::array();
  for (const auto& entry : report.community_ranking) {
    ordered_json nodes = ordered_json::array();
    for (const auto& node : report.node_rankings[static_cast<std::size_t>(entry.community)]) {
      nodes.push_back({{"node", g.external_id(node.node)}, {"V", node.score}});
    }
    ordered_json item = {
        {"community", entry.community},
        {"V_tilde", entry.score},
        {"boundary_count", entry.boundary_count},
    };
    if (entry.spreader_boundary_count) item["spreader_boundary_count"] = *entry.spreader_boundary_count;
    item["boundary_nodes"] = std::move(nodes);
    communities.push_back(std::move(item));
  }
  doc["communities"] = std::move(communities);
  out << doc.dump(2) << '\n';
}

void write_node_csv(std::ostream& out, const DirectedGraph& g, const VulnerabilityReport& report) {
  out << "community,node,V\n";
  for (const auto& entry : report.community_ranking) {
    for (const auto& node : report.node_rankings[static_cast<std::size_t>(entry.community)]) {
      out << fmt::format("{},{},{:.17g}\n", node.community, g.external_id(node.node), node.score);
    }
  }
}

void write_community_csv(std::ostream& out, const VulnerabilityReport& report) {
  out << "community,V_tilde\n";
  for (const auto& entry : report.community_ranking) {
    out << fmt::format("{},{:.17g}\n", entry.community, entry.score);
  }
}

}  // namespace trustvuln
