#pragma once

#include "trustvuln/community.hpp"
#include "trustvuln/graph.hpp"
#include "trustvuln/roles.hpp"
#include "trustvuln/spreaders.hpp"
#include "trustvuln/trust.hpp"
#include "trustvuln/types.hpp"

#include <Eigen/Core>

#include <cmath>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace trustvuln {

/// Running products below this switch to log-space accumulation.
inline constexpr double kUnderflowGuard = 1e-300;

/// 1 - prod_i (1 - p_i), multiplied in coefficient order.
///
/// Treating the p_i as independent success probabilities this is the
/// probability that at least one succeeds. Once the partial product drops
/// below kUnderflowGuard the remaining factors are accumulated as
/// sum log1p(-p_i). An empty input gives 0.
template <typename Derived>
typename Derived::Scalar probability_of_any(const Eigen::DenseBase<Derived>& probabilities) {
  using Scalar = typename Derived::Scalar;
  using std::expm1;
  using std::log;
  using std::log1p;
  const auto n = probabilities.size();
  Scalar product(1);
  for (Eigen::Index i = 0; i < n; ++i) {
    product *= Scalar(1) - probabilities.coeff(i);
    if (product < Scalar(kUnderflowGuard)) {
      Scalar log_sum = log(product);
      for (Eigen::Index j = i + 1; j < n; ++j) log_sum += log1p(-probabilities.coeff(j));
      return -expm1(log_sum);
    }
  }
  return Scalar(1) - product;
}

/// V(b) = 1 - prod_{n in neighbors} (1 - tw(n) * ti(b)).
///
/// Works for any node, not only boundary nodes. Neighbors are multiplied in
/// ascending id order whatever order they are passed in, so the result is
/// bit-identical under permutation. Throws std::invalid_argument if `b` is in
/// `neighbors` or an id is out of range.
double node_vulnerability(const TrustScores& scores, NodeId b, std::span<const NodeId> neighbors);

/// V~(C) = 1 - prod_b (1 - V(b)). Factors are multiplied in ascending value
/// order. Throws std::invalid_argument for a score outside [0, 1].
double community_vulnerability(std::span<const double> node_scores);

struct NodeVulnerability {
  NodeId node = 0;
  CommunityId community = 0;
  double score = 0.0;
};

struct CommunityVulnerability {
  CommunityId community = 0;
  double score = 0.0;
  std::size_t boundary_count = 0;
  /// Filled by annotate_spreaders once ground truth is known.
  std::optional<std::size_t> spreader_boundary_count;
};

/// Settings echoed into the report.
struct ReportParameters {
  double involvement = 1.0;
  EdgeSemantics semantics = EdgeSemantics::kFollowOut;
  std::string detector = "louvain";
  /// Restrict each neighbor set to known spreaders before computing V(b).
  bool infected_only = false;
};

struct VulnerabilityReport {
  /// Indexed by community id; boundary nodes ranked by (score desc, node asc).
  std::vector<std::vector<NodeVulnerability>> node_rankings;
  /// All communities ranked by (score desc, community asc).
  std::vector<CommunityVulnerability> community_ranking;
  /// V~(C) indexed by community id.
  std::vector<double> community_scores;
  ReportParameters parameters;
};

/// Runs the per-community loop: for each boundary node, believability of
/// every neighbor, then V(b); then V~(C) over the boundary.
///
/// Throws std::invalid_argument when the graph, scores, assignment and role
/// sets do not describe the same node universe, or when `infected_only` is
/// set without a spreader set.
VulnerabilityReport assess(const DirectedGraph& g, const TrustScores& scores,
                           const CommunityAssignment& a, const std::vector<RoleSet>& roles,
                           const ReportParameters& parameters = {},
                           const SpreaderSet* spreaders = nullptr);

void annotate_spreaders(VulnerabilityReport& report, const std::vector<RoleSet>& roles,
                        const SpreaderSet& spreaders);

/// Nested JSON: parameters plus ranked communities with their ranked boundary nodes.
void write_report_json(std::ostream& out, const DirectedGraph& g, const VulnerabilityReport& report);
/// CSV `community,node,V`.
void write_node_csv(std::ostream& out, const DirectedGraph& g, const VulnerabilityReport& report);
/// CSV `community,V_tilde`.
void write_community_csv(std::ostream& out, const VulnerabilityReport& report);

}  // namespace trustvuln
