#pragma once

#include "trustvuln/community.hpp"
#include "trustvuln/graph.hpp"
#include "trustvuln/roles.hpp"
#include "trustvuln/spreaders.hpp"
#include "trustvuln/trust.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace trustvuln {

/// Planted-partition stochastic block model.
struct SbmParams {
  std::vector<NodeId> block_sizes;
  double p_in = 0.0;
  double p_out = 0.0;
  std::uint64_t seed = 0;
  /// Directed: every ordered pair is an independent trial. Undirected: every
  /// unordered pair is one trial that adds both directions.
  bool directed = true;

  /// Throws std::invalid_argument unless 0 <= p_out < p_in <= 1, blocks positive.
  void validate() const;
};

struct SbmGraph {
  DirectedGraph graph;
  CommunityAssignment planted;
};

/// Node i gets external id "i"; blocks occupy consecutive id ranges. Edges are
/// sampled with geometric skips, so cost is proportional to the edge count.
/// Throws std::invalid_argument when the total node count is 0.
SbmGraph generate_sbm(const SbmParams& params);

enum class PlantingKind { kUniform, kTrustWeighted, kBoundaryBiased };

std::string_view to_string(PlantingKind kind);
std::optional<PlantingKind> parse_planting_kind(std::string_view text);

struct PlantingStrategy {
  PlantingKind kind = PlantingKind::kUniform;
  /// Expected fraction of eligible nodes flagged, in (0, 1].
  double rate = 0.1;
};

/// Full vulnerability of every node against all the nodes it follows.
Eigen::VectorXd follow_vulnerability(const DirectedGraph& g, const TrustScores& scores);

/// Seeded ground-truth spreaders.
///
///  uniform:   each node independently with probability `rate`.
///  trust:     node v with probability min(1, rate * n * V(v) / sum V), where V
///             is follow_vulnerability; same expected count as uniform.
///  boundary:  only boundary nodes of `roles`, each with probability `rate`.
SpreaderSet plant_spreaders(const DirectedGraph& g, const TrustScores& scores,
                            const PlantingStrategy& strategy, std::uint64_t seed,
                            std::span<const RoleSet> roles = {});

}  // namespace trustvuln
