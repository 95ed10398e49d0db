#pragma once

#include "trustvuln/roles.hpp"
#include "trustvuln/spreaders.hpp"
#include "trustvuln/types.hpp"
#include "trustvuln/vulnerability.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace trustvuln {

struct RankedItem {
  std::int64_t id = 0;
  double score = 0.0;

  friend bool operator==(const RankedItem&, const RankedItem&) = default;
};

/// Items in (score desc, id asc) order, ids unique.
class RankedList {
 public:
  RankedList() = default;
  /// Sorts; throws std::invalid_argument on a duplicate id or NaN score.
  static RankedList from_items(std::vector<RankedItem> items);

  std::span<const RankedItem> items() const { return items_; }
  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  const RankedItem& operator[](std::size_t i) const { return items_[i]; }

 private:
  std::vector<RankedItem> items_;
};

/// Boundary nodes of one community ranked by V(b).
RankedList node_ranking(std::span<const NodeVulnerability> nodes);

/// Fraction of the first min(k, |ranked|) items that are spreaders.
/// Throws std::invalid_argument for k = 0 or an empty list.
double precision_at_k(const RankedList& ranked, const SpreaderSet& truth, std::size_t k);

/// Number of list items that are spreaders.
std::size_t relevant_count(const RankedList& ranked, const SpreaderSet& truth);

/// sum_{i <= k_max} P@i * rel(i) / min(k_max, relevant_count); 0 if nothing relevant.
double average_precision(const RankedList& ranked, const SpreaderSet& truth, std::size_t k_max);

/// Mean P@k over communities whose list holds at least one spreader.
/// Throws std::domain_error("no ground truth") when there is none.
double ap_at_k(std::span<const RankedList> per_community, const SpreaderSet& truth, std::size_t k);

enum class MapVariant {
  /// Mean over eligible communities of truncated average precision.
  kStandard,
  /// Mean of AP@k for k = 1..k_max.
  kLiteral,
};

std::string_view to_string(MapVariant variant);
std::optional<MapVariant> parse_map_variant(std::string_view text);

double mean_average_precision(std::span<const RankedList> per_community, const SpreaderSet& truth,
                              std::size_t k_max, MapVariant variant = MapVariant::kStandard);

/// Tie-aware Kendall tau, (P - Q) / sqrt((P + Q + T)(P + Q + U)).
struct KendallTau {
  /// Empty when the denominator is zero.
  std::optional<double> value;
  std::uint64_t concordant = 0;
  std::uint64_t discordant = 0;
  /// Pairs tied in the first list only.
  std::uint64_t ties_first = 0;
  /// Pairs tied in the second list only.
  std::uint64_t ties_second = 0;

  bool defined() const { return value.has_value(); }
};

/// `rel[i]` and `ret[i]` are ordinal values of item i in the two rankings;
/// only their relative order matters. Pairs tied in both lists count as
/// neither T nor U. O(n log n).
/// Throws std::invalid_argument on length mismatch, fewer than 2 items, or NaN.
KendallTau kendall_tau(std::span<const double> rel, std::span<const double> ret);

/// Communities scored by the fraction of their boundary nodes that are
/// spreaders; 0 for an empty boundary.
RankedList ground_truth_community_ranking(const std::vector<RoleSet>& roles, const SpreaderSet& truth);

struct EvalOptions {
  std::vector<std::size_t> ks{1, 5, 10, 15};
  std::size_t map_k = 15;
  MapVariant map_variant = MapVariant::kStandard;
};

struct CommunityPrecision {
  CommunityId community = 0;
  std::size_t boundary_count = 0;
  std::size_t spreader_boundary_count = 0;
  /// Parallel to EvalOptions::ks.
  std::vector<double> precision;
  double average_precision = 0.0;
};

struct EvalReport {
  std::vector<std::size_t> ks;
  /// AP@k, parallel to `ks`.
  std::vector<double> ap;
  std::size_t map_k = 15;
  MapVariant map_variant = MapVariant::kStandard;
  double map = 0.0;
  KendallTau tau;
  std::vector<CommunityPrecision> per_community;
  std::size_t eligible_communities = 0;
  std::size_t skipped_communities = 0;
};

/// Node level: AP@k and MAP over per-community boundary rankings by V(b).
/// Community level: Kendall tau between the V~(C) ranking and the spreader
/// fraction ranking. Throws std::domain_error("no ground truth") when no
/// community has a spreader boundary node.
EvalReport evaluate(const VulnerabilityReport& report, const std::vector<RoleSet>& roles,
                    const SpreaderSet& truth, const EvalOptions& options = {});

void write_eval_json(std::ostream& out, const EvalReport& eval);
/// Header plus one row: network,detector,AP@k...,MAP,tau.
void write_eval_summary_csv(std::ostream& out, const EvalReport& eval, const std::string& network,
                            const std::string& detector);

}  // namespace trustvuln
