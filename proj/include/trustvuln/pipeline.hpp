#pragma once

#include "trustvuln/community.hpp"
#include "trustvuln/evaluation.hpp"
#include "trustvuln/graph.hpp"
#include "trustvuln/roles.hpp"
#include "trustvuln/spreaders.hpp"
#include "trustvuln/trust.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace trustvuln {

enum class Detector { kLouvain, kLabelPropagation, kFile };

std::string_view to_string(Detector detector);
std::optional<Detector> parse_detector(std::string_view text);

/// Pipeline stages; the value is the process exit code for a failure there.
enum class Stage : int {
  kInput = 2,
  kTrust = 3,
  kCommunity = 4,
  kRoles = 5,
  kVulnerability = 6,
  kEvaluation = 7,
};

std::string_view to_string(Stage stage);
inline int exit_code(Stage stage) { return static_cast<int>(stage); }

class StageError : public std::runtime_error {
 public:
  StageError(Stage stage, const std::string& message)
      : std::runtime_error(std::string(to_string(stage)) + ": " + message), stage_(stage) {}

  Stage stage() const noexcept { return stage_; }

 private:
  Stage stage_;
};

struct PipelineConfig {
  std::string edges;
  std::string spreaders;
  /// Only read when detector == kFile.
  std::string communities;
  EdgeListFormat format = EdgeListFormat::kTsv;
  TsmParams tsm;
  Detector detector = Detector::kLouvain;
  std::uint64_t seed = 0;
  double resolution = 1.0;
  int max_sweeps = 100;
  EdgeSemantics semantics = EdgeSemantics::kFollowOut;
  bool infected_only = false;
  EvalOptions eval;
  std::string output_dir = "out";
  /// Label for the summary row; defaults to the edge file's stem.
  std::string network;
  /// 0 defers to the TRUSTVULN_THREADS environment variable, else 1.
  unsigned threads = 0;
};

/// Sets one config key (the `key = value` names of the config file, e.g.
/// `max_iters`, `edge_semantics`, `k`). Throws std::invalid_argument for an
/// unknown key or a malformed value.
void set_config_value(PipelineConfig& config, std::string_view key, std::string_view value);

/// Applies a flat `key = value` document (`#` comments) onto `config`.
/// Errors are reported as ParseError with the line number.
void apply_config(std::istream& in, PipelineConfig& config);

/// Per-community averages in the layout of the community statistics table.
struct CommunityStatistics {
  std::size_t communities = 0;
  double avg_nodes = 0.0;
  double avg_infected_nodes = 0.0;
  double avg_boundary_edges = 0.0;
  double avg_boundary = 0.0;
  double avg_neighbors = 0.0;
  double avg_infected_boundary = 0.0;
  double avg_infected_neighbors = 0.0;
};

CommunityStatistics community_statistics(const std::vector<RoleSet>& roles, const SpreaderSet& spreaders);
void write_statistics_csv(std::ostream& out, const CommunityStatistics& stats);

struct StageTiming {
  Stage stage;
  double seconds = 0.0;
};

struct PipelineResult {
  std::vector<StageTiming> timings;
  CommunityStatistics statistics;
  EvalReport eval;
  RawTrustScores raw_trust;
};

/// Output file names inside PipelineConfig::output_dir.
namespace output_files {
inline constexpr const char* kTrust = "trust.csv";
inline constexpr const char* kCommunities = "communities.tsv";
inline constexpr const char* kRoles = "roles.csv";
inline constexpr const char* kNeighbors = "neighbors.csv";
inline constexpr const char* kVulnerabilityJson = "vulnerability.json";
inline constexpr const char* kVulnerabilityNodes = "vulnerability_nodes.csv";
inline constexpr const char* kVulnerabilityCommunities = "vulnerability_communities.csv";
inline constexpr const char* kEvalJson = "eval.json";
inline constexpr const char* kEvalSummary = "eval_summary.csv";
inline constexpr const char* kStatistics = "community_stats.csv";
}  // namespace output_files

/// Ingestion, trust, communities, roles, vulnerability and evaluation in
/// order. Each report is written as `<name>.partial` and renamed once
/// complete. Stage timings and the statistics table go to `log`.
///
/// Throws StageError tagged with the failing stage.
PipelineResult run_pipeline(const PipelineConfig& config, std::ostream& log);

}  // namespace trustvuln
