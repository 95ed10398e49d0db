#include "trustvuln/pipeline.hpp"

#include "trustvuln/parallel.hpp"
#include "trustvuln/vulnerability.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>

#include <fmt/format.h>

namespace trustvuln {

namespace fs = std::filesystem;

std::string_view to_string(Detector detector) {
  switch (detector) {
    case Detector::kLouvain: return "louvain";
    case Detector::kLabelPropagation: return "lpa";
    case Detector::kFile: return "file";
  }
  return "louvain";
}

std::optional<Detector> parse_detector(std::string_view text) {
  if (text == "louvain") return Detector::kLouvain;
  if (text == "lpa" || text == "label-propagation") return Detector::kLabelPropagation;
  if (text == "file") return Detector::kFile;
  return std::nullopt;
}

std::string_view to_string(Stage stage) {
  switch (stage) {
    case Stage::kInput: return "input";
    case Stage::kTrust: return "trust";
    case Stage::kCommunity: return "communities";
    case Stage::kRoles: return "roles";
    case Stage::kVulnerability: return "vulnerability";
    case Stage::kEvaluation: return "evaluate";
  }
  return "unknown";
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    throw std::invalid_argument(fmt::format("config '{}': malformed value '{}'", key, text));
  }
  return value;
}

bool parse_bool(std::string_view key, std::string_view text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw std::invalid_argument(fmt::format("config '{}': expected a boolean, got '{}'", key, text));
}

std::vector<std::size_t> parse_ks(std::string_view text) {
  std::vector<std::size_t> ks;
  std::size_t start = 0;
  for (;;) {
    const auto comma = text.find(',', start);
    const auto field = trim(text.substr(start, comma == std::string_view::npos ? comma : comma - start));
    ks.push_back(parse_number<std::size_t>("k", field));
    if (ks.back() == 0 || (ks.size() > 1 && ks.back() <= ks[ks.size() - 2])) {
      throw std::invalid_argument(fmt::format("config 'k': '{}' is not a strictly increasing list of positive values", text));
    }
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return ks;
}

}  // namespace

void set_config_value(PipelineConfig& config, std::string_view raw_key, std::string_view value) {
  std::string key(raw_key);
  std::replace(key.begin(), key.end(), '-', '_');

  if (key == "edges") {
    config.edges = value;
  } else if (key == "spreaders") {
    config.spreaders = value;
  } else if (key == "communities" || key == "assignment") {
    config.communities = value;
  } else if (key == "format") {
    if (value == "tsv") {
      config.format = EdgeListFormat::kTsv;
    } else if (value == "csv") {
      config.format = EdgeListFormat::kCsv;
    } else {
      throw std::invalid_argument(fmt::format("config 'format': expected tsv or csv, got '{}'", value));
    }
  } else if (key == "involvement") {
    config.tsm.involvement = parse_number<double>(key, value);
  } else if (key == "max_iters") {
    config.tsm.max_iterations = parse_number<int>(key, value);
  } else if (key == "epsilon") {
    config.tsm.convergence_epsilon = parse_number<double>(key, value);
  } else if (key == "log_floor") {
    config.tsm.log_floor = parse_number<double>(key, value);
  } else if (key == "algo") {
    const auto detector = parse_detector(value);
    if (!detector) throw std::invalid_argument(fmt::format("config 'algo': unknown detector '{}'", value));
    config.detector = *detector;
  } else if (key == "seed") {
    config.seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "resolution") {
    config.resolution = parse_number<double>(key, value);
  } else if (key == "max_sweeps") {
    config.max_sweeps = parse_number<int>(key, value);
  } else if (key == "edge_semantics") {
    const auto semantics = parse_edge_semantics(value);
    if (!semantics) throw std::invalid_argument(fmt::format("config 'edge_semantics': unknown value '{}'", value));
    config.semantics = *semantics;
  } else if (key == "infected_only") {
    config.infected_only = parse_bool(key, value);
  } else if (key == "k") {
    config.eval.ks = parse_ks(value);
  } else if (key == "map_k") {
    config.eval.map_k = parse_number<std::size_t>(key, value);
  } else if (key == "map_variant") {
    const auto variant = parse_map_variant(value);
    if (!variant) throw std::invalid_argument(fmt::format("config 'map_variant': unknown value '{}'", value));
    config.eval.map_variant = *variant;
  } else if (key == "out") {
    config.output_dir = value;
  } else if (key == "network") {
    config.network = value;
  } else if (key == "threads") {
    config.threads = parse_number<unsigned>(key, value);
  } else {
    throw std::invalid_argument(fmt::format("unknown config key '{}'", raw_key));
  }
}

void apply_config(std::istream& in, PipelineConfig& config) {
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const auto text = trim(line);
    if (text.empty() || text.front() == '#') continue;
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) throw ParseError(line_number, "expected key = value");
    try {
      set_config_value(config, trim(text.substr(0, eq)), trim(text.substr(eq + 1)));
    } catch (const std::invalid_argument& e) {
      throw ParseError(line_number, e.what());
    }
  }
}

CommunityStatistics community_statistics(const std::vector<RoleSet>& roles, const SpreaderSet& spreaders) {
  CommunityStatistics stats;
  stats.communities = roles.size();
  if (roles.empty()) return stats;
  auto infected = [&](const std::vector<NodeId>& nodes) {
    return static_cast<double>(
        std::count_if(nodes.begin(), nodes.end(), [&](NodeId v) { return spreaders.contains(v); }));
  };
  for (const auto& role : roles) {
    stats.avg_nodes += static_cast<double>(role.members.size());
    stats.avg_infected_nodes += infected(role.members);
    stats.avg_boundary_edges += static_cast<double>(role.boundary_edge_count());
    stats.avg_boundary += static_cast<double>(role.boundary.size());
    stats.avg_neighbors += static_cast<double>(role.neighbors.size());
    stats.avg_infected_boundary += infected(role.boundary);
    stats.avg_infected_neighbors += infected(role.neighbors);
  }
  const auto k = static_cast<double>(roles.size());
  for (double* field : {&stats.avg_nodes, &stats.avg_infected_nodes, &stats.avg_boundary_edges,
                        &stats.avg_boundary, &stats.avg_neighbors, &stats.avg_infected_boundary,
                        &stats.avg_infected_neighbors}) {
    *field /= k;
  }
  return stats;
}

void write_statistics_csv(std::ostream& out, const CommunityStatistics& stats) {
  out << "communities,avg_nodes,avg_infected_nodes,avg_boundary_edges,avg_boundary,avg_neighbors,"
         "avg_infected_boundary,avg_infected_neighbors\n";
  out << fmt::format("{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", stats.communities,
                     stats.avg_nodes, stats.avg_infected_nodes, stats.avg_boundary_edges, stats.avg_boundary,
                     stats.avg_neighbors, stats.avg_infected_boundary, stats.avg_infected_neighbors);
}

namespace {

// Writes through `<path>.partial`; the rename happens only if `body` returns.
template <typename Body>
void write_report(const fs::path& path, Body&& body) {
  const fs::path partial = path.string() + ".partial";
  {
    std::ofstream out(partial, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error(fmt::format("cannot create '{}'", partial.string()));
    body(out);
    out.flush();
    if (!out) throw std::runtime_error(fmt::format("write to '{}' failed", partial.string()));
  }
  fs::rename(partial, path);
}

class StageRunner {
 public:
  StageRunner(std::ostream& log, std::vector<StageTiming>& timings) : log_(log), timings_(timings) {}

  template <typename Body>
  auto run(Stage stage, Body&& body) {
    const auto start = std::chrono::steady_clock::now();
    auto finish = [&] {
      const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
      timings_.push_back({stage, elapsed.count()});
      log_ << fmt::format("[{}] {:.3f} s\n", to_string(stage), elapsed.count());
    };
    try {
      if constexpr (std::is_void_v<decltype(body())>) {
        body();
        finish();
      } else {
        auto value = body();
        finish();
        return value;
      }
    } catch (const StageError&) {
      throw;
    } catch (const std::exception& e) {
      throw StageError(stage, e.what());
    }
  }

 private:
  std::ostream& log_;
  std::vector<StageTiming>& timings_;
};

void validate(const PipelineConfig& config) {
  if (config.edges.empty()) throw std::invalid_argument("no edge list given");
  if (!fs::exists(config.edges)) throw std::invalid_argument(fmt::format("edge list '{}' not found", config.edges));
  if (config.detector == Detector::kFile && config.communities.empty()) {
    throw std::invalid_argument("detector 'file' needs a communities file");
  }
  config.tsm.validate();
  const auto& ks = config.eval.ks;
  if (ks.empty() || ks.front() == 0 || !std::is_sorted(ks.begin(), ks.end()) ||
      std::adjacent_find(ks.begin(), ks.end()) != ks.end()) {
    throw std::invalid_argument("k values must be positive and strictly ascending");
  }
  if (config.eval.map_k == 0) throw std::invalid_argument("map_k must be positive");
  if (!(config.resolution > 0.0)) throw std::invalid_argument("resolution must be positive");
  if (config.max_sweeps < 1) throw std::invalid_argument("max_sweeps must be >= 1");
}

}  // namespace

PipelineResult run_pipeline(const PipelineConfig& config, std::ostream& log) {
  PipelineResult result;
  StageRunner runner(log, result.timings);
  const fs::path out_dir(config.output_dir);

  const DirectedGraph g = runner.run(Stage::kInput, [&] {
    validate(config);
    fs::create_directories(out_dir);
    return load_edge_list_file(config.edges, config.format);
  });
  log << fmt::format("graph: {} nodes, {} edges\n", g.node_count(), g.edge_count());

  TsmParams tsm = config.tsm;
  tsm.threads = resolve_threads(config.threads);
  const TrustScores scores = runner.run(Stage::kTrust, [&] {
    result.raw_trust = compute_tsm(g, tsm);
    TrustScores normalized = normalize_scores(result.raw_trust, tsm);
    write_report(out_dir / output_files::kTrust, [&](std::ostream& out) { write_trust_csv(out, g, normalized); });
    return normalized;
  });
  log << fmt::format("trust: {} iterations, converged={}\n", result.raw_trust.iterations_run,
                     result.raw_trust.converged);

  const CommunityAssignment assignment = runner.run(Stage::kCommunity, [&] {
    CommunityAssignment a;
    switch (config.detector) {
      case Detector::kLouvain: a = louvain(symmetrize(g), config.seed, config.resolution); break;
      case Detector::kLabelPropagation: a = label_propagation(symmetrize(g), config.seed, config.max_sweeps); break;
      case Detector::kFile: a = load_assignment_file(config.communities, g); break;
    }
    write_report(out_dir / output_files::kCommunities, [&](std::ostream& out) { write_assignment(out, g, a); });
    return a;
  });
  log << fmt::format("communities: {}\n", assignment.community_count);

  const std::vector<RoleSet> roles = runner.run(Stage::kRoles, [&] {
    auto r = classify_roles(g, assignment, config.semantics);
    write_report(out_dir / output_files::kRoles, [&](std::ostream& out) { write_roles_csv(out, g, r); });
    write_report(out_dir / output_files::kNeighbors, [&](std::ostream& out) { write_neighbors_csv(out, g, r); });
    return r;
  });

  std::optional<SpreaderSet> spreaders;
  auto load_truth = [&] {
    if (config.spreaders.empty()) throw std::invalid_argument("no spreader file given");
    spreaders = load_spreaders_file(config.spreaders, g);
  };

  VulnerabilityReport report = runner.run(Stage::kVulnerability, [&] {
    if (config.infected_only) load_truth();
    const ReportParameters parameters{config.tsm.involvement, config.semantics, std::string(to_string(config.detector)),
                                      config.infected_only};
    auto rep = assess(g, scores, assignment, roles, parameters, spreaders ? &*spreaders : nullptr);
    write_report(out_dir / output_files::kVulnerabilityJson, [&](std::ostream& out) { write_report_json(out, g, rep); });
    write_report(out_dir / output_files::kVulnerabilityNodes, [&](std::ostream& out) { write_node_csv(out, g, rep); });
    write_report(out_dir / output_files::kVulnerabilityCommunities,
                 [&](std::ostream& out) { write_community_csv(out, rep); });
    return rep;
  });

  runner.run(Stage::kEvaluation, [&] {
    if (!spreaders) load_truth();
    annotate_spreaders(report, roles, *spreaders);
    result.statistics = community_statistics(roles, *spreaders);
    write_report(out_dir / output_files::kStatistics,
                 [&](std::ostream& out) { write_statistics_csv(out, result.statistics); });
    result.eval = evaluate(report, roles, *spreaders, config.eval);
    const std::string network = config.network.empty() ? fs::path(config.edges).stem().string() : config.network;
    write_report(out_dir / output_files::kEvalJson, [&](std::ostream& out) { write_eval_json(out, result.eval); });
    write_report(out_dir / output_files::kEvalSummary, [&](std::ostream& out) {
      write_eval_summary_csv(out, result.eval, network, std::string(to_string(config.detector)));
    });
  });

  const auto& s = result.statistics;
  log << "communities  avg_nodes  avg_infected  avg_B_edges  avg_B  avg_N  avg_infected_B  avg_infected_N\n";
  log << fmt::format("{:>11}  {:>9.2f}  {:>12.2f}  {:>11.2f}  {:>5.2f}  {:>5.2f}  {:>14.2f}  {:>14.2f}\n",
                     s.communities, s.avg_nodes, s.avg_infected_nodes, s.avg_boundary_edges, s.avg_boundary,
                     s.avg_neighbors, s.avg_infected_boundary, s.avg_infected_neighbors);
  return result;
}

}  // namespace trustvuln
