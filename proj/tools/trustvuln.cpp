// trustvuln: trust-based vulnerability of nodes and communities.
//
//   trustvuln trust         --edges E [--involvement S ...] --out trust.csv
//   trustvuln communities   --edges E --algo {louvain|lpa|file} --seed N --out comms.tsv
//   trustvuln roles         --edges E --communities C --edge-semantics {follow-out|any}
//   trustvuln vulnerability --edges E --communities C [--trust T] [--infected-only --spreaders S]
//   trustvuln evaluate      --edges E --communities C --spreaders S --k 1,5,10,15 --map-k 15
//   trustvuln synth sbm     --blocks 25,25,25,25 --p-in 0.3 --p-out 0.01 --seed N --out E --truth C
//   trustvuln synth plant   --edges E --strategy {uniform|trust|boundary} --rate R --seed N
//   trustvuln pipeline      --config run.conf [overrides]

#include "trustvuln/community.hpp"
#include "trustvuln/evaluation.hpp"
#include "trustvuln/graph.hpp"
#include "trustvuln/parallel.hpp"
#include "trustvuln/pipeline.hpp"
#include "trustvuln/roles.hpp"
#include "trustvuln/spreaders.hpp"
#include "trustvuln/synth.hpp"
#include "trustvuln/trust.hpp"
#include "trustvuln/vulnerability.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace tv = trustvuln;

namespace {

struct InputOptions {
  std::string edges;
  std::string format = "tsv";

  tv::EdgeListFormat edge_format() const {
    return format == "csv" ? tv::EdgeListFormat::kCsv : tv::EdgeListFormat::kTsv;
  }
};

struct TrustOptions {
  tv::TsmParams params;
  unsigned threads = 0;
  std::string trust_file;
};

void add_input_options(CLI::App* cmd, InputOptions& in) {
  cmd->add_option("--edges", in.edges, "Edge list file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--format", in.format, "Edge list format")->check(CLI::IsMember({"tsv", "csv"}));
}

void add_tsm_options(CLI::App* cmd, TrustOptions& t) {
  cmd->add_option("--involvement", t.params.involvement, "Involvement exponent s");
  cmd->add_option("--max-iters", t.params.max_iterations, "Iteration cap");
  cmd->add_option("--epsilon", t.params.convergence_epsilon, "Convergence threshold");
  cmd->add_option("--log-floor", t.params.log_floor, "Lower end of the normalized range");
  cmd->add_option("--threads", t.threads, "Worker threads (default: $TRUSTVULN_THREADS or 1)");
}

// Runs `body` and maps failures onto the stage exit codes.
int guarded(tv::Stage stage, const std::function<void()>& body) {
  try {
    body();
    return 0;
  } catch (const tv::StageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return tv::exit_code(e.stage());
  } catch (const tv::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return tv::exit_code(tv::Stage::kInput);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return tv::exit_code(stage);
  }
}

template <typename Body>
auto stage(tv::Stage s, Body&& body) {
  try {
    return body();
  } catch (const tv::StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw tv::StageError(s, e.what());
  }
}

// "-" or empty writes to stdout.
void write_to(const std::string& path, const std::function<void(std::ostream&)>& body) {
  if (path.empty() || path == "-") {
    body(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error(fmt::format("cannot create '{}'", path));
  body(out);
  if (!out.flush()) throw std::runtime_error(fmt::format("write to '{}' failed", path));
}

tv::DirectedGraph load_graph(const InputOptions& in) {
  return stage(tv::Stage::kInput, [&] { return tv::load_edge_list_file(in.edges, in.edge_format()); });
}

tv::TrustScores load_or_compute_trust(const tv::DirectedGraph& g, const TrustOptions& t) {
  return stage(tv::Stage::kTrust, [&] {
    if (!t.trust_file.empty()) {
      std::ifstream in(t.trust_file);
      if (!in) throw std::runtime_error(fmt::format("cannot open trust file '{}'", t.trust_file));
      return tv::read_trust_csv(in, g);
    }
    tv::TsmParams params = t.params;
    params.threads = tv::resolve_threads(t.threads);
    return tv::normalize_scores(tv::compute_tsm(g, params), params);
  });
}

tv::CommunityAssignment load_communities(const tv::DirectedGraph& g, const std::string& path) {
  return stage(tv::Stage::kCommunity, [&] { return tv::load_assignment_file(path, g); });
}

std::vector<std::size_t> parse_k_list(const std::string& text) {
  tv::PipelineConfig scratch;
  tv::set_config_value(scratch, "k", text);
  return scratch.eval.ks;
}

tv::EdgeSemantics semantics_of(const std::string& text) {
  const auto parsed = tv::parse_edge_semantics(text);
  if (!parsed) throw std::invalid_argument(fmt::format("unknown edge semantics '{}'", text));
  return *parsed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trust-based vulnerability of nodes and communities to misinformation"};
  app.require_subcommand(1);
  int status = 0;

  // trust
  InputOptions trust_in;
  TrustOptions trust_opts;
  std::string trust_out = "-";
  auto* trust_cmd = app.add_subcommand("trust", "Compute normalized trustingness/trustworthiness");
  add_input_options(trust_cmd, trust_in);
  add_tsm_options(trust_cmd, trust_opts);
  trust_cmd->add_option("--out", trust_out, "Output CSV (node_id,ti,tw)");
  trust_cmd->callback([&] {
    status = guarded(tv::Stage::kTrust, [&] {
      const auto g = load_graph(trust_in);
      tv::TsmParams params = trust_opts.params;
      params.threads = tv::resolve_threads(trust_opts.threads);
      const auto raw = tv::compute_tsm(g, params);
      std::cerr << fmt::format("trust: {} iterations, converged={}\n", raw.iterations_run, raw.converged);
      const auto scores = tv::normalize_scores(raw, params);
      write_to(trust_out, [&](std::ostream& out) { tv::write_trust_csv(out, g, scores); });
    });
  });

  // communities
  InputOptions comm_in;
  std::string algo = "louvain";
  std::string assignment_file;
  std::uint64_t seed = 0;
  double resolution = 1.0;
  int max_sweeps = 100;
  std::string comm_out = "-";
  auto* comm_cmd = app.add_subcommand("communities", "Detect disjoint communities");
  add_input_options(comm_cmd, comm_in);
  comm_cmd->add_option("--algo", algo, "Detector")->check(CLI::IsMember({"louvain", "lpa", "file"}));
  comm_cmd->add_option("--assignment", assignment_file, "Assignment file for --algo file");
  comm_cmd->add_option("--seed", seed, "Seed for the visit order");
  comm_cmd->add_option("--resolution", resolution, "Louvain resolution");
  comm_cmd->add_option("--max-sweeps", max_sweeps, "Label propagation sweep cap");
  comm_cmd->add_option("--out", comm_out, "Output assignment (node<TAB>community)");
  comm_cmd->callback([&] {
    status = guarded(tv::Stage::kCommunity, [&] {
      const auto g = load_graph(comm_in);
      tv::CommunityAssignment a;
      if (algo == "file") {
        if (assignment_file.empty()) throw std::invalid_argument("--algo file needs --assignment");
        a = load_communities(g, assignment_file);
      } else if (algo == "lpa") {
        a = tv::label_propagation(tv::symmetrize(g), seed, max_sweeps);
      } else {
        a = tv::louvain(tv::symmetrize(g), seed, resolution);
      }
      if (g.edge_count() > 0) {
        std::cerr << fmt::format("communities: {}, modularity {:.6f}\n", a.community_count,
                                 tv::modularity(tv::symmetrize(g), a));
      }
      write_to(comm_out, [&](std::ostream& out) { tv::write_assignment(out, g, a); });
    });
  });

  // roles
  InputOptions roles_in;
  std::string roles_comms;
  std::string roles_semantics = "follow-out";
  std::string roles_out = "-";
  std::string neighbors_out;
  auto* roles_cmd = app.add_subcommand("roles", "Classify boundary/core/neighbor nodes");
  add_input_options(roles_cmd, roles_in);
  roles_cmd->add_option("--communities", roles_comms, "Assignment file")->required();
  roles_cmd->add_option("--edge-semantics", roles_semantics, "follow-out or any")
      ->check(CLI::IsMember({"follow-out", "any", "any-adjacency"}));
  roles_cmd->add_option("--out", roles_out, "Role CSV (community,node,role)");
  roles_cmd->add_option("--neighbors-out", neighbors_out, "Neighbor CSV (community,boundary_node,neighbor_node)");
  roles_cmd->callback([&] {
    status = guarded(tv::Stage::kRoles, [&] {
      const auto g = load_graph(roles_in);
      const auto a = load_communities(g, roles_comms);
      const auto roles = tv::classify_roles(g, a, semantics_of(roles_semantics));
      write_to(roles_out, [&](std::ostream& out) { tv::write_roles_csv(out, g, roles); });
      if (!neighbors_out.empty()) {
        write_to(neighbors_out, [&](std::ostream& out) { tv::write_neighbors_csv(out, g, roles); });
      }
    });
  });

  // vulnerability
  InputOptions vuln_in;
  TrustOptions vuln_trust;
  std::string vuln_comms, vuln_semantics = "follow-out", vuln_spreaders, vuln_detector = "file";
  std::string vuln_json = "-", vuln_nodes_csv, vuln_comm_csv;
  bool infected_only = false;
  auto* vuln_cmd = app.add_subcommand("vulnerability", "Score boundary nodes and communities");
  add_input_options(vuln_cmd, vuln_in);
  add_tsm_options(vuln_cmd, vuln_trust);
  vuln_cmd->add_option("--trust", vuln_trust.trust_file, "Precomputed trust CSV (else computed)");
  vuln_cmd->add_option("--communities", vuln_comms, "Assignment file")->required();
  vuln_cmd->add_option("--edge-semantics", vuln_semantics, "follow-out or any")
      ->check(CLI::IsMember({"follow-out", "any", "any-adjacency"}));
  vuln_cmd->add_flag("--infected-only", infected_only, "Restrict neighbor sets to known spreaders");
  vuln_cmd->add_option("--spreaders", vuln_spreaders, "Spreader list (needed with --infected-only)");
  vuln_cmd->add_option("--detector", vuln_detector, "Detector name echoed into the report");
  vuln_cmd->add_option("--json", vuln_json, "Nested JSON report");
  vuln_cmd->add_option("--nodes-csv", vuln_nodes_csv, "CSV community,node,V");
  vuln_cmd->add_option("--communities-csv", vuln_comm_csv, "CSV community,V_tilde");
  vuln_cmd->callback([&] {
    status = guarded(tv::Stage::kVulnerability, [&] {
      const auto g = load_graph(vuln_in);
      const auto scores = load_or_compute_trust(g, vuln_trust);
      const auto a = load_communities(g, vuln_comms);
      const auto semantics = semantics_of(vuln_semantics);
      const auto roles = stage(tv::Stage::kRoles, [&] { return tv::classify_roles(g, a, semantics); });
      std::optional<tv::SpreaderSet> spreaders;
      if (infected_only) {
        if (vuln_spreaders.empty()) throw std::invalid_argument("--infected-only needs --spreaders");
        spreaders = tv::load_spreaders_file(vuln_spreaders, g);
      }
      const tv::ReportParameters parameters{vuln_trust.params.involvement, semantics, vuln_detector, infected_only};
      const auto report = tv::assess(g, scores, a, roles, parameters, spreaders ? &*spreaders : nullptr);
      write_to(vuln_json, [&](std::ostream& out) { tv::write_report_json(out, g, report); });
      if (!vuln_nodes_csv.empty()) {
        write_to(vuln_nodes_csv, [&](std::ostream& out) { tv::write_node_csv(out, g, report); });
      }
      if (!vuln_comm_csv.empty()) {
        write_to(vuln_comm_csv, [&](std::ostream& out) { tv::write_community_csv(out, report); });
      }
    });
  });

  // evaluate
  InputOptions eval_in;
  TrustOptions eval_trust;
  std::string eval_comms, eval_semantics = "follow-out", eval_spreaders, eval_k = "1,5,10,15";
  std::string eval_variant = "standard", eval_out = "-", eval_summary, eval_network, eval_detector = "file";
  std::size_t map_k = 15;
  bool eval_infected_only = false;
  auto* eval_cmd = app.add_subcommand("evaluate", "AP@k, MAP and Kendall tau against ground-truth spreaders");
  add_input_options(eval_cmd, eval_in);
  add_tsm_options(eval_cmd, eval_trust);
  eval_cmd->add_option("--trust", eval_trust.trust_file, "Precomputed trust CSV (else computed)");
  eval_cmd->add_option("--communities", eval_comms, "Assignment file")->required();
  eval_cmd->add_option("--edge-semantics", eval_semantics, "follow-out or any")
      ->check(CLI::IsMember({"follow-out", "any", "any-adjacency"}));
  eval_cmd->add_flag("--infected-only", eval_infected_only, "Restrict neighbor sets to known spreaders");
  eval_cmd->add_option("--spreaders", eval_spreaders, "Ground-truth spreader list")->required();
  eval_cmd->add_option("--k", eval_k, "Comma-separated cutoffs");
  eval_cmd->add_option("--map-k", map_k, "MAP cutoff");
  eval_cmd->add_option("--map-variant", eval_variant, "standard or literal")
      ->check(CLI::IsMember({"standard", "literal"}));
  eval_cmd->add_option("--network", eval_network, "Network label for the summary row");
  eval_cmd->add_option("--detector", eval_detector, "Detector label for the summary row");
  eval_cmd->add_option("--out", eval_out, "Evaluation JSON");
  eval_cmd->add_option("--summary-csv", eval_summary, "One-row summary CSV");
  eval_cmd->callback([&] {
    status = guarded(tv::Stage::kEvaluation, [&] {
      const auto g = load_graph(eval_in);
      const auto scores = load_or_compute_trust(g, eval_trust);
      const auto a = load_communities(g, eval_comms);
      const auto semantics = semantics_of(eval_semantics);
      const auto roles = stage(tv::Stage::kRoles, [&] { return tv::classify_roles(g, a, semantics); });
      const auto truth = stage(tv::Stage::kEvaluation, [&] { return tv::load_spreaders_file(eval_spreaders, g); });
      const tv::ReportParameters parameters{eval_trust.params.involvement, semantics, eval_detector, eval_infected_only};
      const auto report = stage(tv::Stage::kVulnerability, [&] {
        return tv::assess(g, scores, a, roles, parameters, eval_infected_only ? &truth : nullptr);
      });
      tv::EvalOptions options;
      options.ks = parse_k_list(eval_k);
      options.map_k = map_k;
      options.map_variant = *tv::parse_map_variant(eval_variant);
      const auto eval = tv::evaluate(report, roles, truth, options);
      write_to(eval_out, [&](std::ostream& out) { tv::write_eval_json(out, eval); });
      if (!eval_summary.empty()) {
        const std::string network =
            eval_network.empty() ? std::filesystem::path(eval_in.edges).stem().string() : eval_network;
        write_to(eval_summary, [&](std::ostream& out) { tv::write_eval_summary_csv(out, eval, network, eval_detector); });
      }
    });
  });

  // synth
  auto* synth_cmd = app.add_subcommand("synth", "Synthetic networks and spreader plantings");
  synth_cmd->require_subcommand(1);

  std::vector<tv::NodeId> blocks;
  tv::SbmParams sbm;
  bool undirected = false;
  std::string sbm_out = "-", sbm_truth;
  auto* sbm_cmd = synth_cmd->add_subcommand("sbm", "Stochastic block model");
  sbm_cmd->add_option("--blocks", blocks, "Block sizes")->required()->delimiter(',');
  sbm_cmd->add_option("--p-in", sbm.p_in, "Within-block edge probability")->required();
  sbm_cmd->add_option("--p-out", sbm.p_out, "Cross-block edge probability")->required();
  sbm_cmd->add_option("--seed", sbm.seed, "Seed");
  sbm_cmd->add_flag("--undirected", undirected, "Sample unordered pairs, add both directions");
  sbm_cmd->add_option("--out", sbm_out, "Edge list output");
  sbm_cmd->add_option("--truth", sbm_truth, "Planted assignment output");
  sbm_cmd->callback([&] {
    status = guarded(tv::Stage::kInput, [&] {
      sbm.block_sizes = blocks;
      sbm.directed = !undirected;
      const auto generated = tv::generate_sbm(sbm);
      write_to(sbm_out, [&](std::ostream& out) { tv::write_edge_list(out, generated.graph, tv::EdgeListFormat::kTsv); });
      if (!sbm_truth.empty()) {
        write_to(sbm_truth, [&](std::ostream& out) { tv::write_assignment(out, generated.graph, generated.planted); });
      }
      std::cerr << fmt::format("sbm: {} nodes, {} edges\n", generated.graph.node_count(), generated.graph.edge_count());
    });
  });

  InputOptions plant_in;
  TrustOptions plant_trust;
  std::string strategy = "uniform", plant_comms, plant_semantics = "follow-out", plant_out = "-";
  double rate = 0.1;
  std::uint64_t plant_seed = 0;
  auto* plant_cmd = synth_cmd->add_subcommand("plant", "Plant ground-truth spreaders");
  add_input_options(plant_cmd, plant_in);
  add_tsm_options(plant_cmd, plant_trust);
  plant_cmd->add_option("--trust", plant_trust.trust_file, "Precomputed trust CSV (else computed)");
  plant_cmd->add_option("--strategy", strategy, "uniform, trust or boundary")
      ->check(CLI::IsMember({"uniform", "trust", "boundary"}));
  plant_cmd->add_option("--rate", rate, "Expected spreader fraction")->required();
  plant_cmd->add_option("--seed", plant_seed, "Seed");
  plant_cmd->add_option("--communities", plant_comms, "Assignment file (boundary strategy)");
  plant_cmd->add_option("--edge-semantics", plant_semantics, "follow-out or any")
      ->check(CLI::IsMember({"follow-out", "any", "any-adjacency"}));
  plant_cmd->add_option("--out", plant_out, "Spreader list output");
  plant_cmd->callback([&] {
    status = guarded(tv::Stage::kInput, [&] {
      const auto g = load_graph(plant_in);
      const auto kind = *tv::parse_planting_kind(strategy);
      tv::TrustScores scores;
      if (kind == tv::PlantingKind::kTrustWeighted) scores = load_or_compute_trust(g, plant_trust);
      std::vector<tv::RoleSet> roles;
      if (kind == tv::PlantingKind::kBoundaryBiased) {
        if (plant_comms.empty()) throw std::invalid_argument("--strategy boundary needs --communities");
        roles = tv::classify_roles(g, load_communities(g, plant_comms), semantics_of(plant_semantics));
      }
      const auto spreaders = tv::plant_spreaders(g, scores, {kind, rate}, plant_seed, roles);
      write_to(plant_out, [&](std::ostream& out) { tv::write_spreaders(out, g, spreaders); });
      std::cerr << fmt::format("planted {} spreaders\n", spreaders.size());
    });
  });

  // pipeline
  std::string config_file;
  std::map<std::string, std::string> overrides;
  auto* pipe_cmd = app.add_subcommand("pipeline", "Run every stage from one configuration");
  pipe_cmd->add_option("--config", config_file, "Flat key = value configuration")->check(CLI::ExistingFile);
  const std::vector<std::pair<std::string, std::string>> override_flags = {
      {"--edges", "Edge list"},
      {"--spreaders", "Ground-truth spreaders"},
      {"--communities", "Assignment file for --algo file"},
      {"--format", "tsv or csv"},
      {"--involvement", "Involvement exponent s"},
      {"--max-iters", "TSM iteration cap"},
      {"--epsilon", "TSM convergence threshold"},
      {"--log-floor", "Lower end of the normalized range"},
      {"--algo", "louvain, lpa or file"},
      {"--seed", "Detector seed"},
      {"--resolution", "Louvain resolution"},
      {"--max-sweeps", "Label propagation sweep cap"},
      {"--edge-semantics", "follow-out or any"},
      {"--k", "Comma-separated cutoffs"},
      {"--map-k", "MAP cutoff"},
      {"--map-variant", "standard or literal"},
      {"--out", "Output directory"},
      {"--network", "Network label"},
      {"--threads", "Worker threads"},
  };
  for (const auto& [flag, help] : override_flags) {
    pipe_cmd->add_option_function<std::string>(
        flag, [&overrides, key = flag.substr(2)](const std::string& value) { overrides[key] = value; }, help);
  }
  pipe_cmd->add_flag_function(
      "--infected-only", [&overrides](std::int64_t) { overrides["infected-only"] = "true"; },
      "Restrict neighbor sets to known spreaders");
  pipe_cmd->callback([&] {
    status = guarded(tv::Stage::kInput, [&] {
      tv::PipelineConfig config;
      stage(tv::Stage::kInput, [&] {
        if (!config_file.empty()) {
          std::ifstream in(config_file);
          tv::apply_config(in, config);
        }
        for (const auto& [key, value] : overrides) tv::set_config_value(config, key, value);
        return 0;
      });
      const auto result = tv::run_pipeline(config, std::cerr);
      double total = 0.0;
      for (const auto& t : result.timings) total += t.seconds;
      std::cerr << fmt::format("pipeline finished in {:.3f} s\n", total);
    });
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : tv::exit_code(tv::Stage::kInput);
  }
  return status;
}
