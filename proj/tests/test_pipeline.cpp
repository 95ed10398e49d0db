#include "trustvuln/pipeline.hpp"
#include "trustvuln/synth.hpp"

#include <gtest/gtest.h>

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

using namespace trustvuln;
namespace fs = std::filesystem;

namespace {

class TempDir {
 public:
  explicit TempDir(const std::string& name) : path_(fs::temp_directory_path() / ("trustvuln_" + name)) {
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& path) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(read_file(path));
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    std::vector<std::string> row;
    std::stringstream fields(line);
    std::string field;
    while (std::getline(fields, field, ',')) row.push_back(field);
    rows.push_back(row);
  }
  return rows;
}

const char* kTwoTriangles = "a\tb\nb\tc\nc\ta\nd\te\ne\tf\nf\td\nc\td\n";

PipelineConfig two_triangle_config(const TempDir& dir) {
  write_file(dir / "edges.tsv", kTwoTriangles);
  write_file(dir / "spreaders.txt", "c\n");
  PipelineConfig config;
  config.edges = (dir / "edges.tsv").string();
  config.spreaders = (dir / "spreaders.txt").string();
  config.output_dir = (dir / "out").string();
  return config;
}

const std::vector<std::string> kReports = {
    output_files::kTrust,         output_files::kCommunities,       output_files::kRoles,
    output_files::kNeighbors,     output_files::kVulnerabilityJson, output_files::kVulnerabilityNodes,
    output_files::kVulnerabilityCommunities, output_files::kEvalJson, output_files::kEvalSummary,
    output_files::kStatistics,
};

int run_cli(const std::string& args) {
  const std::string command = std::string(TRUSTVULN_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(command.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Pipeline, TwoTriangleSmoke) {
  TempDir dir("smoke");
  const auto config = two_triangle_config(dir);
  std::ostringstream log;
  const auto result = run_pipeline(config, log);
  for (const auto& name : kReports) EXPECT_TRUE(fs::exists(dir / "out" / name)) << name;
  for (const auto& entry : fs::directory_iterator(dir / "out")) {
    EXPECT_NE(entry.path().extension(), ".partial") << entry.path();
  }
  const auto eval = nlohmann::json::parse(read_file(dir / "out" / output_files::kEvalJson));
  EXPECT_EQ(eval["ap"]["1"], 1.0);
  EXPECT_EQ(eval["eligible_communities"], 1);
  EXPECT_TRUE(eval["tau"].contains("P"));
  EXPECT_EQ(result.timings.size(), 6u);
  EXPECT_NE(log.str().find("[trust]"), std::string::npos);
  EXPECT_NE(log.str().find("avg_nodes"), std::string::npos);
  const auto communities = read_file(dir / "out" / output_files::kCommunities);
  EXPECT_EQ(communities, "a\t0\nb\t0\nc\t0\nd\t1\ne\t1\nf\t1\n");
}

TEST(Pipeline, MissingSpreadersFailsAtEvaluate) {
  TempDir dir("missing");
  auto config = two_triangle_config(dir);
  config.spreaders = (dir / "nope.txt").string();
  std::ostringstream log;
  try {
    run_pipeline(config, log);
    FAIL();
  } catch (const StageError& e) {
    EXPECT_EQ(e.stage(), Stage::kEvaluation);
    EXPECT_EQ(exit_code(e.stage()), 7);
  }
  for (const auto& name : {output_files::kTrust, output_files::kCommunities, output_files::kRoles,
                           output_files::kVulnerabilityJson}) {
    EXPECT_TRUE(fs::exists(dir / "out" / name)) << name;
  }
  EXPECT_FALSE(fs::exists(dir / "out" / output_files::kEvalJson));
}

TEST(Pipeline, StageTaggedErrors) {
  TempDir dir("errors");
  auto config = two_triangle_config(dir);
  std::ostringstream log;

  auto bad_input = config;
  write_file(dir / "bad.tsv", "a\tb\tnot-a-weight\n");
  bad_input.edges = (dir / "bad.tsv").string();
  try {
    run_pipeline(bad_input, log);
    FAIL();
  } catch (const StageError& e) {
    EXPECT_EQ(e.stage(), Stage::kInput);
  }

  auto bad_communities = config;
  bad_communities.detector = Detector::kFile;
  write_file(dir / "comms.tsv", "a\t0\n");
  bad_communities.communities = (dir / "comms.tsv").string();
  try {
    run_pipeline(bad_communities, log);
    FAIL();
  } catch (const StageError& e) {
    EXPECT_EQ(e.stage(), Stage::kCommunity);
  }
}

TEST(Pipeline, ReportsAreByteIdenticalAcrossRunsAndThreads) {
  TempDir dir("determinism");
  const auto sbm = generate_sbm({{60, 60, 60, 60, 60}, 0.08, 0.005, 3, true});
  {
    std::ofstream out(dir / "edges.tsv");
    write_edge_list(out, sbm.graph, EdgeListFormat::kTsv);
  }
  write_file(dir / "spreaders.txt", "1\n5\n17\n64\n90\n130\n200\n201\n299\n");
  PipelineConfig config;
  config.edges = (dir / "edges.tsv").string();
  config.spreaders = (dir / "spreaders.txt").string();
  std::ostringstream log;
  std::vector<fs::path> outs;
  for (const unsigned threads : {1u, 1u, 4u}) {
    config.threads = threads;
    config.output_dir = (dir / ("out" + std::to_string(outs.size()))).string();
    run_pipeline(config, log);
    outs.emplace_back(config.output_dir);
  }
  for (const auto& name : kReports) {
    const auto reference = read_file(outs[0] / name);
    EXPECT_FALSE(reference.empty()) << name;
    for (std::size_t i = 1; i < outs.size(); ++i) EXPECT_EQ(read_file(outs[i] / name), reference) << name;
  }
}

TEST(Pipeline, StatisticsMatchRecountFromDumps) {
  TempDir dir("stats");
  const auto sbm = generate_sbm({{40, 40, 40, 40}, 0.1, 0.01, 8, true});
  {
    std::ofstream out(dir / "edges.tsv");
    write_edge_list(out, sbm.graph, EdgeListFormat::kTsv);
  }
  const auto spreaders = plant_spreaders(sbm.graph, {}, {PlantingKind::kUniform, 0.3}, 2);
  {
    std::ofstream out(dir / "spreaders.txt");
    write_spreaders(out, sbm.graph, spreaders);
  }
  PipelineConfig config;
  config.edges = (dir / "edges.tsv").string();
  config.spreaders = (dir / "spreaders.txt").string();
  config.output_dir = (dir / "out").string();
  std::ostringstream log;
  run_pipeline(config, log);

  std::set<std::string> infected;
  {
    std::istringstream in(read_file(dir / "spreaders.txt"));
    for (std::string id; std::getline(in, id);) infected.insert(id);
  }
  std::map<std::string, std::set<std::string>> members, boundary, neighbors;
  std::map<std::string, std::size_t> boundary_edges;
  for (const auto& row : read_csv(dir / "out" / output_files::kRoles)) {
    members[row[0]].insert(row[1]);
    if (row[2] == "boundary") boundary[row[0]].insert(row[1]);
  }
  for (const auto& row : read_csv(dir / "out" / output_files::kNeighbors)) {
    neighbors[row[0]].insert(row[2]);
    ++boundary_edges[row[0]];
  }
  auto count_infected = [&](const std::set<std::string>& s) {
    return static_cast<double>(std::count_if(s.begin(), s.end(), [&](const auto& v) { return infected.count(v); }));
  };
  const double k = static_cast<double>(members.size());
  double nodes = 0, inf_nodes = 0, b_edges = 0, b = 0, n = 0, inf_b = 0, inf_n = 0;
  for (const auto& [c, m] : members) {
    nodes += static_cast<double>(m.size());
    inf_nodes += count_infected(m);
    b_edges += static_cast<double>(boundary_edges[c]);
    b += static_cast<double>(boundary[c].size());
    n += static_cast<double>(neighbors[c].size());
    inf_b += count_infected(boundary[c]);
    inf_n += count_infected(neighbors[c]);
  }
  const auto stats = read_csv(dir / "out" / output_files::kStatistics);
  ASSERT_EQ(stats.size(), 1u);
  const auto& row = stats[0];
  EXPECT_EQ(std::stod(row[0]), k);
  const std::vector<double> expected{nodes / k, inf_nodes / k, b_edges / k, b / k, n / k, inf_b / k, inf_n / k};
  for (std::size_t i = 0; i < expected.size(); ++i) EXPECT_NEAR(std::stod(row[i + 1]), expected[i], 1e-12) << i;
}

TEST(Config, ParsesKeysAndReportsLine) {
  PipelineConfig config;
  std::istringstream in(
      "# run\n"
      "edges = e.tsv\n"
      "involvement = 2.5\n"
      "edge-semantics = any\n"
      "k = 1,3,7\n"
      "map_variant = literal\n"
      "algo = lpa\n"
      "infected_only = true\n");
  apply_config(in, config);
  EXPECT_EQ(config.edges, "e.tsv");
  EXPECT_EQ(config.tsm.involvement, 2.5);
  EXPECT_EQ(config.semantics, EdgeSemantics::kAnyAdjacency);
  EXPECT_EQ(config.eval.ks, (std::vector<std::size_t>{1, 3, 7}));
  EXPECT_EQ(config.eval.map_variant, MapVariant::kLiteral);
  EXPECT_EQ(config.detector, Detector::kLabelPropagation);
  EXPECT_TRUE(config.infected_only);

  std::istringstream bad("edges = e.tsv\n\nbogus = 1\n");
  try {
    apply_config(bad, config);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  EXPECT_THROW(set_config_value(config, "k", "5,1"), std::invalid_argument);
  EXPECT_THROW(set_config_value(config, "seed", "x"), std::invalid_argument);
}

TEST(Cli, ExitCodesAndFlagOverrides) {
  TempDir dir("cli");
  write_file(dir / "edges.tsv", kTwoTriangles);
  write_file(dir / "spreaders.txt", "c\n");
  write_file(dir / "run.conf", "edges = " + (dir / "edges.tsv").string() + "\nspreaders = " +
                                   (dir / "missing.txt").string() + "\nout = " + (dir / "conf_out").string() + "\n");
  const std::string conf = "pipeline --config " + (dir / "run.conf").string();
  EXPECT_EQ(run_cli(conf), 7);
  EXPECT_TRUE(fs::exists(dir / "conf_out" / output_files::kTrust));
  EXPECT_EQ(run_cli(conf + " --spreaders " + (dir / "spreaders.txt").string()), 0);
  EXPECT_TRUE(fs::exists(dir / "conf_out" / output_files::kEvalJson));

  write_file(dir / "bad.tsv", "a\n");
  EXPECT_EQ(run_cli("trust --edges " + (dir / "bad.tsv").string()), 2);
  EXPECT_EQ(run_cli("trust --edges " + (dir / "edges.tsv").string() + " --out " + (dir / "t.csv").string()), 0);
  EXPECT_EQ(read_file(dir / "t.csv").substr(0, 14), "node_id,ti,tw\n");
  EXPECT_EQ(run_cli("communities --edges " + (dir / "edges.tsv").string() + " --out " + (dir / "c.tsv").string()), 0);
  EXPECT_EQ(run_cli("evaluate --edges " + (dir / "edges.tsv").string() + " --communities " +
                    (dir / "c.tsv").string() + " --spreaders " + (dir / "missing.txt").string()),
            7);
  EXPECT_EQ(run_cli("vulnerability --edges " + (dir / "edges.tsv").string() + " --communities " +
                    (dir / "c.tsv").string() + " --trust " + (dir / "t.csv").string() + " --json " +
                    (dir / "v.json").string()),
            0);
  EXPECT_EQ(run_cli("synth sbm --blocks 5,5 --p-in 0.5 --p-out 0.1 --seed 1 --out " + (dir / "s.tsv").string()), 0);
  EXPECT_EQ(run_cli("synth plant --edges " + (dir / "s.tsv").string() + " --strategy trust --rate 0.3 --out " +
                    (dir / "p.txt").string()),
            0);
  EXPECT_EQ(run_cli("roles --edges " + (dir / "edges.tsv").string()), 2);  // missing --communities
}
