#include "helpers.hpp"
#include "oracles.hpp"

#include "trustvuln/community.hpp"
#include "trustvuln/synth.hpp"

#include <gtest/gtest.h>

#include <random>
#include <set>
#include <sstream>

using namespace trustvuln;
using testing_support::graph_from;

namespace {

std::vector<oracle::Edge> clique_edges(int first, int size) {
  std::vector<oracle::Edge> edges;
  for (int u = first; u < first + size; ++u) {
    for (int v = u + 1; v < first + size; ++v) edges.push_back({u, v, 1.0});
  }
  return edges;
}

UndirectedView view_of(int n, const std::vector<oracle::Edge>& undirected) {
  std::vector<Eigen::Triplet<double, NodeId>> triplets;
  for (const auto& e : undirected) triplets.emplace_back(e.from, e.to, e.weight);
  return make_undirected(n, triplets);
}

std::vector<int> as_ints(const CommunityAssignment& a) { return {a.labels.begin(), a.labels.end()}; }

// Two triangles {0,1,2} and {3,4,5} bridged by 2-3.
std::vector<oracle::Edge> two_triangles() {
  auto edges = clique_edges(0, 3);
  const auto second = clique_edges(3, 3);
  edges.insert(edges.end(), second.begin(), second.end());
  edges.push_back({2, 3, 1.0});
  return edges;
}

void expect_partition(const CommunityAssignment& a, NodeId n) {
  ASSERT_EQ(a.node_count(), n);
  std::set<CommunityId> used(a.labels.begin(), a.labels.end());
  EXPECT_EQ(static_cast<CommunityId>(used.size()), a.community_count);
  if (!used.empty()) {
    EXPECT_EQ(*used.begin(), 0);
    EXPECT_EQ(*used.rbegin(), a.community_count - 1);
  }
}

}  // namespace

TEST(PartitionEnumeration, BellNumber) {
  int count = 0;
  oracle::for_each_partition(8, [&](const std::vector<int>&) { ++count; });
  EXPECT_EQ(count, 4140);
}

TEST(Louvain, TwoCliquesAreOptimal) {
  auto edges = clique_edges(0, 4);
  const auto second = clique_edges(4, 4);
  edges.insert(edges.end(), second.begin(), second.end());
  edges.push_back({3, 4, 1.0});

  double best_q = -1.0;
  std::vector<int> best;
  oracle::for_each_partition(8, [&](const std::vector<int>& labels) {
    const double q = oracle::modularity(8, edges, labels);
    if (q > best_q + 1e-12) {
      best_q = q;
      best = labels;
    }
  });
  ASSERT_EQ(best, (std::vector<int>{0, 0, 0, 0, 1, 1, 1, 1}));

  const auto view = view_of(8, edges);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto a = louvain(view, seed);
    EXPECT_EQ(as_ints(a), best) << "seed " << seed;
    EXPECT_NEAR(modularity(view, a), best_q, 1e-12);
  }
}

TEST(Louvain, SingleNodeAndEdgeless) {
  const auto one = louvain(view_of(1, {}), 0);
  EXPECT_EQ(one.labels, (std::vector<CommunityId>{0}));
  const auto five = louvain(view_of(5, {}), 3);
  EXPECT_EQ(five.community_count, 5);
  EXPECT_THROW(louvain(view_of(0, {}), 0), std::invalid_argument);
  EXPECT_THROW(louvain(view_of(2, {{0, 1, 1.0}}), 0, 0.0), std::invalid_argument);
}

TEST(Louvain, TraceNonDecreasingAndMatchesFinalQ) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    SbmParams p{{30, 30, 30, 30, 30}, 0.2, 0.02, seed, false};
    const auto sbm = generate_sbm(p);
    const auto view = symmetrize(sbm.graph);
    const auto result = louvain_with_trace(view, seed);
    ASSERT_FALSE(result.level_modularity.empty());
    for (std::size_t i = 1; i < result.level_modularity.size(); ++i) {
      EXPECT_GE(result.level_modularity[i], result.level_modularity[i - 1] - 1e-12);
    }
    EXPECT_NEAR(result.level_modularity.back(), modularity(view, result.assignment), 1e-9);
    expect_partition(result.assignment, view.node_count());
  }
}

TEST(Louvain, DeterministicPerSeed) {
  SbmParams p{{40, 40, 40}, 0.15, 0.03, 5, false};
  const auto view = symmetrize(generate_sbm(p).graph);
  for (std::uint64_t seed = 0; seed < 5; ++seed) EXPECT_EQ(louvain(view, seed), louvain(view, seed));
}

TEST(Louvain, RecoversPlantedPartition) {
  int good = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    SbmParams p{{25, 25, 25, 25}, 0.3, 0.01, seed, false};
    const auto sbm = generate_sbm(p);
    const auto found = louvain(symmetrize(sbm.graph), seed);
    if (normalized_mutual_information(found, sbm.planted) >= 0.9) ++good;
  }
  EXPECT_GE(good, 9);
}

TEST(Louvain, ResolutionControlsGranularity) {
  SbmParams p{{20, 20, 20, 20}, 0.4, 0.05, 1, false};
  const auto view = symmetrize(generate_sbm(p).graph);
  const auto coarse = louvain(view, 0, 0.05);
  const auto fine = louvain(view, 0, 5.0);
  EXPECT_LT(coarse.community_count, fine.community_count);
}

TEST(LabelPropagation, TwoTriangles) {
  const auto a = label_propagation(view_of(6, two_triangles()), 0);
  EXPECT_EQ(as_ints(a), (std::vector<int>{0, 0, 0, 1, 1, 1}));
}

TEST(LabelPropagation, SingleEdgeMerges) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto a = label_propagation(view_of(2, {{0, 1, 1.0}}), seed);
    EXPECT_EQ(a.community_count, 1);
  }
}

TEST(LabelPropagation, EdgelessAndEmpty) {
  EXPECT_EQ(label_propagation(view_of(4, {}), 0).community_count, 4);
  EXPECT_THROW(label_propagation(view_of(0, {}), 0), std::invalid_argument);
}

TEST(LabelPropagation, PartitionAndDeterminism) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    SbmParams p{{25, 25, 25, 25}, 0.3, 0.01, seed, false};
    const auto view = symmetrize(generate_sbm(p).graph);
    const auto a = label_propagation(view, seed);
    expect_partition(a, view.node_count());
    EXPECT_EQ(a, label_propagation(view, seed));
  }
}

TEST(Modularity, Examples) {
  auto disjoint = clique_edges(0, 3);
  const auto second = clique_edges(3, 3);
  disjoint.insert(disjoint.end(), second.begin(), second.end());
  const auto view = view_of(6, disjoint);
  const std::vector<std::int64_t> split{0, 0, 0, 1, 1, 1};
  EXPECT_NEAR(modularity(view, compact_labels(split)), 0.5, 1e-15);
  EXPECT_NEAR(oracle::modularity(6, disjoint, {0, 0, 0, 1, 1, 1}), 0.5, 1e-15);

  const std::vector<std::int64_t> together(6, 0);
  EXPECT_NEAR(modularity(view, compact_labels(together)), 0.0, 1e-15);

  const auto k4 = view_of(4, clique_edges(0, 4));
  const std::vector<std::int64_t> singletons{0, 1, 2, 3};
  const double q = modularity(k4, compact_labels(singletons));
  EXPECT_LT(q, 0.0);
  EXPECT_NEAR(q, -0.25, 1e-15);

  EXPECT_THROW(modularity(view_of(3, {}), compact_labels(std::vector<std::int64_t>{0, 1, 2})), std::domain_error);
}

TEST(Modularity, MatchesPairSumOracle) {
  std::mt19937_64 gen(13);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + trial % 20;
    auto directed = testing_support::random_edges(gen, n, 3 * n, true);
    std::vector<oracle::Edge> undirected;
    for (const auto& e : directed) {
      if (e.from < e.to) undirected.push_back(e);
    }
    if (undirected.empty()) continue;
    const auto labels = testing_support::random_labels(gen, n, 1 + trial % 5);
    const std::vector<std::int64_t> wide(labels.begin(), labels.end());
    EXPECT_NEAR(modularity(view_of(n, undirected), compact_labels(wide)), oracle::modularity(n, undirected, labels),
                1e-12);
  }
}

TEST(CompactLabels, FirstAppearanceOrder) {
  const std::vector<std::int64_t> raw{7, 3, 7, 9, 3};
  const auto a = compact_labels(raw);
  EXPECT_EQ(a.labels, (std::vector<CommunityId>{0, 1, 0, 2, 1}));
  EXPECT_EQ(a.community_count, 3);
}

TEST(Nmi, IdenticalAndIndependent) {
  const std::vector<std::int64_t> x{0, 0, 1, 1};
  const std::vector<std::int64_t> relabeled{5, 5, 2, 2};
  const std::vector<std::int64_t> crossed{0, 1, 0, 1};
  EXPECT_NEAR(normalized_mutual_information(compact_labels(x), compact_labels(relabeled)), 1.0, 1e-12);
  EXPECT_NEAR(normalized_mutual_information(compact_labels(x), compact_labels(crossed)), 0.0, 1e-12);
}

TEST(LoadAssignment, Examples) {
  const auto g = graph_from({{"a", "b"}});
  std::istringstream same("a\t7\nb\t7\n");
  EXPECT_EQ(load_assignment(same, g).community_count, 1);

  std::istringstream missing("a\t1\n");
  try {
    load_assignment(missing, g);
    FAIL();
  } catch (const std::exception& e) {
    EXPECT_NE(std::string(e.what()).find("'b'"), std::string::npos) << e.what();
  }

  std::istringstream duplicate("a\t1\na\t2\n");
  EXPECT_THROW(load_assignment(duplicate, g), ParseError);
  std::istringstream unknown("a\t1\nb\t1\nc\t1\n");
  EXPECT_THROW(load_assignment(unknown, g), ParseError);
}

TEST(LoadAssignment, RoundTrip) {
  SbmParams p{{10, 10, 10}, 0.5, 0.05, 3, true};
  const auto sbm = generate_sbm(p);
  std::ostringstream out;
  write_assignment(out, sbm.graph, sbm.planted);
  std::istringstream in(out.str());
  EXPECT_EQ(load_assignment(in, sbm.graph), sbm.planted);
}
