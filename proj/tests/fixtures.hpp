#pragma once

#include "trustvuln/community.hpp"
#include "trustvuln/graph.hpp"
#include "trustvuln/trust.hpp"

#include <string>
#include <vector>

namespace testing_support {

using namespace trustvuln;

struct TwoCommunityFixture {
  DirectedGraph graph;
  CommunityAssignment assignment;
  TrustScores scores;
  CommunityId c1, c3;
};

// C1 and C3 are identical 5-cliques; C2 holds six spreaders. Two C1 members
// follow high-trustworthiness spreaders and have high trustingness; three C3
// members follow low-trustworthiness spreaders and have low trustingness.
inline TwoCommunityFixture two_communities() {
  GraphBuilder builder;
  auto clique = [&](const std::string& prefix) {
    for (int i = 0; i < 5; ++i) {
      for (int j = 0; j < 5; ++j) {
        if (i != j) builder.add_edge(prefix + std::to_string(i), prefix + std::to_string(j));
      }
    }
  };
  clique("a");  // C1
  clique("c");  // C3
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 6; ++j) {
      if (i != j) builder.add_edge("s" + std::to_string(i), "s" + std::to_string(j));
    }
  }
  builder.add_edge("a0", "s0");
  builder.add_edge("a1", "s1");
  builder.add_edge("c0", "s3");
  builder.add_edge("c1", "s4");
  builder.add_edge("c2", "s5");
  TwoCommunityFixture f{std::move(builder).build(), {}, {}, 0, 0};
  std::vector<std::int64_t> labels(static_cast<std::size_t>(f.graph.node_count()));
  const auto n = f.graph.node_count();
  for (NodeId v = 0; v < n; ++v) labels[static_cast<std::size_t>(v)] = f.graph.external_id(v)[0];
  f.assignment = compact_labels(labels);
  f.c1 = f.assignment[*f.graph.find("a0")];
  f.c3 = f.assignment[*f.graph.find("c0")];

  f.scores = {Eigen::VectorXd::Constant(n, 0.5), Eigen::VectorXd::Constant(n, 0.5)};
  auto set = [&](const std::string& id, double ti, double tw) {
    f.scores.trustingness[*f.graph.find(id)] = ti;
    f.scores.trustworthiness[*f.graph.find(id)] = tw;
  };
  set("a0", 0.9, 0.5);
  set("a1", 0.9, 0.5);
  set("c0", 0.1, 0.5);
  set("c1", 0.1, 0.5);
  set("c2", 0.1, 0.5);
  set("s0", 0.5, 0.9);
  set("s1", 0.5, 0.9);
  set("s3", 0.5, 0.1);
  set("s4", 0.5, 0.1);
  set("s5", 0.5, 0.1);
  return f;
}

}  // namespace testing_support
