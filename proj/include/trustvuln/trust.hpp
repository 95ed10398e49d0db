#pragma once

#include "trustvuln/graph.hpp"
#include "trustvuln/types.hpp"

#include <Eigen/Core>

#include <functional>
#include <iosfwd>

namespace trustvuln {

struct TsmParams {
  /// Involvement exponent s in the damping term 1 + score^s.
  double involvement = 1.0;
  int max_iterations = 100;
  /// Stop once max_v |d ti(v)| + |d tw(v)| falls below this.
  double convergence_epsilon = 1e-6;
  /// Lower end of the normalized score range; also scales the zero clamp.
  double log_floor = 1e-6;
  /// Workers for the per-node sweep. Results do not depend on this.
  unsigned threads = 1;

  /// Throws std::invalid_argument on out-of-range fields.
  void validate() const;
};

/// Sum-to-one trust scores straight out of the fixed-point iteration.
struct RawTrustScores {
  Eigen::VectorXd trustingness;
  Eigen::VectorXd trustworthiness;
  int iterations_run = 0;
  bool converged = false;
};

/// Log min-max normalized scores, every entry in [log_floor, 1].
struct TrustScores {
  Eigen::VectorXd trustingness;
  Eigen::VectorXd trustworthiness;

  NodeId node_count() const { return static_cast<NodeId>(trustingness.size()); }
};

/// Called after each iteration with the normalized vectors of that iteration.
using TsmObserver =
    std::function<void(int iteration, const Eigen::VectorXd& ti, const Eigen::VectorXd& tw)>;

/// Trustingness / trustworthiness fixed point.
///
/// Starting from 1/n everywhere, each Jacobi step computes
///
///   ti'(v) = sum_{v->x} w(v,x) / (1 + tw(x)^s)
///   tw'(u) = sum_{x->u} w(x,u) / (1 + ti(x)^s)
///
/// from the previous iterate only, then divides each vector by its sum (when
/// the sum is positive). Per-node sums run over neighbors in ascending id
/// order, so the output is bit-identical for any thread count. A graph with no
/// edges maps every input to zero and is reported converged after one step.
///
/// Throws std::invalid_argument("no nodes") on an empty graph.
RawTrustScores compute_tsm(const DirectedGraph& g, const TsmParams& params,
                           const TsmObserver& observer = {});

/// Log min-max rescaling of one non-negative score vector into [log_floor, 1].
///
/// Zeros are first lifted to log_floor * (smallest positive entry). When all
/// entries are equal (including all zero) every output is 1. Maximal entries
/// map to exactly 1.
Eigen::VectorXd log_min_max_normalize(const Eigen::VectorXd& raw, double log_floor);

TrustScores normalize_scores(const RawTrustScores& raw, const TsmParams& params);

/// tw(followee) * ti(follower): how strongly `follower` believes `followee`.
inline double believability(const TrustScores& scores, NodeId follower, NodeId followee) {
  return scores.trustworthiness[followee] * scores.trustingness[follower];
}

/// Same, but throws std::invalid_argument unless follower -> followee is an edge of `g`.
double believability(const TrustScores& scores, const DirectedGraph& g, NodeId follower,
                     NodeId followee);

/// CSV `node_id,ti,tw` with 17 significant digits.
void write_trust_csv(std::ostream& out, const DirectedGraph& g, const TrustScores& scores);
TrustScores read_trust_csv(std::istream& in, const DirectedGraph& g);

}  // namespace trustvuln
