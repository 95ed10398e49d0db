#include "trustvuln/trust.hpp"

#include "trustvuln/parallel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <vector>

#include <fmt/format.h>

namespace trustvuln {

void TsmParams::validate() const {
  if (!(involvement >= 0.0) || !std::isfinite(involvement)) {
    throw std::invalid_argument("involvement must be a finite value >= 0");
  }
  if (max_iterations < 1) throw std::invalid_argument("max_iterations must be >= 1");
  if (!(convergence_epsilon > 0.0)) throw std::invalid_argument("convergence_epsilon must be > 0");
  if (!(log_floor > 0.0 && log_floor < 1.0)) throw std::invalid_argument("log_floor must lie in (0, 1)");
}

namespace {

// next = adjacency * damping, one chunk of rows at a time.
void sweep(const Adjacency& adjacency, const Eigen::VectorXd& damping, Eigen::VectorXd& next,
           unsigned threads) {
  for_each_chunk(static_cast<std::size_t>(adjacency.rows()), threads,
                 [&](std::size_t begin, std::size_t end) {
                   const auto first = static_cast<Eigen::Index>(begin);
                   const auto rows = static_cast<Eigen::Index>(end - begin);
                   next.segment(first, rows).noalias() = adjacency.middleRows(first, rows) * damping;
                 });
}

void normalize_to_unit_sum(Eigen::VectorXd& v, unsigned threads) {
  const double total = chunked_sum(v, threads);
  if (total > 0.0) v /= total;
}

}  // namespace

RawTrustScores compute_tsm(const DirectedGraph& g, const TsmParams& params,
                           const TsmObserver& observer) {
  params.validate();
  const NodeId n = g.node_count();
  if (n == 0) throw std::invalid_argument("no nodes");

  const double s = params.involvement;
  const unsigned threads = std::max(1u, params.threads);

  RawTrustScores result;
  Eigen::VectorXd ti = Eigen::VectorXd::Constant(n, 1.0 / n);
  Eigen::VectorXd tw = Eigen::VectorXd::Constant(n, 1.0 / n);
  Eigen::VectorXd next_ti(n), next_tw(n);

  for (int iteration = 1; iteration <= params.max_iterations; ++iteration) {
    const Eigen::VectorXd damp_tw = (1.0 + tw.array().pow(s)).inverse().matrix();
    const Eigen::VectorXd damp_ti = (1.0 + ti.array().pow(s)).inverse().matrix();
    sweep(g.out_adjacency(), damp_tw, next_ti, threads);
    sweep(g.in_adjacency(), damp_ti, next_tw, threads);
    normalize_to_unit_sum(next_ti, threads);
    normalize_to_unit_sum(next_tw, threads);

    const double delta = ((next_ti - ti).cwiseAbs() + (next_tw - tw).cwiseAbs()).maxCoeff();
    ti.swap(next_ti);
    tw.swap(next_tw);
    result.iterations_run = iteration;
    if (observer) observer(iteration, ti, tw);

    if (g.edge_count() == 0 || delta < params.convergence_epsilon) {
      result.converged = true;
      break;
    }
  }

  result.trustingness = std::move(ti);
  result.trustworthiness = std::move(tw);
  return result;
}

Eigen::VectorXd log_min_max_normalize(const Eigen::VectorXd& raw, double log_floor) {
  const auto n = raw.size();
  Eigen::VectorXd out = Eigen::VectorXd::Ones(n);
  if (n == 0) return out;

  double max_value = 0.0;
  double min_positive = std::numeric_limits<double>::infinity();
  bool has_zero = false;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x = raw[i];
    if (x < 0.0 || !std::isfinite(x)) {
      throw std::invalid_argument("raw trust scores must be finite and non-negative");
    }
    max_value = std::max(max_value, x);
    if (x > 0.0) {
      min_positive = std::min(min_positive, x);
    } else {
      has_zero = true;
    }
  }
  if (max_value <= 0.0) return out;

  const double zero_value = log_floor * min_positive;
  const double log_min = std::log(has_zero ? zero_value : min_positive);
  const double log_max = std::log(max_value);
  if (!(log_max > log_min)) return out;

  const double span = log_max - log_min;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x = raw[i] > 0.0 ? raw[i] : zero_value;
    const double y = (std::log(x) - log_min) / span;
    out[i] = y >= 1.0 ? 1.0 : std::clamp(log_floor + y * (1.0 - log_floor), log_floor, 1.0);
  }
  return out;
}

TrustScores normalize_scores(const RawTrustScores& raw, const TsmParams& params) {
  params.validate();
  return {log_min_max_normalize(raw.trustingness, params.log_floor),
          log_min_max_normalize(raw.trustworthiness, params.log_floor)};
}

double believability(const TrustScores& scores, const DirectedGraph& g, NodeId follower,
                     NodeId followee) {
  if (!g.has_edge(follower, followee)) {
    throw std::invalid_argument(fmt::format("no edge {} -> {}", g.external_id(follower),
                                            g.external_id(followee)));
  }
  return believability(scores, follower, followee);
}

void write_trust_csv(std::ostream& out, const DirectedGraph& g, const TrustScores& scores) {
  out << "node_id,ti,tw\n";
  for (NodeId v = 0; v < g.node_count(); ++v) {
    out << fmt::format("{},{:.17g},{:.17g}\n", g.external_id(v), scores.trustingness[v],
                       scores.trustworthiness[v]);
  }
}

namespace {

double parse_score(std::string_view text, std::size_t line) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    throw ParseError(line, fmt::format("malformed score '{}'", text));
  }
  return value;
}

}  // namespace

TrustScores read_trust_csv(std::istream& in, const DirectedGraph& g) {
  const NodeId n = g.node_count();
  TrustScores scores{Eigen::VectorXd::Constant(n, -1.0), Eigen::VectorXd::Constant(n, -1.0)};
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    if (line_number == 1 && line == "node_id,ti,tw") continue;
    // Node ids may contain commas; the two score fields are the last two.
    const auto second = line.rfind(',');
    const auto first = second == std::string::npos ? second : line.rfind(',', second - 1);
    if (first == std::string::npos || second == 0) throw ParseError(line_number, "expected node_id,ti,tw");
    const std::string_view view(line);
    const auto id = g.find(view.substr(0, first));
    if (!id) throw ParseError(line_number, fmt::format("unknown node '{}'", view.substr(0, first)));
    scores.trustingness[*id] = parse_score(view.substr(first + 1, second - first - 1), line_number);
    scores.trustworthiness[*id] = parse_score(view.substr(second + 1), line_number);
  }
  for (NodeId v = 0; v < n; ++v) {
    if (!(scores.trustingness[v] > 0.0 && scores.trustingness[v] <= 1.0 &&
          scores.trustworthiness[v] > 0.0 && scores.trustworthiness[v] <= 1.0)) {
      throw ParseError(0, fmt::format("missing or out-of-range trust scores for node '{}'", g.external_id(v)));
    }
  }
  return scores;
}

}  // namespace trustvuln
