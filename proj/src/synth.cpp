#include "trustvuln/synth.hpp"

#include "trustvuln/rng.hpp"
#include "trustvuln/vulnerability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <fmt/format.h>

namespace trustvuln {

void SbmParams::validate() const {
  for (const NodeId size : block_sizes) {
    if (size <= 0) throw std::invalid_argument("sbm: block sizes must be positive");
  }
  if (!(p_out >= 0.0 && p_out < p_in && p_in <= 1.0)) {
    throw std::invalid_argument(fmt::format("sbm: need 0 <= p_out < p_in <= 1, got p_in={} p_out={}", p_in, p_out));
  }
}

namespace {

// Calls emit(i) for each i in [0, count) whose independent Bernoulli(p) trial
// succeeds, jumping between successes with geometric skips.
template <typename Emit>
void bernoulli_positions(std::uint64_t count, double p, Rng& rng, Emit&& emit) {
  if (count == 0 || p <= 0.0) return;
  if (p >= 1.0) {
    for (std::uint64_t i = 0; i < count; ++i) emit(i);
    return;
  }
  const double log_miss = std::log1p(-p);
  std::uint64_t position = 0;
  while (position < count) {
    const double skip = std::floor(std::log1p(-rng.uniform01()) / log_miss);
    if (skip >= static_cast<double>(count - position)) return;
    position += static_cast<std::uint64_t>(skip);
    emit(position);
    ++position;
  }
}

}  // namespace

SbmGraph generate_sbm(const SbmParams& params) {
  params.validate();
  std::int64_t total = 0;
  for (const NodeId size : params.block_sizes) total += size;
  if (total == 0) throw std::invalid_argument("sbm: total node count is 0");
  if (total > std::numeric_limits<NodeId>::max()) throw std::invalid_argument("sbm: too many nodes");

  std::vector<NodeId> block_start{0};
  std::vector<std::int64_t> block_of;
  block_of.reserve(static_cast<std::size_t>(total));
  for (std::size_t b = 0; b < params.block_sizes.size(); ++b) {
    block_start.push_back(block_start.back() + params.block_sizes[b]);
    block_of.insert(block_of.end(), static_cast<std::size_t>(params.block_sizes[b]), static_cast<std::int64_t>(b));
  }

  GraphBuilder builder;
  const auto n = static_cast<NodeId>(total);
  for (NodeId v = 0; v < n; ++v) builder.intern(std::to_string(v));

  Rng rng(params.seed);
  const std::size_t blocks = params.block_sizes.size();
  for (NodeId u = 0; u < n; ++u) {
    const auto own = static_cast<std::size_t>(block_of[static_cast<std::size_t>(u)]);
    for (std::size_t b = 0; b < blocks; ++b) {
      const double p = b == own ? params.p_in : params.p_out;
      const NodeId hi = block_start[b + 1];
      if (params.directed) {
        const NodeId lo = block_start[b];
        const bool skip_self = b == own;
        const auto count = static_cast<std::uint64_t>(hi - lo - (skip_self ? 1 : 0));
        bernoulli_positions(count, p, rng, [&](std::uint64_t i) {
          auto v = static_cast<NodeId>(lo + static_cast<NodeId>(i));
          if (skip_self && v >= u) ++v;
          builder.add_edge(u, v, 1.0);
        });
      } else {
        const NodeId lo = std::max(block_start[b], static_cast<NodeId>(u + 1));
        if (lo >= hi) continue;
        bernoulli_positions(static_cast<std::uint64_t>(hi - lo), p, rng, [&](std::uint64_t i) {
          const auto v = static_cast<NodeId>(lo + static_cast<NodeId>(i));
          builder.add_edge(u, v, 1.0);
          builder.add_edge(v, u, 1.0);
        });
      }
    }
  }

  SbmGraph result{std::move(builder).build(), compact_labels(block_of)};
  return result;
}

std::string_view to_string(PlantingKind kind) {
  switch (kind) {
    case PlantingKind::kUniform: return "uniform";
    case PlantingKind::kTrustWeighted: return "trust";
    case PlantingKind::kBoundaryBiased: return "boundary";
  }
  return "uniform";
}

std::optional<PlantingKind> parse_planting_kind(std::string_view text) {
  if (text == "uniform") return PlantingKind::kUniform;
  if (text == "trust" || text == "trust-weighted") return PlantingKind::kTrustWeighted;
  if (text == "boundary" || text == "boundary-biased") return PlantingKind::kBoundaryBiased;
  return std::nullopt;
}

Eigen::VectorXd follow_vulnerability(const DirectedGraph& g, const TrustScores& scores) {
  Eigen::VectorXd v(g.node_count());
  for (NodeId u = 0; u < g.node_count(); ++u) {
    v[u] = node_vulnerability(scores, u, g.neighbors(u, Direction::kOut).nodes);
  }
  return v;
}

SpreaderSet plant_spreaders(const DirectedGraph& g, const TrustScores& scores,
                            const PlantingStrategy& strategy, std::uint64_t seed,
                            std::span<const RoleSet> roles) {
  if (!(strategy.rate > 0.0 && strategy.rate <= 1.0)) {
    throw std::invalid_argument("plant_spreaders: rate must lie in (0, 1]");
  }
  const NodeId n = g.node_count();
  Rng rng(seed);
  std::vector<NodeId> flagged;

  switch (strategy.kind) {
    case PlantingKind::kUniform:
      for (NodeId v = 0; v < n; ++v) {
        if (rng.bernoulli(strategy.rate)) flagged.push_back(v);
      }
      break;
    case PlantingKind::kTrustWeighted: {
      const Eigen::VectorXd weight = follow_vulnerability(g, scores);
      const double total = weight.sum();
      for (NodeId v = 0; v < n; ++v) {
        const double p = total > 0.0 ? std::min(1.0, strategy.rate * n * weight[v] / total) : strategy.rate;
        if (rng.bernoulli(p)) flagged.push_back(v);
      }
      break;
    }
    case PlantingKind::kBoundaryBiased: {
      std::vector<NodeId> boundary;
      for (const auto& role : roles) boundary.insert(boundary.end(), role.boundary.begin(), role.boundary.end());
      std::sort(boundary.begin(), boundary.end());
      for (const NodeId v : boundary) {
        if (rng.bernoulli(strategy.rate)) flagged.push_back(v);
      }
      break;
    }
  }
  return SpreaderSet(std::move(flagged));
}

}  // namespace trustvuln
