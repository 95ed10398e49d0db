#include "trustvuln/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

#include <fmt/format.h>
#include <json.hpp>

namespace trustvuln {

RankedList RankedList::from_items(std::vector<RankedItem> items) {
  for (const auto& item : items) {
    if (std::isnan(item.score)) throw std::invalid_argument("ranked list: NaN score");
  }
  std::sort(items.begin(), items.end(), [](const RankedItem& a, const RankedItem& b) {
    return a.score != b.score ? a.score > b.score : a.id < b.id;
  });
  std::vector<std::int64_t> ids(items.size());
  std::transform(items.begin(), items.end(), ids.begin(), [](const RankedItem& i) { return i.id; });
  std::sort(ids.begin(), ids.end());
  if (const auto dup = std::adjacent_find(ids.begin(), ids.end()); dup != ids.end()) {
    throw std::invalid_argument(fmt::format("ranked list: duplicate item {}", *dup));
  }
  RankedList list;
  list.items_ = std::move(items);
  return list;
}

RankedList node_ranking(std::span<const NodeVulnerability> nodes) {
  std::vector<RankedItem> items;
  items.reserve(nodes.size());
  for (const auto& n : nodes) items.push_back({n.node, n.score});
  return RankedList::from_items(std::move(items));
}

namespace {

bool is_spreader(const SpreaderSet& truth, std::int64_t id) {
  return id >= 0 && id <= std::numeric_limits<NodeId>::max() && truth.contains(static_cast<NodeId>(id));
}

}  // namespace

double precision_at_k(const RankedList& ranked, const SpreaderSet& truth, std::size_t k) {
  if (k == 0) throw std::invalid_argument("precision_at_k: k must be positive");
  if (ranked.empty()) throw std::invalid_argument("precision_at_k: empty ranking");
  const std::size_t cutoff = std::min(k, ranked.size());
  std::size_t hits = 0;
  for (std::size_t i = 0; i < cutoff; ++i) hits += is_spreader(truth, ranked[i].id) ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(cutoff);
}

std::size_t relevant_count(const RankedList& ranked, const SpreaderSet& truth) {
  return static_cast<std::size_t>(std::count_if(ranked.items().begin(), ranked.items().end(),
                                                [&](const RankedItem& i) { return is_spreader(truth, i.id); }));
}

double average_precision(const RankedList& ranked, const SpreaderSet& truth, std::size_t k_max) {
  if (k_max == 0) throw std::invalid_argument("average_precision: k_max must be positive");
  const std::size_t relevant = relevant_count(ranked, truth);
  if (relevant == 0) return 0.0;
  const std::size_t cutoff = std::min(k_max, ranked.size());
  double sum = 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < cutoff; ++i) {
    if (is_spreader(truth, ranked[i].id)) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(i + 1);
    }
  }
  return sum / static_cast<double>(std::min(k_max, relevant));
}

double ap_at_k(std::span<const RankedList> per_community, const SpreaderSet& truth, std::size_t k) {
  if (k == 0) throw std::invalid_argument("ap_at_k: k must be positive");
  double sum = 0.0;
  std::size_t eligible = 0;
  for (const auto& ranked : per_community) {
    if (relevant_count(ranked, truth) == 0) continue;
    sum += precision_at_k(ranked, truth, k);
    ++eligible;
  }
  if (eligible == 0) throw std::domain_error("no ground truth");
  return sum / static_cast<double>(eligible);
}

std::string_view to_string(MapVariant variant) {
  return variant == MapVariant::kStandard ? "standard" : "literal";
}

std::optional<MapVariant> parse_map_variant(std::string_view text) {
  if (text == "standard") return MapVariant::kStandard;
  if (text == "literal") return MapVariant::kLiteral;
  return std::nullopt;
}

double mean_average_precision(std::span<const RankedList> per_community, const SpreaderSet& truth,
                              std::size_t k_max, MapVariant variant) {
  if (k_max == 0) throw std::invalid_argument("mean_average_precision: k_max must be positive");
  if (variant == MapVariant::kLiteral) {
    double sum = 0.0;
    for (std::size_t k = 1; k <= k_max; ++k) sum += ap_at_k(per_community, truth, k);
    return sum / static_cast<double>(k_max);
  }
  double sum = 0.0;
  std::size_t eligible = 0;
  for (const auto& ranked : per_community) {
    if (relevant_count(ranked, truth) == 0) continue;
    sum += average_precision(ranked, truth, k_max);
    ++eligible;
  }
  if (eligible == 0) throw std::domain_error("no ground truth");
  return sum / static_cast<double>(eligible);
}

namespace {

// Pairs within runs of equal values of a sorted sequence.
template <typename It, typename Eq>
std::uint64_t tied_pairs(It first, It last, Eq equal) {
  std::uint64_t pairs = 0;
  while (first != last) {
    It run = first;
    std::uint64_t length = 0;
    while (run != last && equal(*first, *run)) {
      ++run;
      ++length;
    }
    pairs += length * (length - 1) / 2;
    first = run;
  }
  return pairs;
}

// Strict inversions of `values`, counted by merge sort; sorts `values`.
std::uint64_t count_inversions(std::vector<double>& values) {
  std::vector<double> buffer(values.size());
  std::uint64_t inversions = 0;
  for (std::size_t width = 1; width < values.size(); width *= 2) {
    for (std::size_t lo = 0; lo < values.size(); lo += 2 * width) {
      const std::size_t mid = std::min(lo + width, values.size());
      const std::size_t hi = std::min(lo + 2 * width, values.size());
      std::size_t i = lo, j = mid, out = lo;
      while (i < mid && j < hi) {
        if (values[j] < values[i]) {
          inversions += mid - i;
          buffer[out++] = values[j++];
        } else {
          buffer[out++] = values[i++];
        }
      }
      while (i < mid) buffer[out++] = values[i++];
      while (j < hi) buffer[out++] = values[j++];
    }
    values.swap(buffer);
  }
  return inversions;
}

}  // namespace

KendallTau kendall_tau(std::span<const double> rel, std::span<const double> ret) {
  if (rel.size() != ret.size()) throw std::invalid_argument("kendall_tau: length mismatch");
  if (rel.size() < 2) throw std::invalid_argument("kendall_tau: need at least 2 items");
  for (std::size_t i = 0; i < rel.size(); ++i) {
    if (std::isnan(rel[i]) || std::isnan(ret[i])) throw std::invalid_argument("kendall_tau: NaN rank");
  }

  const std::size_t n = rel.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return rel[a] != rel[b] ? rel[a] < rel[b] : ret[a] < ret[b];
  });

  const std::uint64_t total = static_cast<std::uint64_t>(n) * (n - 1) / 2;
  const std::uint64_t tied_rel =
      tied_pairs(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return rel[a] == rel[b]; });
  const std::uint64_t tied_both = tied_pairs(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return rel[a] == rel[b] && ret[a] == ret[b];
  });

  std::vector<double> second(n);
  std::transform(order.begin(), order.end(), second.begin(), [&](std::size_t i) { return ret[i]; });
  const std::uint64_t discordant = count_inversions(second);
  const std::uint64_t tied_ret =
      tied_pairs(second.begin(), second.end(), [](double a, double b) { return a == b; });

  KendallTau tau;
  tau.discordant = discordant;
  tau.concordant = total - tied_rel - tied_ret + tied_both - discordant;
  tau.ties_first = tied_rel - tied_both;
  tau.ties_second = tied_ret - tied_both;

  const auto p = static_cast<double>(tau.concordant);
  const auto q = static_cast<double>(tau.discordant);
  const auto t = static_cast<double>(tau.ties_first);
  const auto u = static_cast<double>(tau.ties_second);
  const double denominator = (p + q + t) * (p + q + u);
  if (denominator > 0.0) tau.value = (p - q) / std::sqrt(denominator);
  return tau;
}

RankedList ground_truth_community_ranking(const std::vector<RoleSet>& roles, const SpreaderSet& truth) {
  std::vector<RankedItem> items;
  items.reserve(roles.size());
  for (const auto& role : roles) {
    double score = 0.0;
    if (!role.boundary.empty()) {
      const auto hits = std::count_if(role.boundary.begin(), role.boundary.end(),
                                      [&](NodeId v) { return truth.contains(v); });
      score = static_cast<double>(hits) / static_cast<double>(role.boundary.size());
    }
    items.push_back({role.community, score});
  }
  return RankedList::from_items(std::move(items));
}

EvalReport evaluate(const VulnerabilityReport& report, const std::vector<RoleSet>& roles,
                    const SpreaderSet& truth, const EvalOptions& options) {
  if (roles.size() != report.node_rankings.size()) {
    throw std::invalid_argument("evaluate: role sets do not match the report");
  }
  if (options.ks.empty()) throw std::invalid_argument("evaluate: no k values");
  if (!std::is_sorted(options.ks.begin(), options.ks.end()) || options.ks.front() == 0) {
    throw std::invalid_argument("evaluate: k values must be positive and ascending");
  }

  std::vector<RankedList> rankings;
  rankings.reserve(roles.size());
  for (const auto& nodes : report.node_rankings) rankings.push_back(node_ranking(nodes));

  EvalReport eval;
  eval.ks = options.ks;
  eval.map_k = options.map_k;
  eval.map_variant = options.map_variant;

  for (std::size_t c = 0; c < rankings.size(); ++c) {
    const std::size_t relevant = relevant_count(rankings[c], truth);
    if (relevant == 0) {
      ++eval.skipped_communities;
      continue;
    }
    ++eval.eligible_communities;
    CommunityPrecision row;
    row.community = static_cast<CommunityId>(c);
    row.boundary_count = rankings[c].size();
    row.spreader_boundary_count = relevant;
    for (const std::size_t k : options.ks) row.precision.push_back(precision_at_k(rankings[c], truth, k));
    row.average_precision = average_precision(rankings[c], truth, options.map_k);
    eval.per_community.push_back(std::move(row));
  }
  if (eval.eligible_communities == 0) throw std::domain_error("no ground truth");

  for (const std::size_t k : options.ks) eval.ap.push_back(ap_at_k(rankings, truth, k));
  eval.map = mean_average_precision(rankings, truth, options.map_k, options.map_variant);

  if (roles.size() >= 2) {
    std::vector<double> rel(roles.size()), ret(roles.size());
    const auto truth_ranking = ground_truth_community_ranking(roles, truth);
    for (const auto& item : truth_ranking.items()) {
      rel[static_cast<std::size_t>(item.id)] = item.score;
    }
    for (std::size_t c = 0; c < roles.size(); ++c) ret[c] = report.community_scores[c];
    eval.tau = kendall_tau(rel, ret);
  }
  return eval;
}

void write_eval_json(std::ostream& out, const EvalReport& eval) {
  using nlohmann::ordered_json;
  ordered_json doc;
  ordered_json ap = ordered_json::object();
  for (std::size_t i = 0; i < eval.ks.size(); ++i) ap[std::to_string(eval.ks[i])] = eval.ap[i];
  doc["ap"] = std::move(ap);
  doc["map"] = eval.map;
  doc["map_k"] = eval.map_k;
  doc["map_variant"] = std::string(to_string(eval.map_variant));
  ordered_json tau;
  if (eval.tau.value) {
    tau["value"] = *eval.tau.value;
  } else {
    tau["value"] = "undefined";
  }
  tau["P"] = eval.tau.concordant;
  tau["Q"] = eval.tau.discordant;
  tau["T"] = eval.tau.ties_first;
  tau["U"] = eval.tau.ties_second;
  doc["tau"] = std::move(tau);
  doc["eligible_communities"] = eval.eligible_communities;
  doc["skipped_communities"] = eval.skipped_communities;
  ordered_json table = ordered_json::array();
  for (const auto& row : eval.per_community) {
    ordered_json precision = ordered_json::object();
    for (std::size_t i = 0; i < eval.ks.size(); ++i) precision[std::to_string(eval.ks[i])] = row.precision[i];
    table.push_back({{"community", row.community},
                     {"boundary_count", row.boundary_count},
                     {"spreader_boundary_count", row.spreader_boundary_count},
                     {"precision", std::move(precision)},
                     {"average_precision", row.average_precision}});
  }
  doc["per_community"] = std::move(table);
  out << doc.dump(2) << '\n';
}

void write_eval_summary_csv(std::ostream& out, const EvalReport& eval, const std::string& network,
                            const std::string& detector) {
  out << "network,detector";
  for (const std::size_t k : eval.ks) out << ",AP@" << k;
  out << ",MAP,tau\n";
  out << network << ',' << detector;
  for (const double v : eval.ap) out << fmt::format(",{:.17g}", v);
  out << fmt::format(",{:.17g},", eval.map);
  out << (eval.tau.value ? fmt::format("{:.17g}", *eval.tau.value) : std::string("undefined")) << '\n';
}

}  // namespace trustvuln
