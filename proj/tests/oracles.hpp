#pragma once

// Naive reference implementations used as test oracles. Nothing here calls
// into the library: plain loops over edge lists and std::vector.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <tuple>
#include <utility>
#include <vector>

namespace oracle {

struct Edge {
  int from;
  int to;
  double weight;
};

struct TsmIterate {
  std::vector<double> ti;
  std::vector<double> tw;
};

// Scalar TSM: ti(v) = sum over v->x of w/(1+tw(x)^s), tw(u) = sum over x->u
// of w/(1+ti(x)^s), both rescaled to unit sum, starting from 1/n.
inline std::vector<TsmIterate> tsm(int n, const std::vector<Edge>& edges, double s, int max_iterations,
                                   double epsilon) {
  std::vector<double> ti(n, 1.0 / n), tw(n, 1.0 / n);
  std::vector<TsmIterate> history;
  for (int it = 0; it < max_iterations; ++it) {
    std::vector<double> nti(n, 0.0), ntw(n, 0.0);
    for (const Edge& e : edges) {
      nti[e.from] += e.weight / (1.0 + std::pow(tw[e.to], s));
      ntw[e.to] += e.weight / (1.0 + std::pow(ti[e.from], s));
    }
    double sti = 0.0, stw = 0.0;
    for (int v = 0; v < n; ++v) {
      sti += nti[v];
      stw += ntw[v];
    }
    for (int v = 0; v < n; ++v) {
      if (sti > 0.0) nti[v] /= sti;
      if (stw > 0.0) ntw[v] /= stw;
    }
    double delta = 0.0;
    for (int v = 0; v < n; ++v) delta = std::max(delta, std::abs(nti[v] - ti[v]) + std::abs(ntw[v] - tw[v]));
    ti = nti;
    tw = ntw;
    history.push_back({ti, tw});
    if (edges.empty() || delta < epsilon) break;
  }
  return history;
}

// P(at least one success) by summing the probability of every outcome vector.
inline double any_success_by_enumeration(const std::vector<double>& p) {
  const std::size_t k = p.size();
  double total = 0.0;
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << k); ++mask) {
    double prob = 1.0;
    for (std::size_t i = 0; i < k; ++i) prob *= (mask >> i) & 1U ? p[i] : 1.0 - p[i];
    total += prob;
  }
  return total;
}

struct PairCounts {
  std::uint64_t p = 0, q = 0, t = 0, u = 0;
};

// O(n^2) enumeration; pairs tied in both lists count nowhere.
inline PairCounts kendall_pairs(const std::vector<double>& rel, const std::vector<double>& ret) {
  PairCounts c;
  for (std::size_t i = 0; i < rel.size(); ++i) {
    for (std::size_t j = i + 1; j < rel.size(); ++j) {
      const double a = rel[i] - rel[j];
      const double b = ret[i] - ret[j];
      if (a == 0 && b == 0) continue;
      if (a == 0) {
        ++c.t;
      } else if (b == 0) {
        ++c.u;
      } else if ((a > 0) == (b > 0)) {
        ++c.p;
      } else {
        ++c.q;
      }
    }
  }
  return c;
}

// Standard AP truncated at k_max, summed directly from the definition.
inline double average_precision(const std::vector<bool>& relevant_in_order, std::size_t total_relevant,
                                std::size_t k_max) {
  double sum = 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < relevant_in_order.size() && i < k_max; ++i) {
    if (relevant_in_order[i]) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(i + 1);
    }
  }
  const std::size_t denom = std::min(k_max, total_relevant);
  return denom == 0 ? 0.0 : sum / static_cast<double>(denom);
}

// Q straight from the pair-sum definition: (1/2m) sum_ij [A_ij - k_i k_j / 2m] delta(c_i, c_j).
inline double modularity(int n, const std::vector<Edge>& undirected, const std::vector<int>& labels) {
  std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
  for (const Edge& e : undirected) {
    a[e.from][e.to] += e.weight;
    a[e.to][e.from] += e.weight;
  }
  std::vector<double> k(n, 0.0);
  double two_m = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) k[i] += a[i][j];
    two_m += k[i];
  }
  double q = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (labels[i] == labels[j]) q += a[i][j] - k[i] * k[j] / two_m;
    }
  }
  return q / two_m;
}

// Every set partition of {0..n-1} as restricted growth strings.
template <typename Visit>
void for_each_partition(int n, Visit&& visit) {
  std::vector<int> labels(n, 0), max_prefix(n, 0);
  for (;;) {
    visit(labels);
    int i = n - 1;
    while (i > 0 && labels[i] == max_prefix[i - 1] + 1) --i;
    if (i == 0) return;
    ++labels[i];
    max_prefix[i] = std::max(max_prefix[i - 1], labels[i]);
    for (int j = i + 1; j < n; ++j) {
      labels[j] = 0;
      max_prefix[j] = max_prefix[i];
    }
  }
}

struct Roles {
  std::set<int> boundary, core, neighbors;
  std::map<int, std::set<int>> per_boundary;
};

// Per-definition scan: for every member b and every edge touching b, record
// the far endpoint if it lies outside the community.
inline Roles roles(int n, const std::vector<Edge>& edges, const std::vector<int>& labels, int community,
                   bool any_direction) {
  Roles r;
  for (int b = 0; b < n; ++b) {
    if (labels[b] != community) continue;
    std::set<int> outside;
    for (const Edge& e : edges) {
      if (e.from == b && labels[e.to] != community) outside.insert(e.to);
      if (any_direction && e.to == b && labels[e.from] != community) outside.insert(e.from);
    }
    if (outside.empty()) {
      r.core.insert(b);
    } else {
      r.boundary.insert(b);
      r.neighbors.insert(outside.begin(), outside.end());
      r.per_boundary[b] = outside;
    }
  }
  return r;
}

}  // namespace oracle
