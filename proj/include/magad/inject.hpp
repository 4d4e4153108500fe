#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "magad/graph.hpp"

namespace magad {

/// Knobs for synthetic anomaly generation: q cliques of p nodes each, plus
/// contextual anomalies whose attributes get swapped with the farthest of
/// k_cand sampled candidates.
struct InjectionConfig {
  int clique_size = 15;      // p
  int clique_count = 5;      // q
  int candidate_count = 50;  // k_cand
  int contextual_count = -1; // defaults to p * q when negative
  std::uint64_t rng_seed = 0;

  int resolved_contextual() const {
    return contextual_count >= 0 ? contextual_count : clique_size * clique_count;
  }

  void validate(int n) const {
    if (clique_size < 2) throw std::runtime_error("inject: clique size must be >= 2");
    if (clique_count < 0) throw std::runtime_error("inject: clique count must be >= 0");
    if (candidate_count < 1)
      throw std::runtime_error("inject: candidate count must be >= 1");
    if (resolved_contextual() < 0)
      throw std::runtime_error("inject: contextual count must be >= 0");
    const long total = static_cast<long>(clique_size) * clique_count + resolved_contextual();
    if (total > n)
      throw std::runtime_error("inject: " + std::to_string(total) +
                               " anomalies requested but graph has only " +
                               std::to_string(n) + " nodes");
  }
};

struct InjectionReport {
  std::vector<int> structural_ids;
  std::vector<std::vector<int>> cliques;           // structural ids grouped by clique
  std::vector<int> contextual_ids;
  std::vector<std::pair<int, int>> added_edges;
  std::vector<std::pair<int, int>> swapped_pairs;  // (target, source)
};

namespace detail {

inline void ensure_anomaly_vectors(Graph& g) {
  if (g.anomaly_labels.empty()) {
    g.anomaly_labels.assign(static_cast<std::size_t>(g.n), 0);
    g.anomaly_kinds.assign(static_cast<std::size_t>(g.n), AnomalyKind::none);
  }
}

inline std::vector<int> non_anomalous_ids(const Graph& g) {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(g.n));
  for (int v = 0; v < g.n; ++v)
    if (g.anomaly_labels.empty() || !g.anomaly_labels[static_cast<std::size_t>(v)])
      out.push_back(v);
  return out;
}

}  // namespace detail

/// Interconnect q disjoint groups of p uniformly sampled nodes into cliques
/// and flag all of them anomalous. Returns the modified graph, the flagged
/// ids, and (optionally) the edges that were actually added.
inline std::pair<Graph, std::vector<int>> inject_structural(
    const Graph& input, int p, int q, Rng& rng,
    std::vector<std::pair<int, int>>* added_edges = nullptr,
    std::vector<std::vector<int>>* cliques = nullptr) {
  Graph g = input;
  detail::ensure_anomaly_vectors(g);
  if (q <= 0) return {std::move(g), {}};
  if (p < 2) throw std::runtime_error("inject: clique size must be >= 2");

  std::vector<int> candidates = detail::non_anomalous_ids(g);
  const std::size_t need = static_cast<std::size_t>(p) * static_cast<std::size_t>(q);
  if (candidates.size() < need)
    throw std::runtime_error("inject: not enough nodes for " + std::to_string(q) +
                             " cliques of size " + std::to_string(p));
  std::vector<int> chosen = rng.sample(candidates, need);

  auto edges = to_undirected_edges(g.adjacency);
  for (int c = 0; c < q; ++c) {
    std::vector<int> group(chosen.begin() + c * p, chosen.begin() + (c + 1) * p);
    for (int a = 0; a < p; ++a) {
      for (int b = a + 1; b < p; ++b) {
        const int u = group[static_cast<std::size_t>(a)];
        const int v = group[static_cast<std::size_t>(b)];
        if (!g.adjacency.has_edge(u, v)) {
          edges.emplace_back(u, v);
          if (added_edges) added_edges->emplace_back(std::min(u, v), std::max(u, v));
        }
      }
    }
    if (cliques) {
      std::sort(group.begin(), group.end());
      cliques->push_back(std::move(group));
    }
  }
  g.adjacency = build_symmetric_adjacency(static_cast<std::size_t>(g.n), edges);
  for (int v : chosen) {
    g.anomaly_labels[static_cast<std::size_t>(v)] = 1;
    g.anomaly_kinds[static_cast<std::size_t>(v)] = AnomalyKind::structural;
  }
  std::sort(chosen.begin(), chosen.end());
  return {std::move(g), std::move(chosen)};
}

/// For each of `count` uniformly sampled targets, sample k_cand other nodes,
/// and overwrite the target's attributes with those of the candidate at the
/// largest Euclidean feature distance (ties to the lowest node id).
inline std::pair<Graph, std::vector<int>> inject_contextual(
    const Graph& input, int count, int k_cand, Rng& rng,
    const std::vector<int>& exclude = {},
    std::vector<std::pair<int, int>>* swapped_pairs = nullptr) {
  Graph g = input;
  detail::ensure_anomaly_vectors(g);
  if (count <= 0) return {std::move(g), {}};
  if (k_cand < 1) throw std::runtime_error("inject: candidate count must be >= 1");

  std::vector<std::uint8_t> excluded(static_cast<std::size_t>(g.n), 0);
  for (int v : exclude) excluded[static_cast<std::size_t>(v)] = 1;
  std::vector<int> eligible;
  for (int v = 0; v < g.n; ++v)
    if (!excluded[static_cast<std::size_t>(v)] && !g.anomaly_labels[static_cast<std::size_t>(v)])
      eligible.push_back(v);
  if (eligible.size() < static_cast<std::size_t>(count))
    throw std::runtime_error("inject: " + std::to_string(count) +
                             " contextual anomalies requested but only " +
                             std::to_string(eligible.size()) + " nodes available");

  std::vector<int> targets = rng.sample(eligible, static_cast<std::size_t>(count));
  const std::size_t k = static_cast<std::size_t>(g.attr_dim);

  for (int target : targets) {
    // Candidate set: k_cand distinct nodes drawn from V \ {target}.
    std::vector<int> candidates;
    if (static_cast<std::size_t>(k_cand) >= static_cast<std::size_t>(g.n) - 1) {
      for (int v = 0; v < g.n; ++v)
        if (v != target) candidates.push_back(v);
    } else {
      std::vector<std::uint8_t> seen(static_cast<std::size_t>(g.n), 0);
      seen[static_cast<std::size_t>(target)] = 1;
      while (candidates.size() < static_cast<std::size_t>(k_cand)) {
        const int v = static_cast<int>(rng.index(static_cast<std::size_t>(g.n)));
        if (seen[static_cast<std::size_t>(v)]) continue;
        seen[static_cast<std::size_t>(v)] = 1;
        candidates.push_back(v);
      }
    }
    int best = -1;
    double best_dist = -1.0;
    for (int v : candidates) {
      const double d = l2_distance(g.features.row(static_cast<std::size_t>(target)),
                                   g.features.row(static_cast<std::size_t>(v)), k);
      if (d > best_dist || (d == best_dist && v < best)) {
        best = v;
        best_dist = d;
      }
    }
    const double* src = g.features.row(static_cast<std::size_t>(best));
    double* dst = g.features.row(static_cast<std::size_t>(target));
    std::copy(src, src + k, dst);
    g.anomaly_labels[static_cast<std::size_t>(target)] = 1;
    g.anomaly_kinds[static_cast<std::size_t>(target)] = AnomalyKind::contextual;
    if (swapped_pairs) swapped_pairs->emplace_back(target, best);
  }
  std::sort(targets.begin(), targets.end());
  return {std::move(g), std::move(targets)};
}

/// Structural cliques first, then contextual swaps on disjoint targets.
inline std::pair<Graph, InjectionReport> inject_all(const Graph& input,
                                                    const InjectionConfig& cfg) {
  cfg.validate(input.n);
  Rng rng(cfg.rng_seed);
  InjectionReport report;

  auto [g1, structural] = inject_structural(input, cfg.clique_size, cfg.clique_count,
                                            rng, &report.added_edges, &report.cliques);
  report.structural_ids = std::move(structural);

  auto [g2, contextual] =
      inject_contextual(g1, cfg.resolved_contextual(), cfg.candidate_count, rng,
                        report.structural_ids, &report.swapped_pairs);
  report.contextual_ids = std::move(contextual);

  g2.validate();
  return {std::move(g2), std::move(report)};
}

}  // namespace magad
