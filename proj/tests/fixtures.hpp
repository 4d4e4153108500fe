#pragma once

// Shared graph builders and reference configurations for the test suites.

#include <utility>
#include <vector>

#include "magad/graph.hpp"
#include "magad/inject.hpp"
#include "magad/loop.hpp"
#include "magad/synth.hpp"

namespace fixtures {

/// Graph from an explicit undirected edge list with all-zero features unless
/// a feature matrix is supplied.
inline magad::Graph graph_from_edges(int n, const std::vector<std::pair<int, int>>& edges,
                                     int attr_dim = 1, int num_classes = 2) {
  magad::Graph g;
  g.n = n;
  g.num_classes = num_classes;
  g.attr_dim = attr_dim;
  g.adjacency = magad::build_symmetric_adjacency(static_cast<std::size_t>(n), edges);
  g.features = magad::Matrix(static_cast<std::size_t>(n), static_cast<std::size_t>(attr_dim));
  g.class_labels.assign(static_cast<std::size_t>(n), 0);
  for (int i = 0; i < n; ++i) g.class_labels[static_cast<std::size_t>(i)] = i % num_classes;
  return g;
}

/// Injected SBM without splits, for tests that only need topology and truth.
inline magad::Graph small_graph(int n, int num_classes, std::uint64_t seed) {
  magad::SynthSpec spec;
  spec.n = n;
  spec.num_classes = num_classes;
  spec.attr_dim = 8;
  spec.intra_p = 0.10;
  spec.inter_p = 0.01;
  spec.seed = seed;
  magad::Graph clean = magad::make_synthetic_graph(spec);

  magad::InjectionConfig icfg;
  icfg.clique_size = 4;
  icfg.clique_count = 2;
  icfg.candidate_count = 10;
  icfg.contextual_count = 8;
  icfg.rng_seed = seed + 1;
  auto [injected, report] = magad::inject_all(clean, icfg);
  return injected;
}

/// Small injected SBM with splits, for loop-level tests.
struct SmallWorld {
  magad::Graph graph;
  magad::Splits splits;
};

inline SmallWorld small_world(int n = 130, int num_classes = 3, std::uint64_t seed = 7) {
  magad::SynthSpec spec;
  spec.n = n;
  spec.num_classes = num_classes;
  spec.attr_dim = 8;
  spec.intra_p = 0.10;
  spec.inter_p = 0.01;
  spec.seed = seed;
  magad::Graph clean = magad::make_synthetic_graph(spec);

  magad::InjectionConfig icfg;
  icfg.clique_size = 4;
  icfg.clique_count = 2;
  icfg.candidate_count = 10;
  icfg.contextual_count = 8;
  icfg.rng_seed = seed + 1;
  auto [injected, report] = magad::inject_all(clean, icfg);

  SmallWorld w;
  w.graph = std::move(injected);
  w.splits = magad::split_dataset(w.graph, 4, 20, 30, seed + 2);
  return w;
}

inline magad::LoopConfig small_loop_config(std::uint64_t seed = 11) {
  magad::LoopConfig cfg;
  cfg.train.hidden_dim = 12;
  cfg.train.max_epochs = 25;
  cfg.train.patience = 8;
  cfg.budget = 8;
  cfg.select.batch = 2;
  cfg.select.clusters = 6;
  cfg.select.tau = 0.9;
  cfg.seed = seed;
  cfg.select.rng_seed = seed;
  return cfg;
}

}  // namespace fixtures
