#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "magad/graph.hpp"

namespace magad {

/// Stochastic-block-model generator spec: balanced classes, intra/inter block
/// edge probabilities, class-correlated Gaussian features.
struct SynthSpec {
  int n = 0;
  int num_classes = 0;
  int attr_dim = 0;
  double intra_p = 0.0;
  double inter_p = 0.0;
  std::uint64_t seed = 0;

  bool enabled() const { return n > 0; }

  void validate() const {
    if (n < 1) throw std::runtime_error("synth: n must be >= 1");
    if (num_classes < 1 || num_classes > n)
      throw std::runtime_error("synth: num_classes must lie in [1, n]");
    if (attr_dim < 1) throw std::runtime_error("synth: attr_dim must be >= 1");
    if (intra_p < 0.0 || intra_p > 1.0 || inter_p < 0.0 || inter_p > 1.0)
      throw std::runtime_error("synth: edge probabilities must lie in [0, 1]");
  }
};

// Feature model: class mean entries ~ N(0, 1), node noise ~ N(0, 1) per dim.
constexpr double kSynthMeanScale = 1.0;
constexpr double kSynthNoiseScale = 1.0;

inline Graph make_synthetic_graph(const SynthSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);

  Graph g;
  g.n = spec.n;
  g.num_classes = spec.num_classes;
  g.attr_dim = spec.attr_dim;

  // balanced class assignment, shuffled
  g.class_labels.resize(static_cast<std::size_t>(spec.n));
  for (int i = 0; i < spec.n; ++i)
    g.class_labels[static_cast<std::size_t>(i)] = i % spec.num_classes;
  rng.shuffle(g.class_labels);

  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < spec.n; ++i) {
    for (int j = i + 1; j < spec.n; ++j) {
      const bool same = g.class_labels[static_cast<std::size_t>(i)] ==
                        g.class_labels[static_cast<std::size_t>(j)];
      const double p = same ? spec.intra_p : spec.inter_p;
      if (p > 0.0 && rng.uniform() < p) edges.emplace_back(i, j);
    }
  }
  g.adjacency = build_symmetric_adjacency(static_cast<std::size_t>(spec.n), edges);

  Matrix means(static_cast<std::size_t>(spec.num_classes),
               static_cast<std::size_t>(spec.attr_dim));
  for (double& v : means.data) v = kSynthMeanScale * rng.normal();
  g.features = Matrix(static_cast<std::size_t>(spec.n),
                      static_cast<std::size_t>(spec.attr_dim));
  for (int i = 0; i < spec.n; ++i) {
    const double* mu = means.row(
        static_cast<std::size_t>(g.class_labels[static_cast<std::size_t>(i)]));
    double* row = g.features.row(static_cast<std::size_t>(i));
    for (int d = 0; d < spec.attr_dim; ++d)
      row[static_cast<std::size_t>(d)] =
          mu[static_cast<std::size_t>(d)] + kSynthNoiseScale * rng.normal();
  }

  g.validate();
  return g;
}

/// Generate and write a dataset directory.
inline void make_synthetic(const SynthSpec& spec, const std::string& dir) {
  save_dataset(make_synthetic_graph(spec), dir);
}

}  // namespace magad
