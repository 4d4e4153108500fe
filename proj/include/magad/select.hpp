#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "magad/core.hpp"
#include "magad/csr.hpp"

namespace magad {

struct SelectionConfig {
  int clusters = 24;         // m
  int batch = 4;             // b
  double tau = 0.95;         // entropy-weight decay
  int max_medoid_iters = 50;
  std::uint64_t rng_seed = 0;

  void validate() const {
    if (batch < 1) throw std::runtime_error("select: batch must be >= 1");
    if (clusters < batch)
      throw std::runtime_error("select: cluster count must be >= batch size");
    if (!(tau > 0.0 && tau < 1.0))
      throw std::runtime_error("select: tau must lie in (0, 1)");
    if (max_medoid_iters < 1)
      throw std::runtime_error("select: max_medoid_iters must be >= 1");
  }
};

/// Distance features: the unlabeled part of each neighborhood summed, divided
/// by the full neighbor count, plus the node's own embedding. Nodes without
/// neighbors keep their embedding untouched.
inline Matrix masked_features(const Matrix& embeddings, const Csr& adjacency,
                              const std::vector<std::uint8_t>& labeled) {
  if (adjacency.n != embeddings.rows)
    throw std::invalid_argument("masked_features: adjacency/embedding mismatch");
  if (labeled.size() != embeddings.rows)
    throw std::invalid_argument("masked_features: labeled mask size mismatch");
  const std::size_t h = embeddings.cols;
  Matrix out(embeddings.rows, h);
  for (std::size_t i = 0; i < embeddings.rows; ++i) {
    double* orow = out.row(i);
    const double* hrow = embeddings.row(i);
    std::copy(hrow, hrow + h, orow);
    const auto neighbors = adjacency.row_indices(i);
    if (neighbors.empty()) continue;
    const double inv_deg = 1.0 / static_cast<double>(neighbors.size());
    for (int j : neighbors) {
      if (labeled[static_cast<std::size_t>(j)]) continue;
      const double* nrow = embeddings.row(static_cast<std::size_t>(j));
      for (std::size_t k = 0; k < h; ++k) orow[k] += inv_deg * nrow[k];
    }
  }
  return out;
}

/// Euclidean distances between the rows of `features` indexed by `ids`.
inline Matrix pairwise_distance(const Matrix& features, const std::vector<int>& ids) {
  if (ids.empty()) throw std::invalid_argument("pairwise_distance: empty id list");
  const std::size_t k = features.cols;
  Matrix d(ids.size(), ids.size(), 0.0);
  for (std::size_t a = 0; a < ids.size(); ++a) {
    const double* ra = features.row(static_cast<std::size_t>(ids[a]));
    for (std::size_t b = a + 1; b < ids.size(); ++b) {
      const double* rb = features.row(static_cast<std::size_t>(ids[b]));
      const double dist = l2_distance(ra, rb, k);
      d(a, b) = dist;
      d(b, a) = dist;
    }
  }
  return d;
}

struct KMedoidsResult {
  std::vector<int> medoids;        // candidate indices, sorted ascending
  std::vector<int> assignment;     // candidate index of the owning medoid
  double cost = 0.0;               // sum of distances to assigned medoids
  int iterations = 0;
  std::vector<double> cost_history;
};

/// K-medoids over a precomputed distance matrix: farthest-point seeding, then
/// alternating nearest-medoid assignment and best-medoid update inside each
/// cluster until the medoid set stabilizes. Centers are always actual
/// candidates, and the cost never increases between iterations.
inline KMedoidsResult kmedoids(const Matrix& dist, int m, Rng& rng, int max_iters = 50) {
  const std::size_t count = dist.rows;
  if (dist.rows != dist.cols) throw std::invalid_argument("kmedoids: distance matrix not square");
  if (m < 1) throw std::invalid_argument("kmedoids: m must be >= 1");
  if (static_cast<std::size_t>(m) > count)
    throw std::runtime_error("kmedoids: m = " + std::to_string(m) + " exceeds " +
                             std::to_string(count) + " candidates");

  std::vector<int> medoids;
  medoids.reserve(static_cast<std::size_t>(m));
  std::vector<std::uint8_t> is_medoid(count, 0);
  std::vector<double> nearest(count, std::numeric_limits<double>::infinity());

  const int first = static_cast<int>(rng.index(count));
  medoids.push_back(first);
  is_medoid[static_cast<std::size_t>(first)] = 1;
  for (std::size_t i = 0; i < count; ++i) nearest[i] = dist(i, static_cast<std::size_t>(first));
  while (medoids.size() < static_cast<std::size_t>(m)) {
    int pick = -1;
    double best = -1.0;
    for (std::size_t i = 0; i < count; ++i) {
      if (is_medoid[i]) continue;
      if (nearest[i] > best) {
        best = nearest[i];
        pick = static_cast<int>(i);
      }
    }
    medoids.push_back(pick);
    is_medoid[static_cast<std::size_t>(pick)] = 1;
    for (std::size_t i = 0; i < count; ++i)
      nearest[i] = std::min(nearest[i], dist(i, static_cast<std::size_t>(pick)));
  }
  std::sort(medoids.begin(), medoids.end());

  KMedoidsResult res;
  res.assignment.assign(count, -1);
  std::vector<std::vector<int>> members(static_cast<std::size_t>(m));

  auto assign_all = [&]() {
    double cost = 0.0;
    for (auto& mem : members) mem.clear();
    for (std::size_t i = 0; i < count; ++i) {
      int best_m = 0;
      double best_d = dist(i, static_cast<std::size_t>(medoids[0]));
      for (int c = 1; c < m; ++c) {
        const double d = dist(i, static_cast<std::size_t>(medoids[static_cast<std::size_t>(c)]));
        if (d < best_d) {  // ties stay with the lower-id medoid
          best_d = d;
          best_m = c;
        }
      }
      res.assignment[i] = medoids[static_cast<std::size_t>(best_m)];
      members[static_cast<std::size_t>(best_m)].push_back(static_cast<int>(i));
      cost += best_d;
    }
    return cost;
  };

  double cost = assign_all();
  res.cost_history.push_back(cost);
  for (int iter = 0; iter < max_iters; ++iter) {
    res.iterations = iter + 1;
    bool changed = false;
    for (int c = 0; c < m; ++c) {
      const auto& mem = members[static_cast<std::size_t>(c)];
      if (mem.empty()) continue;
      int best = medoids[static_cast<std::size_t>(c)];
      double best_sum = std::numeric_limits<double>::infinity();
      for (int x : mem) {
        double sum = 0.0;
        for (int y : mem) sum += dist(static_cast<std::size_t>(x), static_cast<std::size_t>(y));
        if (sum < best_sum || (sum == best_sum && x < best)) {
          best_sum = sum;
          best = x;
        }
      }
      if (best != medoids[static_cast<std::size_t>(c)]) {
        medoids[static_cast<std::size_t>(c)] = best;
        changed = true;
      }
    }
    if (!changed) break;
    std::sort(medoids.begin(), medoids.end());
    cost = assign_all();
    res.cost_history.push_back(cost);
  }

  std::sort(medoids.begin(), medoids.end());
  res.medoids = std::move(medoids);
  res.cost = cost;
  return res;
}

/// c_N = znorm(entropy), c_A = znorm(anomaly score).
inline std::pair<Vec, Vec> confidence(const Vec& entropy, const Vec& anomaly) {
  return {znorm(entropy), znorm(anomaly)};
}

inline Vec confidence_difference(const Vec& conf_classifier, const Vec& conf_predictor) {
  if (conf_classifier.size() != conf_predictor.size())
    throw std::invalid_argument("confidence_difference: length mismatch");
  Vec d(conf_classifier.size());
  for (std::size_t i = 0; i < d.size(); ++i)
    d[i] = std::abs(conf_predictor[i] - conf_classifier[i]);
  return d;
}

/// Convex blend of z-scored entropy and confidence difference; the entropy
/// weight decays exponentially with the number of nodes queried so far.
inline Vec informativeness(const Vec& entropy, const Vec& diff, double tau,
                           long n_selected) {
  if (entropy.size() != diff.size())
    throw std::invalid_argument("informativeness: length mismatch");
  if (n_selected < 0) throw std::invalid_argument("informativeness: negative count");
  const double w = std::pow(tau, static_cast<double>(n_selected));
  Vec info = znorm(entropy);
  for (std::size_t i = 0; i < info.size(); ++i)
    info[i] = w * info[i] + (1.0 - w) * diff[i];
  return info;
}

/// Top-b node ids by informativeness, ties to the lower id.
inline std::vector<int> select_batch(const std::vector<int>& candidate_ids, const Vec& info,
                                     int b) {
  if (static_cast<int>(candidate_ids.size()) < b)
    throw std::runtime_error("select_batch: only " + std::to_string(candidate_ids.size()) +
                             " candidates for batch of " + std::to_string(b));
  std::vector<int> order = candidate_ids;
  std::sort(order.begin(), order.end(), [&](int a, int c) {
    const double ia = info[static_cast<std::size_t>(a)];
    const double ic = info[static_cast<std::size_t>(c)];
    if (ia != ic) return ia > ic;
    return a < c;
  });
  order.resize(static_cast<std::size_t>(b));
  std::sort(order.begin(), order.end());
  return order;
}

}  // namespace magad
