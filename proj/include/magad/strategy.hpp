#pragma once

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "magad/core.hpp"

namespace magad {

enum class QueryStrategy {
  multitask,         // clustering medoids ranked by informativeness
  random_query,
  most_positive,
  positive_diverse,
  diverse,
};

inline const char* to_string(QueryStrategy s) {
  switch (s) {
    case QueryStrategy::multitask: return "multitask";
    case QueryStrategy::random_query: return "random";
    case QueryStrategy::most_positive: return "most_positive";
    case QueryStrategy::positive_diverse: return "positive_diverse";
    case QueryStrategy::diverse: return "diverse";
  }
  return "?";
}

inline QueryStrategy parse_strategy(const std::string& name) {
  if (name == "multitask") return QueryStrategy::multitask;
  if (name == "random") return QueryStrategy::random_query;
  if (name == "most_positive") return QueryStrategy::most_positive;
  if (name == "positive_diverse") return QueryStrategy::positive_diverse;
  if (name == "diverse") return QueryStrategy::diverse;
  throw std::runtime_error("unknown strategy '" + name + "'");
}

namespace detail {

inline std::vector<int> top_by_score(const Vec& score, const std::vector<int>& pool,
                                     std::size_t k) {
  std::vector<int> order = pool;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const double sa = score[static_cast<std::size_t>(a)];
    const double sb = score[static_cast<std::size_t>(b)];
    if (sa != sb) return sa > sb;
    return a < b;
  });
  order.resize(std::min(k, order.size()));
  return order;
}

}  // namespace detail

/// Reference query rules the main strategy is compared against. All return a
/// sorted batch of b pool ids.
///
///  random            uniform sample without replacement
///  most_positive     the b highest anomaly scores
///  positive_diverse  among the 2b highest scores: start from the top score,
///                    then repeatedly take the candidate farthest (in
///                    embedding space) from everything already picked
///  diverse           k-means++ style: uniform first pick, then each pick is
///                    drawn with probability proportional to the squared
///                    distance to the nearest picked node
inline std::vector<int> baseline_query(QueryStrategy kind, const Vec& anomaly_score,
                                       const Matrix& embeddings,
                                       const std::vector<int>& pool, int b, Rng& rng) {
  if (b < 1) throw std::invalid_argument("baseline_query: b must be >= 1");
  if (pool.size() < static_cast<std::size_t>(b))
    throw std::runtime_error("baseline_query: pool smaller than batch");
  const std::size_t h = embeddings.cols;

  std::vector<int> chosen;
  switch (kind) {
    case QueryStrategy::random_query: {
      chosen = rng.sample(pool, static_cast<std::size_t>(b));
      break;
    }
    case QueryStrategy::most_positive: {
      chosen = detail::top_by_score(anomaly_score, pool, static_cast<std::size_t>(b));
      break;
    }
    case QueryStrategy::positive_diverse: {
      std::vector<int> cand =
          detail::top_by_score(anomaly_score, pool, static_cast<std::size_t>(2 * b));
      std::vector<std::uint8_t> picked(cand.size(), 0);
      chosen.push_back(cand[0]);  // highest score
      picked[0] = 1;
      while (chosen.size() < static_cast<std::size_t>(b)) {
        int best_idx = -1;
        double best_d = -1.0;
        for (std::size_t i = 0; i < cand.size(); ++i) {
          if (picked[i]) continue;
          double nearest = std::numeric_limits<double>::infinity();
          for (int c : chosen)
            nearest = std::min(nearest, l2_distance(
                                            embeddings.row(static_cast<std::size_t>(cand[i])),
                                            embeddings.row(static_cast<std::size_t>(c)), h));
          if (nearest > best_d) {
            best_d = nearest;
            best_idx = static_cast<int>(i);
          }
        }
        picked[static_cast<std::size_t>(best_idx)] = 1;
        chosen.push_back(cand[static_cast<std::size_t>(best_idx)]);
      }
      break;
    }
    case QueryStrategy::diverse: {
      std::vector<std::uint8_t> picked(pool.size(), 0);
      const std::size_t first = rng.index(pool.size());
      picked[first] = 1;
      chosen.push_back(pool[first]);
      std::vector<double> nearest_sq(pool.size());
      for (std::size_t i = 0; i < pool.size(); ++i)
        nearest_sq[i] = squared_l2_distance(embeddings.row(static_cast<std::size_t>(pool[i])),
                                            embeddings.row(static_cast<std::size_t>(pool[first])), h);
      while (chosen.size() < static_cast<std::size_t>(b)) {
        double total = 0.0;
        for (std::size_t i = 0; i < pool.size(); ++i)
          if (!picked[i]) total += nearest_sq[i];
        std::size_t pick = pool.size();
        if (total > 0.0) {
          const double r = rng.uniform() * total;
          double acc = 0.0;
          for (std::size_t i = 0; i < pool.size(); ++i) {
            if (picked[i]) continue;
            acc += nearest_sq[i];
            if (acc >= r) {
              pick = i;
              break;
            }
          }
          if (pick == pool.size()) {  // float round-off on the last bucket
            for (std::size_t i = pool.size(); i-- > 0;)
              if (!picked[i]) {
                pick = i;
                break;
              }
          }
        } else {
          // all remaining candidates coincide with picked ones
          std::vector<std::size_t> open;
          for (std::size_t i = 0; i < pool.size(); ++i)
            if (!picked[i]) open.push_back(i);
          pick = open[rng.index(open.size())];
        }
        picked[pick] = 1;
        chosen.push_back(pool[pick]);
        for (std::size_t i = 0; i < pool.size(); ++i) {
          if (picked[i]) continue;
          nearest_sq[i] = std::min(
              nearest_sq[i], squared_l2_distance(embeddings.row(static_cast<std::size_t>(pool[i])),
                                                 embeddings.row(static_cast<std::size_t>(pool[pick])), h));
        }
      }
      break;
    }
    case QueryStrategy::multitask:
      throw std::invalid_argument("baseline_query: multitask is not a baseline rule");
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

}  // namespace magad
