#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "magad/core.hpp"

namespace magad {

struct MetricReport {
  double auc_roc = 0.0;
  double auc_pr = 0.0;
  double accuracy = 0.0;
  int n_pos = 0;
  int n_neg = 0;
};

/// Exact rank-based AUC-ROC: P(score_pos > score_neg) + P(tie) / 2,
/// computed through tie-averaged ranks.
inline double auc_roc(const Vec& scores, const std::vector<std::uint8_t>& labels) {
  if (scores.size() != labels.size())
    throw std::invalid_argument("auc_roc: length mismatch");
  const std::size_t n = scores.size();
  long n_pos = 0;
  for (auto y : labels) n_pos += (y != 0);
  const long n_neg = static_cast<long>(n) - n_pos;
  if (n_pos == 0 || n_neg == 0)
    throw std::runtime_error("auc_roc: needs both positive and negative labels");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  double rank_sum_pos = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);  // 1-based tie average
    for (std::size_t k = i; k < j; ++k)
      if (labels[order[k]]) rank_sum_pos += avg_rank;
    i = j;
  }
  const double u = rank_sum_pos - 0.5 * static_cast<double>(n_pos) *
                                      static_cast<double>(n_pos + 1);
  return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

/// Average precision: positives ranked by descending score (ties kept in
/// input order) each contribute their precision-at-rank.
inline double auc_pr(const Vec& scores, const std::vector<std::uint8_t>& labels) {
  if (scores.size() != labels.size())
    throw std::invalid_argument("auc_pr: length mismatch");
  const std::size_t n = scores.size();
  long n_pos = 0;
  for (auto y : labels) n_pos += (y != 0);
  if (n_pos == 0) throw std::runtime_error("auc_pr: needs at least one positive label");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  double sum = 0.0;
  long tp = 0;
  for (std::size_t r = 0; r < n; ++r) {
    if (labels[order[r]]) {
      ++tp;
      sum += static_cast<double>(tp) / static_cast<double>(r + 1);
    }
  }
  return sum / static_cast<double>(n_pos);
}

/// Fraction of predictions matching the reference labels.
inline double accuracy(const std::vector<int>& predicted, const std::vector<int>& truth) {
  if (predicted.size() != truth.size())
    throw std::invalid_argument("accuracy: length mismatch");
  if (predicted.empty()) return 0.0;
  std::size_t hit = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) hit += (predicted[i] == truth[i]);
  return static_cast<double>(hit) / static_cast<double>(predicted.size());
}

}  // namespace magad
