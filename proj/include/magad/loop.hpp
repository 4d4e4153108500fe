#pragma once

#include <cstdint>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "magad/core.hpp"
#include "magad/graph.hpp"
#include "magad/metrics.hpp"
#include "magad/model.hpp"
#include "magad/select.hpp"
#include "magad/strategy.hpp"

namespace magad {

enum class ScoreVariant { hybrid, predictor_only, entropy_only };

inline const char* to_string(ScoreVariant v) {
  switch (v) {
    case ScoreVariant::hybrid: return "hybrid";
    case ScoreVariant::predictor_only: return "predictor_only";
    case ScoreVariant::entropy_only: return "entropy_only";
  }
  return "?";
}

inline ScoreVariant parse_score_variant(const std::string& name) {
  if (name == "hybrid") return ScoreVariant::hybrid;
  if (name == "predictor_only") return ScoreVariant::predictor_only;
  if (name == "entropy_only") return ScoreVariant::entropy_only;
  throw std::runtime_error("unknown scoring variant '" + name + "'");
}

/// Pipeline pieces that can be switched off for ablation runs.
struct AblationFlags {
  bool no_uncertainty_loss = false;
  bool no_entropy_score = false;
  bool no_confidence_difference = false;
  bool no_masked_aggregation = false;
  bool no_clustering = false;

  bool any() const {
    return no_uncertainty_loss || no_entropy_score || no_confidence_difference ||
           no_masked_aggregation || no_clustering;
  }

  void validate() const {
    if (no_entropy_score && no_confidence_difference)
      throw std::runtime_error(
          "ablation: no_entropy_score and no_confidence_difference together leave "
          "no informativeness signal");
  }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    if (no_uncertainty_loss) out.push_back("no_uncertainty_loss");
    if (no_entropy_score) out.push_back("no_entropy_score");
    if (no_confidence_difference) out.push_back("no_confidence_difference");
    if (no_masked_aggregation) out.push_back("no_masked_aggregation");
    if (no_clustering) out.push_back("no_clustering");
    return out;
  }
};

inline AblationFlags parse_ablation_flag(AblationFlags flags, const std::string& name) {
  if (name == "no_uncertainty_loss") flags.no_uncertainty_loss = true;
  else if (name == "no_entropy_score") flags.no_entropy_score = true;
  else if (name == "no_confidence_difference") flags.no_confidence_difference = true;
  else if (name == "no_masked_aggregation") flags.no_masked_aggregation = true;
  else if (name == "no_clustering") flags.no_clustering = true;
  else throw std::runtime_error("unknown ablation flag '" + name + "'");
  return flags;
}

struct LoopConfig {
  TrainConfig train;
  SelectionConfig select;
  int budget = 80;  // total oracle queries
  QueryStrategy strategy = QueryStrategy::multitask;
  ScoreVariant scoring = ScoreVariant::hybrid;
  AblationFlags ablation;
  bool warm_start = true;
  bool early_stop_on_predictor = false;   // use p instead of the hybrid score
  bool count_initial_in_decay = false;    // include |V_L^N| in the decay exponent
  std::uint64_t seed = 0;
  std::string debug_dump_path;            // per-iteration JSON lines when set

  void validate() const {
    train.validate();
    select.validate();
    ablation.validate();
    if (budget < 0) throw std::runtime_error("loop: budget must be >= 0");
    if (budget % select.batch != 0)
      throw std::runtime_error("loop: budget must be divisible by the batch size");
  }
};

/// Evolving labeled/unlabeled bookkeeping across query iterations.
struct LabelState {
  std::vector<int> class_labeled;          // fixed classification-labeled set
  std::vector<int> ad_labeled;             // all anomaly-labeled nodes, in labeling order
  std::vector<int> normal_ids;
  std::vector<int> anomaly_ids;
  std::vector<int> unlabeled_pool;         // queryable, sorted ascending
  std::vector<std::int8_t> ad_label;       // per node: -1 unknown, 0 normal, 1 anomaly
  std::vector<std::uint8_t> labeled_mask;  // per node: has an anomaly label
  long selected_count = 0;                 // oracle queries so far

  static LabelState init(const Graph& g, const Splits& splits) {
    LabelState st;
    st.class_labeled = splits.initial_class_labeled;
    st.ad_label.assign(static_cast<std::size_t>(g.n), -1);
    st.labeled_mask.assign(static_cast<std::size_t>(g.n), 0);
    // the initial classification-labeled nodes enter as known normals
    for (int v : splits.initial_class_labeled) {
      st.ad_labeled.push_back(v);
      st.normal_ids.push_back(v);
      st.ad_label[static_cast<std::size_t>(v)] = 0;
      st.labeled_mask[static_cast<std::size_t>(v)] = 1;
    }
    st.unlabeled_pool = splits.pool_ids;
    std::sort(st.unlabeled_pool.begin(), st.unlabeled_pool.end());
    return st;
  }

  void absorb(const std::vector<int>& ids, const std::vector<std::uint8_t>& labels) {
    if (ids.size() != labels.size())
      throw std::invalid_argument("LabelState::absorb: length mismatch");
    for (std::size_t k = 0; k < ids.size(); ++k) {
      const int v = ids[k];
      if (ad_label[static_cast<std::size_t>(v)] != -1)
        throw std::runtime_error("LabelState: node " + std::to_string(v) +
                                 " labeled twice");
      const auto it =
          std::lower_bound(unlabeled_pool.begin(), unlabeled_pool.end(), v);
      if (it == unlabeled_pool.end() || *it != v)
        throw std::runtime_error("LabelState: node " + std::to_string(v) +
                                 " is not in the unlabeled pool");
      unlabeled_pool.erase(it);
      ad_labeled.push_back(v);
      ad_label[static_cast<std::size_t>(v)] = labels[k] ? 1 : 0;
      labeled_mask[static_cast<std::size_t>(v)] = 1;
      (labels[k] ? anomaly_ids : normal_ids).push_back(v);
    }
    selected_count += static_cast<long>(ids.size());
  }

  Supervision supervision() const {
    return Supervision{class_labeled, ad_labeled, normal_ids, anomaly_ids};
  }
};

/// Simulated annotator: pure lookup into the injected ground truth.
inline std::vector<std::uint8_t> oracle_label(const std::vector<int>& ids,
                                              const std::vector<std::uint8_t>& ground_truth) {
  std::vector<std::uint8_t> out;
  out.reserve(ids.size());
  for (int v : ids) {
    if (v < 0 || static_cast<std::size_t>(v) >= ground_truth.size())
      throw std::runtime_error("oracle: unknown node id " + std::to_string(v));
    out.push_back(ground_truth[static_cast<std::size_t>(v)] ? 1 : 0);
  }
  return out;
}

namespace detail {

/// Scores for a node subset with z-statistics taken over that subset only.
inline Vec subset_scores(const Vec& entropy, const Vec& anomaly,
                         const std::vector<int>& ids, double phi, ScoreVariant v) {
  const Vec e = gather(entropy, ids);
  const Vec p = gather(anomaly, ids);
  switch (v) {
    case ScoreVariant::predictor_only: return znorm(p);
    case ScoreVariant::entropy_only: return znorm(e);
    default: return hybrid_score(e, p, phi);
  }
}

/// Scores over the full graph (z-statistics over all nodes).
inline Vec full_scores(const Vec& entropy, const Vec& anomaly, double phi, ScoreVariant v) {
  switch (v) {
    case ScoreVariant::predictor_only: return znorm(anomaly);
    case ScoreVariant::entropy_only: return znorm(entropy);
    default: return hybrid_score(entropy, anomaly, phi);
  }
}

struct ValContext {
  std::vector<int> val_ids;
  std::vector<std::uint8_t> val_truth;       // anomaly ground truth on val
  bool val_has_both_classes = false;
  std::vector<int> val_indist_ids;           // non-anomalous, class-labeled val nodes
  std::vector<int> val_indist_labels;
};

inline ValContext make_val_context(const Graph& g, const Splits& splits) {
  ValContext ctx;
  ctx.val_ids = splits.val_ids;
  long pos = 0;
  for (int v : splits.val_ids) {
    const bool anom = g.anomaly_labels[static_cast<std::size_t>(v)] != 0;
    ctx.val_truth.push_back(anom ? 1 : 0);
    pos += anom;
    if (!anom && g.class_labels[static_cast<std::size_t>(v)] >= 0) {
      ctx.val_indist_ids.push_back(v);
      ctx.val_indist_labels.push_back(g.class_labels[static_cast<std::size_t>(v)]);
    }
  }
  ctx.val_has_both_classes = pos > 0 && pos < static_cast<long>(splits.val_ids.size());
  return ctx;
}

inline std::vector<int> argmax_rows(const Matrix& probs, const std::vector<int>& ids) {
  std::vector<int> out;
  out.reserve(ids.size());
  for (int i : ids) {
    const double* row = probs.row(static_cast<std::size_t>(i));
    int best = 0;
    for (std::size_t j = 1; j < probs.cols; ++j)
      if (row[j] > row[static_cast<std::size_t>(best)]) best = static_cast<int>(j);
    out.push_back(best);
  }
  return out;
}

inline MetricReport eval_validation(const ScoreBundle& b, const ValContext& ctx,
                                    double phi, ScoreVariant scoring) {
  MetricReport m;
  for (auto y : ctx.val_truth) (y ? m.n_pos : m.n_neg)++;
  const Vec s = full_scores(b.entropy, b.anomaly, phi, scoring);
  if (ctx.val_has_both_classes) {
    const Vec sv = gather(s, ctx.val_ids);
    m.auc_roc = auc_roc(sv, ctx.val_truth);
    m.auc_pr = auc_pr(sv, ctx.val_truth);
  } else {
    m.auc_roc = 0.5;  // degenerate validation labels carry no ranking signal
    m.auc_pr = 0.0;
  }
  m.accuracy = ctx.val_indist_ids.empty()
                   ? 0.0
                   : accuracy(argmax_rows(b.probs, ctx.val_indist_ids),
                              ctx.val_indist_labels);
  return m;
}

}  // namespace detail

struct TrainPhaseReport {
  int epochs = 0;
  int best_epoch = 0;
  double best_composite = 0.0;
  double val_auc_roc = 0.0;   // at the restored best epoch
  double val_auc_pr = 0.0;
  double val_acc = 0.0;
  std::vector<double> composite_history;
  std::vector<double> acc_history;
};

/// Train until the validation composite (ranking AUC of the early-stop score
/// plus in-distribution accuracy) stops improving for `patience` epochs, then
/// restore the best-epoch state.
inline TrainPhaseReport train_phase(ModelState& state, const Graph& g,
                                    const NormalizedAdjacency& gn,
                                    const LabelState& labels, const Splits& splits,
                                    const LoopConfig& cfg) {
  const Supervision sup = labels.supervision();
  const detail::ValContext ctx = detail::make_val_context(g, splits);
  const ScoreVariant stop_score =
      cfg.early_stop_on_predictor ? ScoreVariant::predictor_only : ScoreVariant::hybrid;

  TrainPhaseReport report;
  ModelState best = state;
  double best_composite = -std::numeric_limits<double>::infinity();
  MetricReport best_metrics;
  int best_epoch = 0;
  int since_best = 0;

  for (int epoch = 1; epoch <= cfg.train.max_epochs; ++epoch) {
    backward_and_step(state, gn, g.features, g.class_labels, labels.ad_label, sup,
                      cfg.train, !cfg.ablation.no_uncertainty_loss);
    const ScoreBundle b = compute_scores(gn, g.features, state, cfg.train.phi);
    const MetricReport m = detail::eval_validation(b, ctx, cfg.train.phi, stop_score);
    const double composite = m.auc_roc + m.accuracy;
    report.epochs = epoch;
    report.composite_history.push_back(composite);
    report.acc_history.push_back(m.accuracy);
    if (composite > best_composite) {
      best_composite = composite;
      best = state;
      best_metrics = m;
      best_epoch = epoch;
      since_best = 0;
    } else {
      ++since_best;
    }
    if (since_best >= cfg.train.patience) break;
  }

  state = best;
  report.best_epoch = best_epoch;
  report.best_composite = best_composite;
  report.val_auc_roc = best_metrics.auc_roc;
  report.val_auc_pr = best_metrics.auc_pr;
  report.val_acc = best_metrics.accuracy;
  return report;
}

struct IterationRecord {
  int t = 0;
  std::vector<int> selected;
  int anomalies_found = 0;
  double val_auc_roc = 0.0;
  double val_auc_pr = 0.0;
  double val_acc = 0.0;
};

struct RunResult {
  std::uint64_t seed = 0;
  QueryStrategy strategy = QueryStrategy::multitask;
  ScoreVariant scoring = ScoreVariant::hybrid;
  AblationFlags ablation;
  std::vector<IterationRecord> per_iteration;
  std::vector<int> test_ids;
  Vec final_scores;          // per test id, scored by the run's variant
  Vec test_entropy;          // raw e on test ids
  Vec test_anomaly_score;    // raw p on test ids
  double final_auc_roc = 0.0;
  double final_auc_pr = 0.0;
  double final_accuracy = 0.0;
};

/// The full budgeted loop: train, rank the pool, query the oracle, fold the
/// answers back in, and score the test set after a final training phase.
inline RunResult run_active_loop(const Graph& g, const Splits& splits,
                                 const LoopConfig& cfg,
                                 ModelState* final_state = nullptr) {
  cfg.validate();
  if (!g.has_anomaly_labels())
    throw std::runtime_error("loop: graph has no anomaly ground truth");
  if (static_cast<long>(splits.pool_ids.size()) < cfg.budget)
    throw std::runtime_error("loop: pool of " + std::to_string(splits.pool_ids.size()) +
                             " nodes cannot cover budget " + std::to_string(cfg.budget));

  const NormalizedAdjacency gn = normalize_adjacency(g);
  LabelState labels = LabelState::init(g, splits);

  Rng base(cfg.seed);
  Rng init_rng = base.fork(1);
  ModelState state = init_model(g.attr_dim, cfg.train.hidden_dim, g.num_classes,
                                cfg.train.encoder_layers, init_rng);

  std::ofstream dump;
  if (!cfg.debug_dump_path.empty()) {
    dump.open(cfg.debug_dump_path);
    if (!dump) throw std::runtime_error("loop: cannot open debug dump file");
  }

  RunResult result;
  result.seed = cfg.seed;
  result.strategy = cfg.strategy;
  result.scoring = cfg.scoring;
  result.ablation = cfg.ablation;

  const int iterations = cfg.budget / cfg.select.batch;
  for (int t = 1; t <= iterations; ++t) {
    if (!cfg.warm_start) {
      Rng fresh = base.fork(1);
      state = init_model(g.attr_dim, cfg.train.hidden_dim, g.num_classes,
                         cfg.train.encoder_layers, fresh);
    }
    train_phase(state, g, gn, labels, splits, cfg);

    ScoreBundle scores = compute_scores(gn, g.features, state, cfg.train.phi);

    IterationRecord rec;
    rec.t = t;
    {
      const detail::ValContext ctx = detail::make_val_context(g, splits);
      const MetricReport m =
          detail::eval_validation(scores, ctx, cfg.train.phi, cfg.scoring);
      rec.val_auc_roc = m.auc_roc;
      rec.val_auc_pr = m.auc_pr;
      rec.val_acc = m.accuracy;
    }

    std::vector<int> chosen;
    std::vector<int> candidate_ids;
    double decay_weight = 1.0;
    std::vector<int> cluster_of;  // owning medoid (node id) per pool node
    if (cfg.strategy == QueryStrategy::multitask) {
      std::tie(scores.conf_classifier, scores.conf_predictor) =
          confidence(scores.entropy, scores.anomaly);
      scores.conf_difference =
          confidence_difference(scores.conf_classifier, scores.conf_predictor);
      const long n_selected =
          labels.selected_count +
          (cfg.count_initial_in_decay ? static_cast<long>(labels.class_labeled.size()) : 0);
      decay_weight = std::pow(cfg.select.tau, static_cast<double>(n_selected));
      if (cfg.ablation.no_entropy_score) {
        scores.informativeness = scores.conf_difference;
      } else if (cfg.ablation.no_confidence_difference) {
        scores.informativeness = scores.conf_classifier;
        for (double& v : scores.informativeness) v *= decay_weight;
      } else {
        scores.informativeness = informativeness(scores.entropy, scores.conf_difference,
                                                 cfg.select.tau, n_selected);
      }

      if (cfg.ablation.no_clustering) {
        candidate_ids = labels.unlabeled_pool;
      } else {
        Matrix masked;
        const Matrix* feat = &scores.embeddings;
        if (!cfg.ablation.no_masked_aggregation) {
          masked = masked_features(scores.embeddings, g.adjacency, labels.labeled_mask);
          feat = &masked;
        }
        const Matrix dist = pairwise_distance(*feat, labels.unlabeled_pool);
        Rng med_rng(mix_seed(cfg.select.rng_seed, 0x4B00u + static_cast<std::uint64_t>(t)));
        const KMedoidsResult km =
            kmedoids(dist, cfg.select.clusters, med_rng, cfg.select.max_medoid_iters);
        for (int idx : km.medoids)
          candidate_ids.push_back(labels.unlabeled_pool[static_cast<std::size_t>(idx)]);
        if (dump.is_open()) {
          cluster_of.reserve(km.assignment.size());
          for (int idx : km.assignment)
            cluster_of.push_back(labels.unlabeled_pool[static_cast<std::size_t>(idx)]);
        }
      }
      chosen = select_batch(candidate_ids, scores.informativeness, cfg.select.batch);
    } else {
      Rng q_rng = base.fork(0xBA5Eu + static_cast<std::uint64_t>(t));
      chosen = baseline_query(cfg.strategy, scores.anomaly, scores.embeddings,
                              labels.unlabeled_pool, cfg.select.batch, q_rng);
    }

    const std::vector<std::uint8_t> answers = oracle_label(chosen, g.anomaly_labels);
    rec.selected = chosen;
    for (auto y : answers) rec.anomalies_found += y;

    if (dump.is_open()) {
      nlohmann::json line;
      line["t"] = t;
      line["selected"] = chosen;
      line["candidates"] = candidate_ids;
      line["pool"] = labels.unlabeled_pool;
      if (!scores.informativeness.empty()) {
        line["pool_info"] = gather(scores.informativeness, labels.unlabeled_pool);
        line["decay_weight"] = decay_weight;
        line["selected_info"] = gather(scores.informativeness, chosen);
        line["selected_entropy_z"] = gather(scores.conf_classifier, chosen);
        line["selected_conf_diff"] = gather(scores.conf_difference, chosen);
      }
      if (!cluster_of.empty()) line["cluster_of"] = cluster_of;
      dump << line.dump() << "\n";
    }

    labels.absorb(chosen, answers);
    result.per_iteration.push_back(std::move(rec));
  }

  // final fit on everything labeled so far, then test-set scoring
  train_phase(state, g, gn, labels, splits, cfg);
  const ScoreBundle final_bundle = compute_scores(gn, g.features, state, cfg.train.phi);

  result.test_ids = splits.test_ids;
  result.test_entropy = gather(final_bundle.entropy, splits.test_ids);
  result.test_anomaly_score = gather(final_bundle.anomaly, splits.test_ids);
  result.final_scores = detail::subset_scores(final_bundle.entropy, final_bundle.anomaly,
                                              splits.test_ids, cfg.train.phi, cfg.scoring);

  std::vector<std::uint8_t> test_truth;
  long pos = 0;
  std::vector<int> indist_ids, indist_labels;
  for (int v : splits.test_ids) {
    const bool anom = g.anomaly_labels[static_cast<std::size_t>(v)] != 0;
    test_truth.push_back(anom ? 1 : 0);
    pos += anom;
    if (!anom && g.class_labels[static_cast<std::size_t>(v)] >= 0) {
      indist_ids.push_back(v);
      indist_labels.push_back(g.class_labels[static_cast<std::size_t>(v)]);
    }
  }
  if (pos > 0 && pos < static_cast<long>(splits.test_ids.size())) {
    result.final_auc_roc = auc_roc(result.final_scores, test_truth);
    result.final_auc_pr = auc_pr(result.final_scores, test_truth);
  } else {
    result.final_auc_roc = 0.5;
    result.final_auc_pr = 0.0;
  }
  result.final_accuracy =
      indist_ids.empty()
          ? 0.0
          : accuracy(detail::argmax_rows(final_bundle.probs, indist_ids), indist_labels);

  if (final_state) *final_state = state;
  return result;
}

/// Same pipeline with ablation switches applied on top of a base config.
inline RunResult run_variant(const AblationFlags& flags, ScoreVariant scoring,
                             const Graph& g, const Splits& splits, LoopConfig cfg) {
  cfg.ablation = flags;
  cfg.scoring = scoring;
  return run_active_loop(g, splits, cfg);
}

}  // namespace magad
