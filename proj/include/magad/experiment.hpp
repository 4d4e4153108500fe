#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "magad/graph.hpp"
#include "magad/inject.hpp"
#include "magad/loop.hpp"
#include "magad/synth.hpp"

namespace magad {

/// Raised for invalid configuration (CLI exit code 1); anything else that
/// escapes a run is a runtime failure (exit code 2).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  std::string dataset_dir;
  SynthSpec synth;
  bool inject_enabled = true;  // inject unless the dataset already has ground truth
  InjectionConfig inject;
  TrainConfig train;
  SelectionConfig select;
  int budget = 80;
  QueryStrategy strategy = QueryStrategy::multitask;
  ScoreVariant scoring = ScoreVariant::hybrid;
  AblationFlags ablation;
  bool warm_start = true;
  bool early_stop_on_predictor = false;
  bool count_initial_in_decay = false;
  int split_per_class = 20;
  int split_val = 500;
  int split_test = 1000;
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  std::string out_dir = "runs";
  bool debug_dump = false;
  bool save_models = false;

  void validate() const {
    if (dataset_dir.empty() && !synth.enabled())
      throw ConfigError("config: set either 'dataset' or a 'synth.*' block");
    if (!dataset_dir.empty() && synth.enabled())
      throw ConfigError("config: 'dataset' and 'synth.*' are mutually exclusive");
    if (synth.enabled()) synth.validate();
    if (seeds.empty()) throw ConfigError("config: at least one seed required");
    if (out_dir.empty()) throw ConfigError("config: output directory required");
    try {
      train.validate();
      select.validate();
      ablation.validate();
      if (budget < 0) throw std::runtime_error("budget must be >= 0");
      if (budget % select.batch != 0)
        throw std::runtime_error("budget must be divisible by select.b");
    } catch (const std::exception& e) {
      throw ConfigError(std::string("config: ") + e.what());
    }
  }
};

namespace detail {

inline bool parse_bool(const std::string& v, const std::string& key) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("config: key '" + key + "' expects a boolean, got '" + v + "'");
}

inline long parse_long(const std::string& v, const std::string& key) {
  try {
    std::size_t pos = 0;
    const long x = std::stol(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config: key '" + key + "' expects an integer, got '" + v + "'");
  }
}

inline double parse_real(const std::string& v, const std::string& key) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config: key '" + key + "' expects a number, got '" + v + "'");
  }
}

inline std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= v.size()) {
    const std::size_t comma = v.find(',', start);
    const std::string item = v.substr(
        start, comma == std::string::npos ? std::string::npos : comma - start);
    if (!item.empty()) out.push_back(item);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

inline std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && (s[a] == ' ' || s[a] == '\t')) ++a;
  while (b > a && (s[b - 1] == ' ' || s[b - 1] == '\t' || s[b - 1] == '\r')) --b;
  return s.substr(a, b - a);
}

}  // namespace detail

/// Apply a single `key = value` setting. Shared by the config-file parser and
/// CLI overrides so both speak the same schema.
inline void apply_config_setting(ExperimentConfig& cfg, const std::string& key,
                                 const std::string& value) {
  using detail::parse_bool;
  using detail::parse_long;
  using detail::parse_real;

  if (key == "dataset") cfg.dataset_dir = value;
  else if (key == "synth.n") cfg.synth.n = static_cast<int>(parse_long(value, key));
  else if (key == "synth.classes") cfg.synth.num_classes = static_cast<int>(parse_long(value, key));
  else if (key == "synth.attr_dim") cfg.synth.attr_dim = static_cast<int>(parse_long(value, key));
  else if (key == "synth.intra_p") cfg.synth.intra_p = parse_real(value, key);
  else if (key == "synth.inter_p") cfg.synth.inter_p = parse_real(value, key);
  else if (key == "synth.seed") cfg.synth.seed = static_cast<std::uint64_t>(parse_long(value, key));
  else if (key == "inject") cfg.inject_enabled = parse_bool(value, key);
  else if (key == "inject.p") cfg.inject.clique_size = static_cast<int>(parse_long(value, key));
  else if (key == "inject.q") cfg.inject.clique_count = static_cast<int>(parse_long(value, key));
  else if (key == "inject.k_cand") cfg.inject.candidate_count = static_cast<int>(parse_long(value, key));
  else if (key == "inject.contextual") cfg.inject.contextual_count = static_cast<int>(parse_long(value, key));
  else if (key == "inject.seed") cfg.inject.rng_seed = static_cast<std::uint64_t>(parse_long(value, key));
  else if (key == "train.alpha") cfg.train.alpha = parse_real(value, key);
  else if (key == "train.beta") cfg.train.beta = parse_real(value, key);
  else if (key == "train.phi") cfg.train.phi = parse_real(value, key);
  else if (key == "train.lr") cfg.train.learning_rate = parse_real(value, key);
  else if (key == "train.hidden") cfg.train.hidden_dim = static_cast<int>(parse_long(value, key));
  else if (key == "train.layers") cfg.train.encoder_layers = static_cast<int>(parse_long(value, key));
  else if (key == "train.max_epochs") cfg.train.max_epochs = static_cast<int>(parse_long(value, key));
  else if (key == "train.patience") cfg.train.patience = static_cast<int>(parse_long(value, key));
  else if (key == "select.m") cfg.select.clusters = static_cast<int>(parse_long(value, key));
  else if (key == "select.b") cfg.select.batch = static_cast<int>(parse_long(value, key));
  else if (key == "select.tau") cfg.select.tau = parse_real(value, key);
  else if (key == "select.max_medoid_iters") cfg.select.max_medoid_iters = static_cast<int>(parse_long(value, key));
  else if (key == "budget") cfg.budget = static_cast<int>(parse_long(value, key));
  else if (key == "strategy") {
    try {
      cfg.strategy = parse_strategy(value);
    } catch (const std::exception& e) {
      throw ConfigError(std::string("config: ") + e.what());
    }
  } else if (key == "scoring") {
    try {
      cfg.scoring = parse_score_variant(value);
    } catch (const std::exception& e) {
      throw ConfigError(std::string("config: ") + e.what());
    }
  } else if (key == "ablation") {
    AblationFlags flags;
    try {
      for (const auto& name : detail::split_list(value))
        flags = parse_ablation_flag(flags, detail::trim(name));
    } catch (const std::exception& e) {
      throw ConfigError(std::string("config: ") + e.what());
    }
    cfg.ablation = flags;
  } else if (key == "warm_start") cfg.warm_start = parse_bool(value, key);
  else if (key == "early_stop_on_predictor") cfg.early_stop_on_predictor = parse_bool(value, key);
  else if (key == "count_initial_in_decay") cfg.count_initial_in_decay = parse_bool(value, key);
  else if (key == "split.per_class") cfg.split_per_class = static_cast<int>(parse_long(value, key));
  else if (key == "split.val") cfg.split_val = static_cast<int>(parse_long(value, key));
  else if (key == "split.test") cfg.split_test = static_cast<int>(parse_long(value, key));
  else if (key == "seeds") {
    cfg.seeds.clear();
    for (const auto& s : detail::split_list(value))
      cfg.seeds.push_back(static_cast<std::uint64_t>(parse_long(detail::trim(s), key)));
  } else if (key == "out") cfg.out_dir = value;
  else if (key == "debug_dump") cfg.debug_dump = parse_bool(value, key);
  else if (key == "save_models") cfg.save_models = parse_bool(value, key);
  else throw ConfigError("config: unknown key '" + key + "'");
}

/// `key = value` file with '#' comments.
inline ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  ExperimentConfig cfg;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config: " + path + ":" + std::to_string(lineno) +
                        ": expected 'key = value'");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    try {
      apply_config_setting(cfg, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(std::string(e.what()) + " (" + path + ":" +
                        std::to_string(lineno) + ")");
    }
  }
  return cfg;
}

inline std::string method_label(QueryStrategy strategy, ScoreVariant scoring,
                                const AblationFlags& ablation) {
  std::string label = to_string(strategy);
  if (scoring != ScoreVariant::hybrid) label += std::string("+") + to_string(scoring);
  for (const auto& name : ablation.names()) label += "~" + name;
  return label;
}

inline nlohmann::json config_echo_json(const ExperimentConfig& cfg) {
  nlohmann::json j;
  j["dataset"] = cfg.dataset_dir;
  j["synth"] = {{"n", cfg.synth.n},          {"classes", cfg.synth.num_classes},
                {"attr_dim", cfg.synth.attr_dim}, {"intra_p", cfg.synth.intra_p},
                {"inter_p", cfg.synth.inter_p},   {"seed", cfg.synth.seed}};
  j["inject"] = {{"enabled", cfg.inject_enabled},
                 {"p", cfg.inject.clique_size},
                 {"q", cfg.inject.clique_count},
                 {"k_cand", cfg.inject.candidate_count},
                 {"contextual", cfg.inject.resolved_contextual()},
                 {"seed", cfg.inject.rng_seed}};
  j["train"] = {{"alpha", cfg.train.alpha},     {"beta", cfg.train.beta},
                {"phi", cfg.train.phi},         {"lr", cfg.train.learning_rate},
                {"hidden", cfg.train.hidden_dim}, {"layers", cfg.train.encoder_layers},
                {"max_epochs", cfg.train.max_epochs}, {"patience", cfg.train.patience}};
  j["select"] = {{"m", cfg.select.clusters},
                 {"b", cfg.select.batch},
                 {"tau", cfg.select.tau},
                 {"max_medoid_iters", cfg.select.max_medoid_iters}};
  j["budget"] = cfg.budget;
  j["strategy"] = to_string(cfg.strategy);
  j["scoring"] = to_string(cfg.scoring);
  j["ablation"] = cfg.ablation.names();
  j["warm_start"] = cfg.warm_start;
  j["early_stop_on_predictor"] = cfg.early_stop_on_predictor;
  j["count_initial_in_decay"] = cfg.count_initial_in_decay;
  j["split"] = {{"per_class", cfg.split_per_class},
                {"val", cfg.split_val},
                {"test", cfg.split_test}};
  j["seeds"] = cfg.seeds;
  j["out"] = cfg.out_dir;
  return j;
}

inline nlohmann::json run_result_json(const RunResult& r, const nlohmann::json& echo) {
  nlohmann::json j;
  j["seed"] = r.seed;
  j["method"] = method_label(r.strategy, r.scoring, r.ablation);
  j["strategy"] = to_string(r.strategy);
  j["scoring"] = to_string(r.scoring);
  j["ablation"] = r.ablation.names();
  j["config"] = echo;
  auto& iters = j["per_iteration"] = nlohmann::json::array();
  for (const auto& rec : r.per_iteration) {
    iters.push_back({{"t", rec.t},
                     {"selected", rec.selected},
                     {"anomalies_found", rec.anomalies_found},
                     {"val_auc_roc", rec.val_auc_roc},
                     {"val_auc_pr", rec.val_auc_pr},
                     {"val_acc", rec.val_acc}});
  }
  j["final"] = {{"auc_roc", r.final_auc_roc},
                {"auc_pr", r.final_auc_pr},
                {"accuracy", r.final_accuracy}};
  j["test_ids"] = r.test_ids;
  j["final_scores"] = r.final_scores;
  j["test_entropy"] = r.test_entropy;
  j["test_anomaly_score"] = r.test_anomaly_score;
  return j;
}

inline void write_iteration_csv(const RunResult& r, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "t,budget_used,anomalies_found,val_auc_roc,val_auc_pr,val_acc\n";
  char buf[160];
  int budget_used = 0;
  for (const auto& rec : r.per_iteration) {
    budget_used += static_cast<int>(rec.selected.size());
    std::snprintf(buf, sizeof(buf), "%d,%d,%d,%.9g,%.9g,%.9g\n", rec.t, budget_used,
                  rec.anomalies_found, rec.val_auc_roc, rec.val_auc_pr, rec.val_acc);
    out << buf;
  }
}

struct AggregateRow {
  std::string method;
  int runs = 0;
  double auc_roc_mean = 0, auc_roc_std = 0;
  double auc_pr_mean = 0, auc_pr_std = 0;
  double acc_mean = 0, acc_std = 0;
};

namespace detail {

inline std::pair<double, double> mean_std(const Vec& xs) {
  if (xs.empty()) return {0.0, 0.0};
  double mean = 0.0;
  for (double v : xs) mean += v;
  mean /= static_cast<double>(xs.size());
  double var = 0.0;
  for (double v : xs) var += (v - mean) * (v - mean);
  var /= static_cast<double>(xs.size());
  return {mean, std::sqrt(var)};
}

}  // namespace detail

inline std::vector<AggregateRow> aggregate_results(
    const std::vector<std::pair<std::string, RunResult>>& labeled_results) {
  std::map<std::string, std::vector<const RunResult*>> groups;
  for (const auto& [label, r] : labeled_results) groups[label].push_back(&r);
  std::vector<AggregateRow> rows;
  for (const auto& [label, rs] : groups) {
    AggregateRow row;
    row.method = label;
    row.runs = static_cast<int>(rs.size());
    Vec roc, pr, acc;
    for (const RunResult* r : rs) {
      roc.push_back(r->final_auc_roc);
      pr.push_back(r->final_auc_pr);
      acc.push_back(r->final_accuracy);
    }
    std::tie(row.auc_roc_mean, row.auc_roc_std) = detail::mean_std(roc);
    std::tie(row.auc_pr_mean, row.auc_pr_std) = detail::mean_std(pr);
    std::tie(row.acc_mean, row.acc_std) = detail::mean_std(acc);
    rows.push_back(std::move(row));
  }
  return rows;
}

inline void write_aggregate_csv(const std::vector<AggregateRow>& rows,
                                const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "method,runs,auc_roc_mean,auc_roc_std,auc_pr_mean,auc_pr_std,acc_mean,acc_std\n";
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%s,%d,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g\n",
                  r.method.c_str(), r.runs, r.auc_roc_mean, r.auc_roc_std, r.auc_pr_mean,
                  r.auc_pr_std, r.acc_mean, r.acc_std);
    out << buf;
  }
}

/// Mean per-iteration validation metrics by method, for budget-curve plots.
inline void write_budget_curve_csv(
    const std::vector<std::pair<std::string, RunResult>>& labeled_results,
    const std::string& path) {
  std::map<std::string, std::map<int, std::vector<const IterationRecord*>>> groups;
  for (const auto& [label, r] : labeled_results)
    for (const auto& rec : r.per_iteration) groups[label][rec.t].push_back(&rec);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "method,t,budget_used,anomalies_found_mean,val_auc_roc_mean,val_auc_pr_mean,"
         "val_acc_mean\n";
  char buf[256];
  for (const auto& [label, by_t] : groups) {
    for (const auto& [t, recs] : by_t) {
      Vec roc, pr, acc, found;
      int budget_used = 0;
      for (const IterationRecord* rec : recs) {
        roc.push_back(rec->val_auc_roc);
        pr.push_back(rec->val_auc_pr);
        acc.push_back(rec->val_acc);
        found.push_back(static_cast<double>(rec->anomalies_found));
        budget_used = t * static_cast<int>(rec->selected.size());
      }
      std::snprintf(buf, sizeof(buf), "%s,%d,%d,%.9g,%.9g,%.9g,%.9g\n", label.c_str(), t,
                    budget_used, detail::mean_std(found).first,
                    detail::mean_std(roc).first, detail::mean_std(pr).first,
                    detail::mean_std(acc).first);
      out << buf;
    }
  }
}

/// Load the dataset (or generate the synthetic one) and make sure anomaly
/// ground truth exists, injecting it when needed.
inline std::pair<Graph, InjectionReport> prepare_graph(const ExperimentConfig& cfg) {
  Graph g = cfg.dataset_dir.empty() ? make_synthetic_graph(cfg.synth)
                                    : load_graph(cfg.dataset_dir);
  InjectionReport report;
  if (!g.has_anomaly_labels()) {
    if (!cfg.inject_enabled)
      throw ConfigError(
          "config: dataset has no anomaly ground truth and injection is disabled");
    auto [injected, rep] = inject_all(g, cfg.inject);
    g = std::move(injected);
    report = std::move(rep);
  }
  return {std::move(g), std::move(report)};
}

inline LoopConfig make_loop_config(const ExperimentConfig& cfg, std::uint64_t seed,
                                   const std::string& dump_path = "") {
  LoopConfig lc;
  lc.train = cfg.train;
  lc.select = cfg.select;
  lc.select.rng_seed = seed;
  lc.budget = cfg.budget;
  lc.strategy = cfg.strategy;
  lc.scoring = cfg.scoring;
  lc.ablation = cfg.ablation;
  lc.warm_start = cfg.warm_start;
  lc.early_stop_on_predictor = cfg.early_stop_on_predictor;
  lc.count_initial_in_decay = cfg.count_initial_in_decay;
  lc.seed = seed;
  lc.debug_dump_path = dump_path;
  return lc;
}

/// Execute all seeds of one configured experiment; writes per-run JSON/CSV,
/// an aggregate CSV, and a budget-curve CSV. Returns 0 on success, 2 if any
/// seed failed (finished seeds are kept).
inline int run_experiment(const ExperimentConfig& cfg, std::ostream& log = std::cerr) {
  cfg.validate();
  namespace fs = std::filesystem;
  fs::create_directories(cfg.out_dir);

  const nlohmann::json echo = config_echo_json(cfg);
  {
    std::ofstream out(fs::path(cfg.out_dir) / "config_echo.json");
    out << echo.dump(2) << "\n";
  }

  auto [graph, report] = prepare_graph(cfg);
  log << "graph ready: n=" << graph.n << " anomalies=" << graph.anomaly_count() << "\n";

  const std::string label = method_label(cfg.strategy, cfg.scoring, cfg.ablation);
  std::vector<std::pair<std::string, RunResult>> results;
  int failures = 0;
  for (const std::uint64_t seed : cfg.seeds) {
    const std::string stem = "run_" + label + "_seed" + std::to_string(seed);
    try {
      const Splits splits = split_dataset(graph, cfg.split_per_class, cfg.split_val,
                                          cfg.split_test, seed);
      const std::string dump_path =
          cfg.debug_dump ? (fs::path(cfg.out_dir) / (stem + ".jsonl")).string() : "";
      const LoopConfig lc = make_loop_config(cfg, seed, dump_path);
      ModelState final_state;
      RunResult r = run_active_loop(graph, splits, lc,
                                    cfg.save_models ? &final_state : nullptr);
      {
        std::ofstream out(fs::path(cfg.out_dir) / (stem + ".json"));
        out << run_result_json(r, echo).dump() << "\n";
      }
      write_iteration_csv(r, (fs::path(cfg.out_dir) / (stem + ".csv")).string());
      if (cfg.save_models)
        save_checkpoint(final_state,
                        (fs::path(cfg.out_dir) / (stem + ".model.json")).string());
      log << stem << ": auc_roc=" << r.final_auc_roc << " auc_pr=" << r.final_auc_pr
          << " acc=" << r.final_accuracy << "\n";
      results.emplace_back(label, std::move(r));
    } catch (const std::exception& e) {
      ++failures;
      log << stem << ": FAILED: " << e.what() << "\n";
      std::ofstream out(fs::path(cfg.out_dir) / (stem + ".error.txt"));
      out << e.what() << "\n";
    }
  }

  if (!results.empty()) {
    write_aggregate_csv(aggregate_results(results),
                        (fs::path(cfg.out_dir) / "aggregate.csv").string());
    write_budget_curve_csv(results,
                           (fs::path(cfg.out_dir) / "budget_curve.csv").string());
  }
  return failures == 0 ? 0 : 2;
}

/// Aggregate previously written run_*.json files into a comparison table.
inline std::vector<AggregateRow> compare_runs(const std::string& dir) {
  namespace fs = std::filesystem;
  std::vector<std::pair<std::string, RunResult>> results;
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("run_", 0) == 0 && entry.path().extension() == ".json" &&
        name.find(".model.") == std::string::npos)
      files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& path : files) {
    std::ifstream in(path);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const std::exception& e) {
      throw std::runtime_error(path.string() + ": parse error: " + e.what());
    }
    RunResult r;
    r.final_auc_roc = j.at("final").at("auc_roc").get<double>();
    r.final_auc_pr = j.at("final").at("auc_pr").get<double>();
    r.final_accuracy = j.at("final").at("accuracy").get<double>();
    results.emplace_back(j.at("method").get<std::string>(), std::move(r));
  }
  if (results.empty()) throw std::runtime_error("compare: no run_*.json files in " + dir);
  return aggregate_results(results);
}

}  // namespace magad
