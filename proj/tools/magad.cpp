// Command-line front end: dataset synthesis, anomaly injection, experiment
// runs, and result comparison. Exit codes: 0 ok, 1 bad configuration,
// 2 runtime failure.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "magad/experiment.hpp"

namespace {

int cmd_synth(const magad::SynthSpec& spec, const std::string& out_dir) {
  magad::make_synthetic(spec, out_dir);
  std::cout << "wrote synthetic dataset (" << spec.n << " nodes) to " << out_dir << "\n";
  return 0;
}

int cmd_inject(const std::string& in_dir, const std::string& out_dir,
               const magad::InjectionConfig& icfg) {
  const magad::Graph g = magad::load_graph(in_dir);
  auto [injected, report] = magad::inject_all(g, icfg);
  magad::save_dataset(injected, out_dir);
  std::cout << "injected " << report.structural_ids.size() << " structural + "
            << report.contextual_ids.size() << " contextual anomalies ("
            << report.added_edges.size() << " new edges); wrote " << out_dir << "\n";
  return 0;
}

int cmd_run(const std::string& config_path, const std::vector<std::string>& overrides) {
  magad::ExperimentConfig cfg;
  if (!config_path.empty()) cfg = magad::parse_config_file(config_path);
  for (const auto& kv : overrides) {
    const std::size_t eq = kv.find('=');
    if (eq == std::string::npos)
      throw magad::ConfigError("--set expects key=value, got '" + kv + "'");
    magad::apply_config_setting(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  return magad::run_experiment(cfg, std::cerr);
}

int cmd_compare(const std::string& runs_dir, const std::string& out_csv) {
  const auto rows = magad::compare_runs(runs_dir);
  magad::write_aggregate_csv(rows, out_csv);
  for (const auto& r : rows) {
    std::printf("%-40s runs=%d auc_roc=%.4f+-%.4f auc_pr=%.4f+-%.4f\n", r.method.c_str(),
                r.runs, r.auc_roc_mean, r.auc_roc_std, r.auc_pr_mean, r.auc_pr_std);
  }
  std::cout << "wrote " << out_csv << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"active multitask anomaly detection on attributed graphs"};
  app.require_subcommand(1);

  // synth
  auto* synth = app.add_subcommand("synth", "generate a stochastic-block-model dataset");
  magad::SynthSpec spec;
  std::string synth_out;
  synth->add_option("--out", synth_out, "output dataset directory")->required();
  synth->add_option("--n", spec.n, "node count")->required();
  synth->add_option("--classes", spec.num_classes, "class count")->required();
  synth->add_option("--attr-dim", spec.attr_dim, "feature dimension")->required();
  synth->add_option("--intra-p", spec.intra_p, "same-class edge probability")->required();
  synth->add_option("--inter-p", spec.inter_p, "cross-class edge probability")->required();
  synth->add_option("--seed", spec.seed, "generator seed");

  // inject
  auto* inject = app.add_subcommand("inject", "inject synthetic anomalies into a dataset");
  std::string inject_in, inject_out;
  magad::InjectionConfig icfg;
  inject->add_option("--in", inject_in, "input dataset directory")->required();
  inject->add_option("--out", inject_out, "output dataset directory")->required();
  inject->add_option("--clique-size", icfg.clique_size, "nodes per structural clique (p)");
  inject->add_option("--cliques", icfg.clique_count, "number of cliques (q)");
  inject->add_option("--candidates", icfg.candidate_count,
                     "candidate pool per contextual swap (k)");
  inject->add_option("--contextual", icfg.contextual_count,
                     "contextual anomaly count (default p*q)");
  inject->add_option("--seed", icfg.rng_seed, "injection seed");

  // run
  auto* run = app.add_subcommand("run", "run a configured experiment over seeds");
  std::string config_path;
  std::vector<std::string> overrides;
  run->add_option("--config", config_path, "key = value configuration file");
  run->add_option("--set", overrides, "override a config key, e.g. --set budget=40");

  // compare
  auto* compare = app.add_subcommand("compare", "aggregate run_*.json files into a table");
  std::string runs_dir, compare_out = "comparison.csv";
  compare->add_option("--runs", runs_dir, "directory with run_*.json files")->required();
  compare->add_option("--out", compare_out, "output CSV path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed()) return cmd_synth(spec, synth_out);
    if (inject->parsed()) return cmd_inject(inject_in, inject_out, icfg);
    if (run->parsed()) return cmd_run(config_path, overrides);
    if (compare->parsed()) return cmd_compare(runs_dir, compare_out);
  } catch (const magad::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
