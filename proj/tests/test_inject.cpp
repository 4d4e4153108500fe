#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "magad/inject.hpp"
#include "magad/synth.hpp"
#include "fixtures.hpp"

using namespace magad;

namespace {

Graph random_graph(int n, int classes, std::uint64_t seed, double intra = 0.1,
                   double inter = 0.02, int attr = 4) {
  SynthSpec spec;
  spec.n = n;
  spec.num_classes = classes;
  spec.attr_dim = attr;
  spec.intra_p = intra;
  spec.inter_p = inter;
  spec.seed = seed;
  return make_synthetic_graph(spec);
}

// exhaustive adjacency scan over each claimed clique
void check_cliques_complete(const Graph& g, const std::vector<int>& ids, int p) {
  REQUIRE(ids.size() % static_cast<std::size_t>(p) == 0);
  // membership is order-independent after sorting, so recover groups by
  // checking mutual adjacency instead: every pair inside one clique must be
  // connected. With disjoint cliques we can only assert pairwise adjacency
  // within groups, so group by connectivity among the flagged set.
  std::vector<int> sorted = ids;
  std::sort(sorted.begin(), sorted.end());
  // For every flagged node, it must be adjacent to at least p-1 flagged nodes.
  for (int u : sorted) {
    int inside = 0;
    for (int v : sorted)
      if (v != u && g.adjacency.has_edge(u, v)) ++inside;
    CHECK(inside >= p - 1);
  }
}

}  // namespace

TEST_CASE("inject_structural with p=2,q=1 on an edgeless graph adds one edge") {
  Graph g = fixtures::graph_from_edges(4, {});
  Rng rng(3);
  std::vector<std::pair<int, int>> added;
  auto [out, ids] = inject_structural(g, 2, 1, rng, &added);
  CHECK(ids.size() == 2);
  CHECK(added.size() == 1);
  CHECK(out.adjacency.nnz() == 2);
  CHECK(out.adjacency.has_edge(ids[0], ids[1]));
  CHECK(out.anomaly_count() == 2);
}

TEST_CASE("inject_structural cliques are complete under a brute-force scan") {
  const Graph g = random_graph(80, 3, 21);
  Rng rng(5);
  auto [out, ids] = inject_structural(g, 4, 3, rng);
  CHECK(ids.size() == 12);
  check_cliques_complete(out, ids, 4);
  // grouping: consecutive draw groups are cliques; verify via report-free
  // route by checking every id is anomalous and structural
  for (int v : ids) {
    CHECK(out.anomaly_labels[static_cast<std::size_t>(v)] == 1);
    CHECK(out.anomaly_kinds[static_cast<std::size_t>(v)] == AnomalyKind::structural);
  }
}

TEST_CASE("inject_structural refuses oversized requests") {
  Graph g = fixtures::graph_from_edges(5, {});
  Rng rng(1);
  CHECK_THROWS_WITH_AS(inject_structural(g, 3, 2, rng), doctest::Contains("not enough"),
                       std::runtime_error);
}

TEST_CASE("inject_contextual with a single candidate copies it verbatim") {
  Graph g = fixtures::graph_from_edges(4, {}, 3);
  Rng seed_rng(9);
  for (double& v : g.features.data) v = seed_rng.normal();
  const Matrix before = g.features;
  Rng rng(2);
  std::vector<std::pair<int, int>> pairs;
  auto [out, ids] = inject_contextual(g, 1, 1, rng, {}, &pairs);
  REQUIRE(ids.size() == 1);
  REQUIRE(pairs.size() == 1);
  const auto [target, source] = pairs[0];
  CHECK(target == ids[0]);
  for (int d = 0; d < 3; ++d)
    CHECK(out.features(static_cast<std::size_t>(target), static_cast<std::size_t>(d)) ==
          before(static_cast<std::size_t>(source), static_cast<std::size_t>(d)));
}

TEST_CASE("inject_contextual leaves values unchanged when all nodes coincide") {
  Graph g = fixtures::graph_from_edges(6, {}, 2);
  for (double& v : g.features.data) v = 1.5;
  Rng rng(4);
  auto [out, ids] = inject_contextual(g, 2, 3, rng);
  CHECK(ids.size() == 2);
  for (double v : out.features.data) CHECK(v == 1.5);
  CHECK(out.anomaly_count() == 2);
}

TEST_CASE("inject_contextual picks the globally farthest candidate when k covers V") {
  Graph g = fixtures::graph_from_edges(12, {}, 2);
  Rng seed_rng(31);
  for (double& v : g.features.data) v = seed_rng.normal();
  const Matrix before = g.features;
  Rng rng(6);
  std::vector<std::pair<int, int>> pairs;
  auto [out, ids] = inject_contextual(g, 1, 11, rng, {}, &pairs);
  const auto [target, source] = pairs[0];
  double best = -1.0;
  int best_id = -1;
  for (int v = 0; v < 12; ++v) {
    if (v == target) continue;
    const double d = l2_distance(before.row(static_cast<std::size_t>(target)),
                                 before.row(static_cast<std::size_t>(v)), 2);
    if (d > best || (d == best && v < best_id)) {
      best = d;
      best_id = v;
    }
  }
  CHECK(source == best_id);
}

TEST_CASE("inject_all hits the 150-anomaly configuration on a CiteSeer-sized graph") {
  const Graph g = random_graph(3327, 6, 33, 0.004, 0.0006, 8);
  InjectionConfig cfg;
  cfg.clique_size = 15;
  cfg.clique_count = 5;
  cfg.candidate_count = 50;
  cfg.contextual_count = 75;
  cfg.rng_seed = 44;
  auto [out, report] = inject_all(g, cfg);
  CHECK(report.structural_ids.size() == 75);
  CHECK(report.contextual_ids.size() == 75);
  CHECK(out.anomaly_count() == 150);
  const double frac = 150.0 / 3327.0;
  CHECK(frac == doctest::Approx(0.045).epsilon(0.01));
}

TEST_CASE("inject_all with q=0 and no contextual targets is a no-op") {
  const Graph g = random_graph(30, 2, 3);
  InjectionConfig cfg;
  cfg.clique_size = 5;
  cfg.clique_count = 0;
  cfg.contextual_count = 0;
  cfg.rng_seed = 1;
  auto [out, report] = inject_all(g, cfg);
  CHECK(report.structural_ids.empty());
  CHECK(report.contextual_ids.empty());
  CHECK(report.added_edges.empty());
  CHECK(report.swapped_pairs.empty());
  CHECK(out.anomaly_count() == 0);
  CHECK(out.adjacency.indices == g.adjacency.indices);
  CHECK(out.features.data == g.features.data);
}

TEST_CASE("inject_all is deterministic and keeps the anomaly sets disjoint") {
  const Graph g = random_graph(120, 3, 13);
  InjectionConfig cfg;
  cfg.clique_size = 4;
  cfg.clique_count = 2;
  cfg.candidate_count = 10;
  cfg.contextual_count = 6;
  cfg.rng_seed = 99;
  auto [a, ra] = inject_all(g, cfg);
  auto [b, rb] = inject_all(g, cfg);
  CHECK(ra.structural_ids == rb.structural_ids);
  CHECK(ra.contextual_ids == rb.contextual_ids);
  CHECK(ra.added_edges == rb.added_edges);
  CHECK(ra.swapped_pairs == rb.swapped_pairs);
  CHECK(a.features.data == b.features.data);

  std::set<int> structural(ra.structural_ids.begin(), ra.structural_ids.end());
  for (int v : ra.contextual_ids) CHECK(structural.count(v) == 0);
  CHECK(a.anomaly_count() == 14);
}

TEST_CASE("edges only grow between structural nodes; features only move at contextual ones") {
  const Graph g = random_graph(100, 3, 51);
  InjectionConfig cfg;
  cfg.clique_size = 5;
  cfg.clique_count = 2;
  cfg.candidate_count = 8;
  cfg.contextual_count = 5;
  cfg.rng_seed = 7;
  auto [out, report] = inject_all(g, cfg);

  std::set<int> structural(report.structural_ids.begin(), report.structural_ids.end());
  for (const auto& [u, v] : report.added_edges) {
    CHECK(structural.count(u) == 1);
    CHECK(structural.count(v) == 1);
  }
  // the added-edge list is exactly the adjacency difference
  const auto before = to_undirected_edges(g.adjacency);
  const auto after = to_undirected_edges(out.adjacency);
  std::set<std::pair<int, int>> before_set(before.begin(), before.end());
  std::vector<std::pair<int, int>> diff;
  for (const auto& e : after)
    if (!before_set.count(e)) diff.push_back(e);
  std::vector<std::pair<int, int>> added = report.added_edges;
  std::sort(added.begin(), added.end());
  std::sort(diff.begin(), diff.end());
  CHECK(added == diff);

  std::set<int> contextual(report.contextual_ids.begin(), report.contextual_ids.end());
  for (int v = 0; v < g.n; ++v) {
    if (contextual.count(v)) continue;
    for (int d = 0; d < g.attr_dim; ++d)
      CHECK(out.features(static_cast<std::size_t>(v), static_cast<std::size_t>(d)) ==
            g.features(static_cast<std::size_t>(v), static_cast<std::size_t>(d)));
  }
}

TEST_CASE("injection config validation") {
  InjectionConfig cfg;
  cfg.clique_size = 1;
  CHECK_THROWS(cfg.validate(100));
  cfg.clique_size = 15;
  cfg.clique_count = 5;
  cfg.contextual_count = 75;
  CHECK_THROWS(cfg.validate(100));  // 150 anomalies in a 100-node graph
  CHECK_NOTHROW(cfg.validate(3000));
}
