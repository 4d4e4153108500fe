#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include "magad/graph.hpp"
#include "magad/synth.hpp"
#include "oracles.hpp"

using namespace magad;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("magad_test_" + tag);
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream out(p);
  out << content;
}

void write_path3_dataset(const fs::path& dir, const std::string& edges = "src,dst\n0,1\n1,2\n",
                         const std::string& features = "0.1\n0.2\n0.3\n") {
  write_file(dir / "meta.json", R"({"n": 3, "num_classes": 2, "attr_dim": 1})");
  write_file(dir / "edges.csv", edges);
  write_file(dir / "features.csv", features);
  write_file(dir / "labels.csv", "node,class\n0,0\n1,1\n2,0\n");
}

}  // namespace

TEST_CASE("load_graph symmetrizes a 3-node path into 4 nonzeros") {
  TempDir tmp("path3");
  write_path3_dataset(tmp.path);
  const Graph g = load_graph(tmp.path.string());
  CHECK(g.n == 3);
  CHECK(g.adjacency.nnz() == 4);
  CHECK(g.adjacency.has_edge(0, 1));
  CHECK(g.adjacency.has_edge(1, 0));
  CHECK(g.adjacency.has_edge(1, 2));
  CHECK(g.adjacency.has_edge(2, 1));
  CHECK(g.class_labels == std::vector<int>{0, 1, 0});
}

TEST_CASE("load_graph drops self-loop edges") {
  TempDir tmp("selfloop");
  write_path3_dataset(tmp.path, "src,dst\n0,1\n1,1\n");
  const Graph g = load_graph(tmp.path.string());
  CHECK(g.adjacency.nnz() == 2);  // only 0-1 survives
  CHECK_FALSE(g.adjacency.has_edge(1, 1));
}

TEST_CASE("load_graph reports distinct input defects") {
  TempDir tmp("defects");

  SUBCASE("missing file") {
    write_path3_dataset(tmp.path);
    fs::remove(tmp.path / "features.csv");
    CHECK_THROWS_WITH_AS(load_graph(tmp.path.string()),
                         doctest::Contains("missing file"), std::runtime_error);
  }
  SUBCASE("row count mismatch") {
    write_path3_dataset(tmp.path, "src,dst\n0,1\n1,2\n", "0.1\n0.2\n");
    CHECK_THROWS_WITH_AS(load_graph(tmp.path.string()),
                         doctest::Contains("features.csv"), std::runtime_error);
  }
  SUBCASE("non-finite feature") {
    write_path3_dataset(tmp.path, "src,dst\n0,1\n1,2\n", "0.1\nnan\n0.3\n");
    CHECK_THROWS_WITH_AS(load_graph(tmp.path.string()),
                         doctest::Contains("non-finite"), std::runtime_error);
  }
  SUBCASE("class label out of range") {
    write_path3_dataset(tmp.path);
    write_file(tmp.path / "labels.csv", "node,class\n0,0\n1,5\n");
    CHECK_THROWS_WITH_AS(load_graph(tmp.path.string()),
                         doctest::Contains("out of range"), std::runtime_error);
  }
  SUBCASE("edge id out of range") {
    write_path3_dataset(tmp.path, "src,dst\n0,7\n");
    CHECK_THROWS_WITH_AS(load_graph(tmp.path.string()),
                         doctest::Contains("out of range"), std::out_of_range);
  }
  SUBCASE("duplicate label row") {
    write_path3_dataset(tmp.path);
    write_file(tmp.path / "labels.csv", "node,class\n0,0\n0,1\n");
    CHECK_THROWS_WITH_AS(load_graph(tmp.path.string()),
                         doctest::Contains("duplicate"), std::runtime_error);
  }
}

TEST_CASE("save/load round-trips a synthetic graph") {
  TempDir tmp("roundtrip");
  SynthSpec spec;
  spec.n = 40;
  spec.num_classes = 3;
  spec.attr_dim = 5;
  spec.intra_p = 0.2;
  spec.inter_p = 0.02;
  spec.seed = 4;
  const Graph g = make_synthetic_graph(spec);
  save_dataset(g, (tmp.path / "ds").string());
  const Graph back = load_graph((tmp.path / "ds").string());
  CHECK(back.n == g.n);
  CHECK(back.adjacency.indices == g.adjacency.indices);
  CHECK(back.class_labels == g.class_labels);
  for (std::size_t i = 0; i < g.features.data.size(); ++i)
    CHECK(back.features.data[i] == g.features.data[i]);
}

TEST_CASE("normalize_adjacency: isolated node becomes [[1.0]]") {
  Graph g;
  g.n = 1;
  g.num_classes = 1;
  g.attr_dim = 1;
  g.adjacency = build_symmetric_adjacency(1, {});
  g.features = Matrix(1, 1, 0.0);
  g.class_labels = {0};
  const NormalizedAdjacency na = normalize_adjacency(g);
  REQUIRE(na.matrix.nnz() == 1);
  CHECK(na.matrix.row_values(0)[0] == doctest::Approx(1.0));
  CHECK(na.degrees[0] == 1.0);
}

TEST_CASE("normalize_adjacency: two connected nodes give four 0.5 entries") {
  Graph g;
  g.n = 2;
  g.num_classes = 1;
  g.attr_dim = 1;
  g.adjacency = build_symmetric_adjacency(2, {{0, 1}});
  g.features = Matrix(2, 1, 0.0);
  g.class_labels = {0, 0};
  const NormalizedAdjacency na = normalize_adjacency(g);
  REQUIRE(na.matrix.nnz() == 4);
  for (double v : na.matrix.values) CHECK(v == doctest::Approx(0.5));
}

TEST_CASE("normalize_adjacency matches the dense oracle on a random graph") {
  SynthSpec spec;
  spec.n = 10;
  spec.num_classes = 2;
  spec.attr_dim = 2;
  spec.intra_p = 0.5;
  spec.inter_p = 0.2;
  spec.seed = 17;
  const Graph g = make_synthetic_graph(spec);
  const NormalizedAdjacency na = normalize_adjacency(g);
  const Matrix ref = oracle::dense_normalized_adjacency(g);
  const Matrix got = oracle::dense_from_csr(na.matrix);
  for (std::size_t i = 0; i < 10; ++i)
    for (std::size_t j = 0; j < 10; ++j)
      CHECK(std::abs(got(i, j) - ref(i, j)) < 1e-12);
}

TEST_CASE("normalized sparsity pattern equals A + I pattern") {
  SynthSpec spec;
  spec.n = 25;
  spec.num_classes = 3;
  spec.attr_dim = 2;
  spec.intra_p = 0.3;
  spec.inter_p = 0.05;
  spec.seed = 23;
  const Graph g = make_synthetic_graph(spec);
  const NormalizedAdjacency na = normalize_adjacency(g);
  CHECK(na.matrix.nnz() == g.adjacency.nnz() + static_cast<std::size_t>(g.n));
  for (int i = 0; i < g.n; ++i) {
    CHECK(na.matrix.has_edge(i, i));
    for (int j : g.adjacency.row_indices(static_cast<std::size_t>(i)))
      CHECK(na.matrix.has_edge(i, j));
  }
}

TEST_CASE("normalized row sums are positive and bounded by sqrt(max degree)") {
  SynthSpec spec;
  spec.n = 40;
  spec.num_classes = 2;
  spec.attr_dim = 2;
  spec.intra_p = 0.25;
  spec.inter_p = 0.1;
  spec.seed = 31;
  const Graph g = make_synthetic_graph(spec);
  const NormalizedAdjacency na = normalize_adjacency(g);
  double max_deg = 0.0;
  for (double d : na.degrees) max_deg = std::max(max_deg, d);
  for (std::size_t i = 0; i < na.matrix.n; ++i) {
    double row_sum = 0.0;
    for (double v : na.matrix.row_values(i)) {
      CHECK(v >= 0.0);
      row_sum += v;
    }
    CHECK(row_sum > 0.0);
    CHECK(row_sum <= std::sqrt(max_deg) + 1e-12);
  }
}

TEST_CASE("split_dataset: 7 classes at 20 per class yields 140 labeled") {
  SynthSpec spec;
  spec.n = 400;
  spec.num_classes = 7;
  spec.attr_dim = 3;
  spec.intra_p = 0.05;
  spec.inter_p = 0.01;
  spec.seed = 5;
  Graph g = make_synthetic_graph(spec);
  g.anomaly_labels.assign(static_cast<std::size_t>(g.n), 0);
  const Splits s = split_dataset(g, 20, 30, 40, 9);
  CHECK(s.initial_class_labeled.size() == 140);
  CHECK(s.val_ids.size() == 30);
  CHECK(s.test_ids.size() == 40);
  CHECK(s.val_ids.size() + s.test_ids.size() + s.initial_class_labeled.size() +
            s.pool_ids.size() ==
        static_cast<std::size_t>(g.n));
}

TEST_CASE("split_dataset partitions are disjoint and exclude anomalies from the seed set") {
  SynthSpec spec;
  spec.n = 200;
  spec.num_classes = 4;
  spec.attr_dim = 3;
  spec.intra_p = 0.08;
  spec.inter_p = 0.01;
  spec.seed = 6;
  Graph g = make_synthetic_graph(spec);
  g.anomaly_labels.assign(static_cast<std::size_t>(g.n), 0);
  for (int v = 0; v < 20; ++v) g.anomaly_labels[static_cast<std::size_t>(v)] = 1;

  const Splits s = split_dataset(g, 5, 25, 35, 11);
  std::set<int> all;
  for (const auto* part : {&s.val_ids, &s.test_ids, &s.initial_class_labeled, &s.pool_ids})
    for (int v : *part) {
      CHECK(all.insert(v).second);  // no overlap
      CHECK(v >= 0);
      CHECK(v < g.n);
    }
  CHECK(all.size() == static_cast<std::size_t>(g.n));
  for (int v : s.initial_class_labeled)
    CHECK(g.anomaly_labels[static_cast<std::size_t>(v)] == 0);
}

TEST_CASE("split_dataset with empty val/test keeps everything else in the pool") {
  SynthSpec spec;
  spec.n = 60;
  spec.num_classes = 3;
  spec.attr_dim = 2;
  spec.intra_p = 0.1;
  spec.inter_p = 0.02;
  spec.seed = 8;
  Graph g = make_synthetic_graph(spec);
  g.anomaly_labels.assign(static_cast<std::size_t>(g.n), 0);
  const Splits s = split_dataset(g, 2, 0, 0, 3);
  CHECK(s.val_ids.empty());
  CHECK(s.test_ids.empty());
  CHECK(s.initial_class_labeled.size() == 6);
  CHECK(s.pool_ids.size() == static_cast<std::size_t>(g.n) - 6);
}

TEST_CASE("split_dataset is deterministic per seed") {
  SynthSpec spec;
  spec.n = 80;
  spec.num_classes = 2;
  spec.attr_dim = 2;
  spec.intra_p = 0.1;
  spec.inter_p = 0.02;
  spec.seed = 12;
  Graph g = make_synthetic_graph(spec);
  g.anomaly_labels.assign(static_cast<std::size_t>(g.n), 0);
  const Splits a = split_dataset(g, 3, 10, 12, 77);
  const Splits b = split_dataset(g, 3, 10, 12, 77);
  CHECK(a.val_ids == b.val_ids);
  CHECK(a.test_ids == b.test_ids);
  CHECK(a.initial_class_labeled == b.initial_class_labeled);
  CHECK(a.pool_ids == b.pool_ids);
  const Splits c = split_dataset(g, 3, 10, 12, 78);
  CHECK(a.val_ids != c.val_ids);
}

namespace {
Graph make_skewed_graph() {
  Graph g;
  g.n = 30;
  g.num_classes = 2;
  g.attr_dim = 1;
  g.adjacency = build_symmetric_adjacency(30, {{0, 1}});
  g.features = Matrix(30, 1, 0.0);
  g.class_labels.assign(30, 0);
  // class 1 has only three members, all anomalous
  for (int v = 0; v < 3; ++v) g.class_labels[static_cast<std::size_t>(v)] = 1;
  g.anomaly_labels.assign(30, 0);
  for (int v = 0; v < 3; ++v) g.anomaly_labels[static_cast<std::size_t>(v)] = 1;
  return g;
}
}  // namespace

TEST_CASE("split_dataset reports the class without enough clean nodes") {
  const Graph g = make_skewed_graph();
  CHECK_THROWS_WITH_AS(split_dataset(g, 2, 0, 0, 1), doctest::Contains("class 1"),
                       std::runtime_error);
}
