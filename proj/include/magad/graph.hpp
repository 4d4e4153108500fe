#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "magad/core.hpp"
#include "magad/csr.hpp"

namespace magad {

enum class AnomalyKind : std::uint8_t { none = 0, structural = 1, contextual = 2 };

inline const char* to_string(AnomalyKind k) {
  switch (k) {
    case AnomalyKind::structural: return "structural";
    case AnomalyKind::contextual: return "contextual";
    default: return "none";
  }
}

/// Attributed graph: symmetric binary adjacency, dense node features, class
/// labels (-1 where unknown) and, once anomalies have been injected, a binary
/// ground-truth vector with the kind of each anomaly.
struct Graph {
  int n = 0;
  int num_classes = 0;
  int attr_dim = 0;
  Csr adjacency;                             // zero diagonal, entries in {0,1}
  Matrix features;                           // n x attr_dim
  std::vector<int> class_labels;             // -1 = unlabeled
  std::vector<std::uint8_t> anomaly_labels;  // empty until injection
  std::vector<AnomalyKind> anomaly_kinds;    // parallel to anomaly_labels

  bool has_anomaly_labels() const { return !anomaly_labels.empty(); }

  int anomaly_count() const {
    int c = 0;
    for (auto v : anomaly_labels) c += v;
    return c;
  }

  void validate() const {
    if (n <= 0) throw std::runtime_error("graph: node count must be positive");
    if (adjacency.n != static_cast<std::size_t>(n))
      throw std::runtime_error("graph: adjacency size differs from node count");
    if (features.rows != static_cast<std::size_t>(n))
      throw std::runtime_error("graph: feature row count differs from node count");
    if (features.cols != static_cast<std::size_t>(attr_dim))
      throw std::runtime_error("graph: feature width differs from attr_dim");
    for (double v : features.data)
      if (!std::isfinite(v)) throw std::runtime_error("graph: non-finite feature value");
    if (class_labels.size() != static_cast<std::size_t>(n))
      throw std::runtime_error("graph: class label count differs from node count");
    for (int c : class_labels)
      if (c < -1 || c >= num_classes)
        throw std::runtime_error("graph: class label out of range [0, C)");
    if (!anomaly_labels.empty() &&
        anomaly_labels.size() != static_cast<std::size_t>(n))
      throw std::runtime_error("graph: anomaly label count differs from node count");
    for (std::size_t i = 0; i < adjacency.n; ++i) {
      for (int j : adjacency.row_indices(i)) {
        if (j == static_cast<int>(i))
          throw std::runtime_error("graph: adjacency has a diagonal entry");
        if (!adjacency.has_edge(j, static_cast<int>(i)))
          throw std::runtime_error("graph: adjacency is not symmetric");
      }
    }
  }
};

/// D^{-1/2} (A + I) D^{-1/2} with D the degree matrix of A + I.
struct NormalizedAdjacency {
  Csr matrix;
  Vec degrees;  // D_ii, each >= 1
};

inline NormalizedAdjacency normalize_adjacency(const Graph& g) {
  const std::size_t n = static_cast<std::size_t>(g.n);
  NormalizedAdjacency out;
  out.degrees.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    out.degrees[i] = static_cast<double>(g.adjacency.row_size(i)) + 1.0;

  Csr& m = out.matrix;
  m.n = n;
  m.indptr.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i)
    m.indptr[i + 1] = m.indptr[i] + g.adjacency.row_size(i) + 1;
  m.indices.resize(m.indptr[n]);
  m.values.resize(m.indptr[n]);
  for (std::size_t i = 0; i < n; ++i) {
    const double di = out.degrees[i];
    std::size_t w = m.indptr[i];
    bool self_placed = false;
    for (int j : g.adjacency.row_indices(i)) {
      if (!self_placed && j > static_cast<int>(i)) {
        m.indices[w] = static_cast<int>(i);
        m.values[w] = 1.0 / di;
        ++w;
        self_placed = true;
      }
      m.indices[w] = j;
      m.values[w] = 1.0 / std::sqrt(di * out.degrees[static_cast<std::size_t>(j)]);
      ++w;
    }
    if (!self_placed) {
      m.indices[w] = static_cast<int>(i);
      m.values[w] = 1.0 / di;
      ++w;
    }
  }
  return out;
}

/// Fixed evaluation sets plus the queryable pool.
struct Splits {
  std::vector<int> val_ids;
  std::vector<int> test_ids;
  std::vector<int> initial_class_labeled;  // stratified, non-anomalous
  std::vector<int> pool_ids;               // queryable remainder
};

/// Draw validation/test sets uniformly, then a stratified per-class labeled
/// set from the non-anomalous remainder. The pool is everything left, so
/// queries can never touch evaluation nodes.
inline Splits split_dataset(const Graph& g, int per_class, int n_val, int n_test,
                            std::uint64_t seed) {
  if (!g.has_anomaly_labels())
    throw std::runtime_error("split: anomaly injection must run before splitting");
  if (n_val < 0 || n_test < 0 || per_class < 0)
    throw std::runtime_error("split: negative set size");
  if (n_val + n_test > g.n)
    throw std::runtime_error("split: val + test exceeds node count");

  Rng rng(seed);
  std::vector<int> perm(static_cast<std::size_t>(g.n));
  for (int i = 0; i < g.n; ++i) perm[static_cast<std::size_t>(i)] = i;
  rng.shuffle(perm);

  Splits s;
  s.val_ids.assign(perm.begin(), perm.begin() + n_val);
  s.test_ids.assign(perm.begin() + n_val, perm.begin() + n_val + n_test);

  std::vector<int> taken_per_class(static_cast<std::size_t>(g.num_classes), 0);
  std::vector<std::uint8_t> is_initial(static_cast<std::size_t>(g.n), 0);
  for (std::size_t idx = static_cast<std::size_t>(n_val + n_test); idx < perm.size();
       ++idx) {
    const int v = perm[idx];
    const int c = g.class_labels[static_cast<std::size_t>(v)];
    if (c < 0 || g.anomaly_labels[static_cast<std::size_t>(v)]) continue;
    if (taken_per_class[static_cast<std::size_t>(c)] < per_class) {
      taken_per_class[static_cast<std::size_t>(c)]++;
      is_initial[static_cast<std::size_t>(v)] = 1;
      s.initial_class_labeled.push_back(v);
    }
  }
  for (int c = 0; c < g.num_classes; ++c) {
    if (taken_per_class[static_cast<std::size_t>(c)] < per_class)
      throw std::runtime_error("split: class " + std::to_string(c) + " has only " +
                               std::to_string(taken_per_class[static_cast<std::size_t>(c)]) +
                               " non-anomalous nodes outside val/test, need " +
                               std::to_string(per_class));
  }

  std::vector<std::uint8_t> reserved(static_cast<std::size_t>(g.n), 0);
  for (int v : s.val_ids) reserved[static_cast<std::size_t>(v)] = 1;
  for (int v : s.test_ids) reserved[static_cast<std::size_t>(v)] = 1;
  for (int v = 0; v < g.n; ++v)
    if (!reserved[static_cast<std::size_t>(v)] && !is_initial[static_cast<std::size_t>(v)])
      s.pool_ids.push_back(v);

  std::sort(s.val_ids.begin(), s.val_ids.end());
  std::sort(s.test_ids.begin(), s.test_ids.end());
  std::sort(s.initial_class_labeled.begin(), s.initial_class_labeled.end());
  return s;
}

// ---------------------------------------------------------------------------
// Dataset directory I/O
//
// meta.json      {"n": int, "num_classes": int, "attr_dim": int}
// edges.csv      header "src,dst", one undirected edge per line
// features.csv   n rows of attr_dim comma-separated floats
// labels.csv     header "node,class", one row per labeled node
// anomalies.csv  header "node,is_anomaly,kind", one row per anomalous node
// ---------------------------------------------------------------------------

namespace detail {

inline std::string chomp(std::string line) {
  while (!line.empty() && (line.back() == '\r' || line.back() == '\n' ||
                           line.back() == ' ' || line.back() == '\t'))
    line.pop_back();
  return line;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

inline long parse_int(const std::string& s, const std::string& context) {
  long value = 0;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  while (begin != end && *begin == ' ') ++begin;
  const auto res = std::from_chars(begin, end, value);
  if (res.ec != std::errc{} || res.ptr != end)
    throw std::runtime_error(context + ": cannot parse integer '" + s + "'");
  return value;
}

inline double parse_double(const std::string& s, const std::string& context) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    while (pos < s.size() && (s[pos] == ' ')) ++pos;
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error(context + ": cannot parse number '" + s + "'");
  }
}

inline std::ifstream open_or_throw(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw std::runtime_error("missing file: " + p.string());
  return in;
}

inline void expect_header(std::ifstream& in, const std::string& expected,
                          const std::string& file) {
  std::string line;
  if (!std::getline(in, line) || chomp(line) != expected)
    throw std::runtime_error(file + ": expected header '" + expected + "'");
}

}  // namespace detail

inline Graph load_graph(const std::string& dir) {
  namespace fs = std::filesystem;
  const fs::path root(dir);

  Graph g;
  {
    auto in = detail::open_or_throw(root / "meta.json");
    nlohmann::json meta;
    try {
      in >> meta;
    } catch (const std::exception& e) {
      throw std::runtime_error("meta.json: parse error: " + std::string(e.what()));
    }
    if (!meta.contains("n") || !meta.contains("num_classes") || !meta.contains("attr_dim"))
      throw std::runtime_error("meta.json: requires n, num_classes, attr_dim");
    g.n = meta["n"].get<int>();
    g.num_classes = meta["num_classes"].get<int>();
    g.attr_dim = meta["attr_dim"].get<int>();
    if (g.n <= 0 || g.num_classes <= 0 || g.attr_dim <= 0)
      throw std::runtime_error("meta.json: n, num_classes, attr_dim must be positive");
  }

  {
    auto in = detail::open_or_throw(root / "edges.csv");
    detail::expect_header(in, "src,dst", "edges.csv");
    std::vector<std::pair<int, int>> edges;
    std::string line;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
      ++lineno;
      line = detail::chomp(line);
      if (line.empty()) continue;
      const auto fields = detail::split_csv_line(line);
      if (fields.size() != 2)
        throw std::runtime_error("edges.csv:" + std::to_string(lineno) +
                                 ": expected 'src,dst'");
      const std::string ctx = "edges.csv:" + std::to_string(lineno);
      edges.emplace_back(static_cast<int>(detail::parse_int(fields[0], ctx)),
                         static_cast<int>(detail::parse_int(fields[1], ctx)));
    }
    SymmetrizeStats stats;
    g.adjacency = build_symmetric_adjacency(static_cast<std::size_t>(g.n), edges, &stats);
    if (stats.self_loops_dropped > 0)
      std::cerr << "warning: edges.csv: dropped " << stats.self_loops_dropped
                << " self-loop edge(s)\n";
  }

  {
    auto in = detail::open_or_throw(root / "features.csv");
    g.features = Matrix(static_cast<std::size_t>(g.n), static_cast<std::size_t>(g.attr_dim));
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
      line = detail::chomp(line);
      if (line.empty()) continue;
      if (row >= static_cast<std::size_t>(g.n))
        throw std::runtime_error("features.csv: expected " + std::to_string(g.n) +
                                 " rows, found more");
      const auto fields = detail::split_csv_line(line);
      if (fields.size() != static_cast<std::size_t>(g.attr_dim))
        throw std::runtime_error("features.csv: row " + std::to_string(row) + " has " +
                                 std::to_string(fields.size()) + " fields, expected " +
                                 std::to_string(g.attr_dim));
      for (std::size_t j = 0; j < fields.size(); ++j) {
        const double v =
            detail::parse_double(fields[j], "features.csv row " + std::to_string(row));
        if (!std::isfinite(v))
          throw std::runtime_error("features.csv: non-finite value at row " +
                                   std::to_string(row) + ", column " + std::to_string(j));
        g.features(row, j) = v;
      }
      ++row;
    }
    if (row != static_cast<std::size_t>(g.n))
      throw std::runtime_error("features.csv: expected " + std::to_string(g.n) +
                               " rows, got " + std::to_string(row));
  }

  {
    auto in = detail::open_or_throw(root / "labels.csv");
    detail::expect_header(in, "node,class", "labels.csv");
    g.class_labels.assign(static_cast<std::size_t>(g.n), -1);
    std::string line;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
      ++lineno;
      line = detail::chomp(line);
      if (line.empty()) continue;
      const auto fields = detail::split_csv_line(line);
      const std::string ctx = "labels.csv:" + std::to_string(lineno);
      if (fields.size() != 2) throw std::runtime_error(ctx + ": expected 'node,class'");
      const long node = detail::parse_int(fields[0], ctx);
      const long cls = detail::parse_int(fields[1], ctx);
      if (node < 0 || node >= g.n)
        throw std::runtime_error(ctx + ": node id " + std::to_string(node) +
                                 " out of range for n=" + std::to_string(g.n));
      if (cls < 0 || cls >= g.num_classes)
        throw std::runtime_error(ctx + ": class " + std::to_string(cls) +
                                 " out of range [0," + std::to_string(g.num_classes) + ")");
      if (g.class_labels[static_cast<std::size_t>(node)] != -1)
        throw std::runtime_error(ctx + ": duplicate label for node " + std::to_string(node));
      g.class_labels[static_cast<std::size_t>(node)] = static_cast<int>(cls);
    }
  }

  if (std::filesystem::exists(root / "anomalies.csv")) {
    auto in = detail::open_or_throw(root / "anomalies.csv");
    detail::expect_header(in, "node,is_anomaly,kind", "anomalies.csv");
    g.anomaly_labels.assign(static_cast<std::size_t>(g.n), 0);
    g.anomaly_kinds.assign(static_cast<std::size_t>(g.n), AnomalyKind::none);
    std::string line;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
      ++lineno;
      line = detail::chomp(line);
      if (line.empty()) continue;
      const auto fields = detail::split_csv_line(line);
      const std::string ctx = "anomalies.csv:" + std::to_string(lineno);
      if (fields.size() != 3)
        throw std::runtime_error(ctx + ": expected 'node,is_anomaly,kind'");
      const long node = detail::parse_int(fields[0], ctx);
      const long flag = detail::parse_int(fields[1], ctx);
      if (node < 0 || node >= g.n)
        throw std::runtime_error(ctx + ": node id out of range");
      if (flag != 0 && flag != 1)
        throw std::runtime_error(ctx + ": is_anomaly must be 0 or 1");
      g.anomaly_labels[static_cast<std::size_t>(node)] = static_cast<std::uint8_t>(flag);
      AnomalyKind kind = AnomalyKind::none;
      if (fields[2] == "structural") kind = AnomalyKind::structural;
      else if (fields[2] == "contextual") kind = AnomalyKind::contextual;
      else if (fields[2] != "none")
        throw std::runtime_error(ctx + ": unknown anomaly kind '" + fields[2] + "'");
      g.anomaly_kinds[static_cast<std::size_t>(node)] = kind;
    }
  }

  g.validate();
  return g;
}

inline void save_dataset(const Graph& g, const std::string& dir) {
  namespace fs = std::filesystem;
  const fs::path root(dir);
  fs::create_directories(root);

  {
    nlohmann::json meta;
    meta["n"] = g.n;
    meta["num_classes"] = g.num_classes;
    meta["attr_dim"] = g.attr_dim;
    std::ofstream out(root / "meta.json");
    out << meta.dump(2) << "\n";
  }
  {
    std::ofstream out(root / "edges.csv");
    out << "src,dst\n";
    for (const auto& [u, v] : to_undirected_edges(g.adjacency))
      out << u << "," << v << "\n";
  }
  {
    std::ofstream out(root / "features.csv");
    char buf[32];
    for (std::size_t i = 0; i < g.features.rows; ++i) {
      const double* row = g.features.row(i);
      for (std::size_t j = 0; j < g.features.cols; ++j) {
        const int len = std::snprintf(buf, sizeof(buf), "%.17g", row[j]);
        if (j) out << ',';
        out.write(buf, len);
      }
      out << "\n";
    }
  }
  {
    std::ofstream out(root / "labels.csv");
    out << "node,class\n";
    for (int v = 0; v < g.n; ++v)
      if (g.class_labels[static_cast<std::size_t>(v)] >= 0)
        out << v << "," << g.class_labels[static_cast<std::size_t>(v)] << "\n";
  }
  if (g.has_anomaly_labels()) {
    std::ofstream out(root / "anomalies.csv");
    out << "node,is_anomaly,kind\n";
    for (int v = 0; v < g.n; ++v) {
      if (!g.anomaly_labels[static_cast<std::size_t>(v)]) continue;
      const AnomalyKind kind = g.anomaly_kinds.empty()
                                   ? AnomalyKind::none
                                   : g.anomaly_kinds[static_cast<std::size_t>(v)];
      out << v << ",1," << to_string(kind) << "\n";
    }
  }
}

}  // namespace magad
