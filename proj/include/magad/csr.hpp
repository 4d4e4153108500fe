#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "magad/core.hpp"

namespace magad {

/// Square sparse matrix in compressed sparse row form. Used for adjacency
/// matrices (values all 1) and their normalized variants.
struct Csr {
  std::size_t n = 0;
  std::vector<std::size_t> indptr;  // size n + 1
  std::vector<int> indices;
  std::vector<double> values;

  std::size_t nnz() const { return indices.size(); }
  std::size_t row_size(std::size_t i) const { return indptr[i + 1] - indptr[i]; }

  std::span<const int> row_indices(std::size_t i) const {
    return {indices.data() + indptr[i], row_size(i)};
  }
  std::span<const double> row_values(std::size_t i) const {
    return {values.data() + indptr[i], row_size(i)};
  }

  bool has_edge(int u, int v) const {
    const auto r = row_indices(static_cast<std::size_t>(u));
    return std::binary_search(r.begin(), r.end(), v);
  }
};

struct SymmetrizeStats {
  std::size_t self_loops_dropped = 0;
  std::size_t duplicates_dropped = 0;
};

/// Build a symmetric binary adjacency matrix from an undirected edge list.
/// Self-loops are dropped, duplicate edges collapsed, and both orientations
/// stored. Column indices come out sorted per row.
inline Csr build_symmetric_adjacency(std::size_t n,
                                     const std::vector<std::pair<int, int>>& edges,
                                     SymmetrizeStats* stats = nullptr) {
  SymmetrizeStats local;
  std::vector<std::pair<int, int>> directed;
  directed.reserve(edges.size() * 2);
  for (const auto& [u, v] : edges) {
    if (u < 0 || v < 0 || static_cast<std::size_t>(u) >= n ||
        static_cast<std::size_t>(v) >= n) {
      throw std::out_of_range("edge (" + std::to_string(u) + "," + std::to_string(v) +
                              ") out of range for n=" + std::to_string(n));
    }
    if (u == v) {
      ++local.self_loops_dropped;
      continue;
    }
    directed.emplace_back(u, v);
    directed.emplace_back(v, u);
  }
  std::sort(directed.begin(), directed.end());
  const auto last = std::unique(directed.begin(), directed.end());
  local.duplicates_dropped = static_cast<std::size_t>(directed.end() - last) / 2;
  directed.erase(last, directed.end());

  Csr out;
  out.n = n;
  out.indptr.assign(n + 1, 0);
  for (const auto& [u, v] : directed) out.indptr[static_cast<std::size_t>(u) + 1]++;
  for (std::size_t i = 0; i < n; ++i) out.indptr[i + 1] += out.indptr[i];
  out.indices.reserve(directed.size());
  for (const auto& [u, v] : directed) out.indices.push_back(v);
  out.values.assign(directed.size(), 1.0);
  if (stats) *stats = local;
  return out;
}

/// out = a * b for sparse a and dense b.
inline Matrix spmm(const Csr& a, const Matrix& b) {
  if (a.n != b.rows) throw std::invalid_argument("spmm: dimension mismatch");
  Matrix out(a.n, b.cols, 0.0);
  for (std::size_t i = 0; i < a.n; ++i) {
    double* orow = out.row(i);
    for (std::size_t k = a.indptr[i]; k < a.indptr[i + 1]; ++k) {
      const double v = a.values[k];
      const double* brow = b.row(static_cast<std::size_t>(a.indices[k]));
      for (std::size_t j = 0; j < b.cols; ++j) orow[j] += v * brow[j];
    }
  }
  return out;
}

/// Undirected edge list (i < j) of a symmetric zero-diagonal matrix.
inline std::vector<std::pair<int, int>> to_undirected_edges(const Csr& a) {
  std::vector<std::pair<int, int>> out;
  out.reserve(a.nnz() / 2);
  for (std::size_t i = 0; i < a.n; ++i) {
    for (int j : a.row_indices(i)) {
      if (j > static_cast<int>(i)) out.emplace_back(static_cast<int>(i), j);
    }
  }
  return out;
}

}  // namespace magad
