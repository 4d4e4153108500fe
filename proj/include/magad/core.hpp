#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace magad {

using Vec = std::vector<double>;

/// Row-major dense matrix of doubles.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

  double* row(std::size_t i) { return data.data() + i * cols; }
  const double* row(std::size_t i) const { return data.data() + i * cols; }

  bool same_shape(const Matrix& o) const { return rows == o.rows && cols == o.cols; }

  void fill(double v) { std::fill(data.begin(), data.end(), v); }
};

// c = a * b
inline void matmul_into(const Matrix& a, const Matrix& b, Matrix& c) {
  if (a.cols != b.rows) throw std::invalid_argument("matmul: inner dimensions differ");
  c.rows = a.rows;
  c.cols = b.cols;
  c.data.assign(a.rows * b.cols, 0.0);
  for (std::size_t i = 0; i < a.rows; ++i) {
    double* crow = c.row(i);
    const double* arow = a.row(i);
    for (std::size_t k = 0; k < a.cols; ++k) {
      const double aik = arow[k];
      const double* brow = b.row(k);
      for (std::size_t j = 0; j < b.cols; ++j) crow[j] += aik * brow[j];
    }
  }
}

inline Matrix matmul(const Matrix& a, const Matrix& b) {
  Matrix c;
  matmul_into(a, b, c);
  return c;
}

// a^T * b where a is n x r and b is n x c; result r x c.
inline Matrix transpose_matmul(const Matrix& a, const Matrix& b) {
  if (a.rows != b.rows) throw std::invalid_argument("transpose_matmul: row counts differ");
  Matrix out(a.cols, b.cols, 0.0);
  for (std::size_t i = 0; i < a.rows; ++i) {
    const double* arow = a.row(i);
    const double* brow = b.row(i);
    for (std::size_t r = 0; r < a.cols; ++r) {
      const double coef = arow[r];
      if (coef == 0.0) continue;
      double* orow = out.row(r);
      for (std::size_t c = 0; c < b.cols; ++c) orow[c] += coef * brow[c];
    }
  }
  return out;
}

// a * b^T where a is n x c and b is m x c; result n x m.
inline Matrix matmul_transposed_b(const Matrix& a, const Matrix& b) {
  if (a.cols != b.cols) throw std::invalid_argument("matmul_transposed_b: col counts differ");
  Matrix out(a.rows, b.rows, 0.0);
  for (std::size_t i = 0; i < a.rows; ++i) {
    const double* arow = a.row(i);
    double* orow = out.row(i);
    for (std::size_t j = 0; j < b.rows; ++j) {
      const double* brow = b.row(j);
      double acc = 0.0;
      for (std::size_t k = 0; k < a.cols; ++k) acc += arow[k] * brow[k];
      orow[j] = acc;
    }
  }
  return out;
}

inline double squared_l2_distance(const double* x, const double* y, std::size_t k) {
  double acc = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double d = x[i] - y[i];
    acc += d * d;
  }
  return acc;
}

inline double l2_distance(const double* x, const double* y, std::size_t k) {
  return std::sqrt(squared_l2_distance(x, y, k));
}

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Derive an independent stream seed from a base seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t s = seed ^ (0x9E3779B97F4A7C15ull * (stream + 1));
  return splitmix64(s);
}

/// Seeded random source. All draws go through explicit samplers (no
/// std::*_distribution) so sequences are identical across platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), gen_(seed) {}

  std::uint64_t raw() { return gen_(); }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  /// Standard normal via Box-Muller.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  /// Uniform index in [0, n). Modulo bias is negligible for n << 2^64.
  std::size_t index(std::size_t n) {
    if (n == 0) throw std::invalid_argument("Rng::index: n must be positive");
    return static_cast<std::size_t>(gen_() % n);
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[index(i)]);
    }
  }

  /// k distinct elements drawn uniformly without replacement, in draw order.
  std::vector<int> sample(const std::vector<int>& pool, std::size_t k) {
    if (k > pool.size())
      throw std::invalid_argument("Rng::sample: k exceeds pool size");
    std::vector<int> work = pool;
    std::vector<int> out;
    out.reserve(k);
    std::size_t remaining = work.size();
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t j = index(remaining);
      out.push_back(work[j]);
      work[j] = work[remaining - 1];
      --remaining;
    }
    return out;
  }

  /// Independent sub-stream derived from the original seed (not the current
  /// generator position).
  Rng fork(std::uint64_t stream) const { return Rng(mix_seed(seed_, stream)); }

 private:
  std::uint64_t seed_;
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

/// z-score with population standard deviation; an (almost) constant input
/// maps to all zeros instead of dividing by a vanishing sigma.
inline Vec znorm(const Vec& x) {
  Vec out(x.size(), 0.0);
  if (x.empty()) return out;
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  double var = 0.0;
  for (double v : x) var += (v - mean) * (v - mean);
  var /= static_cast<double>(x.size());
  const double sd = std::sqrt(var);
  if (sd < 1e-12) return out;
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = (x[i] - mean) / sd;
  return out;
}

/// x * ln(x) with the 0 * ln(0) := 0 convention.
inline double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

inline Vec gather(const Vec& x, const std::vector<int>& ids) {
  Vec out;
  out.reserve(ids.size());
  for (int id : ids) out.push_back(x[static_cast<std::size_t>(id)]);
  return out;
}

}  // namespace magad
