#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "magad/core.hpp"

using namespace magad;

TEST_CASE("znorm maps (1,2,3) to +-sqrt(3/2)") {
  const Vec z = znorm({1.0, 2.0, 3.0});
  CHECK(z[0] == doctest::Approx(-1.224745).epsilon(1e-5));
  CHECK(z[1] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(z[2] == doctest::Approx(1.224745).epsilon(1e-5));
}

TEST_CASE("znorm of a constant vector is all zeros") {
  for (double v : znorm({4.2, 4.2, 4.2, 4.2})) CHECK(v == 0.0);
}

TEST_CASE("znorm output has zero mean and unit population std") {
  Rng rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    Vec x(50);
    for (double& v : x) v = rng.normal() * 3.0 + 1.0;
    const Vec z = znorm(x);
    double mean = 0.0, var = 0.0;
    for (double v : z) mean += v;
    mean /= static_cast<double>(z.size());
    for (double v : z) var += (v - mean) * (v - mean);
    var /= static_cast<double>(z.size());
    CHECK(std::abs(mean) < 1e-9);
    CHECK(std::abs(std::sqrt(var) - 1.0) < 1e-9);
  }
}

TEST_CASE("rng streams are deterministic and forks are independent") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.raw() == b.raw());

  Rng base(42);
  Rng f1 = base.fork(1);
  Rng f1_again = Rng(42).fork(1);
  Rng f2 = base.fork(2);
  CHECK(f1.raw() == f1_again.raw());
  CHECK(f1.fork(3).raw() != f2.raw());
}

TEST_CASE("rng sample draws distinct pool elements") {
  Rng rng(7);
  std::vector<int> pool;
  for (int i = 0; i < 30; ++i) pool.push_back(i * 2);
  const auto picked = rng.sample(pool, 12);
  CHECK(picked.size() == 12);
  std::vector<int> sorted = picked;
  std::sort(sorted.begin(), sorted.end());
  CHECK(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end());
  for (int v : picked) CHECK(std::find(pool.begin(), pool.end(), v) != pool.end());
  CHECK_THROWS(rng.sample(pool, 31));
}

TEST_CASE("rng normal has roughly standard moments") {
  Rng rng(5);
  double sum = 0.0, sq = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double v = rng.normal();
    sum += v;
    sq += v * v;
  }
  const double mean = sum / n;
  const double var = sq / n - mean * mean;
  CHECK(std::abs(mean) < 0.03);
  CHECK(std::abs(var - 1.0) < 0.05);
}

TEST_CASE("matmul agrees with a scalar triple loop") {
  Rng rng(3);
  Matrix a(5, 7), b(7, 4);
  for (double& v : a.data) v = rng.normal();
  for (double& v : b.data) v = rng.normal();
  const Matrix c = matmul(a, b);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t j = 0; j < b.cols; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < a.cols; ++k) acc += a(i, k) * b(k, j);
      CHECK(c(i, j) == doctest::Approx(acc).epsilon(1e-12));
    }
}

TEST_CASE("transpose helpers match explicit transposition") {
  Rng rng(13);
  Matrix a(6, 3), b(6, 5);
  for (double& v : a.data) v = rng.normal();
  for (double& v : b.data) v = rng.normal();
  const Matrix atb = transpose_matmul(a, b);
  REQUIRE(atb.rows == 3);
  REQUIRE(atb.cols == 5);
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t c = 0; c < 5; ++c) {
      double acc = 0.0;
      for (std::size_t i = 0; i < 6; ++i) acc += a(i, r) * b(i, c);
      CHECK(atb(r, c) == doctest::Approx(acc).epsilon(1e-12));
    }

  Matrix d(4, 3);
  for (double& v : d.data) v = rng.normal();
  const Matrix abt = matmul_transposed_b(a, d);  // 6x3 * (4x3)^T
  REQUIRE(abt.rows == 6);
  REQUIRE(abt.cols == 4);
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 4; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < 3; ++k) acc += a(i, k) * d(j, k);
      CHECK(abt(i, j) == doctest::Approx(acc).epsilon(1e-12));
    }
}

TEST_CASE("xlogx handles the zero limit") {
  CHECK(xlogx(0.0) == 0.0);
  CHECK(xlogx(1.0) == 0.0);
  CHECK(xlogx(0.5) == doctest::Approx(0.5 * std::log(0.5)));
}
