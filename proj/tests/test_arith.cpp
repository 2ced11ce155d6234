#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "iwalab/arith.hpp"

using namespace iwalab;

namespace {

// independent oracle: plain no-pivoting rational row reduction
long oracle_rank(QMat m) {
  long r = 0;
  for (long c = 0; c < m.cols() && r < m.rows(); ++c) {
    long piv = -1;
    for (long i = r; i < m.rows(); ++i)
      if (m.at(i, c) != 0) {
        piv = i;
        break;
      }
    if (piv < 0) continue;
    for (long j = 0; j < m.cols(); ++j) std::swap(m.at(r, j), m.at(piv, j));
    for (long i = 0; i < m.rows(); ++i) {
      if (i == r || m.at(i, c) == 0) continue;
      Rat f = m.at(i, c) / m.at(r, c);
      for (long j = 0; j < m.cols(); ++j) m.at(i, j) -= f * m.at(r, j);
    }
    ++r;
  }
  return r;
}

Rat rat(long n, long d) {
  Rat r(n, d);
  r.canonicalize();
  return r;
}

QMat random_matrix(std::mt19937_64& rng, long rows, long cols, long span) {
  QMat m(rows, cols);
  std::uniform_int_distribution<long> num(-span, span);
  std::uniform_int_distribution<long> den(1, 4);
  for (long i = 0; i < rows; ++i)
    for (long j = 0; j < cols; ++j) m.at(i, j) = rat(num(rng), den(rng));
  return m;
}

}  // namespace

TEST_CASE("kernel: identity and zero") {
  CHECK(kernel(QMat::identity(3)).empty());
  QMat z(2, 2);
  CHECK(kernel(z).size() == 2);
}

TEST_CASE("kernel vectors satisfy m v = 0 and pair to zero with rows") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 30; ++trial) {
    QMat m = random_matrix(rng, 4, 6, 5);
    auto ker = kernel(m);
    CHECK(static_cast<long>(ker.size()) == 6 - oracle_rank(m));
    for (const auto& v : ker) {
      auto mv = mat_vec(m, v);
      for (const auto& x : mv) CHECK(x == 0);
    }
  }
}

TEST_CASE("eigenspace on diagonal matrices") {
  QMat d(2, 2);
  d.at(0, 0) = 1;
  d.at(1, 1) = 2;
  CHECK(eigenspace(d, Rat(2)).size() == 1);
  CHECK(eigenspace(d, Rat(3)).empty());
}

TEST_CASE("charpoly basics") {
  QMat d = QMat::identity(2);
  auto cp = charpoly(d);  // (x-1)^2 = x^2 - 2x + 1
  REQUIRE(cp.size() == 3);
  CHECK(cp[0] == 1);
  CHECK(cp[1] == -2);
  CHECK(cp[2] == 1);

  QMat z(1, 1);
  auto cz = charpoly(z);
  REQUIRE(cz.size() == 2);
  CHECK(cz[0] == 0);
  CHECK(cz[1] == 1);
}

TEST_CASE("Cayley-Hamilton for random 4x4 rational matrices") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    QMat m = random_matrix(rng, 4, 4, 4);
    auto cp = charpoly(m);
    QMat acc(4, 4);
    for (long i = 0; i < 4; ++i) acc.at(i, i) = cp[4];
    for (long d = 3; d >= 0; --d) {
      acc = acc * m;
      for (long i = 0; i < 4; ++i) acc.at(i, i) += cp[d];
    }
    CHECK(acc.is_zero());
  }
}

TEST_CASE("solve round-trip on 100 random systems") {
  std::mt19937_64 rng(13);
  int solved = 0;
  for (int trial = 0; trial < 100; ++trial) {
    QMat m = random_matrix(rng, 4, 4, 6);
    std::vector<Rat> x0(4);
    std::uniform_int_distribution<long> num(-5, 5);
    for (auto& x : x0) x = rat(num(rng), 1 + (trial % 4));
    auto b = mat_vec(m, x0);
    auto x = solve(m, b);
    REQUIRE(x.has_value());
    auto b2 = mat_vec(m, *x);
    for (long i = 0; i < 4; ++i) CHECK(b2[i] == b[i]);
    ++solved;
  }
  CHECK(solved == 100);
}

TEST_CASE("vp on integers and rationals") {
  CHECK(vp(Int(45), Int(3)) == 2);
  CHECK(vp(Rat(9, 5), Int(5)) == -1);
  CHECK(vp(Rat(0), Int(5), 99) == 99);
}
