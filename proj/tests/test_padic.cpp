#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "iwalab/cyclo.hpp"
#include "iwalab/series.hpp"

using namespace iwalab;

namespace {

LambdaSeries from_ints(long p, long M, std::vector<long> cs, long lvl = 0) {
  LambdaSeries s(p, M, cs.size(), lvl);
  Int q = pow_ui(p, M);
  for (size_t j = 0; j < cs.size(); ++j) {
    Int v = Int(cs[j]) % q;
    if (v < 0) v += q;
    s.c[j] = v;
  }
  return s;
}

// exhaustive discrete log oracle: find e with gamma^e = u mod p^M
Int dlog_oracle(const Zq& u, long p, long M) {
  PrimePow mod(p, M);
  Zq g(1 + p, mod), acc(1, mod);
  Int bound = pow_ui(p, M - 1);
  for (Int e = 0; e < bound; e += 1) {
    if (acc == u) return e;
    acc *= g;
  }
  throw std::runtime_error("dlog_oracle: not a 1-unit power");
}

}  // namespace

TEST_CASE("residue arithmetic and teichmuller") {
  PrimePow mod(5, 3);
  Zq x(7, mod);
  CHECK(x.is_unit());
  CHECK((x * x.inverse()).value() == 1);
  Zq t = x.teichmuller();
  CHECK(t.pow(4).value() == 1);
  CHECK((t.value() - 7) % 5 == 0);
  // spec example: teich(7) = 7 mod 25
  CHECK(t.value() % 25 == 7);
}

TEST_CASE("decompose: trivial cases") {
  auto d1 = decompose(Int(1), 5, 4);
  CHECK(d1.teich.value() == 1);
  CHECK(d1.exponent.is_zero());
  CHECK(!d1.wild_valuation.has_value());  // n = infinity

  auto dg = decompose(Int(6), 5, 4);  // gamma = 1 + p
  CHECK(dg.teich.value() == 1);
  CHECK(dg.exponent.value() == 1);
  CHECK(dg.wild_valuation == 0);

  CHECK_THROWS_AS(decompose(Int(10), 5, 3), std::domain_error);
}

TEST_CASE("decompose x = 7, p = 5, M = 3") {
  auto d = decompose(Int(7), 5, 3);
  CHECK(d.teich.value() % 25 == 7);
  CHECK(d.wild_valuation == 1);
  Zq rec = d.teich * d.one_unit_part();
  CHECK(rec.value() == 7);
}

TEST_CASE("decompose round-trips for 100 random units at p in {5, 11}") {
  std::mt19937_64 rng(2024);
  for (long p : {5L, 11L}) {
    long M = 4;
    PrimePow mod(p, M);
    std::uniform_int_distribution<long> pick(2, 100000);
    for (int t = 0; t < 100; ++t) {
      long x = pick(rng);
      if (x % p == 0) continue;
      auto d = decompose(Int(x), p, M);
      Zq rec = d.teich * d.one_unit_part();
      CHECK(rec.value() == Zq(x, mod).value());
    }
  }
}

TEST_CASE("discrete log agrees with exhaustive oracle for M <= 3") {
  for (long p : {5L, 11L}) {
    for (long M : {2L, 3L}) {
      for (long x = 2; x < 40; ++x) {
        if (x % p == 0) continue;
        auto d = decompose(Int(x), p, M);
        PrimePow mod(p, M);
        Zq u = Zq(x, mod) * d.teich.inverse();
        CHECK(d.exponent.value() == dlog_oracle(u, p, M));
      }
    }
  }
}

TEST_CASE("wild_valuation_exact matches decompose") {
  CHECK(wild_valuation_exact(7, 5) == 1);
  CHECK(wild_valuation_exact(1321, 11) == 0);
  CHECK(wild_valuation_exact(2, 5) == 0);
  for (long ell : {3L, 7L, 13L, 101L}) {
    auto d = decompose(Int(ell), 11, 5);
    if (d.wild_valuation) CHECK(*d.wild_valuation == wild_valuation_exact(ell, 11));
  }
}

TEST_CASE("content") {
  auto s = from_ints(5, 3, {3, 0, 1});
  CHECK(content(s).first == 0);
  auto t = from_ints(5, 3, {5, 5, 10});
  CHECK(content(t).first == 1);
  auto z = from_ints(5, 3, {0, 0});
  CHECK(content(z).first == 3);
  CHECK(content(z).second);  // capped: undetermined
}

TEST_CASE("invariants: spec examples") {
  // 3 + 5T + T^2 at p=5 -> mu 0, lambda 0
  auto a = invariants(from_ints(5, 3, {3, 5, 1}));
  CHECK(a.mu == 0);
  CHECK(a.lambda == 0);
  CHECK(a.certified);

  // 5 + 25T + T^3 + T^4 at p=5 -> mu 0, lambda 3
  auto b = invariants(from_ints(5, 3, {5, 25, 0, 1, 1}));
  CHECK(b.mu == 0);
  CHECK(b.lambda == 3);

  auto c = invariants(from_ints(5, 3, {5, 5}));
  CHECK(c.mu == 1);
  CHECK(c.lambda == 0);

  // no unit coefficient at all: undetermined, never a guess
  auto e = invariants(from_ints(5, 3, {0, 0, 0}));
  CHECK(!e.mu.has_value());
  CHECK(!e.certified);
}

TEST_CASE("invariants: truncation-boundary certification") {
  // source_level 2 at p = 5: faithful degrees < 5, certified needs lambda < 4
  auto s = from_ints(5, 2, {0, 0, 0, 0, 1}, 2);
  auto r = invariants(s);
  CHECK(r.lambda == 4);
  CHECK(!r.certified);
}

TEST_CASE("multiply basics and lambda additivity") {
  auto a = from_ints(5, 3, {2, 1, 0, 0, 0, 0});
  auto one = from_ints(5, 3, {1, 0, 0, 0, 0, 0});
  CHECK(multiply(a, one) == a);

  auto t = from_ints(5, 3, {0, 1, 0, 0, 0, 0});
  auto t2 = multiply(t, t);
  CHECK(t2.c[2] == 1);
  CHECK(t2.c[1] == 0);

  // lambda(a b) = lambda(a) + lambda(b) on random unit-content pairs
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<long> lam(0, 3), coef(0, 124);
  for (int trial = 0; trial < 50; ++trial) {
    long la = lam(rng), lb = lam(rng);
    LambdaSeries A(5, 3, 12), B(5, 3, 12);
    for (long j = 0; j < 12; ++j) {
      long ca = coef(rng), cb = coef(rng);
      A.c[j] = (j < la) ? 5 * (ca % 25) : (j == la ? 1 + 5 * (ca % 24) : ca);
      B.c[j] = (j < lb) ? 5 * (cb % 25) : (j == lb ? 1 + 5 * (cb % 24) : cb);
    }
    auto ia = invariants(A), ib = invariants(B), iab = invariants(multiply(A, B));
    REQUIRE(ia.lambda == la);
    REQUIRE(ib.lambda == lb);
    CHECK(iab.mu == 0);
    CHECK(iab.lambda == la + lb);
  }
}

TEST_CASE("unit-multiplication invariance of (mu, lambda)") {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<long> coef(0, 124), lam(0, 4), muv(0, 1);
  for (int trial = 0; trial < 50; ++trial) {
    LambdaSeries U(5, 3, 16), S(5, 3, 16);
    U.c[0] = 1 + 5 * (coef(rng) % 24);
    for (long j = 1; j < 16; ++j) U.c[j] = coef(rng);
    long mu = muv(rng), la = lam(rng);
    Int pmu = pow_ui(5, mu);
    for (long j = 0; j < 16; ++j) {
      long c = coef(rng);
      Int v = (j < la) ? Int(5 * (c % 25)) : (j == la ? Int(1 + 5 * (c % 24)) : Int(c));
      S.c[j] = (v * pmu) % 125;
    }
    auto is = invariants(S), ius = invariants(multiply(U, S));
    CHECK(is.mu == ius.mu);
    CHECK(is.lambda == ius.lambda);
  }
}

TEST_CASE("content additivity under multiplication") {
  std::mt19937_64 rng(23);
  std::uniform_int_distribution<long> coef(1, 124), muv(0, 1);
  for (int trial = 0; trial < 40; ++trial) {
    LambdaSeries A(5, 3, 10), B(5, 3, 10);
    long ma = muv(rng), mb = muv(rng);
    for (long j = 0; j < 10; ++j) {
      A.c[j] = (pow_ui(5, ma) * coef(rng)) % 125;
      B.c[j] = (pow_ui(5, mb) * coef(rng)) % 125;
    }
    A.c[0] = pow_ui(5, ma).get_si();
    B.c[0] = pow_ui(5, mb).get_si();
    auto ca = content(A), cb = content(B), cab = content(multiply(A, B));
    if (ca.first + cb.first < 3) CHECK(cab.first == ca.first + cb.first);
  }
}

TEST_CASE("binomial_power: trivial and Lucas cases") {
  long p = 5, M = 2, D = 8;
  long prec = binomial_exponent_precision(p, M, D);
  PrimePow emod(p, prec);
  auto zero = binomial_power(Zq(0, emod), D, M);
  CHECK(zero.c[0] == 1);
  for (long j = 1; j < D; ++j) CHECK(zero.c[j] == 0);

  auto one = binomial_power(Zq(1, emod), D, M);
  CHECK(one.c[0] == 1);
  CHECK(one.c[1] == 1);
  CHECK(one.c[2] == 0);

  // (1+T)^5 mod 5 = 1 + T^5
  auto five = binomial_power(Zq(5, PrimePow(p, binomial_exponent_precision(p, 1, D))), D, 1);
  std::vector<long> expect = {1, 0, 0, 0, 0, 1, 0, 0};
  for (long j = 0; j < D; ++j) CHECK(five.c[j] == expect[j]);
}

TEST_CASE("binomial_power is a homomorphism in the exponent") {
  long p = 5, M = 2, D = 10;
  long prec = binomial_exponent_precision(p, M, D);
  PrimePow emod(p, prec);
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<long> pick(0, 3000);
  for (int t = 0; t < 25; ++t) {
    Zq e1(pick(rng), emod), e2(pick(rng), emod);
    auto lhs = binomial_power(e1 + e2, D, M);
    auto rhs = multiply(binomial_power(e1, D, M), binomial_power(e2, D, M));
    CHECK(lhs.c == rhs.c);
  }
}

TEST_CASE("evaluate_at_character") {
  auto t = from_ints(5, 3, {0, 1});
  CHECK(evaluate_at_character(t, Zq(0, PrimePow(5, 3))).is_zero());
  auto s = from_ints(5, 3, {1, 1});
  CHECK(evaluate_at_character(s, Zq(5, PrimePow(5, 3))).value() == 6);
  CHECK_THROWS_AS(evaluate_at_character(s, Zq(2, PrimePow(5, 3))), std::domain_error);
}
