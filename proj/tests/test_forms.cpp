#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "iwalab/descriptor.hpp"
#include "iwalab/forms.hpp"

using namespace iwalab;

namespace {

EllipticCurveW x0_11() {
  EllipticCurveW E;
  E.a2 = -1;
  E.a3 = 1;
  E.a4 = -10;
  E.a6 = -20;
  E.conductor = 11;
  return E;
}

EllipticCurveW e1_52() {
  EllipticCurveW E;
  E.a4 = 1;
  E.a6 = -10;
  E.conductor = 52;
  return E;
}

EllipticCurveW e2_364() {
  EllipticCurveW E;
  E.a4 = -584;
  E.a6 = 5444;
  E.conductor = 364;
  return E;
}

// independent tau oracle: expand q prod (1 - q^n)^24 directly
std::vector<Int> tau_oracle(long cap) {
  std::vector<Int> f(cap + 1, Int(0));
  f[0] = 1;
  for (long n = 1; n <= cap; ++n) {
    for (int rep = 0; rep < 24; ++rep) {
      // multiply by (1 - q^n)
      for (long j = cap; j >= n; --j) f[j] -= f[j - n];
    }
  }
  std::vector<Int> t(cap + 2, Int(0));
  for (long j = 0; j + 1 <= cap + 1 && j <= cap; ++j) t[j + 1] = f[j];
  return t;
}

}  // namespace

TEST_CASE("ap_curve: known eigenvalues of X_0(11)") {
  auto E = x0_11();
  CHECK(ap_curve(E, 2) == -2);
  CHECK(ap_curve(E, 3) == -1);
  CHECK(ap_curve(E, 5) == 1);
  CHECK(ap_curve(E, 7) == -2);
  CHECK(ap_curve(E, 13) == 4);
  // split multiplicative at 11
  CHECK(ap_curve(E, 11) == 1);
}

TEST_CASE("ap_curve: reduction types of the Greenberg-Vatsal pair") {
  auto E1 = e1_52(), E2 = e2_364();
  CHECK(ap_curve(E1, 2) == 0);  // additive, 2^2 | 52
  CHECK(ap_curve(E2, 2) == 0);
  long a7 = ap_curve(E1, 7);
  CHECK(std::abs(a7) <= 5);      // Hasse
  CHECK(((a7 % 5) + 5) % 5 == 3);  // a_7(E1) = 3 mod 5 (condition (1), i = 0)
  CHECK(a7 == -2);
  // E2 is multiplicative at 7 and 13; E1 multiplicative at 13
  CHECK(std::abs(ap_curve(E2, 7)) == 1);
  CHECK(std::abs(ap_curve(E2, 13)) == 1);
  CHECK(ap_curve(E1, 13) == ap_curve(E2, 13));
  CHECK(ap_curve(E1, 5) == 2);  // ordinary at 5
}

TEST_CASE("Hasse bound for good primes") {
  auto E = e1_52();
  for (long q : primes_up_to(100)) {
    if (52 % q == 0) continue;
    long a = ap_curve(E, q);
    CHECK(Int(a) * a <= 4 * q);
  }
}

TEST_CASE("multiplicativity of a_n") {
  auto E = x0_11();
  for (long m : {2L, 3L, 5L, 9L, 11L}) {
    for (long n : {7L, 13L, 25L}) {
      if (std::gcd(m, n) != 1) continue;
      CHECK(an_curve(E, Int(m * n)) == an_curve(E, Int(m)) * an_curve(E, Int(n)));
    }
  }
  // a_{q^2} = a_q^2 - q for good q
  Int a3 = an_curve(E, Int(3));
  CHECK(an_curve(E, Int(9)) == a3 * a3 - 3);
}

TEST_CASE("tau: seed values against the direct product expansion") {
  auto oracle = tau_oracle(12);
  CHECK(tau(Int(1)) == 1);
  CHECK(tau(Int(2)) == oracle[2]);
  CHECK(tau(Int(2)) == -24);
  CHECK(tau(Int(3)) == oracle[3]);
  CHECK(tau(Int(3)) == 252);
  // recurrence identity tau(4) = tau(2)^2 - 2^11
  CHECK(tau(Int(4)) == tau(Int(2)) * tau(Int(2)) - 2048);
  for (long n = 1; n <= 12; ++n) CHECK(tau(Int(n)) == oracle[n]);
  // multiplicativity through the series
  const auto& series = tau_series(200);
  for (long m = 2; m <= 14; ++m)
    for (long n = 2; n <= 14; ++n) {
      if (std::gcd(m, n) != 1 || m * n > 200) continue;
      CHECK(series[m * n] == series[m] * series[n]);
    }
  CHECK(tau(Int(11)) == 534612);
  CHECK(tau(Int(11)) % 11 == 1);  // matches a_11(X_0(11)) mod 11
}

TEST_CASE("p_stabilize") {
  EigenformDescriptor x0;
  x0.id = "x0_11";
  x0.kind = ProviderKind::curve;
  x0.curve = x0_11();
  x0.level = 11;
  x0.weight = 2;
  // already at p-level: alpha = a_11 = 1, no stabilization
  auto f = p_stabilize(x0, 11, 3);
  CHECK(!f.is_p_stabilized);
  CHECK(f.alpha->value() == 1);

  EigenformDescriptor delta;
  delta.id = "delta";
  delta.kind = ProviderKind::delta;
  delta.level = 1;
  delta.weight = 12;
  auto d = p_stabilize(delta, 11, 3);
  CHECK(d.is_p_stabilized);
  CHECK(d.alpha->is_unit());
  CHECK((d.alpha->value() - 534612) % 11 == 0);
  // stabilization identity alpha + p^{k-1}/alpha = a_p mod p^M
  Zq lhs = *d.alpha + Zq(pow_ui(11, 11), PrimePow(11, 3)) * d.alpha->inverse();
  CHECK(lhs.value() == Zq(Int(534612), PrimePow(11, 3)).value());

  // non-ordinary input: a_p = 0 table descriptor
  EigenformDescriptor ss;
  ss.id = "ss";
  ss.kind = ProviderKind::table;
  ss.level = 1;
  ss.weight = 2;
  ss.table[7] = 0;
  CHECK_THROWS_AS(p_stabilize(ss, 7, 2), std::domain_error);
}

TEST_CASE("congruences") {
  EigenformDescriptor x0;
  x0.id = "x0_11";
  x0.kind = ProviderKind::curve;
  x0.curve = x0_11();
  x0.level = 11;
  x0.weight = 2;
  EigenformDescriptor delta;
  delta.id = "delta";
  delta.kind = ProviderKind::delta;
  delta.level = 1;
  delta.weight = 12;

  // reflexivity
  CHECK(congruent_mod_p(x0, x0, 11, 50).congruent);
  // X_0(11) = Delta mod 11 (reduced cap here; the full Sturm cap runs in the
  // acceptance suite)
  auto r = congruent_mod_p(x0, delta, 11, 300);
  CHECK(r.congruent);
  // symmetry
  CHECK(congruent_mod_p(delta, x0, 11, 300).congruent);

  EigenformDescriptor e1, e2;
  e1.kind = ProviderKind::curve;
  e1.curve = e1_52();
  e1.level = 52;
  e1.weight = 2;
  e2.kind = ProviderKind::curve;
  e2.curve = e2_364();
  e2.level = 364;
  e2.weight = 2;
  CHECK(congruent_mod_p(e1, e2, 5, 300).congruent);
  // non-congruent pair has a witness
  auto bad = congruent_mod_p(x0, e1, 11, 100);
  CHECK(!bad.congruent);
  CHECK(bad.witness > 0);
}

TEST_CASE("sturm bound") {
  // k * [SL2(Z) : Gamma_0(lcm * p^2)] / 12
  CHECK(sturm_bound(11, 11, 11, 12) == 1452);
  CHECK(sturm_bound(52, 364, 5, 2) == 3360);
}

TEST_CASE("frobenius fingerprints") {
  EigenformDescriptor x0;
  x0.kind = ProviderKind::curve;
  x0.curve = x0_11();
  x0.level = 11;
  x0.weight = 2;
  // ell = 1 mod 11 primes: the interesting residues for level raising
  auto [a, c] = frobenius_fingerprint(x0, 11, 1123);
  CHECK(a.value() == 2);
  CHECK(c.value() == 1);
  auto [a2, c2] = frobenius_fingerprint(x0, 11, 2113);
  CHECK(a2.value() == 2);
  CHECK(c2.value() == 1);
  auto [a3, c3] = frobenius_fingerprint(x0, 11, 1321);
  CHECK(a3.value() == 3);
  CHECK(c3.value() == 1);

  EigenformDescriptor e1;
  e1.kind = ProviderKind::curve;
  e1.curve = e1_52();
  e1.level = 52;
  e1.weight = 2;
  auto [a7, c7] = frobenius_fingerprint(e1, 5, 7);
  CHECK(a7.value() == 3);
  CHECK(c7.value() == 2);
  // weight 2: c_ell = ell mod p
  for (long ell : {3L, 7L, 11L, 17L}) {
    auto [x, y] = frobenius_fingerprint(e1, 5, ell);
    CHECK(y.value() == ell % 5);
  }
  CHECK_THROWS(frobenius_fingerprint(e1, 5, 13));
}

TEST_CASE("branch data and local types") {
  EigenformDescriptor e2;
  e2.id = "e2_364";
  e2.kind = ProviderKind::curve;
  e2.curve = e2_364();
  e2.level = 364;
  e2.weight = 2;
  auto b = make_branch(p_stabilize(e2, 5, 3), 5);
  CHECK(b.tame_level == 364);
  CHECK(b.local_types.at(2) == LocalType::supercuspidal_proxy);  // a_2 = 0
  CHECK(b.local_types.at(7) == LocalType::special);              // a_7^2 = 7^0
  CHECK(b.local_types.at(13) == LocalType::special);
  CHECK(b.a_mod_p(7).value() == ((ap_curve(*e2.curve, 7) % 5) + 5) % 5);

  EigenformDescriptor x0;
  x0.id = "x0_11";
  x0.kind = ProviderKind::curve;
  x0.curve = x0_11();
  x0.level = 11;
  x0.weight = 2;
  auto bx = make_branch(p_stabilize(x0, 11, 3), 11);
  CHECK(bx.tame_level == 1);  // p-part stripped
  CHECK(bx.local_types.empty());
}

TEST_CASE("descriptor parsing") {
  std::string text =
      "kind = \"curve\"\n"
      "label = \"X0(11)\"\n"
      "a_invariants = [0, -1, 1, -10, -20]\n"
      "conductor = 11\n";
  auto f = parse_descriptor_text(text, "x");
  CHECK(f.kind == ProviderKind::curve);
  CHECK(f.id == "X0(11)");
  CHECK(f.level == 11);
  CHECK(f.a(2) == -2);

  std::string tbl =
      "kind = \"table\"\nlevel = 14\nweight = 2\na3 = -2\na5 = 0\n";
  auto g = parse_descriptor_text(tbl, "t");
  CHECK(g.a(3) == -2);
  CHECK_THROWS(g.a(11));

  CHECK_THROWS_AS(parse_descriptor_text("kind = \"nope\"\n", "z"), std::invalid_argument);
  CHECK_THROWS_AS(parse_descriptor_text("kind: curve\n", "z"), std::invalid_argument);
}
