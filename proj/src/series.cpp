#include "iwalab/series.hpp"

#include <algorithm>

namespace iwalab {

LambdaSeries LambdaSeries::truncate(long M2, long D2) const {
  if (M2 > M || D2 > D) throw std::invalid_argument("LambdaSeries::truncate: cannot refine");
  LambdaSeries r(p, M2, D2, source_level);
  Int q2 = pow_ui(p, M2);
  for (long j = 0; j < D2; ++j) r.c[j] = c[j] % q2;
  return r;
}

bool LambdaSeries::operator==(const LambdaSeries& o) const {
  return p == o.p && M == o.M && D == o.D && c == o.c;
}

std::pair<long, bool> content(const LambdaSeries& s) {
  long best = s.M;
  for (long j = 0; j < s.D; ++j) {
    best = std::min(best, vp(s.c[j], Int(s.p), s.M));
    if (best == 0) break;
  }
  return {best, best == s.M};
}

InvariantReport invariants(const LambdaSeries& s) {
  InvariantReport r;
  auto [mu, capped] = content(s);
  if (capped) {
    r.note = "content reached precision cap; mu undetermined";
    return r;
  }
  r.mu = mu;
  Int pmu = pow_ui(s.p, mu);
  Int pp(s.p);
  for (long j = 0; j < s.D; ++j) {
    if (s.c[j] % pmu != 0)
      throw std::logic_error("invariants: stored coefficient below content valuation");
    Int t = s.c[j] / pmu;
    if (t % pp != 0) {
      r.lambda = j;
      r.witness_degree = j;
      break;
    }
  }
  if (!r.lambda) {
    r.note = "no unit coefficient within known degrees; lambda undetermined, raise D";
    return r;
  }
  if (s.source_level > 0) {
    Int bound = pow_ui(s.p, s.source_level - 1) - 1;  // p^{n-1} - slack, slack = 1
    if (Int(*r.lambda) >= bound) {
      r.note = "witness degree too close to truncation boundary";
      return r;
    }
  }
  r.certified = true;
  return r;
}

LambdaSeries multiply(const LambdaSeries& a, const LambdaSeries& b) {
  if (a.p != b.p) throw std::invalid_argument("multiply: mismatched p");
  long M = std::min(a.M, b.M), D = std::min(a.D, b.D);
  long lvl = a.source_level == 0 ? b.source_level
             : b.source_level == 0 ? a.source_level
                                   : std::min(a.source_level, b.source_level);
  LambdaSeries r(a.p, M, D, lvl);
  Int q = pow_ui(a.p, M);
  for (long i = 0; i < D; ++i) {
    if (a.c[i] % q == 0) continue;
    for (long j = 0; i + j < D; ++j) {
      if (b.c[j] == 0) continue;
      r.c[i + j] = (r.c[i + j] + a.c[i] * b.c[j]) % q;
    }
  }
  return r;
}

LambdaSeries add(const LambdaSeries& a, const LambdaSeries& b) {
  if (a.p != b.p) throw std::invalid_argument("add: mismatched p");
  long M = std::min(a.M, b.M), D = std::min(a.D, b.D);
  long lvl = a.source_level == 0 ? b.source_level
             : b.source_level == 0 ? a.source_level
                                   : std::min(a.source_level, b.source_level);
  LambdaSeries r(a.p, M, D, lvl);
  Int q = pow_ui(a.p, M);
  for (long j = 0; j < D; ++j) r.c[j] = (a.c[j] + b.c[j]) % q;
  return r;
}

LambdaSeries scale(const Zq& u, const LambdaSeries& s) {
  long M = std::min(s.M, u.M());
  LambdaSeries r(s.p, M, s.D, s.source_level);
  Int q = pow_ui(s.p, M);
  for (long j = 0; j < s.D; ++j) r.c[j] = (u.value() * s.c[j]) % q;
  return r;
}

long binomial_exponent_precision(long p, long M, long D) {
  // binomial(e, j) mod p^M is determined by e mod p^{M + v_p(j!)} and
  // v_p(j!) <= (j-1)/(p-1) for j < D.
  return M + (D - 1) / (p - 1) + 1;
}

LambdaSeries binomial_power(const Zq& exponent, long D, long M_out) {
  long p = exponent.p();
  if (exponent.M() < binomial_exponent_precision(p, M_out, D))
    throw std::invalid_argument("binomial_power: exponent precision too low");
  LambdaSeries r(p, M_out, D, 0);
  Int q = pow_ui(p, M_out);
  Int e = exponent.value();  // nonnegative lift; represents the p-adic class
  Int binom = 1;
  r.c[0] = 1 % q;
  for (long j = 1; j < D; ++j) {
    binom = binom * (e - (j - 1));
    if (binom % j != 0) throw std::logic_error("binomial_power: inexact division");
    binom /= j;
    r.c[j] = binom % q;
    if (r.c[j] < 0) r.c[j] += q;
  }
  return r;
}

Zq evaluate_at_character(const LambdaSeries& s, const Zq& t0) {
  if (!t0.is_zero() && t0.valuation() < 1)
    throw std::domain_error("evaluate_at_character: t0 not topologically nilpotent");
  PrimePow mod(s.p, std::min(s.M, t0.M()));
  Zq t(t0.value(), mod);
  Zq acc(0, mod);
  for (long j = s.D - 1; j >= 0; --j) acc = acc * t + Zq(s.c[j], mod);
  return acc;
}

}  // namespace iwalab
