#ifndef IWALAB_SERIES_HPP
#define IWALAB_SERIES_HPP

#include <optional>
#include <string>
#include <vector>

#include "iwalab/residue.hpp"

namespace iwalab {

// Truncated power series in T over Z/p^M.  Coefficients of T^0..T^{D-1} are
// known; when source_level = n > 0 the series came from a level-n Mazur-Tate
// element and is only faithful modulo ((1+T)^{p^{n-1}} - 1, p^M).
struct LambdaSeries {
  long p = 0;
  long M = 0;
  long D = 0;
  long source_level = 0;  // 0 = analytic / exact
  std::vector<Int> c;     // values in [0, p^M), length D

  LambdaSeries() = default;
  LambdaSeries(long p_, long M_, long D_, long source_level_ = 0)
      : p(p_), M(M_), D(D_), source_level(source_level_), c(D_, Int(0)) {}

  PrimePow mod() const { return PrimePow(p, M); }
  Zq coeff(long j) const { return Zq(c[j], PrimePow(p, M)); }
  void set_coeff(long j, const Zq& v) { c[j] = v.value(); }

  LambdaSeries truncate(long M2, long D2) const;
  LambdaSeries reduce_mod_p() const { return truncate(1, D); }
  bool operator==(const LambdaSeries& o) const;
};

struct InvariantReport {
  std::optional<long> mu;       // absent = undetermined
  std::optional<long> lambda;   // absent = undetermined
  bool certified = false;
  std::optional<long> witness_degree;
  std::string note;
};

// min_j v_p(c_j), capped at M.  .second is true when the cap was hit
// (content undetermined at this precision).
std::pair<long, bool> content(const LambdaSeries& s);

// mu/lambda extraction with the certification rule:
//   mu certified when some coefficient has valuation < M;
//   lambda certified when, after dividing by p^mu, the first unit coefficient
//   sits in degree lambda < p^{n-1} - 1 (n = source_level; no degree bound
//   when source_level = 0).  Cross-level agreement is the caller's check.
InvariantReport invariants(const LambdaSeries& s);

// Coefficientwise convolution; result precision is the min of the inputs'.
LambdaSeries multiply(const LambdaSeries& a, const LambdaSeries& b);

LambdaSeries add(const LambdaSeries& a, const LambdaSeries& b);
LambdaSeries scale(const Zq& u, const LambdaSeries& s);

// (1+T)^e to D coefficients: coefficient of T^j is binomial(e, j) mod p^M.
// The exponent must carry precision >= binomial_exponent_precision(p, M, D);
// negative p-adic exponents are passed as their residue lifts.
LambdaSeries binomial_power(const Zq& exponent, long D, long M_out);
long binomial_exponent_precision(long p, long M, long D);

// Horner evaluation at t0 with v_p(t0) >= 1.
Zq evaluate_at_character(const LambdaSeries& s, const Zq& t0);

}  // namespace iwalab

#endif
