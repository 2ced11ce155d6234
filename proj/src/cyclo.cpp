#include "iwalab/cyclo.hpp"

namespace iwalab {

Zq CycloDecomp::one_unit_part() const {
  PrimePow mod(p, M);
  return Zq(1 + p, mod).pow(exponent.value());
}

Zq log_one_unit(const Zq& u) {
  long p = u.p(), W = u.M();
  if ((u.value() - 1) % p != 0) throw std::domain_error("log_one_unit: not a 1-unit");
  // Truncation: the term z^n/n has valuation >= n - v_p(n), so all terms with
  // n >= W + v_max are zero mod p^W.  v_max = 6 covers every n in range for
  // p >= 3 and W <= several hundred.
  const long v_max = 6;
  const long nmax = W + v_max + 2;
  const long W2 = W + v_max + 2;
  Int q2 = pow_ui(p, W2);
  Int z = u.value() - 1;  // any lift; the ambiguity is >= p^W
  Int zpow = 1, acc = 0;
  for (long n = 1; n <= nmax; ++n) {
    zpow = (zpow * z) % q2;
    long v = vp(Int(n), Int(p));
    Int m = Int(n) / pow_ui(p, v);
    Int minv;
    if (!mpz_invert(minv.get_mpz_t(), m.get_mpz_t(), q2.get_mpz_t()))
      throw std::runtime_error("log_one_unit: inversion failed");
    Int term = (zpow * minv) % q2;
    Int pv = pow_ui(p, v);
    if (term % pv != 0) throw std::runtime_error("log_one_unit: inexact division");
    term /= pv;
    if (n % 2 == 0) term = -term;
    acc = (acc + term) % q2;
  }
  return Zq(acc, PrimePow(p, W));
}

CycloDecomp decompose(const Int& x, long p, long M) {
  if (M < 2) throw std::invalid_argument("decompose: need M >= 2");
  PrimePow mod(p, M);
  Zq xq(x, mod);
  if (!xq.is_unit()) throw std::domain_error("decompose: not a unit mod p");

  CycloDecomp d;
  d.p = p;
  d.M = M;
  d.teich = xq.teichmuller();
  Zq u = xq * d.teich.inverse();

  Zq lu = log_one_unit(u).shift_down(1);          // mod p^{M-1}
  Zq lg = log_one_unit(Zq(1 + p, mod)).shift_down(1);  // unit, mod p^{M-1}
  d.exponent = lu * lg.inverse();
  if (d.exponent.is_zero())
    d.wild_valuation = std::nullopt;
  else
    d.wild_valuation = d.exponent.valuation();
  return d;
}

long wild_valuation_exact(long ell, long p) {
  if (ell == p || ell % p == 0) throw std::invalid_argument("wild_valuation_exact: p | ell");
  Int t = pow_ui(ell, p - 1) - 1;
  return vp(t, Int(p)) - 1;
}

}  // namespace iwalab
