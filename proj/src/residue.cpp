#include "iwalab/residue.hpp"

namespace iwalab {

Zq Zq::from_rat(const Rat& r, const PrimePow& mod) {
  Int num = r.get_num(), den = r.get_den();
  if (den % mod.p == 0)
    throw std::domain_error("Zq::from_rat: denominator not prime to p");
  Zq d(den, mod);
  return Zq(num, mod) * d.inverse();
}

Zq Zq::inverse() const {
  Int g, s, t;
  mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), v_.get_mpz_t(), mod_.q.get_mpz_t());
  if (g != 1) throw std::domain_error("Zq::inverse: not a unit");
  return Zq(s, mod_);
}

Zq Zq::pow(const Int& e) const {
  if (e < 0) return inverse().pow(-e);
  Int r;
  mpz_powm(r.get_mpz_t(), v_.get_mpz_t(), e.get_mpz_t(), mod_.q.get_mpz_t());
  return Zq(r, mod_);
}

Zq Zq::shift_down(long s) const {
  if (s == 0) return *this;
  Int ps = pow_ui(mod_.p, s);
  if (v_ % ps != 0) throw std::domain_error("Zq::shift_down: value not divisible by p^s");
  return Zq(v_ / ps, PrimePow(mod_.p, mod_.M - s));
}

Zq Zq::truncate(long M2) const {
  if (M2 > mod_.M) throw std::invalid_argument("Zq::truncate: cannot raise precision");
  return Zq(v_, PrimePow(mod_.p, M2));
}

Zq Zq::teichmuller() const {
  if (!is_unit()) throw std::domain_error("teichmuller: not a unit");
  // x -> x^p converges to the fixed point; M iterations suffice.
  Zq t = *this;
  for (long i = 0; i < mod_.M + 1; ++i) t = t.pow(mod_.p);
  return t;
}

Zq unit_root_of_quadratic(const Zq& a, const Zq& c) {
  const PrimePow& mod = a.mod();
  if (!a.is_unit()) throw std::domain_error("unit_root_of_quadratic: a not a unit");
  if (c.is_unit()) throw std::domain_error("unit_root_of_quadratic: both roots are units");
  // Newton iteration from x = a: f(x) = x^2 - a x + c, f'(x) = 2x - a is a
  // unit at the unit root since the other root is a non-unit.
  Zq x = a;
  for (long i = 0; i < mod.M + 2; ++i) {
    Zq f = x * x - a * x + c;
    Zq df = x + x - a;
    x = x - f * df.inverse();
  }
  Zq f = x * x - a * x + c;
  if (!f.is_zero()) throw std::runtime_error("unit_root_of_quadratic: Newton failed");
  return x;
}

}  // namespace iwalab
