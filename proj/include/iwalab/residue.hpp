#ifndef IWALAB_RESIDUE_HPP
#define IWALAB_RESIDUE_HPP

#include "iwalab/arith.hpp"

namespace iwalab {

// Modulus descriptor for Z/p^M.  Arithmetic is exact modulo p^M; precision
// loss across operations is the consumer's business.
struct PrimePow {
  long p = 0;
  long M = 0;
  Int q = 0;  // p^M

  PrimePow() = default;
  PrimePow(long p_, long M_) : p(p_), M(M_), q(pow_ui(p_, M_)) {}
  bool operator==(const PrimePow& o) const { return p == o.p && M == o.M; }
};

class Zq {
public:
  Zq() = default;
  Zq(const Int& v, const PrimePow& mod) : mod_(mod) { set(v); }
  Zq(long v, const PrimePow& mod) : mod_(mod) { set(Int(v)); }

  // Requires a denominator prime to p.
  static Zq from_rat(const Rat& r, const PrimePow& mod);

  const Int& value() const { return v_; }
  const PrimePow& mod() const { return mod_; }
  long p() const { return mod_.p; }
  long M() const { return mod_.M; }

  bool is_zero() const { return v_ == 0; }
  bool is_unit() const { return v_ % mod_.p != 0; }
  long valuation() const { return vp(v_, Int(mod_.p), mod_.M); }

  Zq operator+(const Zq& o) const { check(o); return Zq(v_ + o.v_, mod_); }
  Zq operator-(const Zq& o) const { check(o); return Zq(v_ - o.v_, mod_); }
  Zq operator*(const Zq& o) const { check(o); return Zq(v_ * o.v_, mod_); }
  Zq operator-() const { return Zq(-v_, mod_); }
  Zq& operator+=(const Zq& o) { check(o); set(v_ + o.v_); return *this; }
  Zq& operator-=(const Zq& o) { check(o); set(v_ - o.v_); return *this; }
  Zq& operator*=(const Zq& o) { check(o); set(v_ * o.v_); return *this; }
  bool operator==(const Zq& o) const { return mod_ == o.mod_ && v_ == o.v_; }
  bool operator!=(const Zq& o) const { return !(*this == o); }

  Zq inverse() const;
  Zq pow(const Int& e) const;

  // Exact division by p^s; the result lives in Z/p^{M-s}.
  Zq shift_down(long s) const;

  // Reduce to the smaller precision M2 <= M.
  Zq truncate(long M2) const;

  // Teichmueller representative: the (p-1)-st root of unity congruent to
  // this unit mod p.
  Zq teichmuller() const;

private:
  void set(const Int& v) {
    v_ = v % mod_.q;
    if (v_ < 0) v_ += mod_.q;
  }
  void check(const Zq& o) const {
    if (!(mod_ == o.mod_)) throw std::invalid_argument("Zq: modulus mismatch");
  }

  Int v_ = 0;
  PrimePow mod_;
};

// Hensel-lift the unit root of x^2 - a x + c (c = 0 mod p, a a unit).
Zq unit_root_of_quadratic(const Zq& a, const Zq& c);

}  // namespace iwalab

#endif
