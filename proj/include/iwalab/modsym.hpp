#ifndef IWALAB_MODSYM_HPP
#define IWALAB_MODSYM_HPP

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <unordered_map>

#include "iwalab/arith.hpp"
#include "iwalab/residue.hpp"

namespace iwalab {

struct Mat22 {
  Int a, b, c, d;
  Int det() const { return a * d - b * c; }
  Mat22 adj() const { return {d, -b, -c, a}; }
  Mat22 operator*(const Mat22& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
  }
};

// Homogeneous polynomial of degree k-2 in (X, Y); c[j] is the coefficient of
// X^j Y^{k-2-j}.  The right substitution action P -> P(aX+bY, cX+dY).
struct SymPoly {
  std::vector<Rat> c;
  long degree() const { return static_cast<long>(c.size()) - 1; }
};

SymPoly sym_monomial(long k, long j);
SymPoly sym_substitute(const SymPoly& P, const Mat22& m);

// Rational cusp num/den in lowest terms, den >= 0; infinity = (1,0).
struct Cusp {
  Int num, den;
  Cusp() : num(1), den(0) {}
  Cusp(const Int& n, const Int& d);
  bool is_infinity() const { return den == 0; }
  bool operator==(const Cusp& o) const { return num == o.num && den == o.den; }
};

class P1 {
public:
  explicit P1(long N);
  long N() const { return N_; }
  long size() const { return static_cast<long>(reps_.size()); }
  std::pair<long, long> rep(long idx) const { return reps_[idx]; }
  long index(const Int& c, const Int& d) const;
  Mat22 lift_to_sl2(long idx) const;

private:
  long N_;
  std::vector<std::pair<long, long>> reps_;
  std::unordered_map<long, long> table_;
};

// Weight-k level-N modular symbols over Q in the Manin presentation.
// Generators are pairs (coset, monomial); the 2- and 3-term relations are
// solved once and every generator carries its expansion in the free basis.
class ModSymSpace {
public:
  static std::shared_ptr<const ModSymSpace> build(long N, long k);

  long N() const { return N_; }
  long k() const { return k_; }
  long ngens() const { return p1_.size() * (k_ - 1); }
  long dim() const { return dim_; }
  const P1& p1() const { return p1_; }

  long gen_id(long p1idx, long j) const { return p1idx * (k_ - 1) + j; }
  const std::vector<Rat>& gen_expr(long gen) const { return expr_[gen]; }

  // Expansion of the Manin symbol [P, (c:d)] in the free basis.
  std::vector<Rat> manin_coords(const SymPoly& P, const Int& c, const Int& d) const;

  // The path P{a, b} decomposed into Manin segments; emit(Q, p1idx) is called
  // once per segment with integral Q whenever P is integral.
  void path_segments(const SymPoly& P, const Cusp& a, const Cusp& b,
                     const std::function<void(const SymPoly&, long)>& emit) const;
  std::vector<Rat> path_coords(const SymPoly& P, const Cusp& a, const Cusp& b) const;

  // T_q for q prime to N, U_q otherwise.  Matrix columns act on basis coords.
  const QMat& hecke(long q) const;
  const QMat& star() const;

  const QMat& boundary() const;  // cusp classes x dim
  long cusp_count() const;
  long cuspidal_dim() const;
  std::vector<std::vector<Rat>> cuspidal_basis() const;

  // (dim+, dim-) of the star decomposition of the cuspidal subspace.
  std::pair<long, long> star_split_cuspidal() const;

  // Serialization for the space cache (exact text encoding).
  std::string serialize() const;
  static std::shared_ptr<const ModSymSpace> deserialize(const std::string& text);
  void adopt_hecke(long q, QMat m) const;
  std::vector<long> cached_hecke_primes() const;

private:
  ModSymSpace(long N, long k);
  void build_relations();
  void build_boundary() const;

  long N_, k_;
  P1 p1_;
  long dim_ = 0;
  std::vector<long> basis_;                // free generator ids, ascending
  std::vector<std::vector<Rat>> expr_;     // ngens x dim
  mutable std::map<long, QMat> hecke_;     // q -> matrix
  mutable std::optional<QMat> star_;
  mutable std::optional<QMat> boundary_;
  mutable std::vector<std::pair<Int, Int>> cusp_reps_;
  mutable std::mutex mu_;
};

long cusp_index(std::vector<std::pair<Int, Int>>& reps, long N, const Cusp& c);
bool cusps_equivalent(long N, const Int& p1n, const Int& q1, const Int& p2n, const Int& q2);

// Ordinary projection data mod p^M: the image of lim (U_p)^{n!} computed via
// the Hensel split of charpoly(U_p) into unit and non-unit factors.
struct OrdinaryProjection {
  PrimePow mod;
  std::vector<std::vector<Zq>> image_basis;  // basis coords mod p^M
  std::vector<Zq> unit_factor;               // monic factor with unit roots
  long ordinary_rank = 0;
};
OrdinaryProjection ordinary_projection(const ModSymSpace& s, long p, long M);

// Hensel factorization helper: f monic over Z/p^M with f = A*B, A = x^s and
// B the prime-to-x part mod p; returns (A, B, r, t) with rA + tB = 1.
struct HenselSplit {
  std::vector<Zq> A, B, r, t;
};
HenselSplit hensel_split_unit_part(const std::vector<Zq>& f);

// A normalized eigen-symbol: a Hecke eigen-functional on the space, scaled so
// its values on the Manin generator lattice are integral and p-saturated.
struct EigenSymbol {
  std::shared_ptr<const ModSymSpace> space;
  int sign = +1;
  std::map<long, Rat> eigenvalues;
  std::vector<Rat> w;           // functional coords over the free basis
  Rat normalization_scale = 1;
  std::vector<Rat> gen_values;  // value on every Manin generator

  bool stabilized = false;  // U_p identity holds mod p^stab_prec only
  long stab_prec = 0;
  std::optional<Zq> alpha;

  std::vector<Rat> pair(const Cusp& a, const Cusp& b) const;
  Rat pair_monomial(long j, const Cusp& a, const Cusp& b) const;
};

EigenSymbol eigen_symbol(std::shared_ptr<const ModSymSpace> s,
                         const std::map<long, Rat>& eigenvalue_map, int sign, long p);

// p-stabilized old system: the rational data in good_map cuts a 2-dimensional
// plane; U_p has charpoly x^2 - a_p x + p^{k-1} on it and the unit-root line
// is extracted mod p^M.
EigenSymbol eigen_symbol_stabilized(std::shared_ptr<const ModSymSpace> s,
                                    const std::map<long, Rat>& good_map, int sign, long p,
                                    const Rat& ap, long M);

}  // namespace iwalab

#endif
