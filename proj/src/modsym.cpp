#include "iwalab/modsym.hpp"

#include <algorithm>
#include <cassert>
#include <numeric>
#include <sstream>

namespace iwalab {

SymPoly sym_monomial(long k, long j) {
  SymPoly P;
  P.c.assign(k - 1, Rat(0));
  P.c[j] = 1;
  return P;
}

SymPoly sym_substitute(const SymPoly& P, const Mat22& m) {
  long deg = P.degree();
  SymPoly R;
  R.c.assign(deg + 1, Rat(0));
  // (aX + bY)^j (cX + dY)^{deg-j}, accumulated by iterated multiplication.
  // pw1[t] = coeff of X^t Y^{j-t} in (aX+bY)^j, built incrementally.
  std::vector<Int> pw1(1, Int(1));
  for (long j = 0; j <= deg; ++j) {
    if (P.c[j] != 0) {
      std::vector<Int> pw2(1, Int(1));
      for (long t = 0; t < deg - j; ++t) {
        std::vector<Int> nxt(pw2.size() + 1, Int(0));
        for (size_t u = 0; u < pw2.size(); ++u) {
          nxt[u + 1] += pw2[u] * m.c;
          nxt[u] += pw2[u] * m.d;
        }
        pw2 = std::move(nxt);
      }
      // product (aX+bY)^j * (cX+dY)^{deg-j}
      for (size_t u = 0; u < pw1.size(); ++u)
        for (size_t v = 0; v < pw2.size(); ++v)
          R.c[u + v] += P.c[j] * Rat(pw1[u] * pw2[v]);
    }
    // extend pw1 to (aX+bY)^{j+1}
    std::vector<Int> nxt(pw1.size() + 1, Int(0));
    for (size_t u = 0; u < pw1.size(); ++u) {
      nxt[u + 1] += pw1[u] * m.a;
      nxt[u] += pw1[u] * m.b;
    }
    pw1 = std::move(nxt);
  }
  return R;
}

Cusp::Cusp(const Int& n, const Int& d) {
  Int g = gcd(n, d);
  if (g == 0) throw std::invalid_argument("Cusp: 0/0");
  num = n / g;
  den = d / g;
  if (den < 0) {
    num = -num;
    den = -den;
  }
  if (den == 0) num = 1;
}

P1::P1(long N) : N_(N) {
  if (N < 1) throw std::invalid_argument("P1: N >= 1 required");
  std::vector<long> units;
  for (long u = 0; u < N; ++u)
    if (std::gcd(u, N) == 1) units.push_back(u);
  if (N == 1) units.assign(1, 0);  // the single unit of Z/1
  auto key = [N](long c, long d) { return c * N + d; };
  for (long c = 0; c < N; ++c)
    for (long d = 0; d < N; ++d) {
      if (std::gcd(std::gcd(c, d), N) != 1 && N > 1) continue;
      if (table_.count(key(c, d))) continue;
      long idx = static_cast<long>(reps_.size());
      reps_.emplace_back(c, d);
      for (long u : units) table_[key((u * c) % N, (u * d) % N)] = idx;
      if (N == 1) table_[0] = 0;
    }
}

long P1::index(const Int& c, const Int& d) const {
  Int cm = c % N_, dm = d % N_;
  if (cm < 0) cm += N_;
  if (dm < 0) dm += N_;
  auto it = table_.find(cm.get_si() * N_ + dm.get_si());
  if (it == table_.end()) throw std::invalid_argument("P1::index: not a valid coset label");
  return it->second;
}

Mat22 P1::lift_to_sl2(long idx) const {
  auto [c0, d0] = reps_[idx];
  Int c = c0, d = d0;
  if (N_ == 1) return {1, 0, 0, 1};
  if (c == 0) {
    // class (0:1); stored representative is (0, 1)
    return {1, 0, 0, 1};
  }
  Int dd = d;
  while (gcd(c, dd) != 1) dd += N_;
  Int g, s, t;
  mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), dd.get_mpz_t(), c.get_mpz_t());
  assert(g == 1);
  // s*dd + t*c = 1, so [s, -t; c, dd] has determinant 1.
  return {s, -t, c, dd};
}

namespace {

using SparseRow = std::map<long, Rat>;

void row_axpy(SparseRow& r, const Rat& coef, const SparseRow& src) {
  for (const auto& [col, v] : src) {
    auto it = r.find(col);
    if (it == r.end()) {
      Rat nv = coef * v;
      if (nv != 0) r.emplace(col, std::move(nv));
    } else {
      it->second += coef * v;
      if (it->second == 0) r.erase(it);
    }
  }
}

}  // namespace

ModSymSpace::ModSymSpace(long N, long k) : N_(N), k_(k), p1_(N) {}

std::shared_ptr<const ModSymSpace> ModSymSpace::build(long N, long k) {
  if (k < 2 || k % 2 != 0) throw std::invalid_argument("build_space: k must be even and >= 2");
  if (N < 1) throw std::invalid_argument("build_space: N >= 1");
  auto s = std::shared_ptr<ModSymSpace>(new ModSymSpace(N, k));
  s->build_relations();
  return s;
}

void ModSymSpace::build_relations() {
  const long n = ngens();
  const long km2 = k_ - 2;
  const Mat22 S{0, -1, 1, 0};
  const Mat22 T1{0, -1, 1, -1};   // tau
  const Mat22 T2{-1, 1, -1, 0};   // tau^2

  auto act = [&](long p1idx, long j, const Mat22& h) {
    // [P, u] . h = [P o h, u h] expanded over generators
    auto [c, d] = p1_.rep(p1idx);
    Int c2 = c * h.a + d * h.c, d2 = c * h.b + d * h.d;
    long tgt = p1_.index(c2, d2);
    SymPoly Q = sym_substitute(sym_monomial(k_, j), h);
    SparseRow out;
    for (long t = 0; t <= km2; ++t)
      if (Q.c[t] != 0) out[gen_id(tgt, t)] = Q.c[t];
    return out;
  };

  std::vector<SparseRow> rows;
  rows.reserve(2 * n);
  for (long i = 0; i < p1_.size(); ++i)
    for (long j = 0; j <= km2; ++j) {
      SparseRow r2;
      r2[gen_id(i, j)] = 1;
      row_axpy(r2, Rat(1), act(i, j, S));
      if (!r2.empty()) rows.push_back(std::move(r2));
      SparseRow r3;
      r3[gen_id(i, j)] = 1;
      row_axpy(r3, Rat(1), act(i, j, T1));
      row_axpy(r3, Rat(1), act(i, j, T2));
      if (!r3.empty()) rows.push_back(std::move(r3));
    }

  // Sparse exact elimination to reduced echelon form.
  std::map<long, SparseRow> pivot_rows;  // pivot col -> normalized row
  for (auto& row : rows) {
    SparseRow r = std::move(row);
    while (!r.empty()) {
      long lead = r.begin()->first;
      auto it = pivot_rows.find(lead);
      if (it == pivot_rows.end()) {
        Rat inv = 1 / r.begin()->second;
        for (auto& [col, v] : r) v *= inv;
        pivot_rows.emplace(lead, std::move(r));
        break;
      }
      Rat coef = -r.begin()->second;
      row_axpy(r, coef, it->second);
    }
  }
  // Back-substitution, decreasing pivot order.
  for (auto it = pivot_rows.rbegin(); it != pivot_rows.rend(); ++it) {
    SparseRow& r = it->second;
    bool changed = true;
    while (changed) {
      changed = false;
      for (auto e = r.begin(); e != r.end(); ++e) {
        if (e->first == it->first) continue;
        auto pv = pivot_rows.find(e->first);
        if (pv == pivot_rows.end()) continue;
        Rat coef = -e->second;
        row_axpy(r, coef, pv->second);
        changed = true;
        break;
      }
    }
  }

  basis_.clear();
  for (long g = 0; g < n; ++g)
    if (!pivot_rows.count(g)) basis_.push_back(g);
  dim_ = static_cast<long>(basis_.size());
  std::map<long, long> basis_index;
  for (long b = 0; b < dim_; ++b) basis_index[basis_[b]] = b;

  expr_.assign(n, std::vector<Rat>(dim_, Rat(0)));
  for (long b = 0; b < dim_; ++b) expr_[basis_[b]][b] = 1;
  for (const auto& [pc, row] : pivot_rows) {
    for (const auto& [col, v] : row) {
      if (col == pc) continue;
      expr_[pc][basis_index.at(col)] = -v;
    }
  }
}

std::vector<Rat> ModSymSpace::manin_coords(const SymPoly& P, const Int& c, const Int& d) const {
  std::vector<Rat> out(dim_, Rat(0));
  long idx = p1_.index(c, d);
  for (long j = 0; j <= k_ - 2; ++j) {
    if (P.c[j] == 0) continue;
    const auto& e = expr_[gen_id(idx, j)];
    for (long b = 0; b < dim_; ++b)
      if (e[b] != 0) out[b] += P.c[j] * e[b];
  }
  return out;
}

void ModSymSpace::path_segments(const SymPoly& P, const Cusp& a, const Cusp& b,
                                const std::function<void(const SymPoly&, long)>& emit) const {
  // {a,b} = {oo,b} - {oo,a}; {oo, r} via continued-fraction convergents.
  auto chain = [&](const Cusp& r, int sgn) {
    if (r.is_infinity()) return;
    Int p_prev = 1, q_prev = 0, pj = 0, qj = 0;
    Int num = r.num, den = r.den;
    bool first = true;
    long j = 0;
    while (den != 0) {
      Int a0;
      mpz_fdiv_q(a0.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
      Int p_new = first ? a0 : a0 * pj + p_prev;
      Int q_new = first ? Int(1) : a0 * qj + q_prev;
      if (!first) {
        p_prev = pj;
        q_prev = qj;
      }
      pj = p_new;
      qj = q_new;
      Int rem = num - a0 * den;
      num = den;
      den = rem;
      // segment {p_{j-1}/q_{j-1}, p_j/q_j} with g = [pj, e*p_prev; qj, e*q_prev],
      // e = (-1)^{j-1}, det g = 1
      Int e = (j % 2 == 1) ? 1 : -1;
      Mat22 g{pj, e * p_prev, qj, e * q_prev};
      assert(g.det() == 1);
      SymPoly Q = sym_substitute(P, g);
      if (sgn < 0)
        for (auto& x : Q.c) x = -x;
      emit(Q, p1_.index(g.c, g.d));
      first = false;
      ++j;
    }
  };
  chain(b, +1);
  chain(a, -1);
}

std::vector<Rat> ModSymSpace::path_coords(const SymPoly& P, const Cusp& a, const Cusp& b) const {
  std::vector<Rat> out(dim_, Rat(0));
  path_segments(P, a, b, [&](const SymPoly& Q, long p1idx) {
    for (long t = 0; t <= k_ - 2; ++t) {
      if (Q.c[t] == 0) continue;
      const auto& e = expr_[gen_id(p1idx, t)];
      for (long bb = 0; bb < dim_; ++bb)
        if (e[bb] != 0) out[bb] += Q.c[t] * e[bb];
    }
  });
  return out;
}

const QMat& ModSymSpace::hecke(long q) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = hecke_.find(q);
  if (it != hecke_.end()) return it->second;

  QMat m(dim_, dim_);
  std::vector<Mat22> reps;
  for (long c = 0; c < q; ++c) reps.push_back({1, c, 0, q});
  if (N_ % q != 0) reps.push_back({Int(q), 0, 0, 1});

  for (long col = 0; col < dim_; ++col) {
    long gen = basis_[col];
    long p1idx = gen / (k_ - 1), j = gen % (k_ - 1);
    Mat22 g = p1_.lift_to_sl2(p1idx);
    SymPoly P = sym_monomial(k_, j);
    std::vector<Rat> acc(dim_, Rat(0));
    for (const auto& h : reps) {
      Mat22 mm = h * g;
      SymPoly Q = sym_substitute(P, mm.adj());
      Cusp from(mm.b, mm.d), to(mm.a, mm.c);
      auto v = path_coords(Q, from, to);
      for (long i = 0; i < dim_; ++i) acc[i] += v[i];
    }
    for (long i = 0; i < dim_; ++i) m.at(i, col) = acc[i];
  }
  return hecke_.emplace(q, std::move(m)).first->second;
}

const QMat& ModSymSpace::star() const {
  std::lock_guard<std::mutex> lock(mu_);
  if (star_) return *star_;
  QMat m(dim_, dim_);
  for (long col = 0; col < dim_; ++col) {
    long gen = basis_[col];
    long p1idx = gen / (k_ - 1), j = gen % (k_ - 1);
    auto [c, d] = p1_.rep(p1idx);
    SymPoly P = sym_monomial(k_, j);
    // [P, (c:d)] -> [P(X,-Y), (-c:d)]
    P.c[j] = ((k_ - 2 - j) % 2 == 0) ? 1 : -1;
    auto v = manin_coords(P, Int(-c), Int(d));
    for (long i = 0; i < dim_; ++i) m.at(i, col) = v[i];
  }
  star_ = std::move(m);
  return *star_;
}

bool cusps_equivalent(long N, const Int& p1n, const Int& q1, const Int& p2n, const Int& q2) {
  // Gamma_0(N)-equivalence of p1/q1 and p2/q2 in lowest terms.
  bool inf1 = (q1 % N == 0), inf2 = (q2 % N == 0);
  if (q1 == 0 || q2 == 0) return (q1 == 0 ? inf2 || q2 == 0 : inf1);
  if (inf1 || inf2) return inf1 && inf2;
  auto inv_mod = [](const Int& x, const Int& m) {
    if (m <= 1) return Int(0);
    Int r;
    if (!mpz_invert(r.get_mpz_t(), x.get_mpz_t(), m.get_mpz_t()))
      throw std::logic_error("cusps_equivalent: expected invertible");
    return r;
  };
  Int s1 = inv_mod(p1n, q1 < 0 ? Int(-q1) : q1);
  Int s2 = inv_mod(p2n, q2 < 0 ? Int(-q2) : q2);
  Int g = gcd(q1 * q2, Int(N));
  Int t = (s1 * q2 - s2 * q1) % g;
  return t == 0;
}

long cusp_index(std::vector<std::pair<Int, Int>>& reps, long N, const Cusp& c) {
  for (size_t i = 0; i < reps.size(); ++i)
    if (cusps_equivalent(N, reps[i].first, reps[i].second, c.num, c.den)) return i;
  reps.emplace_back(c.num, c.den);
  return static_cast<long>(reps.size()) - 1;
}

void ModSymSpace::build_boundary() const {
  cusp_reps_.clear();
  std::vector<std::vector<Rat>> cols(dim_);
  long ncusp = 0;
  for (long col = 0; col < dim_; ++col) {
    long gen = basis_[col];
    long p1idx = gen / (k_ - 1), j = gen % (k_ - 1);
    Mat22 g = p1_.lift_to_sl2(p1idx);
    SymPoly Q = sym_substitute(sym_monomial(k_, j), g.adj());
    // eta([P,u]) = (gP){g0, g oo}; boundary = Q(g oo) - Q(g 0) on cusp classes
    auto eval_hom = [&](const Int& x, const Int& y) {
      Rat v(0);
      for (long t = 0; t <= k_ - 2; ++t) {
        if (Q.c[t] == 0) continue;
        Int xp = 1, yp = 1;
        for (long u = 0; u < t; ++u) xp *= x;
        for (long u = 0; u < k_ - 2 - t; ++u) yp *= y;
        v += Q.c[t] * Rat(xp * yp);
      }
      return v;
    };
    Cusp c_to(g.a, g.c), c_from(g.b, g.d);
    long i_to = cusp_index(cusp_reps_, N_, c_to);
    long i_from = cusp_index(cusp_reps_, N_, c_from);
    ncusp = static_cast<long>(cusp_reps_.size());
    cols[col].resize(ncusp, Rat(0));
    auto ensure = [&](std::vector<Rat>& v) { v.resize(ncusp, Rat(0)); };
    ensure(cols[col]);
    cols[col][i_to] += eval_hom(g.a, g.c);
    cols[col][i_from] -= eval_hom(g.b, g.d);
  }
  QMat B(ncusp, dim_);
  for (long col = 0; col < dim_; ++col) {
    cols[col].resize(ncusp, Rat(0));
    for (long i = 0; i < ncusp; ++i) B.at(i, col) = cols[col][i];
  }
  boundary_ = std::move(B);
}

const QMat& ModSymSpace::boundary() const {
  std::lock_guard<std::mutex> lock(mu_);
  if (!boundary_) build_boundary();
  return *boundary_;
}

long ModSymSpace::cusp_count() const {
  boundary();
  return static_cast<long>(cusp_reps_.size());
}

long ModSymSpace::cuspidal_dim() const { return dim_ - rank(boundary()); }

std::vector<std::vector<Rat>> ModSymSpace::cuspidal_basis() const { return kernel(boundary()); }

std::pair<long, long> ModSymSpace::star_split_cuspidal() const {
  const QMat& B = boundary();
  const QMat& st = star();
  auto dims = [&](int sign) {
    QMat s = st;
    for (long i = 0; i < dim_; ++i) s.at(i, i) -= sign;
    return static_cast<long>(kernel(B.vstack(s)).size());
  };
  return {dims(+1), dims(-1)};
}

void ModSymSpace::adopt_hecke(long q, QMat m) const {
  std::lock_guard<std::mutex> lock(mu_);
  hecke_.emplace(q, std::move(m));
}

std::vector<long> ModSymSpace::cached_hecke_primes() const {
  std::lock_guard<std::mutex> lock(mu_);
  std::vector<long> out;
  for (const auto& [q, _] : hecke_) out.push_back(q);
  return out;
}

// ---------------------------------------------------------------------------
// ordinary projection

namespace {

std::vector<Zq> poly_mul(const std::vector<Zq>& a, const std::vector<Zq>& b, const PrimePow& mod) {
  std::vector<Zq> r(a.size() + b.size() - 1, Zq(0, mod));
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  return r;
}

// division with remainder by a monic divisor
std::pair<std::vector<Zq>, std::vector<Zq>> poly_divmod(std::vector<Zq> num,
                                                        const std::vector<Zq>& den,
                                                        const PrimePow& mod) {
  assert(!den.empty() && den.back().value() == 1);
  long dn = static_cast<long>(num.size()) - 1, dd = static_cast<long>(den.size()) - 1;
  if (dn < dd) return {{Zq(0, mod)}, num};
  std::vector<Zq> q(dn - dd + 1, Zq(0, mod));
  for (long i = dn - dd; i >= 0; --i) {
    Zq c = num[i + dd];
    q[i] = c;
    for (long j = 0; j <= dd; ++j) num[i + j] -= c * den[j];
  }
  num.resize(std::max<long>(dd, 1));
  return {q, num};
}

std::vector<Zq> poly_mod(const std::vector<Zq>& a, const std::vector<Zq>& m, const PrimePow& mod) {
  return poly_divmod(a, m, mod).second;
}

std::vector<Zq> poly_add(std::vector<Zq> a, const std::vector<Zq>& b, const PrimePow& mod) {
  if (a.size() < b.size()) a.resize(b.size(), Zq(0, mod));
  for (size_t i = 0; i < b.size(); ++i) a[i] += b[i];
  return a;
}

std::vector<Zq> poly_scale(const Zq& c, std::vector<Zq> a) {
  for (auto& x : a) x *= c;
  return a;
}

std::vector<Zq> poly_reduce_prec(const std::vector<Zq>& a, const PrimePow& mod) {
  std::vector<Zq> r;
  r.reserve(a.size());
  for (const auto& x : a) r.emplace_back(x.value(), mod);
  return r;
}

void poly_trim(std::vector<Zq>& a) {
  while (a.size() > 1 && a.back().is_zero()) a.pop_back();
}

}  // namespace

HenselSplit hensel_split_unit_part(const std::vector<Zq>& f) {
  const PrimePow target = f.back().mod();
  const long p = target.p;
  if (f.back().value() != 1) throw std::invalid_argument("hensel: f must be monic");

  long s = 0;
  while (s < static_cast<long>(f.size()) - 1 && f[s].value() % p == 0) ++s;
  if (s == 0 || s == static_cast<long>(f.size()) - 1)
    throw std::invalid_argument("hensel: nothing to split");

  // mod-p seed: A = x^s, B = f / x^s; coprime since B(0) is a unit.
  PrimePow modp(p, 1);
  std::vector<Zq> A(s + 1, Zq(0, modp));
  A[s] = Zq(1, modp);
  std::vector<Zq> B;
  for (size_t i = s; i < f.size(); ++i) B.emplace_back(f[i].value(), modp);
  // Bezout r A + t B = 1: t = B^{-1} mod x^s by power series inversion,
  // r = (1 - t B)/x^s.
  std::vector<Zq> t(s, Zq(0, modp));
  t[0] = B[0].inverse();
  for (long i = 1; i < s; ++i) {
    Zq acc(0, modp);
    for (long j = 1; j <= i && j < static_cast<long>(B.size()); ++j) acc += B[j] * t[i - j];
    t[i] = -(B[0].inverse()) * acc;
  }
  std::vector<Zq> r;
  {
    std::vector<Zq> tb = poly_mul(t, B, modp);
    std::vector<Zq> one(1, Zq(1, modp));
    std::vector<Zq> res = poly_add(poly_scale(Zq(-1, modp), tb), one, modp);
    for (long i = 0; i < s; ++i)
      if (!(i >= static_cast<long>(res.size()) || res[i].is_zero()))
        throw std::logic_error("hensel: Bezout seed failed");
    if (static_cast<long>(res.size()) <= s)
      r.assign(1, Zq(0, modp));
    else
      r.assign(res.begin() + s, res.end());
  }

  // von zur Gathen-style Hensel steps, divisor A monic, invariant rA + tB = 1.
  long prec = 1;
  while (prec < target.M) {
    long nprec = std::min(2 * prec, target.M);
    PrimePow m2(p, nprec);
    auto fl = poly_reduce_prec(f, m2);
    auto Al = poly_reduce_prec(A, m2);
    auto Bl = poly_reduce_prec(B, m2);
    auto rl = poly_reduce_prec(r, m2);
    auto tl = poly_reduce_prec(t, m2);

    auto e = poly_add(fl, poly_scale(Zq(-1, m2), poly_mul(Al, Bl, m2)), m2);
    poly_trim(e);
    auto te = poly_mul(tl, e, m2);
    auto [q1, rem1] = poly_divmod(te, Al, m2);
    auto Anew = poly_add(Al, rem1, m2);
    auto Bnew = poly_add(Bl, poly_add(poly_mul(rl, e, m2), poly_mul(q1, Bl, m2), m2), m2);
    poly_trim(Anew);
    poly_trim(Bnew);
    if (Anew.size() != A.size() || !(Anew.back().value() == 1) ||
        Bnew.size() != B.size() || !(Bnew.back().value() == 1))
      throw std::runtime_error("hensel: factor degrees drifted");

    auto b = poly_add(poly_add(poly_mul(rl, Anew, m2), poly_mul(tl, Bnew, m2), m2),
                      std::vector<Zq>(1, Zq(-1, m2)), m2);
    poly_trim(b);
    auto tb = poly_mul(tl, b, m2);
    auto [c1, d1] = poly_divmod(tb, Anew, m2);
    auto tnew = poly_add(tl, poly_scale(Zq(-1, m2), d1), m2);
    auto rnew = poly_add(rl, poly_scale(Zq(-1, m2),
                                        poly_add(poly_mul(rl, b, m2), poly_mul(c1, Bnew, m2), m2)),
                         m2);
    poly_trim(rnew);
    poly_trim(tnew);

    A = Anew;
    B = Bnew;
    r = rnew;
    t = tnew;
    prec = nprec;
  }

  HenselSplit out{A, B, r, t};
  // verify
  auto prod = poly_mul(A, B, target);
  poly_trim(prod);
  auto ff = f;
  poly_trim(ff);
  if (prod.size() != ff.size()) throw std::runtime_error("hensel: degree mismatch");
  for (size_t i = 0; i < ff.size(); ++i)
    if (!(prod[i] == ff[i])) throw std::runtime_error("hensel: product check failed");
  auto bez = poly_add(poly_mul(r, A, target), poly_mul(t, B, target), target);
  poly_trim(bez);
  if (!(bez.size() == 1 && bez[0].value() == 1))
    throw std::runtime_error("hensel: Bezout check failed");
  return out;
}

OrdinaryProjection ordinary_projection(const ModSymSpace& s, long p, long M) {
  if (s.N() % p != 0)
    throw std::invalid_argument("ordinary_projection: p must divide the level");
  PrimePow mod(p, M);
  const QMat& U = s.hecke(p);
  long n = s.dim();

  auto cp = charpoly(U);
  std::vector<Zq> f;
  for (auto& c : cp) f.push_back(Zq::from_rat(c, mod));

  OrdinaryProjection out;
  out.mod = mod;

  long sdeg = 0;
  while (sdeg < n && f[sdeg].value() % p == 0) ++sdeg;
  if (sdeg == n) {
    out.ordinary_rank = 0;
    out.unit_factor = {Zq(1, mod)};
    return out;  // U_p topologically nilpotent: zero subspace
  }

  std::vector<std::vector<Zq>> proj(n, std::vector<Zq>(n, Zq(0, mod)));
  if (sdeg == 0) {
    for (long i = 0; i < n; ++i) proj[i][i] = Zq(1, mod);
    out.unit_factor = f;
    out.ordinary_rank = n;
  } else {
    auto split = hensel_split_unit_part(f);
    out.unit_factor = split.B;
    out.ordinary_rank = static_cast<long>(split.B.size()) - 1;
    // projector = (r * A)(U) : kills the non-unit part, identity on unit part
    auto rA = poly_mul(split.r, split.A, mod);
    // Horner with the matrix U mod p^M
    std::vector<std::vector<Zq>> Um(n, std::vector<Zq>(n, Zq(0, mod)));
    for (long i = 0; i < n; ++i)
      for (long j = 0; j < n; ++j) Um[i][j] = Zq::from_rat(U.at(i, j), mod);
    auto mat_mul = [&](const std::vector<std::vector<Zq>>& X,
                       const std::vector<std::vector<Zq>>& Y) {
      std::vector<std::vector<Zq>> R(n, std::vector<Zq>(n, Zq(0, mod)));
      for (long i = 0; i < n; ++i)
        for (long l = 0; l < n; ++l) {
          if (X[i][l].is_zero()) continue;
          for (long j = 0; j < n; ++j) R[i][j] += X[i][l] * Y[l][j];
        }
      return R;
    };
    std::vector<std::vector<Zq>> acc(n, std::vector<Zq>(n, Zq(0, mod)));
    for (long i = 0; i < n; ++i) acc[i][i] = rA.back();
    for (long d = static_cast<long>(rA.size()) - 2; d >= 0; --d) {
      acc = mat_mul(acc, Um);
      for (long i = 0; i < n; ++i) acc[i][i] += rA[d];
    }
    proj = acc;
  }

  // column reduction of the projector image mod p^M, unit pivots only
  std::vector<std::vector<Zq>> basis;
  std::vector<long> pivot_pos;
  for (long col = 0; col < n; ++col) {
    std::vector<Zq> v(n, Zq(0, mod));
    for (long i = 0; i < n; ++i) v[i] = proj[i][col];
    for (size_t b = 0; b < basis.size(); ++b) {
      Zq c = v[pivot_pos[b]];
      if (c.is_zero()) continue;
      for (long i = 0; i < n; ++i) v[i] -= c * basis[b][i];
    }
    long piv = -1;
    for (long i = 0; i < n; ++i)
      if (v[i].is_unit()) {
        piv = i;
        break;
      }
    if (piv < 0) continue;
    Zq inv = v[piv].inverse();
    for (long i = 0; i < n; ++i) v[i] *= inv;
    basis.push_back(v);
    pivot_pos.push_back(piv);
  }
  out.image_basis = std::move(basis);
  if (static_cast<long>(out.image_basis.size()) != out.ordinary_rank)
    throw std::runtime_error("ordinary_projection: image rank mismatch");
  return out;
}

// ---------------------------------------------------------------------------
// eigen symbols

namespace {

// Generator of the value group of an integer-valued functional V over the
// sign-eigenlattice of ker(boundary) in the Manin generator lattice (the
// canonical-period lattice): fold columns along the star involution, then
// column-echelon the boundary rows and take the gcd of the V-row over the
// eliminated columns.
Int cuspidal_value_gcd(const ModSymSpace& s, const std::vector<Rat>& genvals, int sign) {
  const long full = s.ngens();
  const long k = s.k();
  std::vector<std::pair<Int, Int>> reps;
  std::vector<std::vector<Int>> braw;  // boundary rows on raw generators
  std::vector<Int> vraw(full);
  for (long g = 0; g < full; ++g) {
    assert(genvals[g].get_den() == 1);
    vraw[g] = genvals[g].get_num();
  }
  for (long g = 0; g < full; ++g) {
    long p1idx = g / (k - 1), j = g % (k - 1);
    Mat22 m = s.p1().lift_to_sl2(p1idx);
    SymPoly Q = sym_substitute(sym_monomial(k, j), m.adj());
    auto eval_hom = [&](const Int& x, const Int& y) {
      Int v = 0;
      for (long t = 0; t <= k - 2; ++t) {
        if (Q.c[t] == 0) continue;
        Int xp = 1, yp = 1;
        for (long u = 0; u < t; ++u) xp *= x;
        for (long u = 0; u < k - 2 - t; ++u) yp *= y;
        assert(Q.c[t].get_den() == 1);
        v += Q.c[t].get_num() * xp * yp;
      }
      return v;
    };
    auto touch = [&](const Cusp& c) {
      long idx = cusp_index(reps, s.N(), c);
      while (static_cast<long>(braw.size()) <= idx) braw.emplace_back(full, Int(0));
      return idx;
    };
    long i_to = touch(Cusp(m.a, m.c));
    long i_from = touch(Cusp(m.b, m.d));
    braw[i_to][g] += eval_hom(m.a, m.c);
    braw[i_from][g] -= eval_hom(m.b, m.d);
  }

  // star on raw generators: [P_j, (c:d)] -> (-1)^{k-2-j} [P_j, (-c:d)]
  auto star_of = [&](long g) {
    long p1idx = g / (k - 1), j = g % (k - 1);
    auto [c, d] = s.p1().rep(p1idx);
    long tgt = s.p1().index(Int(-c), Int(d));
    int eps = ((k - 2 - j) % 2 == 0) ? +1 : -1;
    return std::pair<long, int>(tgt * (k - 1) + j, eps);
  };
  // fold: one column per orbit of the involution, constrained to the
  // sign-eigenlattice
  std::vector<std::vector<Int>> rows(braw.size());
  std::vector<Int> vrow;
  std::vector<int> seen(full, 0);
  for (auto& r : rows) r.clear();
  for (long g = 0; g < full; ++g) {
    if (seen[g]) continue;
    auto [h, eps] = star_of(g);
    if (h == g) {
      seen[g] = 1;
      if (eps != sign) continue;  // forced zero coordinate
      for (size_t ri = 0; ri < braw.size(); ++ri) rows[ri].push_back(braw[ri][g]);
      vrow.push_back(vraw[g]);
    } else {
      seen[g] = seen[h] = 1;
      for (size_t ri = 0; ri < braw.size(); ++ri)
        rows[ri].push_back(braw[ri][g] + sign * eps * braw[ri][h]);
      vrow.push_back(vraw[g] + sign * eps * vraw[h]);
    }
  }
  const long n = static_cast<long>(vrow.size());

  std::vector<bool> used(n, false);
  const long r = static_cast<long>(rows.size());
  for (long ri = 0; ri < r; ++ri) {
    auto& row = rows[ri];
    // gcd-eliminate this row across unused columns via integer column ops,
    // applied to the remaining rows and the value row as well
    while (true) {
      long piv = -1;
      for (long c = 0; c < n; ++c) {
        if (used[c] || row[c] == 0) continue;
        if (piv < 0 || mpz_cmpabs(row[c].get_mpz_t(), row[piv].get_mpz_t()) < 0) piv = c;
      }
      if (piv < 0) break;
      bool clean = true;
      for (long c = 0; c < n; ++c) {
        if (c == piv || used[c] || row[c] == 0) continue;
        Int q;
        mpz_fdiv_q(q.get_mpz_t(), row[c].get_mpz_t(), row[piv].get_mpz_t());
        for (long rj = ri; rj < r; ++rj) rows[rj][c] -= q * rows[rj][piv];
        vrow[c] -= q * vrow[piv];
        if (row[c] != 0) clean = false;
      }
      if (clean) {
        used[piv] = true;
        break;
      }
    }
  }
  Int d = 0;
  for (long c = 0; c < n; ++c)
    if (!used[c]) d = gcd(d, vrow[c]);
  return d;
}

// Scale a rational vector to a primitive integer vector; returns the factor
// applied.
Rat make_primitive(std::vector<Rat>& v) {
  Int l = 1;
  for (auto& x : v) l = lcm(l, Int(x.get_den()));
  Int g = 0;
  for (auto& x : v) {
    x *= Rat(l);
    x.canonicalize();
    g = gcd(g, Int(x.get_num()));
  }
  if (g == 0) g = 1;
  if (g > 1)
    for (auto& x : v) x /= Rat(g);
  return Rat(l) / Rat(g);
}

std::vector<Rat> gen_values_of(const ModSymSpace& s, const std::vector<Rat>& w) {
  std::vector<Rat> V(s.ngens(), Rat(0));
  for (long g = 0; g < s.ngens(); ++g) {
    const auto& e = s.gen_expr(g);
    Rat acc(0);
    for (long b = 0; b < s.dim(); ++b)
      if (e[b] != 0 && w[b] != 0) acc += e[b] * w[b];
    V[g] = acc;
  }
  return V;
}

QMat eigen_cut_matrix(const ModSymSpace& s, const std::map<long, Rat>& eigenvalue_map, int sign) {
  QMat stack(0, s.dim());
  bool firstrow = true;
  for (const auto& [q, aq] : eigenvalue_map) {
    QMat blk = s.hecke(q).transpose();
    for (long i = 0; i < s.dim(); ++i) blk.at(i, i) -= aq;
    stack = firstrow ? blk : stack.vstack(blk);
    firstrow = false;
  }
  QMat st = s.star().transpose();
  for (long i = 0; i < s.dim(); ++i) st.at(i, i) -= sign;
  stack = firstrow ? st : stack.vstack(st);
  return stack;
}

}  // namespace

EigenSymbol eigen_symbol(std::shared_ptr<const ModSymSpace> s,
                         const std::map<long, Rat>& eigenvalue_map, int sign, long p) {
  auto ker = kernel(eigen_cut_matrix(*s, eigenvalue_map, sign));
  if (ker.empty())
    throw std::invalid_argument("eigen_symbol: eigenvalue system not in the spectrum");
  if (ker.size() > 1)
    throw std::invalid_argument("eigen_symbol: eigenspace dimension > 1 (ambiguous system)");

  EigenSymbol sym;
  sym.space = s;
  sym.sign = sign;
  sym.eigenvalues = eigenvalue_map;
  sym.w = ker[0];
  auto V = gen_values_of(*s, sym.w);
  Rat scale = make_primitive(V);

  // Canonical-period normalization: make the values on the integral cuspidal
  // lattice have gcd 1.  The rescaling is a p-unit at a non-Eisenstein p
  // (relative and absolute homology agree after localization); fall back to
  // the generator-lattice normalization if p were to divide it.
  Int d = cuspidal_value_gcd(*s, V, sign);
  if (d != 0 && d % p != 0) {
    for (auto& x : V) x /= Rat(d);
    scale /= Rat(d);
  }
  for (auto& x : sym.w) x *= scale;
  sym.normalization_scale = scale;
  sym.gen_values = std::move(V);

  // p-saturation sanity: the value lattice must contain a p-unit and stay
  // p-integral
  bool unit = false;
  for (const auto& x : sym.gen_values) {
    if (x != 0 && vp(x, Int(p)) == 0) unit = true;
    if (x != 0 && vp(x, Int(p)) < 0)
      throw std::runtime_error("eigen_symbol: values not p-integral after normalization");
  }
  if (!unit) throw std::runtime_error("eigen_symbol: value lattice not p-saturated");
  return sym;
}

EigenSymbol eigen_symbol_stabilized(std::shared_ptr<const ModSymSpace> s,
                                    const std::map<long, Rat>& good_map, int sign, long p,
                                    const Rat& ap, long M) {
  if (s->N() % p != 0)
    throw std::invalid_argument("eigen_symbol_stabilized: p must divide the level");
  auto ker = kernel(eigen_cut_matrix(*s, good_map, sign));
  if (ker.size() != 2)
    throw std::invalid_argument("eigen_symbol_stabilized: expected a 2-dimensional old space");

  std::vector<std::vector<Rat>> w = {ker[0], ker[1]};
  std::vector<std::vector<Rat>> V;
  for (auto& wi : w) {
    auto Vi = gen_values_of(*s, wi);
    Rat sc = make_primitive(Vi);
    for (auto& x : wi) x *= sc;
    V.push_back(std::move(Vi));
  }

  // Joint p-saturation of the rank-2 value lattice.
  const Int pz(p);
  while (true) {
    // find (c1, c2) != 0 mod p with c1 V1 + c2 V2 = 0 mod p
    long pivot = -1;
    Int r1, r2;
    bool dep = true;
    // row-reduce the 2 x ngens matrix over F_p
    long n = static_cast<long>(V[0].size());
    long lead = -1;
    for (long i = 0; i < n && lead < 0; ++i) {
      Int a = Int(V[0][i].get_num()) % pz;
      if (a != 0) lead = i;
    }
    if (lead < 0) throw std::runtime_error("stabilized: zero value vector");
    Int a = Int(V[0][lead].get_num()) % pz;
    Int b = Int(V[1][lead].get_num()) % pz;
    // combo = V2 - (b/a) V1 mod p; dependent iff combo = 0 mod p
    Int ainv;
    mpz_invert(ainv.get_mpz_t(), a.get_mpz_t(), pz.get_mpz_t());
    Int coef = (b * ainv) % pz;
    dep = true;
    for (long i = 0; i < n; ++i) {
      Int x = (Int(V[1][i].get_num()) - coef * Int(V[0][i].get_num())) % pz;
      if (x != 0) {
        dep = false;
        break;
      }
    }
    (void)pivot;
    (void)r1;
    (void)r2;
    if (!dep) break;
    // replace V2 by (V2 - coef*V1)/p
    for (long i = 0; i < n; ++i) {
      Rat x = V[1][i] - Rat(coef) * V[0][i];
      x /= Rat(pz);
      x.canonicalize();
      if (x.get_den() != 1) throw std::logic_error("stabilized: saturation not integral");
      V[1][i] = x;
    }
    for (long i = 0; i < s->dim(); ++i) w[1][i] = (w[1][i] - Rat(coef) * w[0][i]) / Rat(pz);
    std::swap(V[0], V[1]);
    std::swap(w[0], w[1]);
  }

  // U_p restricted to the plane: psi_j o U = B_1j psi_1 + B_2j psi_2
  const QMat& U = s->hecke(p);
  QMat W(2, s->dim());
  for (int i = 0; i < 2; ++i)
    for (long j = 0; j < s->dim(); ++j) W.at(i, j) = w[i][j];
  QMat Bm(2, 2);
  for (int j = 0; j < 2; ++j) {
    auto z = vec_mat(w[j], U);
    // solve z = x1 w1 + x2 w2 using two independent columns
    long c1 = -1, c2 = -1;
    for (long i = 0; i < s->dim(); ++i) {
      if (w[0][i] == 0 && w[1][i] == 0) continue;
      if (c1 < 0) {
        c1 = i;
        continue;
      }
      Rat det = w[0][c1] * w[1][i] - w[0][i] * w[1][c1];
      if (det != 0) {
        c2 = i;
        break;
      }
    }
    if (c2 < 0) throw std::runtime_error("stabilized: degenerate plane");
    Rat det = w[0][c1] * w[1][c2] - w[0][c2] * w[1][c1];
    Rat x1 = (z[c1] * w[1][c2] - z[c2] * w[1][c1]) / det;
    Rat x2 = (w[0][c1] * z[c2] - w[0][c2] * z[c1]) / det;
    for (long i = 0; i < s->dim(); ++i)
      if (z[i] != x1 * w[0][i] + x2 * w[1][i])
        throw std::runtime_error("stabilized: U_p does not preserve the plane");
    Bm.at(0, j) = x1;
    Bm.at(1, j) = x2;
  }

  // charpoly check: x^2 - a_p x + p^{k-1}
  Rat tr = Bm.at(0, 0) + Bm.at(1, 1);
  Rat det2 = Bm.at(0, 0) * Bm.at(1, 1) - Bm.at(0, 1) * Bm.at(1, 0);
  if (tr != ap || det2 != Rat(pow_ui(p, s->k() - 1)))
    throw std::runtime_error("stabilized: U_p charpoly is not x^2 - a_p x + p^{k-1}");

  PrimePow mod(p, M);
  Zq alpha = unit_root_of_quadratic(Zq::from_rat(ap, mod), Zq(pow_ui(p, s->k() - 1), mod));

  // kernel of (B - alpha) mod p^M via the adjugate columns
  Zq b11 = Zq::from_rat(Bm.at(0, 0), mod), b12 = Zq::from_rat(Bm.at(0, 1), mod);
  Zq b21 = Zq::from_rat(Bm.at(1, 0), mod), b22 = Zq::from_rat(Bm.at(1, 1), mod);
  Zq x1 = b12, x2 = alpha - b11;
  if (!x1.is_unit() && !x2.is_unit()) {
    x1 = alpha - b22;
    x2 = b21;
  }
  if (!x1.is_unit() && !x2.is_unit())
    throw std::runtime_error("stabilized: could not find unit eigenvector mod p^M");
  // verify (B - alpha) x = 0 mod p^M
  Zq chk1 = (b11 - alpha) * x1 + b12 * x2;
  Zq chk2 = b21 * x1 + (b22 - alpha) * x2;
  if (!chk1.is_zero() || !chk2.is_zero())
    throw std::runtime_error("stabilized: eigenvector check failed");

  EigenSymbol sym;
  sym.space = s;
  sym.sign = sign;
  sym.eigenvalues = good_map;
  sym.stabilized = true;
  sym.stab_prec = M;
  sym.alpha = alpha;
  sym.w.assign(s->dim(), Rat(0));
  for (long i = 0; i < s->dim(); ++i)
    sym.w[i] = Rat(x1.value()) * w[0][i] + Rat(x2.value()) * w[1][i];
  sym.normalization_scale = 1;
  sym.gen_values = gen_values_of(*s, sym.w);

  bool unit = false;
  for (const auto& x : sym.gen_values)
    if (x != 0 && vp(x, Int(p)) == 0) {
      unit = true;
      break;
    }
  if (!unit) throw std::runtime_error("stabilized: value lattice not p-saturated");
  return sym;
}

std::vector<Rat> EigenSymbol::pair(const Cusp& a, const Cusp& b) const {
  std::vector<Rat> out(space->k() - 1, Rat(0));
  for (long j = 0; j <= space->k() - 2; ++j) out[j] = pair_monomial(j, a, b);
  return out;
}

Rat EigenSymbol::pair_monomial(long j, const Cusp& a, const Cusp& b) const {
  Rat acc(0);
  const long km1 = space->k() - 1;
  space->path_segments(sym_monomial(space->k(), j), a, b, [&](const SymPoly& Q, long p1idx) {
    for (long t = 0; t < km1; ++t) {
      if (Q.c[t] == 0) continue;
      const Rat& gv = gen_values[p1idx * km1 + t];
      if (gv != 0) acc += Q.c[t] * gv;
    }
  });
  return acc;
}

}  // namespace iwalab
