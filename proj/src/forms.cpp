#include "iwalab/forms.hpp"

#include <algorithm>
#include <cassert>
#include <mutex>
#include <numeric>

namespace iwalab {

namespace {

long mod_pos(const Int& x, long q) {
  Int r = x % q;
  if (r < 0) r += q;
  return r.get_si();
}

// Legendre symbol via Euler's criterion; q an odd prime.
int legendre(long a, long q) {
  a %= q;
  if (a < 0) a += q;
  if (a == 0) return 0;
  Int r;
  mpz_powm_ui(r.get_mpz_t(), Int(a).get_mpz_t(), (q - 1) / 2, Int(q).get_mpz_t());
  return r == 1 ? 1 : -1;
}

long count_points_small(const EllipticCurveW& E, long q) {
  // direct enumeration over the long Weierstrass model; used for q = 2, 3
  long count = 1;  // point at infinity
  long a1 = mod_pos(E.a1, q), a2 = mod_pos(E.a2, q), a3 = mod_pos(E.a3, q);
  long a4 = mod_pos(E.a4, q), a6 = mod_pos(E.a6, q);
  for (long x = 0; x < q; ++x)
    for (long y = 0; y < q; ++y) {
      long lhs = (y * y + a1 * x * y + a3 * y) % q;
      long rhs = (((x + a2) * x + a4) * x + a6) % q;
      if ((lhs - rhs) % q == 0) ++count;
    }
  return count;
}

long good_trace(const EllipticCurveW& E, long q) {
  if (q <= 3) return q + 1 - count_points_small(E, q);
  // complete the square: (2y + a1 x + a3)^2 = 4x^3 + b2 x^2 + 2 b4 x + b6
  long b2 = mod_pos(E.b2(), q), b4 = mod_pos(E.b4(), q), b6 = mod_pos(E.b6(), q);
  long tr = 0;
  for (long x = 0; x < q; ++x) {
    long f = (((4 * x + b2) % q) * x % q + 2 * b4 % q) % q * x % q + b6;
    tr -= legendre(f % q, q);
  }
  return tr;
}

// split/non-split test at a multiplicative prime q >= 5 on a q-minimal model
int multiplicative_sign(const EllipticCurveW& E, long q) {
  // short model y^2 = x^3 - 27 c4 x - 54 c6 over F_q (q >= 5); the node is at
  // the double root x0, the simple root is -2 x0, and the reduction is split
  // iff x0 - (-2 x0) = 3 x0 is a square.
  long c4 = mod_pos(E.c4(), q), c6 = mod_pos(E.c6(), q);
  long A = mod_pos(Int(-27) * c4, q), B = mod_pos(Int(-54) * c6, q);
  long x0 = -1;
  for (long x = 0; x < q; ++x) {
    long fx = ((x * x % q) * x % q + A * x % q + B) % q;
    long dfx = (3 * x % q * x % q + A) % q;
    if (fx % q == 0 && dfx % q == 0) {
      x0 = x;
      break;
    }
  }
  if (x0 < 0) throw std::runtime_error("multiplicative_sign: no node found (model not minimal?)");
  long t = 3 * x0 % q;
  if (t == 0) throw std::runtime_error("multiplicative_sign: triple root (additive)");
  return legendre(t, q);
}

}  // namespace

long ap_curve(const EllipticCurveW& E, long q) {
  if (E.disc() == 0) throw std::invalid_argument("ap_curve: singular curve");
  long vN = 0;
  if (E.conductor != 0) vN = vp(E.conductor, Int(q));
  bool disc_bad = (E.disc() % q == 0);

  if (!disc_bad) {
    if (vN != 0) throw std::runtime_error("ap_curve: conductor claims bad reduction at a good prime");
    return good_trace(E, q);
  }
  // bad reduction on this model
  if (E.conductor != 0 && vN == 0)
    throw std::runtime_error("ap_curve: model is not minimal at a good prime (unsupported)");
  if (vN >= 2) return 0;  // additive
  if (q == 2 || q == 3) {
    // v_q(N) = 1, multiplicative at 2 or 3: count smooth points;
    // #E^ns(F_q) = q - 1 for split, q + 1 for non-split.
    long raw = count_points_small(E, q);
    long x0 = -1, y0 = -1;
    long a1 = mod_pos(E.a1, q), a2 = mod_pos(E.a2, q), a3 = mod_pos(E.a3, q);
    long a4 = mod_pos(E.a4, q), a6 = mod_pos(E.a6, q);
    for (long x = 0; x < q && x0 < 0; ++x)
      for (long y = 0; y < q; ++y) {
        long e1 = (y * y + a1 * x * y + a3 * y - (((x + a2) * x + a4) * x + a6)) % q;
        long dx = (a1 * y - (3 * x * x + 2 * a2 * x + a4)) % q;
        long dy = (2 * y + a1 * x + a3) % q;
        if ((e1 % q + q) % q == 0 && (dx % q + q) % q == 0 && (dy % q + q) % q == 0) {
          x0 = x;
          y0 = y;
          break;
        }
      }
    if (x0 < 0) throw std::runtime_error("ap_curve: singular point not found");
    (void)y0;
    long ns = raw - 1;
    if (ns == q - 1) return 1;
    if (ns == q + 1) return -1;
    throw std::runtime_error("ap_curve: smooth point count inconsistent");
  }
  return multiplicative_sign(E, q);
}

Int an_curve(const EllipticCurveW& E, const Int& n) {
  if (n <= 0) throw std::invalid_argument("an_curve: n >= 1");
  Int an = 1, m = n;
  Int q = 2;
  while (m > 1) {
    if (q * q > m) q = m;  // remaining cofactor is prime
    if (m % q != 0) {
      q += 1;
      continue;
    }
    long r = 0;
    while (m % q == 0) {
      m /= q;
      ++r;
    }
    long ql = q.get_si();
    Int aq(ap_curve(E, ql));
    bool good = (E.conductor != 0) ? (E.conductor % ql != 0) : (E.disc() % ql != 0);
    Int prev = 1, cur = aq;
    for (long i = 2; i <= r; ++i) {
      Int nxt = good ? Int(aq * cur - ql * prev) : Int(aq * cur);
      prev = cur;
      cur = nxt;
    }
    an *= cur;
    q += 1;
  }
  return an;
}

namespace {

std::vector<Int> g_tau;  // g_tau[n] = tau(n), index 0 unused (= 0)
std::mutex g_tau_mu;

void extend_tau(long cap) {
  if (static_cast<long>(g_tau.size()) > cap) return;
  // Delta = q * (eta^3)^8 with eta(q)^3 = sum_{j>=0} (-1)^j (2j+1) q^{j(j+1)/2}
  long len = cap;  // coefficients of (eta^3)^8 up to q^{cap-1}
  std::vector<Int> J(len, Int(0));
  for (long j = 0;; ++j) {
    long e = j * (j + 1) / 2;
    if (e >= len) break;
    J[e] = (j % 2 == 0) ? (2 * j + 1) : -(2 * j + 1);
  }
  auto sq = [len](const std::vector<Int>& a) {
    std::vector<Int> r(len, Int(0));
    for (long i = 0; i < len; ++i) {
      if (a[i] == 0) continue;
      // diagonal term
      if (2 * i < len) r[2 * i] += a[i] * a[i];
      for (long j = i + 1; i + j < len; ++j) {
        if (a[j] == 0) continue;
        r[i + j] += 2 * a[i] * a[j];
      }
    }
    return r;
  };
  std::vector<Int> J8 = sq(sq(sq(J)));
  g_tau.assign(cap + 1, Int(0));
  for (long n = 1; n <= cap; ++n) g_tau[n] = J8[n - 1];
}

}  // namespace

const std::vector<Int>& tau_series(long cap) {
  std::lock_guard<std::mutex> lock(g_tau_mu);
  extend_tau(std::max(cap, 32L));
  return g_tau;
}

Int tau(const Int& n) {
  if (n <= 0) throw std::invalid_argument("tau: n >= 1");
  // factor n, seed primes from the product expansion, extend by the Hecke
  // recurrence and multiplicativity
  Int result = 1;
  Int m = n;
  for (Int q = 2; m > 1; q += 1) {
    if (q * q > m) q = m;
    if (m % q != 0) continue;
    long r = 0;
    while (m % q == 0) {
      m /= q;
      ++r;
    }
    Int tq;
    {
      std::lock_guard<std::mutex> lock(g_tau_mu);
      extend_tau(std::max(q.get_si(), 32L));
      tq = g_tau[q.get_si()];
    }
    Int q11 = pow_int(q, 11);
    Int prev = 1, cur = tq;
    for (long i = 2; i <= r; ++i) {
      Int nxt = tq * cur - q11 * prev;
      prev = cur;
      cur = nxt;
    }
    result *= cur;
  }
  return result;
}

Int EigenformDescriptor::a(long q) const {
  switch (kind) {
    case ProviderKind::curve:
      return Int(ap_curve(*curve, q));
    case ProviderKind::delta:
      return tau(Int(q));
    case ProviderKind::table: {
      auto it = table.find(q);
      if (it == table.end())
        throw std::out_of_range("EigenformDescriptor: table has no a_" + std::to_string(q));
      return it->second;
    }
  }
  throw std::logic_error("EigenformDescriptor::a: bad kind");
}

long EigenformDescriptor::tame_level(long p_) const {
  long N = level;
  while (N % p_ == 0) N /= p_;
  return N;
}

EigenformDescriptor p_stabilize(const EigenformDescriptor& f, long p, long M) {
  EigenformDescriptor g = f;
  g.p = p;
  g.M = M;
  PrimePow mod(p, M);
  Int ap = f.a(p);
  if (ap % p == 0) throw std::domain_error("p_stabilize: not p-ordinary (a_p = 0 mod p)");
  if (f.level % p == 0) {
    // already at p-level: U_p acts by a_p, which must be a unit
    g.alpha = Zq(ap, mod);
    g.is_p_stabilized = false;
    return g;
  }
  Int pk1 = pow_ui(p, f.weight - 1);
  g.alpha = unit_root_of_quadratic(Zq(ap, mod), Zq(pk1, mod));
  g.is_p_stabilized = true;
  // stabilization identity: alpha + p^{k-1}/alpha = a_p mod p^M
  Zq chk = *g.alpha + Zq(pk1, mod) * g.alpha->inverse() - Zq(ap, mod);
  if (!chk.is_zero()) throw std::logic_error("p_stabilize: stabilization identity failed");
  return g;
}

long sturm_bound(long N1, long N2, long p, long kmax) {
  long L = std::lcm(N1, N2) * p * p;
  Int idx(L);
  Int num = 1, den = 1;
  long LL = L;
  for (long q = 2; q * q <= LL; ++q) {
    if (LL % q != 0) continue;
    num *= (q + 1);
    den *= q;
    while (LL % q == 0) LL /= q;
  }
  if (LL > 1) {
    num *= (LL + 1);
    den *= LL;
  }
  Int mu = Int(L) * num / den;
  Int bound = (Int(kmax) * mu + 11) / 12;  // ceil
  return bound.get_si();
}

CongruenceResult congruent_mod_p(const EigenformDescriptor& f, const EigenformDescriptor& g,
                                 long p, long cap) {
  CongruenceResult res;
  res.cap = cap;
  if (f.kind == ProviderKind::delta || g.kind == ProviderKind::delta) tau_series(cap);
  for (long q : primes_up_to(cap)) {
    if (q == p || f.level % q == 0 || g.level % q == 0) continue;
    Int d = f.a(q) - g.a(q);
    if (d % p != 0) {
      res.congruent = false;
      res.witness = q;
      return res;
    }
  }
  res.congruent = true;
  return res;
}

std::pair<Zq, Zq> frobenius_fingerprint(const EigenformDescriptor& f, long p, long ell) {
  if (ell == p || f.level % ell == 0)
    throw std::invalid_argument("frobenius_fingerprint: ell divides N_f p");
  PrimePow mod(p, 1);
  return {Zq(f.a(ell), mod), Zq(pow_ui(ell, f.weight - 1), mod)};
}

std::string local_type_name(LocalType t) {
  switch (t) {
    case LocalType::good: return "good";
    case LocalType::special: return "special";
    case LocalType::ramified_principal_series: return "ramified-principal-series";
    case LocalType::supercuspidal_proxy: return "supercuspidal-proxy";
  }
  return "?";
}

Zq BranchData::a_mod_p(long ell) const {
  PrimePow mod(p, 1);
  auto it = bad_eigenvalues.find(ell);
  if (it != bad_eigenvalues.end()) return Zq(it->second, mod);
  return Zq(member.a(ell), mod);
}

BranchData make_branch(const EigenformDescriptor& f, long p) {
  BranchData b;
  b.p = p;
  b.member = f;
  b.tame_level = f.tame_level(p);
  long N = b.tame_level;
  for (long ell = 2; ell <= N; ++ell) {
    if (N % ell != 0 || !is_prime(Int(ell))) continue;
    long v = vp(Int(N), Int(ell));
    Int aell = f.a(ell);
    b.bad_eigenvalues[ell] = aell;
    if (v == 1 && aell != 0) {
      Int lk2 = pow_ui(ell, f.weight - 2);
      b.local_types[ell] =
          (aell * aell == lk2) ? LocalType::special : LocalType::ramified_principal_series;
    } else {
      b.local_types[ell] = LocalType::supercuspidal_proxy;
    }
  }
  return b;
}

}  // namespace iwalab
