#include "iwalab/plfun.hpp"

#include "iwalab/cache.hpp"

#include <cassert>
#include <sstream>

namespace iwalab {

MazurTateElement mazur_tate(const EigenSymbol& sym, const Zq& alpha, long n) {
  if (n < 1) throw std::invalid_argument("mazur_tate: n >= 1");
  if (!alpha.is_unit()) throw std::invalid_argument("mazur_tate: alpha must be a p-unit");
  const auto& space = *sym.space;
  long p = alpha.p(), M = alpha.M();
  long k = space.k();
  PrimePow mod(p, M);
  bool native = (space.N() % p == 0);

  MazurTateElement mt;
  mt.p = p;
  mt.n = n;
  mt.M = M;
  mt.sign = sym.sign;

  Int pn = pow_ui(p, n);
  Int pn1 = pow_ui(p, n - 1);
  Zq a_inv_n = alpha.inverse().pow(n);
  Zq corr = native ? Zq(0, mod) : Zq(pow_ui(p, k - 2), mod) * alpha.inverse().pow(n + 1);

  for (Int a = 1; a < pn; a += 1) {
    if (a % p == 0) continue;
    Rat vn = sym.pair_monomial(0, Cusp(1, 0), Cusp(a, pn));
    Zq val = a_inv_n * Zq::from_rat(vn, mod);
    if (!native) {
      Rat vprev = (n == 1) ? sym.pair_monomial(0, Cusp(1, 0), Cusp(a, 1))
                           : sym.pair_monomial(0, Cusp(1, 0), Cusp(a % pn1, pn1));
      val -= corr * Zq::from_rat(vprev, mod);
    }
    mt.values[a.get_si()] = val;
  }
  return mt;
}

LambdaSeries to_series(const MazurTateElement& mt, long i, bool enforce_sign) {
  int want = (i % 2 == 0) ? +1 : -1;
  if (enforce_sign && mt.sign != want)
    throw std::invalid_argument("to_series: symbol sign does not match (-1)^i");

  long p = mt.p, M = mt.M, n = mt.n;
  long D = 1;
  for (long t = 1; t < n; ++t) D *= p;
  LambdaSeries out(p, M, D, n);

  long prec = std::max(M, n) + 1;
  for (const auto& [a, v] : mt.values) {
    CycloDecomp d = decompose(Int(a), p, prec);
    Int e = d.exponent.value() % D;  // exponent mod p^{n-1}
    Zq w = d.teich.truncate(M).pow(Int(i)).inverse();
    Zq c = out.coeff(e.get_si()) + w * v;
    out.set_coeff(e.get_si(), c);
  }
  return out;
}

namespace {

std::string sigma_tag(const std::vector<long>& sigma) {
  std::ostringstream os;
  os << "{";
  for (size_t j = 0; j < sigma.size(); ++j) os << (j ? "," : "") << sigma[j];
  os << "}";
  return os.str();
}

std::map<long, Rat> bad_u_values(const EigenformDescriptor& f) {
  std::map<long, Rat> u;
  for (long q = 2; q <= f.level; ++q)
    if (f.level % q == 0 && is_prime(Int(q))) u[q] = Rat(f.a(q));
  return u;
}

}  // namespace

EigenSymbol cut_eigen_symbol(std::shared_ptr<const ModSymSpace> space,
                             const EigenformDescriptor& f, const std::map<long, Rat>& u_values,
                             int sign, long p, long max_cut_primes) {
  std::map<long, Rat> eigmap = u_values;
  long added = 0;
  std::string last_err = "no cut primes available";
  for (long q = 2; added < max_cut_primes; ++q) {
    if (!is_prime(Int(q))) continue;
    if (q == p || space->N() % q == 0 || f.level % q == 0) continue;
    eigmap[q] = Rat(f.a(q));
    ++added;
    try {
      return eigen_symbol(space, eigmap, sign, p);
    } catch (const std::invalid_argument& e) {
      last_err = e.what();
      if (std::string(e.what()).find("not in the spectrum") != std::string::npos) throw;
      // ambiguous so far: cut with one more T_q
    }
  }
  throw std::runtime_error(std::string("cut_eigen_symbol: ") + last_err);
}

namespace {

// Build the eigen symbol for f by the route the descriptor calls for.
EigenSymbol symbol_for(const EigenformDescriptor& f, long p, long M, int sign,
                       const PlOptions& opt) {
  if (f.level % p == 0) {
    auto space = cache::space(f.level, f.weight);
    return cut_eigen_symbol(space, f, bad_u_values(f), sign, p, opt.max_cut_primes);
  }
  if (f.kind == ProviderKind::delta || opt.force_stabilized_space) {
    auto space = cache::space(f.level * p, f.weight);
    std::map<long, Rat> good;
    long added = 0;
    std::string err = "no cut primes";
    for (long q = 2; added < opt.max_cut_primes; ++q) {
      if (!is_prime(Int(q)) || q == p || f.level % q == 0) continue;
      good[q] = Rat(f.a(q));
      ++added;
      try {
        return eigen_symbol_stabilized(space, good, sign, p, Rat(f.a(p)), M);
      } catch (const std::invalid_argument& e) {
        err = e.what();
      }
    }
    throw std::runtime_error(std::string("stabilized cut failed: ") + err);
  }
  auto space = cache::space(f.level, f.weight);
  return cut_eigen_symbol(space, f, bad_u_values(f), sign, p, opt.max_cut_primes);
}

void attach_invariants(PadicLFunction& L, const EigenSymbol& sym, const Zq& alpha, long n, long i,
                       bool recheck) {
  L.series = to_series(mazur_tate(sym, alpha, n), i);
  L.inv = invariants(L.series);
  if (recheck && L.inv.certified) {
    LambdaSeries s2 = to_series(mazur_tate(sym, alpha, n + 1), i);
    InvariantReport r2 = invariants(s2);
    bool agree = r2.certified && r2.mu == L.inv.mu && r2.lambda == L.inv.lambda;
    if (agree) {
      // low-degree coefficients agree exactly mod p across levels
      LambdaSeries a1 = L.series.reduce_mod_p();
      LambdaSeries b1 = s2.truncate(1, L.series.D);
      b1.source_level = a1.source_level;
      agree = (a1.c == b1.c);
    }
    L.recheck_agreed = agree;
    if (!agree) {
      L.inv.certified = false;
      L.inv.note = "level n+1 recomputation disagreed";
    }
  }
}

}  // namespace

PadicLFunction pl_function(const EigenformDescriptor& f0, long p, long i, long n, long M,
                           const PlOptions& opt) {
  EigenformDescriptor f =
      (f0.alpha && f0.p == p && f0.alpha->M() >= M) ? f0 : p_stabilize(f0, p, M);
  int sign = (i % 2 == 0) ? +1 : -1;

  PadicLFunction L;
  L.form_id = f.id;
  L.p = p;
  L.i = i;
  L.n = n;
  L.M = M;
  L.alpha = f.alpha->truncate(M);

  EigenSymbol sym = symbol_for(f, p, M, sign, opt);
  L.normalization_scale = sym.normalization_scale;
  L.trivial_zero = (f.level % p == 0 && vp(Int(f.level), Int(p)) == 1 && f.a(p) == 1);
  attach_invariants(L, sym, *L.alpha, n, i, opt.recheck_next_level);
  return L;
}

LambdaSeries mod_p_l_function(const PadicLFunction& L) { return L.series.reduce_mod_p(); }

PadicLFunction nonprimitive_pl(const EigenformDescriptor& f0, long p, long i,
                               const std::vector<long>& sigma, long n, long M,
                               const PlOptions& opt) {
  for (long ell : sigma) {
    if (ell == p) throw std::invalid_argument("nonprimitive_pl: p in Sigma");
    if (!is_prime(Int(ell))) throw std::invalid_argument("nonprimitive_pl: Sigma must be prime");
  }
  if (sigma.empty()) {
    PadicLFunction L = pl_function(f0, p, i, n, M, opt);
    L.form_id += "^Sigma{}";
    return L;
  }
  EigenformDescriptor f =
      (f0.alpha && f0.p == p && f0.alpha->M() >= M) ? f0 : p_stabilize(f0, p, M);
  int sign = (i % 2 == 0) ? +1 : -1;

  long raised = f.level;
  for (long ell : sigma) {
    if (f.level % ell == 0)
      throw std::invalid_argument("nonprimitive_pl: Sigma meets the level (unsupported)");
    raised *= ell * ell;
  }
  if (raised % p != 0)
    throw std::invalid_argument("nonprimitive_pl: requires p | level in this artifact");

  PadicLFunction L;
  L.form_id = f.id + "^Sigma" + sigma_tag(sigma);
  L.p = p;
  L.i = i;
  L.n = n;
  L.M = M;
  L.alpha = f.alpha->truncate(M);

  auto space = cache::space(raised, f.weight);
  std::map<long, Rat> u = bad_u_values(f);
  for (long ell : sigma) u[ell] = Rat(0);  // the U_ell = 0 old line
  EigenSymbol sym = cut_eigen_symbol(space, f, u, sign, p, opt.max_cut_primes);
  L.normalization_scale = sym.normalization_scale;
  L.trivial_zero = (vp(Int(f.level), Int(p)) == 1 && f.a(p) == 1);
  attach_invariants(L, sym, *L.alpha, n, i, opt.recheck_next_level);
  return L;
}

}  // namespace iwalab
