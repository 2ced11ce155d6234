#include "iwalab/iwasawa.hpp"

#include <algorithm>

#include "iwalab/cyclo.hpp"

namespace iwalab {

EulerFactor euler_factor(const BranchData& branch, long ell) {
  if (ell == branch.p)
    throw std::invalid_argument("euler_factor: ell = p (E_p = 1 - U_p X is not used by transfer)");
  EulerFactor E;
  E.ell = ell;
  E.quadratic = (branch.tame_level % ell != 0);
  E.degree = E.quadratic ? 2 : 1;
  E.a = E.quadratic ? branch.member.a(ell)
                    : branch.bad_eigenvalues.at(ell);
  return E;
}

PlacesAbove primes_above(long ell, long p) {
  PlacesAbove pa;
  pa.n = wild_valuation_exact(ell, p);
  pa.count = pow_ui(p, pa.n);
  return pa;
}

EulerSubstitution euler_substituted(const BranchData& branch, long ell, long i, long D, long M) {
  long p = branch.p;
  EulerFactor E = euler_factor(branch, ell);
  long k = branch.member.weight;

  long eprec = binomial_exponent_precision(p, M, D) + 1;
  CycloDecomp d = decompose(Int(ell), p, eprec + 1);
  Zq e = d.exponent;  // mod p^eprec

  PrimePow mod(p, M);
  Zq w = d.teich.truncate(M).pow(Int(i)).inverse();  // omega^{-i}(ell)
  Zq ell_inv = Zq(ell, mod).inverse();

  auto build = [&](int expsign) {
    Zq e1 = (expsign > 0) ? e : -e;
    LambdaSeries lin = binomial_power(e1, D, M);
    LambdaSeries out = scale(-(Zq(E.a, mod) * ell_inv * w), lin);
    out.c[0] = (out.coeff(0) + Zq(1, mod)).value();
    if (E.quadratic) {
      LambdaSeries quad = binomial_power(e1 + e1, D, M);
      // ell^{k-3} = ell^{k-2} * ell^{-1}
      Zq cq = Zq(pow_ui(ell, k - 2), mod) * ell_inv * w * w;
      out = add(out, scale(cq, quad));
    }
    return out;
  };

  EulerSubstitution sub;
  sub.inverse_sub = build(-1);
  sub.direct_sub = build(+1);
  return sub;
}

EllResult e_ell(const BranchData& branch, long ell, long i, long D) {
  EllResult r;
  auto pa = primes_above(ell, branch.p);
  r.places_n = pa.n;
  r.places = pa.count;
  if (D <= 0) {
    // default truncation 2 p^{n+1}: covers the witness degrees p^n and 2 p^n
    D = 2;
    for (long t = 0; t <= pa.n + 1; ++t) D *= branch.p;
    D = std::max(D, 8L);
  }
  r.used_D = D;
  EulerSubstitution sub = euler_substituted(branch, ell, i, D, 1);
  InvariantReport inv = invariants(sub.inverse_sub);
  InvariantReport dir = invariants(sub.direct_sub);
  if (!inv.mu || *inv.mu != 0)
    throw std::logic_error("e_ell: substituted Euler factor must have unit content");
  if (!inv.lambda) return r;  // undetermined, raise D
  r.value = inv.lambda;
  r.variant_agrees = (dir.lambda && *dir.lambda == *inv.lambda);
  return r;
}

MuTransferReport mu_transfer_check(const PadicLFunction& L1, const PadicLFunction& L2) {
  MuTransferReport r;
  r.f1 = L1.form_id;
  r.f2 = L2.form_id;
  r.p = L1.p;
  r.i = L1.i;
  if (L1.p != L2.p || L1.i != L2.i)
    throw std::invalid_argument("mu_transfer_check: mismatched (p, i)");
  if (L1.inv.certified) r.mu1 = L1.inv.mu;
  if (L2.inv.certified) r.mu2 = L2.inv.mu;
  r.determined = r.mu1.has_value() && r.mu2.has_value();
  if (r.determined) r.consistent = ((*r.mu1 == 0) == (*r.mu2 == 0));
  return r;
}

TransferReport lambda_transfer_check(const BranchData& b1, const BranchData& b2,
                                     const PadicLFunction& L1, const PadicLFunction& L2,
                                     bool congruent, long congruence_cap) {
  if (b1.p != b2.p) throw std::invalid_argument("lambda_transfer_check: mismatched p");
  TransferReport r;
  r.f1 = L1.form_id;
  r.f2 = L2.form_id;
  r.p = b1.p;
  r.i = L1.i;
  r.congruence_checked = congruence_cap > 0;
  r.congruent = congruent;
  r.congruence_cap = congruence_cap;
  if (!congruent) {
    r.note = "forms not congruent mod p; transfer law inapplicable";
    return r;
  }

  if (L1.inv.certified) {
    r.mu1 = L1.inv.mu;
    r.lambda1 = L1.inv.lambda;
  }
  if (L2.inv.certified) {
    r.mu2 = L2.inv.mu;
    r.lambda2 = L2.inv.lambda;
  }
  bool det = r.mu1 && r.mu2 && r.lambda1 && r.lambda2;
  if (det && (*r.mu1 != 0 || *r.mu2 != 0)) {
    r.note = "mu > 0: lambda transfer inapplicable";
    return r;
  }

  // sum over ell | N1 N2 (tame levels), ell != p; primes away from both
  // levels share the Euler factor and contribute 0
  std::vector<long> ells;
  for (long ell = 2; ell <= std::max(b1.tame_level, b2.tame_level); ++ell) {
    if (!is_prime(Int(ell)) || ell == b1.p) continue;
    if (b1.tame_level % ell == 0 || b2.tame_level % ell == 0) ells.push_back(ell);
  }
  bool all_e = true;
  long rhs = 0;
  for (long ell : ells) {
    TransferPrime tp;
    tp.ell = ell;
    auto r1 = e_ell(b1, ell, r.i);
    auto r2 = e_ell(b2, ell, r.i);
    tp.e1 = r1.value;
    tp.e2 = r2.value;
    tp.places = r1.places;
    if (!r1.variant_agrees || !r2.variant_agrees) tp.note = "substitution variants disagree";
    if (r1.value && r2.value)
      rhs += *r2.value - *r1.value;
    else
      all_e = false;
    r.primes.push_back(tp);
  }
  if (det) r.lhs = *r.lambda1 - *r.lambda2;
  if (all_e) r.rhs = rhs;
  if (det && all_e) {
    r.balanced = (*r.lhs == *r.rhs);
    r.certified = L1.inv.certified && L2.inv.certified;
  } else {
    r.note = "undetermined invariants; transfer report emitted without verdict";
  }
  return r;
}

DeltaIdentityReport delta_identity_check(const BranchData& b1, const BranchData& b2, long i,
                                         long ell, std::optional<long> delta1,
                                         std::optional<long> delta2) {
  if (b1.p != b2.p) throw std::invalid_argument("delta_identity_check: mismatched p");
  DeltaIdentityReport r;
  r.ell = ell;
  r.p = b1.p;
  r.i = i;
  r.delta1 = delta1;
  r.delta2 = delta2;
  auto pa = primes_above(ell, b1.p);
  r.places = pa.count;
  auto e1 = e_ell(b1, ell, i);
  auto e2 = e_ell(b2, ell, i);
  if (e1.value && e2.value) r.e_side = *e2.value - *e1.value;
  if (delta1 && delta2) {
    Int ds = r.places * (*delta1 - *delta2);
    r.delta_side = ds.get_si();
  } else {
    r.note = "analytic-only: delta values unavailable";
  }
  if (r.delta_side && r.e_side) r.holds = (*r.delta_side == *r.e_side);
  return r;
}

std::vector<RaiseHit> level_raising_scan(const BranchData& branch, long ell_max) {
  // rho-bar assumed ramified at p per the proposition's hypothesis; recorded,
  // not verified.
  std::vector<RaiseHit> hits;
  long p = branch.p;
  PrimePow modp(p, 1);
  long k = branch.member.weight;
  for (long ell : primes_up_to(ell_max)) {
    if (ell == p || branch.tame_level % ell == 0 || branch.member.level % ell == 0) continue;
    Zq a(branch.member.a(ell), modp);
    Zq c(pow_ui(ell, k - 1), modp);
    Zq l(ell, modp);
    Zq linv = l.inverse();

    // condition (1): a = ell^{-i} + ell^{1-i}, c = ell^{1-2i} for some i
    std::vector<long> i1;
    for (long i = 0; i <= p - 2; ++i) {
      Zq li = l.pow(Int(i));
      Zq liinv = li.inverse();
      if (a == liinv + l * liinv && c == l * liinv * liinv) i1.push_back(i);
    }
    if (!i1.empty()) {
      RaiseHit h;
      h.ell = ell;
      h.condition = 1;
      h.i_values = i1;
      h.predicted_level = Int(branch.tame_level) * ell;
      h.delta_v = 1;
      h.places = primes_above(ell, p).count;
      hits.push_back(h);
    }
    bool ell1 = (l == Zq(1, modp));
    if (ell1 && a == c + Zq(1, modp)) {
      RaiseHit h;
      h.ell = ell;
      h.condition = 2;
      h.predicted_level = Int(branch.tame_level) * ell;
      h.delta_v = 1;
      h.places = primes_above(ell, p).count;
      hits.push_back(h);
    }
    if (ell1 && a == Zq(2, modp) && c == Zq(1, modp)) {
      RaiseHit h;
      h.ell = ell;
      h.condition = 3;
      h.predicted_level = Int(branch.tame_level) * ell * ell;
      h.delta_v = 2;
      h.places = primes_above(ell, p).count;
      hits.push_back(h);
    }
    if (l == -Zq(1, modp) && a.is_zero() && c == -Zq(1, modp)) {
      RaiseHit h;
      h.ell = ell;
      h.condition = 4;
      h.predicted_level = Int(branch.tame_level) * ell * ell;
      h.delta_v = 1;
      h.places = primes_above(ell, p).count;
      hits.push_back(h);
    }
  }
  return hits;
}

}  // namespace iwalab
