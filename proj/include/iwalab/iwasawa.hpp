#ifndef IWALAB_IWASAWA_HPP
#define IWALAB_IWASAWA_HPP

#include "iwalab/forms.hpp"
#include "iwalab/plfun.hpp"
#include "iwalab/series.hpp"

namespace iwalab {

// Reciprocal Euler factor of a branch at ell != p:
//   1 - a_ell X + <ell> ell^{-1} X^2   (ell prime to the tame level)
//   1 - a_ell X                        (otherwise)
struct EulerFactor {
  long ell = 0;
  int degree = 1;
  Int a = 0;
  bool quadratic = false;
};
EulerFactor euler_factor(const BranchData& branch, long ell);

// Places of Q_infinity over ell: count = p^n with n the wild valuation of ell.
struct PlacesAbove {
  long n = 0;
  Int count = 1;
};
PlacesAbove primes_above(long ell, long p);

// The Euler factor with X = <ell>_i^{-1} substituted, as the series actually
// stripped from the L-function measure by the U_ell = 0 construction:
//   good ell:  1 - (a_ell/ell) w (1+T)^{-e} + ell^{k-3} w^2 (1+T)^{-2e}
//   bad ell:   1 - (a_ell/ell) w (1+T)^{-e}
// with w = omega^{-i}(ell) and <ell> = gamma^e.  `direct` carries the
// opposite exponent sign (the X = <ell>_i substitution); its lambda always
// matches and both are recorded.
struct EulerSubstitution {
  LambdaSeries inverse_sub;
  LambdaSeries direct_sub;
};
EulerSubstitution euler_substituted(const BranchData& branch, long ell, long i, long D, long M);

// e_ell(a, omega^i): lambda of the mod-p reduction of the substituted factor.
struct EllResult {
  std::optional<long> value;      // absent = undetermined, raise D
  long places_n = 0;              // wild valuation of ell
  Int places = 1;                 // p^places_n
  bool variant_agrees = true;     // direct-substitution lambda matched
  long used_D = 0;
};
EllResult e_ell(const BranchData& branch, long ell, long i, long D = 0);

struct MuTransferReport {
  std::string f1, f2;
  long p = 0, i = 0;
  std::optional<long> mu1, mu2;
  bool consistent = false;   // mu1 = 0 <=> mu2 = 0 (theorem; failure = bug)
  bool determined = false;
};
MuTransferReport mu_transfer_check(const PadicLFunction& L1, const PadicLFunction& L2);

struct TransferPrime {
  long ell = 0;
  std::optional<long> e1, e2;
  Int places = 1;
  std::string note;
};

struct TransferReport {
  std::string f1, f2;
  long p = 0, i = 0;
  std::optional<long> lambda1, lambda2, mu1, mu2;
  bool certified = false;
  std::vector<TransferPrime> primes;  // ell | N1 N2, ell != p
  std::optional<long> lhs, rhs;       // lambda1 - lambda2 and sum(e2 - e1)
  std::optional<bool> balanced;       // absent = undetermined
  bool congruence_checked = false;
  bool congruent = false;
  long congruence_cap = 0;
  std::string note;
};
TransferReport lambda_transfer_check(const BranchData& b1, const BranchData& b2,
                                     const PadicLFunction& L1, const PadicLFunction& L2,
                                     bool congruent, long congruence_cap);

// Lemma-difference consistency: sum_v delta_v(a1) - delta_v(a2) over places
// v | ell equals e_ell(a2) - e_ell(a1).  delta values come from the level
// raising table or the caller.
struct DeltaIdentityReport {
  long ell = 0, p = 0, i = 0;
  std::optional<long> delta1, delta2;  // per-place values
  Int places = 1;
  std::optional<long> delta_side, e_side;
  std::optional<bool> holds;
  std::string note;  // "analytic-only" when deltas unavailable
};
DeltaIdentityReport delta_identity_check(const BranchData& b1, const BranchData& b2, long i,
                                         long ell, std::optional<long> delta1,
                                         std::optional<long> delta2);

// Level raising scan per the four congruence conditions; delta_v and the
// predicted tame level follow the proposition.
struct RaiseHit {
  long ell = 0;
  int condition = 0;          // 1..4
  std::vector<long> i_values; // condition (1): the i's that match; else all i
  Int predicted_level = 0;    // N(a) * ell or N(a) * ell^2
  long delta_v = 0;
  Int places = 1;
};
std::vector<RaiseHit> level_raising_scan(const BranchData& branch, long ell_max);

}  // namespace iwalab

#endif
