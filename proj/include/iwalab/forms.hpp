#ifndef IWALAB_FORMS_HPP
#define IWALAB_FORMS_HPP

#include <map>
#include <optional>
#include <string>

#include "iwalab/residue.hpp"

namespace iwalab {

struct EllipticCurveW {
  Int a1 = 0, a2 = 0, a3 = 0, a4 = 0, a6 = 0;
  Int conductor = 0;

  Int b2() const { return a1 * a1 + 4 * a2; }
  Int b4() const { return 2 * a4 + a1 * a3; }
  Int b6() const { return a3 * a3 + 4 * a6; }
  Int b8() const {
    return a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4;
  }
  Int c4() const { return b2() * b2() - 24 * b4(); }
  Int c6() const { return -b2() * b2() * b2() + 36 * b2() * b4() - 216 * b6(); }
  Int disc() const {
    return -b2() * b2() * b8() - 8 * b4() * b4() * b4() - 27 * b6() * b6() +
           9 * b2() * b4() * b6();
  }
};

// Trace of Frobenius at q for good reduction; +1/-1 for split/non-split
// multiplicative; 0 for additive.  Classification is cross-checked against
// the supplied conductor.
long ap_curve(const EllipticCurveW& E, long q);

// a_n for the weight-2 newform of E (multiplicative extension).
Int an_curve(const EllipticCurveW& E, const Int& n);

// Ramanujan tau.  Prime-power values follow the Hecke recurrence
// tau(q^{r+1}) = tau(q) tau(q^r) - q^11 tau(q^{r-1}) seeded at primes from
// the product expansion of Delta.
Int tau(const Int& n);
const std::vector<Int>& tau_series(long cap);  // tau(0..cap), tau(0) = 0

enum class ProviderKind { curve, delta, table };

struct EigenformDescriptor {
  std::string id;
  ProviderKind kind = ProviderKind::table;
  long level = 0;   // full level of the newform
  long weight = 2;  // trivial character throughout
  std::optional<EllipticCurveW> curve;
  std::map<long, Int> table;  // prime -> a_q

  // p-stabilization data, populated by p_stabilize
  long p = 0;
  long M = 0;
  std::optional<Zq> alpha;  // unit root of X^2 - a_p X + p^{k-1}, or U_p value
  bool is_p_stabilized = false;

  Int a(long q) const;  // eigenvalue at a prime q
  long tame_level(long p_) const;
};

// alpha = Hensel-lifted unit root; errors when a_p = 0 mod p.
EigenformDescriptor p_stabilize(const EigenformDescriptor& f, long p, long M);

// Classical Sturm bound k * [SL2(Z) : Gamma_0(lcm(N1,N2) p^2)] / 12.
long sturm_bound(long N1, long N2, long p, long kmax);

struct CongruenceResult {
  bool congruent = false;
  long witness = 0;  // first failing prime when not congruent
  long cap = 0;
};
CongruenceResult congruent_mod_p(const EigenformDescriptor& f, const EigenformDescriptor& g,
                                 long p, long cap);

// (a_ell mod p, ell^{k-1} mod p) for ell prime to N_f p.
std::pair<Zq, Zq> frobenius_fingerprint(const EigenformDescriptor& f, long p, long ell);

enum class LocalType { good, special, ramified_principal_series, supercuspidal_proxy };
std::string local_type_name(LocalType t);

// Branch fingerprint: a classical member is the proxy for the branch; the
// report layer flags that branch assignment is the user's responsibility.
struct BranchData {
  long p = 0;
  long tame_level = 0;  // N(a)
  EigenformDescriptor member;
  std::map<long, Int> bad_eigenvalues;      // ell | N(a) -> a_ell
  std::map<long, LocalType> local_types;    // ell | N(a)

  Zq a_mod_p(long ell) const;  // T_ell or U_ell eigenvalue mod p
};
BranchData make_branch(const EigenformDescriptor& f, long p);

}  // namespace iwalab

#endif
