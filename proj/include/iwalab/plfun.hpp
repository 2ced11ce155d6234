#ifndef IWALAB_PLFUN_HPP
#define IWALAB_PLFUN_HPP

#include "iwalab/cyclo.hpp"
#include "iwalab/forms.hpp"
#include "iwalab/modsym.hpp"
#include "iwalab/series.hpp"

namespace iwalab {

// theta_n data: values of the L-function measure on a + p^n Z_p, scaled by
// alpha^{-n}.  Additivity (norm compatibility n+1 -> n) is the defining
// invariant and is exercised by the tests.
struct MazurTateElement {
  long p = 0, n = 0, M = 0;
  int sign = +1;
  std::map<long, Zq> values;  // a in (Z/p^n)^x, a as its least positive residue
};

// Native case (p | level): mu(a + p^n) = alpha^{-n} psi(Y^{k-2}{oo, a/p^n}).
// Stabilized eigen-data case (p prime to level): two-term formula
//   mu(a + p^n) = alpha^{-n} v_n(a) - p^{k-2} alpha^{-n-1} v_{n-1}(a).
MazurTateElement mazur_tate(const EigenSymbol& sym, const Zq& alpha, long n);

// omega^i-projection: sum over Delta with omega^{-i} weights, group elements
// gamma^e -> (1+T)^e; D = p^{n-1}.  The symbol sign must equal (-1)^i.
LambdaSeries to_series(const MazurTateElement& mt, long i, bool enforce_sign = true);

struct PadicLFunction {
  std::string form_id;
  long p = 0, i = 0, n = 0, M = 0;
  LambdaSeries series;
  InvariantReport inv;
  bool trivial_zero = false;
  Rat normalization_scale = 1;
  std::optional<Zq> alpha;
  bool recheck_agreed = false;  // n+1 recomputation matched (when performed)
  std::string note;
};

struct PlOptions {
  bool recheck_next_level = true;  // certify by recomputing at n+1
  bool force_stabilized_space = false;  // build the level-Np space route
  long max_cut_primes = 8;
};

// The composed pipeline: eigen symbol, Mazur-Tate element, omega^i-part,
// invariants.  Descriptors with p | level use the native U_p route; a delta
// provider (or force_stabilized_space) goes through the level-Np symbol space
// with the U_p unit-root line; otherwise the two-term measure at level N.
PadicLFunction pl_function(const EigenformDescriptor& f, long p, long i, long n, long M,
                           const PlOptions& opt = {});

// Reduction of the series mod p; lambda of the residual series equals lambda
// of the lift when mu = 0.
LambdaSeries mod_p_l_function(const PadicLFunction& L);

// p-adic L-function of the U_ell = 0 old eigensystem at level N * prod ell^2,
// ell in Sigma (the non-primitive L-function with Euler factors at Sigma
// removed).
PadicLFunction nonprimitive_pl(const EigenformDescriptor& f, long p, long i,
                               const std::vector<long>& sigma, long n, long M,
                               const PlOptions& opt = {});

// Shared helper: the eigen symbol for f in the given space, cutting with
// good-prime data (grown until the system pins a line) plus fixed U_q values.
EigenSymbol cut_eigen_symbol(std::shared_ptr<const ModSymSpace> space,
                             const EigenformDescriptor& f, const std::map<long, Rat>& u_values,
                             int sign, long p, long max_cut_primes);

}  // namespace iwalab

#endif
