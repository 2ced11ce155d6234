#ifndef IWALAB_CYCLO_HPP
#define IWALAB_CYCLO_HPP

#include <optional>

#include "iwalab/residue.hpp"

namespace iwalab {

// Decomposition of a unit x in Z_p^x through Gamma x Delta: x = omega(x) <x>
// with <x> = gamma^exponent for gamma = 1 + p.  The exponent is canonical
// modulo p^{M-1}; wild_valuation is v_p(exponent), absent when the exponent
// vanishes to working precision (x in the torsion part, "n = infinity").
struct CycloDecomp {
  long p = 0;
  long M = 0;
  Zq teich;               // mod p^M
  Zq exponent;            // mod p^{M-1}
  std::optional<long> wild_valuation;

  Zq one_unit_part() const;  // gamma^exponent mod p^M
};

// x must be a unit mod p; throws std::domain_error otherwise.
CycloDecomp decompose(const Int& x, long p, long M);

// p-adic logarithm of a 1-unit, exact mod p^M.
Zq log_one_unit(const Zq& u);

// Exact wild valuation of a prime ell != p:
// n with ell^{-1} omega(ell) = gamma^{u p^n}, u a unit.  Computed as
// v_p(ell^{p-1} - 1) - 1 in integer arithmetic, so it carries no precision cap.
long wild_valuation_exact(long ell, long p);

}  // namespace iwalab

#endif
