#pragma once

#include <utility>

#include "cbv/bv_name.hpp"
#include "cbv/cauchy.hpp"
#include "cbv/functional.hpp"

namespace cbv {

// Extracts the BV function g with F(h) = int h dg from a functional and
// its exact norm z = ||F|| = Var(g).  Emitted points are limits of
// shrinking rational nests whose trapped variation is certified small, so
// they sit at continuity points of g; values come from ramp probes (the
// mean of g over [a;b]).  The name carries a probe-backed bounds oracle.
// If z exceeds the true norm the certification searches stall; they never
// emit a wrong point.
BVName riesz_bv(const Functional& f, const CauchyReal& z);

// Always reconstructs by probing, ignoring any measure payload carried by
// the functional.  riesz_bv itself reads a carried measure representation
// when the provenance of z matches it, which is cheaper and gives the
// same g.
BVName riesz_bv_probed(const Functional& f, const CauchyReal& z);

// F -> (F+, F-) through g = riesz_bv(F.fn, F.norm), its Jordan parts and
// their measures; norms are (Var(g) +- g(1))/2 and sum to ||F||.
std::pair<FunctionalWithNorm, FunctionalWithNorm> jordan_functional(
    const FunctionalWithNorm& f);

}  // namespace cbv
