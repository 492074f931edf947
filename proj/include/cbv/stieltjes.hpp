#pragma once

#include "cbv/bv_name.hpp"
#include "cbv/continuous.hpp"
#include "cbv/functional.hpp"

namespace cbv {

// Certified Riemann-Stieltjes integral: a rational q with |int h dg - q|
// <= 2^-n, valid under the promise Var(g) <= 2^l.  Exact-backed g folds to
// the closed-form integral of stage(n+l+1); otherwise a partition of mesh
// below 2^-m(k+1), k = n+l+1, is searched in the point stream and the
// Stieltjes sum is evaluated with budgeted queries.
Rat rs_integral(const ContinuousFunction& h, const BVName& g, long l, long n);

// F_g(h) = int h dg with ||F_g|| = Var(g).  The variation bound exponent
// is recovered from the var component (query at 0, plus 1, rounded up to a
// power of two).  Monotone g sets the nonneg flag.
FunctionalWithNorm functional_from_bv(const BVWithVar& g);

}  // namespace cbv
