#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <utility>

#include "cbv/bv_bounds.hpp"
#include "cbv/bv_name.hpp"
#include "cbv/cauchy.hpp"
#include "cbv/continuous.hpp"
#include "cbv/fact_stream.hpp"
#include "cbv/functional.hpp"

namespace cbv {

// The interval shapes a measure name can be asked about: open (a;b),
// left-closed [0;b), right-closed (a;1], and the full interval [0;1].
struct RationalInterval {
  enum class Kind { open, left_closed, right_closed, full };
  Kind kind = Kind::full;
  Rat a{0}, b{1};

  static RationalInterval open_iv(Rat a, Rat b);     // (a;b), 0 <= a < b <= 1
  static RationalInterval left_closed(Rat b);        // [0;b), 0 < b <= 1
  static RationalInterval right_closed(Rat a);       // (a;1], 0 <= a < 1
  static RationalInterval full_iv();                 // [0;1]
};

// "(a,b)", "[0,b)", "(a,1]", "[0,1]"; rationals as p/q or terminating
// decimals.  Throws ParseError.
RationalInterval parse_interval(const std::string& s);
std::string interval_string(const RationalInterval& j);

struct MeasureFact {
  Rat lower;  // strictly below mu(interval)
  RationalInterval interval;
};

// A non-negative bounded Borel measure on [0;1]: total mass plus a stream
// of facts (a, J) with a < mu(J), exhaustive in the limit.  The stream is
// the downward closure of an internal cursor lower_bound(J, effort) whose
// supremum over effort is mu(J); integration and sandwiching consult the
// cursor directly.
class NonnegMeasureName {
 public:
  using Cursor = std::function<Rat(const RationalInterval&, long effort)>;

  NonnegMeasureName();  // the zero measure
  // effort_independent marks cursors that are already exact at effort 0,
  // skipping the cumulative running-max bookkeeping.
  static NonnegMeasureName from_cursor(CauchyReal total, Cursor cursor,
                                       bool effort_independent = false);

  const CauchyReal& total() const;
  // best certified lower bound of mu(J) within the effort budget;
  // non-decreasing in effort with supremum mu(J)
  Rat lower_bound(const RationalInterval& j, long effort) const;
  FactStream<MeasureFact> facts() const;

  // Bounds oracle for the distribution function t -> mu([0;t)) when the
  // measure came from a monotone BV name; enables the fast integration
  // path used when measures are turned back into functionals.
  const BVBoundsPtr& distribution_bounds() const;
  NonnegMeasureName with_distribution_bounds(BVBoundsPtr b) const;

 private:
  struct Impl;
  explicit NonnegMeasureName(std::shared_ptr<Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<Impl> impl_;
};

struct SignedMeasureName {
  NonnegMeasureName pos, neg;
  CauchyReal norm;  // ||mu||, <= pos.total + neg.total, equal iff minimal
  // Caller assertion that (pos, neg) is the minimal decomposition; lets
  // consumers identify |mu| with pos + neg.  A false assertion voids the
  // certificates downstream, like a wrong norm would.
  bool minimal = false;
};

// Requires the monotone flag; mu((a;b)) = g(b-) - g(a+) and so on, with
// total g(1).  Cursor certificates come from the exact backend, the bounds
// oracle, or confirmed stream points, in that order of preference.
NonnegMeasureName measure_from_monotone(const BVName& g);

NonnegMeasureName measure_sum_nonneg(const NonnegMeasureName& m1,
                                     const NonnegMeasureName& m2);

// lo <= mu((a;b)) and mu([a;b]) <= hi, both improving monotonically with
// effort; the gap converges to the boundary atom mass mu({a}) + mu({b}).
std::pair<Rat, Rat> interval_mass_bounds(const NonnegMeasureName& mu,
                                         const Rat& a, const Rat& b,
                                         long effort);

// q with |int h dmu - q| <= 2^-n by cover-squeeze: uniform grids finer
// than the modulus of h, dovetailed over lattice shifts so grid points
// dodge atoms, with cursor lower bounds per piece until the uncovered
// mass is below the slack.
Rat integrate_measure(const NonnegMeasureName& mu, const ContinuousFunction& h,
                      long n);

// F(h) = int h dpos - int h dneg with split precision; norm = mu.norm.
FunctionalWithNorm functional_from_signed(const SignedMeasureName& mu);

// Non-negative case: norm = total, nonneg flag set.
FunctionalWithNorm functional_from_nonneg_measure(const NonnegMeasureName& mu);

// Packaging of a caller-asserted minimal pair; norm = sum of totals.
SignedMeasureName signed_from_jordan(const NonnegMeasureName& mp,
                                     const NonnegMeasureName& mn);

// Minimal decomposition through the functional and BV spaces:
// mu -> F -> g -> (g+, g-) -> (mu+, mu-).
std::pair<NonnegMeasureName, NonnegMeasureName> jordan_measure(
    const SignedMeasureName& mu);

}  // namespace cbv
