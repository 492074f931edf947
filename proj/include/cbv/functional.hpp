#pragma once

#include <functional>
#include <memory>
#include <string>

#include "cbv/cauchy.hpp"
#include "cbv/continuous.hpp"

namespace cbv {

// A linear continuous functional on C[0;1] as an apply oracle.  apply is
// memoized per argument name, so repeated probes of the same h share one
// CauchyReal (and its query cache).
//
// A functional may carry tagged payloads: certified auxiliary data about
// how it was built (e.g. a measure representation).  Consumers that
// recognize a tag may use the payload as a shortcut; the apply oracle
// stays authoritative either way.
class Functional {
 public:
  Functional();  // zero functional
  static Functional from_fn(std::function<CauchyReal(const ContinuousFunction&)> fn);

  CauchyReal apply(const ContinuousFunction& h) const;

  // apply without installing a memo entry: for probe arguments generated
  // in bulk that will never be asked again, where memoizing each one
  // would pin its polygon in memory for the life of the functional
  CauchyReal apply_once(const ContinuousFunction& h) const;

  Functional with_payload(std::string tag, std::shared_ptr<const void> data) const;
  std::shared_ptr<const void> payload(const std::string& tag) const;  // null if absent

 private:
  struct Impl;
  explicit Functional(std::shared_ptr<Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<Impl> impl_;
};

// Functional together with its exact operator norm.  nonneg asserts
// F(h) >= 0 for h >= 0; then ||F|| = F(1).
struct FunctionalWithNorm {
  Functional fn;
  CauchyReal norm;
  bool nonneg = false;
};

// F = Fp - Fn for a minimal pair; the norm field is Fp.norm + Fn.norm,
// which is the true norm only under minimality (caller-asserted).
FunctionalWithNorm from_jordan_functionals(const FunctionalWithNorm& fp,
                                           const FunctionalWithNorm& fn);

// Same packaging with a caller-supplied norm, for differences that are
// not claimed minimal.
FunctionalWithNorm functional_difference(const FunctionalWithNorm& fp,
                                         const FunctionalWithNorm& fn,
                                         const CauchyReal& norm);

// Sum of non-negative functionals; ||F1 + F2|| = (F1 + F2)(1) makes the
// norm a plain sum.  Throws DomainError unless both flags are set.
FunctionalWithNorm sum_nonneg(const FunctionalWithNorm& f1,
                              const FunctionalWithNorm& f2);

}  // namespace cbv
