#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "cbv/rational.hpp"

namespace cbv {

// A real number given as a query oracle: query(k) returns a rational q with
// |x - q| <= 2^-k.  Queries are memoized per exponent, so a name answers the
// same exponent identically forever and sharing a name shares the work.
// Names are not synchronized; keep each object graph on one thread.
class CauchyReal {
 public:
  CauchyReal();  // the real 0
  static CauchyReal constant(const Rat& q);
  static CauchyReal from_fn(std::function<Rat(long)> fn);

  Rat query(long k) const;
  // Set iff the name is rational-backed; query(k) then returns it at every k.
  const std::optional<Rat>& exact() const;

  bool same_object(const CauchyReal& o) const { return impl_ == o.impl_; }

 private:
  struct Impl {
    std::function<Rat(long)> fn;
    std::optional<Rat> ex;
    std::map<long, Rat> memo;
  };
  std::shared_ptr<Impl> impl_;
};

// a*x + b*y + c, querying x and y with enough headroom that the result is a
// valid name: |a|*2^-(k+ha) + |b|*2^-(k+hb) <= 2^-k.  Exact operands fold.
CauchyReal real_affine(const Rat& a, const CauchyReal& x, const Rat& b,
                       const CauchyReal& y, const Rat& c);
CauchyReal real_affine(const Rat& a, const CauchyReal& x, const Rat& c);

// A real approximated from below: entry(n) is non-decreasing in n and
// sup_n entry(n) is the value.  Entries are the running maximum of the
// generator, so generators only need sup = value, not monotonicity.
class LowerReal {
 public:
  LowerReal();  // constant 0
  static LowerReal constant(const Rat& q);
  static LowerReal from_fn(std::function<Rat(std::size_t)> fn);

  Rat entry(std::size_t n) const;

 private:
  struct Impl {
    std::function<Rat(std::size_t)> fn;
    std::vector<Rat> memo;  // running max of fn(0..n)
  };
  std::shared_ptr<Impl> impl_;
};

// Certificate that x < y: a rational strictly between them, found at scale
// 2^-exponent.
struct Separation {
  Rat separator;
  long exponent = 0;
};

// Semi-decision of x < y by dovetailing query exponents.  Terminates iff
// x < y; the _within variant gives up past max_exponent and returns nullopt
// (which proves nothing).
Separation lt_witness(const CauchyReal& x, const CauchyReal& y);
std::optional<Separation> lt_witness_within(const CauchyReal& x,
                                            const CauchyReal& y,
                                            long max_exponent);

// Recover x from symmetric lower information: lower has sup x, complement
// has sup w, and total is a name of x + w exactly.  query(k) walks all three
// until the enclosure [lo, total_hi - comp] has width <= 2^-k and returns its
// midpoint.  Terminates for every valid triple; max_steps caps the walk and
// throws EffortExhausted with the best enclosure otherwise.
CauchyReal squeeze_sup(const LowerReal& lower, const LowerReal& complement_lower,
                       const CauchyReal& total,
                       std::size_t max_steps = 1'000'000);

}  // namespace cbv
