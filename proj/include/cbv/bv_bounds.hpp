#pragma once

#include <memory>

#include "cbv/rational.hpp"

namespace cbv {

struct RatBounds {
  Rat lo, hi;
};

// Certified side information about a BV function g, attachable to a name.
// Every output is sound at every effort and tightens as effort grows.
// value and varfn target the normalized (left-limit) values, so their
// bounds close up at every t even when g jumps right after t; the interval
// variation is over the open interval, so boundary atoms are excluded.
class BVBounds {
 public:
  virtual ~BVBounds() = default;
  // encloses g(t), 0 <= t <= 1
  virtual RatBounds value(const Rat& t, long effort) = 0;
  // encloses V_0^t(g)
  virtual RatBounds varfn(const Rat& t, long effort) = 0;
  // lower bound of the variation of g over (a;b)
  virtual Rat var_interval_lower(const Rat& a, const Rat& b, long effort) = 0;
  // encloses int_u^v g(t) dt
  virtual RatBounds integral(const Rat& u, const Rat& v, long effort) = 0;
  // encloses int_u^v V_0^t(g) dt
  virtual RatBounds varfn_integral(const Rat& u, const Rat& v, long effort) = 0;
};

using BVBoundsPtr = std::shared_ptr<BVBounds>;

}  // namespace cbv
