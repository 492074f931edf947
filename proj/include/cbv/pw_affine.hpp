#pragma once

#include <vector>

#include "cbv/polygon.hpp"
#include "cbv/rational.hpp"

namespace cbv {

// Exact closed form of a normalized bounded-variation function that is
// piecewise affine with finitely many jumps: breakpoints 0 = x_0 < ... <
// x_{m-1} < 1; on (x_i, x_{i+1}) the function is r_i + s_i*(t - x_i) where
// r_i is the right limit at x_i.  Values follow the normalization: g(0) = 0
// and g(x) is the left limit for x > 0, so a jump at x means the right limit
// differs from the value there.
class PwAffine {
 public:
  struct Seg {
    Rat x;  // left breakpoint of the segment
    Rat r;  // right limit at x
    Rat s;  // slope on (x, next x)
  };

  static PwAffine zero();
  static PwAffine linear(const Rat& a);              // t -> a*t
  static PwAffine step(const Rat& c, const Rat& j);  // 0 on [0;c], j after
  static PwAffine from_polygon(const Polygon& p);    // p shifted so g(0)=0
  static PwAffine from_segments(std::vector<Seg> segs);  // validates

  const std::vector<Seg>& segments() const { return segs_; }

  Rat value(const Rat& x) const;  // 0 <= x <= 1
  Rat right_limit(const Rat& x) const;  // x < 1
  Rat left_limit(const Rat& x) const;   // x > 0
  Rat g1() const { return value(Rat(1)); }

  Rat variation() const;                 // V over [0;1]
  Rat variation_to(const Rat& x) const;  // V over [0;x]
  PwAffine total_variation_fn() const;   // x -> V over [0;x]
  Rat integral(const Rat& u, const Rat& v) const;  // int_u^v g(t) dt

  bool non_decreasing() const;
  bool continuous_at(const Rat& x) const;
  std::vector<Rat> jump_points() const;

 private:
  std::size_t locate(const Rat& x) const;  // last i with segs_[i].x <= x
  std::vector<Seg> segs_;
};

PwAffine add(const PwAffine& a, const PwAffine& b);
PwAffine scale(const Rat& c, const PwAffine& g);

}  // namespace cbv
