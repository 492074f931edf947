#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "cbv/bv_bounds.hpp"
#include "cbv/bv_expr.hpp"
#include "cbv/cauchy.hpp"
#include "cbv/pw_affine.hpp"
#include "cbv/rational.hpp"

namespace cbv {

// A normalized BV function g presented as an infinite stream of point
// names (x_i, y_i) with y_i = g(x_i): entry 0 is (0, 0), entry 1 is
// (1, g(1)), and the x_i for i >= 2 are dense in (0;1) and are continuity
// points of g.  g is left continuous on (0;1).  The optional monotone flag
// asserts non-decreasing values.
class BVName {
 public:
  struct Point {
    CauchyReal x, y;
  };

  BVName();  // the zero function

  // Stream of all rationals in (0;1) except the jump locations of g, each
  // point an exact name.  Dyadics come level by level in the even slots so
  // fine grids appear early.
  static BVName from_exact(PwAffine g, bool monotone);
  static BVName from_generator(std::function<Point(std::uint64_t)> gen,
                               bool monotone);

  Point point(std::uint64_t i) const;  // memoized per index
  bool monotone() const;
  const std::optional<PwAffine>& exact() const;
  // Certified bounds oracle; exact names carry closed-form bounds, names
  // extracted from functionals carry probe-backed ones.  May be null.
  const BVBoundsPtr& bounds() const;

  // Annotation hooks, used right after construction and before sharing.
  BVName with_exact(PwAffine g) const;
  BVName with_bounds(BVBoundsPtr b) const;
  BVName with_monotone() const;

 private:
  struct Impl;
  explicit BVName(std::shared_ptr<Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<Impl> impl_;
};

struct BVWithVar {
  BVName name;
  CauchyReal var;  // Var(g) on [0;1]
};

// Finite list of stream indices naming partition points of [x_first; x_last]
// in strictly increasing x order.
struct Partition {
  std::vector<std::uint64_t> indices;
};

// Checks strict x increase pairwise through order witnesses; indices whose
// points cannot be separated within the witness budget are a DomainError.
Partition make_partition(const BVName& g, std::vector<std::uint64_t> indices,
                         long max_exponent = 256);

// Sum of |g(x_i) - g(x_{i-1})| over the partition, within 2^-k: each value
// is queried at exponent k + ceil(log2 n) + 1 for n differences.
Rat partition_sum(const BVName& g, const Partition& z, long k);

// Semi-decision that all consecutive gaps are < 2^-p, up to the witness
// budget.  A false return proves nothing.
bool partition_mesh_below(const BVName& g, const Partition& z, long p,
                          long max_exponent = 64);

BVWithVar bv_from_expr(const BVExpr& e);

// The variation function /g/(x) = V_0^x(g) as a name on the same point
// stream: each value is squeezed between partition sums over [0;x_i] and
// Var(g) minus partition sums over [x_i;1].  Monotone; same var.
BVWithVar total_variation_fn(const BVWithVar& g);

// g+ = (/g/ + g)/2 and g- = (/g/ - g)/2 on the shared stream, with
// Var(g+) = (Var(g) + g(1))/2 and Var(g-) = (Var(g) - g(1))/2.  This is the
// minimal decomposition: Var(g+) + Var(g-) = Var(g).
std::pair<BVWithVar, BVWithVar> jordan_bv(const BVWithVar& g);

// Closed-form bounds for an exact function; installed automatically by
// from_exact and with_exact.
BVBoundsPtr exact_bounds(PwAffine g);

// Sum of two monotone names, routed through measures and back through a
// functional; a direct merge of the two point streams is unsound because
// their dense sets differ.  Requires both monotone flags.
BVName sum_monotone(const BVName& g1, const BVName& g2);

// g = g1 - g2 for monotone g1, g2, with a caller-supplied name of the
// exact Var(g); same measure route as sum_monotone.
BVWithVar bv_from_monotone_difference(const BVName& g1, const BVName& g2,
                                      const CauchyReal& var);

}  // namespace cbv
