#pragma once

#include <functional>
#include <map>
#include <memory>

#include "cbv/cauchy.hpp"
#include "cbv/polygon.hpp"

namespace cbv {

// Non-decreasing precision schedule k -> m(k): inputs 2^-m(k) apart map to
// outputs 2^-k apart.
class ModulusFn {
 public:
  static ModulusFn from_fn(std::function<long(long)> fn);
  long at(long k) const;  // memoized running max

 private:
  struct Impl {
    std::function<long(long)> fn;
    std::map<long, long> memo;
  };
  std::shared_ptr<Impl> impl_;
};

// An element of C[0;1] named by rational polygon stages h_i with
// ||h - h_i|| <= 2^-i.  Stages are memoized; each new stage is checked
// against the cached ones (||h_i - h_j|| <= 2^-i + 2^-j must hold), and a
// violation poisons the name for good.
class ContinuousFunction {
 public:
  static ContinuousFunction from_polygon(Polygon p);  // constant stages
  static ContinuousFunction from_stages(std::function<Polygon(long)> stages);

  const Polygon& stage(long i) const;
  bool constant_stage() const;
  const Polygon& base_polygon() const;  // requires constant_stage()
  const void* key() const;  // stable identity of the underlying name

  // m(k) = max(0, ceil(log2 L) + k + 1) with L = max(1, Lip(stage(k+2))).
  ModulusFn modulus() const;
  // query(k): max vertex |y| of stage(k+1), within 2^-(k+1) of ||h||.
  CauchyReal norm() const;
  // query(k): stage(k+2) at x queried finely enough for its slope; points
  // beyond [0;1] by more than the query slack raise DomainError.
  CauchyReal eval(const CauchyReal& x) const;

 private:
  struct Impl {
    std::function<Polygon(long)> stages;
    bool constant = false;
    std::map<long, Polygon> memo;
    bool poisoned = false;
  };
  std::shared_ptr<Impl> impl_;
};

ContinuousFunction const_one();
// 1 on [0;a], affine down to 0 at b, 0 on [b;1].  Requires 0 <= a < b <= 1.
ContinuousFunction ramp(const Rat& a, const Rat& b);
// 0 on [0;a], peak 1 at b, 0 on [c;1].  Requires 0 <= a < b < c <= 1.
ContinuousFunction bump(const Rat& a, const Rat& b, const Rat& c);

}  // namespace cbv
