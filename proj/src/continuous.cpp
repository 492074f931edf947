#include "cbv/continuous.hpp"

#include "cbv/errors.hpp"

namespace cbv {

ModulusFn ModulusFn::from_fn(std::function<long(long)> fn) {
  ModulusFn m;
  m.impl_ = std::make_shared<Impl>();
  m.impl_->fn = std::move(fn);
  return m;
}

long ModulusFn::at(long k) const {
  if (k < 0) k = 0;
  auto it = impl_->memo.find(k);
  if (it != impl_->memo.end()) return it->second;
  long v = impl_->fn(k);
  if (k > 0) v = std::max(v, at(k - 1));  // keep the schedule non-decreasing
  impl_->memo.emplace(k, v);
  return v;
}

ContinuousFunction ContinuousFunction::from_polygon(Polygon p) {
  ContinuousFunction f;
  f.impl_ = std::make_shared<Impl>();
  f.impl_->constant = true;
  f.impl_->memo.emplace(0, std::move(p));
  return f;
}

ContinuousFunction ContinuousFunction::from_stages(
    std::function<Polygon(long)> stages) {
  ContinuousFunction f;
  f.impl_ = std::make_shared<Impl>();
  f.impl_->stages = std::move(stages);
  return f;
}

const Polygon& ContinuousFunction::stage(long i) const {
  Impl& im = *impl_;
  if (im.poisoned) throw PoisonedName("continuous-function stages are inconsistent");
  if (im.constant) return im.memo.begin()->second;
  if (i < 0) i = 0;
  auto it = im.memo.find(i);
  if (it != im.memo.end()) return it->second;
  Polygon p = im.stages(i);
  // A true name has ||h_i - h_j|| <= 2^-i + 2^-j for all pairs; check the
  // new stage against everything already materialized.
  for (const auto& [j, q] : im.memo) {
    if (sup_dist(p, q) > pow2(-i) + pow2(-j)) {
      im.poisoned = true;
      throw PoisonedName("continuous-function stages are inconsistent");
    }
  }
  return im.memo.emplace(i, std::move(p)).first->second;
}

bool ContinuousFunction::constant_stage() const { return impl_->constant; }

const void* ContinuousFunction::key() const { return impl_.get(); }

const Polygon& ContinuousFunction::base_polygon() const {
  if (!impl_->constant)
    throw DomainError("base_polygon() on a stage-varying name");
  return impl_->memo.begin()->second;
}

ModulusFn ContinuousFunction::modulus() const {
  ContinuousFunction self = *this;
  return ModulusFn::from_fn([self](long k) -> long {
    Rat L = self.stage(k + 2).lipschitz();
    long cl = (L <= 1) ? 0 : ceil_log2_abs(L);
    return std::max(0L, cl + k + 1);
  });
}

CauchyReal ContinuousFunction::norm() const {
  ContinuousFunction self = *this;
  if (impl_->constant) return CauchyReal::constant(base_polygon().sup_norm());
  return CauchyReal::from_fn(
      [self](long k) -> Rat { return self.stage(k + 1).sup_norm(); });
}

CauchyReal ContinuousFunction::eval(const CauchyReal& x) const {
  ContinuousFunction self = *this;
  if (x.exact() && impl_->constant) {
    const Rat& q = *x.exact();
    if (q < 0 || q > 1) throw DomainError("evaluation point outside [0;1]");
    return CauchyReal::constant(base_polygon().eval(q));
  }
  return CauchyReal::from_fn([self, x](long k) -> Rat {
    const Polygon& p = self.stage(k + 2);
    Rat L = p.lipschitz();
    const long kx = k + 2 + ((L <= 1) ? 0 : std::max(0L, ceil_log2_abs(L)));
    Rat qx = x.query(kx);
    const Rat slack = pow2(-kx);
    if (qx < -slack || qx > 1 + slack)
      throw DomainError("evaluation point outside [0;1]");
    if (qx < 0) qx = 0;
    if (qx > 1) qx = 1;
    // |h(x)-p(qx)| <= 2^-(k+2) + L*2^-kx <= 2^-(k+1)
    return p.eval(qx);
  });
}

ContinuousFunction const_one() {
  return ContinuousFunction::from_polygon(Polygon::constant(Rat(1)));
}

ContinuousFunction ramp(const Rat& a, const Rat& b) {
  if (!(0 <= a && a < b && b <= 1)) throw DomainError("ramp needs 0 <= a < b <= 1");
  std::vector<std::pair<Rat, Rat>> v;
  v.emplace_back(Rat(0), Rat(1));
  if (a > 0) v.emplace_back(a, Rat(1));
  v.emplace_back(b, Rat(0));
  if (b < 1) v.emplace_back(Rat(1), Rat(0));
  return ContinuousFunction::from_polygon(Polygon::from_vertices(std::move(v)));
}

ContinuousFunction bump(const Rat& a, const Rat& b, const Rat& c) {
  if (!(0 <= a && a < b && b < c && c <= 1))
    throw DomainError("bump needs 0 <= a < b < c <= 1");
  std::vector<std::pair<Rat, Rat>> v;
  v.emplace_back(Rat(0), Rat(0));
  if (a > 0) v.emplace_back(a, Rat(0));
  v.emplace_back(b, Rat(1));
  v.emplace_back(c, Rat(0));
  if (c < 1) v.emplace_back(Rat(1), Rat(0));
  return ContinuousFunction::from_polygon(Polygon::from_vertices(std::move(v)));
}

}  // namespace cbv
