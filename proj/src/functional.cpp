#include "cbv/functional.hpp"

#include <map>
#include <utility>

#include "cbv/errors.hpp"

namespace cbv {

struct Functional::Impl {
  std::function<CauchyReal(const ContinuousFunction&)> fn;
  std::map<const void*, CauchyReal> memo;
  std::map<std::string, std::shared_ptr<const void>> payloads;
};

Functional::Functional() {
  auto impl = std::make_shared<Impl>();
  impl->fn = [](const ContinuousFunction&) { return CauchyReal::constant(Rat(0)); };
  impl_ = std::move(impl);
}

Functional Functional::from_fn(std::function<CauchyReal(const ContinuousFunction&)> fn) {
  auto impl = std::make_shared<Impl>();
  impl->fn = std::move(fn);
  return Functional(std::move(impl));
}

CauchyReal Functional::apply(const ContinuousFunction& h) const {
  auto it = impl_->memo.find(h.key());
  if (it != impl_->memo.end()) return it->second;
  CauchyReal r = impl_->fn(h);
  impl_->memo.emplace(h.key(), r);
  return r;
}

CauchyReal Functional::apply_once(const ContinuousFunction& h) const {
  auto it = impl_->memo.find(h.key());
  if (it != impl_->memo.end()) return it->second;
  return impl_->fn(h);
}

Functional Functional::with_payload(std::string tag,
                                    std::shared_ptr<const void> data) const {
  auto impl = std::make_shared<Impl>();
  impl->fn = impl_->fn;
  impl->payloads = impl_->payloads;
  impl->payloads[std::move(tag)] = std::move(data);
  return Functional(std::move(impl));
}

std::shared_ptr<const void> Functional::payload(const std::string& tag) const {
  auto it = impl_->payloads.find(tag);
  return it == impl_->payloads.end() ? nullptr : it->second;
}

FunctionalWithNorm from_jordan_functionals(const FunctionalWithNorm& fp,
                                           const FunctionalWithNorm& fn) {
  CauchyReal norm = real_affine(Rat(1), fp.norm, Rat(1), fn.norm, Rat(0));
  return functional_difference(fp, fn, norm);
}

FunctionalWithNorm functional_difference(const FunctionalWithNorm& fp,
                                         const FunctionalWithNorm& fn,
                                         const CauchyReal& norm) {
  Functional p = fp.fn, n = fn.fn;
  Functional diff = Functional::from_fn([p, n](const ContinuousFunction& h) {
    return real_affine(Rat(1), p.apply(h), Rat(-1), n.apply(h), Rat(0));
  });
  return FunctionalWithNorm{diff, norm, false};
}

FunctionalWithNorm sum_nonneg(const FunctionalWithNorm& f1,
                              const FunctionalWithNorm& f2) {
  if (!f1.nonneg || !f2.nonneg)
    throw DomainError("sum_nonneg: both operands must carry the nonneg flag");
  Functional a = f1.fn, b = f2.fn;
  Functional sum = Functional::from_fn([a, b](const ContinuousFunction& h) {
    return real_affine(Rat(1), a.apply(h), Rat(1), b.apply(h), Rat(0));
  });
  CauchyReal norm = real_affine(Rat(1), f1.norm, Rat(1), f2.norm, Rat(0));
  return FunctionalWithNorm{sum, norm, true};
}

}  // namespace cbv
