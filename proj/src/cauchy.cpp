#include "cbv/cauchy.hpp"

#include "cbv/errors.hpp"

namespace cbv {

CauchyReal::CauchyReal() {
  impl_ = std::make_shared<Impl>();
  impl_->ex = Rat(0);
}

CauchyReal CauchyReal::constant(const Rat& q) {
  CauchyReal r;
  r.impl_->ex = q;
  return r;
}

CauchyReal CauchyReal::from_fn(std::function<Rat(long)> fn) {
  CauchyReal r;
  r.impl_ = std::make_shared<Impl>();
  r.impl_->fn = std::move(fn);
  return r;
}

Rat CauchyReal::query(long k) const {
  if (impl_->ex) return *impl_->ex;
  if (k < 0) k = 0;
  auto it = impl_->memo.find(k);
  if (it != impl_->memo.end()) return it->second;
  Rat q = impl_->fn(k);
  impl_->memo.emplace(k, q);
  return q;
}

const std::optional<Rat>& CauchyReal::exact() const { return impl_->ex; }

CauchyReal real_affine(const Rat& a, const CauchyReal& x, const Rat& b,
                       const CauchyReal& y, const Rat& c) {
  const bool xu = (a != 0) && !x.exact();  // x actually queried?
  const bool yu = (b != 0) && !y.exact();
  if (!xu && !yu) {
    Rat v = c;
    if (a != 0) v += a * *x.exact();
    if (b != 0) v += b * *y.exact();
    return CauchyReal::constant(v);
  }
  // |a| <= 2^(ha-1), so |a| * 2^-(k+ha) <= 2^-(k+1); same for b; total 2^-k.
  const long ha = (a == 0) ? 0 : std::max(0L, ceil_log2_abs(a) + 1);
  const long hb = (b == 0) ? 0 : std::max(0L, ceil_log2_abs(b) + 1);
  return CauchyReal::from_fn([=](long k) {
    Rat v = c;
    if (a != 0) v += a * x.query(k + ha);
    if (b != 0) v += b * y.query(k + hb);
    return v;
  });
}

CauchyReal real_affine(const Rat& a, const CauchyReal& x, const Rat& c) {
  return real_affine(a, x, Rat(0), CauchyReal(), c);
}

LowerReal::LowerReal() {
  impl_ = std::make_shared<Impl>();
  impl_->fn = [](std::size_t) { return Rat(0); };
}

LowerReal LowerReal::constant(const Rat& q) {
  return from_fn([q](std::size_t) { return q; });
}

LowerReal LowerReal::from_fn(std::function<Rat(std::size_t)> fn) {
  LowerReal l;
  l.impl_->fn = std::move(fn);
  return l;
}

Rat LowerReal::entry(std::size_t n) const {
  auto& memo = impl_->memo;
  while (memo.size() <= n) {
    Rat v = impl_->fn(memo.size());
    if (!memo.empty() && memo.back() > v) v = memo.back();
    memo.push_back(std::move(v));
  }
  return memo[n];
}

namespace {

std::optional<Separation> lt_step(const CauchyReal& x, const CauchyReal& y,
                                  long k) {
  const Rat p = pow2(-k);
  Rat qx = x.query(k), qy = y.query(k);
  if (qx + p < qy - p) return Separation{(qx + qy) / 2, k};
  return std::nullopt;
}

}  // namespace

Separation lt_witness(const CauchyReal& x, const CauchyReal& y) {
  for (long k = 0;; ++k) {
    if (auto s = lt_step(x, y, k)) return *s;
  }
}

std::optional<Separation> lt_witness_within(const CauchyReal& x,
                                            const CauchyReal& y,
                                            long max_exponent) {
  if (x.exact() && y.exact()) {
    // Same answer the query loop would reach, without walking exponents.
    const Rat gap = *y.exact() - *x.exact();
    if (gap <= 0) return std::nullopt;
    long k = 0;
    while (pow2(1 - k) >= gap) ++k;
    if (k > max_exponent) return std::nullopt;
    return Separation{(*x.exact() + *y.exact()) / 2, k};
  }
  for (long k = 0; k <= max_exponent; ++k) {
    if (auto s = lt_step(x, y, k)) return s;
  }
  return std::nullopt;
}

CauchyReal squeeze_sup(const LowerReal& lower, const LowerReal& complement_lower,
                       const CauchyReal& total, std::size_t max_steps) {
  return CauchyReal::from_fn([=](long k) -> Rat {
    const Rat eps = pow2(-k);
    Rat best_lo, best_hi;
    bool have = false;
    for (std::size_t n = 0; n < max_steps; ++n) {
      Rat lo = lower.entry(n);
      // total.query(n) + 2^-n over-approximates x + w, so subtracting the
      // complement's lower bound leaves a true upper bound on x.
      Rat hi = total.query(static_cast<long>(n)) + pow2(-static_cast<long>(n)) -
               complement_lower.entry(n);
      if (!have) {
        best_lo = lo;
        best_hi = hi;
        have = true;
      } else {
        if (lo > best_lo) best_lo = lo;
        if (hi < best_hi) best_hi = hi;
      }
      if (best_hi - best_lo <= eps) return (best_lo + best_hi) / 2;
    }
    throw EffortExhausted("squeeze_sup: enclosure stuck above 2^-" +
                              std::to_string(k),
                          best_lo, best_hi);
  });
}

}  // namespace cbv
