#include "cbv/bv_name.hpp"

#include <algorithm>
#include <numeric>

#include "cbv/errors.hpp"
#include "cbv/measure.hpp"
#include "cbv/riesz.hpp"

namespace cbv {

namespace {

// Cursor for the point enumeration of an exact name: even slots walk the
// odd dyadics level by level (1/2, 1/4, 3/4, 1/8, ...), odd slots walk the
// remaining rationals by denominator.  Values in `skip` never appear.
struct RationalStream {
  std::vector<Rat> skip;  // sorted
  std::vector<Rat> out;
  std::uint64_t dj = 0;
  unsigned long nq = 3, np = 1;
  bool dyadic_turn = true;

  bool skipped(const Rat& r) const {
    return std::binary_search(skip.begin(), skip.end(), r);
  }

  Rat dyadic(std::uint64_t j) const {
    long s = 1;
    std::uint64_t base = 0;
    while (j - base >= (std::uint64_t{1} << (s - 1))) {
      base += std::uint64_t{1} << (s - 1);
      ++s;
    }
    Rat num = Rat(Int(j - base)) * 2 + 1;
    return num * pow2(-s);
  }

  Rat next_nondyadic() {
    for (;;) {
      if (np >= nq) {
        ++nq;
        while ((nq & (nq - 1)) == 0) ++nq;  // skip dyadic denominators
        np = 1;
        continue;
      }
      unsigned long p = np++;
      if (std::gcd(p, nq) == 1) return rat(static_cast<long>(p), static_cast<long>(nq));
    }
  }

  const Rat& at(std::uint64_t j) {
    while (out.size() <= j) {
      Rat cand = dyadic_turn ? dyadic(dj++) : next_nondyadic();
      dyadic_turn = !dyadic_turn;
      if (!skipped(cand)) out.push_back(std::move(cand));
    }
    return out[j];
  }
};

Int floor_rat(const Rat& q) {
  Int f;
  mpz_fdiv_q(f.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return f;
}

// S(g, D) for the partition D of [a;b] made of the multiples of 2^-n plus
// the endpoints, jump locations excluded.  Grid points interior to an
// affine piece drop out of the sum, so only cells around breakpoints need
// explicit evaluation and the cost is independent of n.
Rat exact_grid_sum(const PwAffine& g, const Rat& a, const Rat& b, long n) {
  const Rat h = pow2(-n);
  const std::vector<Rat> jumps = g.jump_points();
  auto is_jump = [&jumps](const Rat& r) {
    return std::binary_search(jumps.begin(), jumps.end(), r);
  };
  std::vector<Rat> evals{a, b};
  for (const auto& sg : g.segments()) {
    const Rat& c = sg.x;
    if (!(a < c && c < b)) continue;
    Rat u = Rat(floor_rat(c / h)) * h;
    Rat v = u + h;
    if (u == c) {
      if (!is_jump(c)) {
        evals.push_back(c);
        continue;
      }
      u -= h;
    }
    while (u > a && is_jump(u)) u -= h;
    if (u < a) u = a;
    while (v < b && is_jump(v)) v += h;
    if (v > b) v = b;
    evals.push_back(std::move(u));
    evals.push_back(std::move(v));
  }
  std::sort(evals.begin(), evals.end());
  evals.erase(std::unique(evals.begin(), evals.end()), evals.end());
  Rat s(0);
  for (std::size_t i = 0; i + 1 < evals.size(); ++i)
    s += abs(g.value(evals[i + 1]) - g.value(evals[i]));
  return s;
}

Rat certified_sum(const std::vector<CauchyReal>& ys, long n) {
  // sum of |differences| minus its error bound, so the result is a true
  // lower bound of the exact partition sum
  const long cnt = static_cast<long>(ys.size()) - 1;
  const long kq = n + ceil_log2_abs(rat(cnt + 1)) + 1;
  Rat s(0);
  Rat prev = ys[0].query(kq);
  for (std::size_t t = 1; t < ys.size(); ++t) {
    Rat cur = ys[t].query(kq);
    s += abs(cur - prev);
    prev = cur;
  }
  return s - pow2(-n);
}

// Lower approximations of the variation over [0;x_idx] (left) or [x_idx;1]
// (right) using only the name's own points: candidates certified inside the
// side at working precision m, near ties dropped so the sampled order is the
// true order.
LowerReal stream_side_lower(const BVName& g, std::uint64_t idx, bool left) {
  return LowerReal::from_fn([g, idx, left](std::size_t step) -> Rat {
    const long n = static_cast<long>(step);
    const long m = n + 2;
    const Rat margin = pow2(1 - m);
    const BVName::Point end = g.point(idx);
    const Rat qe = end.x.query(m);

    std::vector<std::pair<Rat, std::uint64_t>> cand;
    for (std::uint64_t j = 2; j <= step; ++j) {
      if (j == idx) continue;
      Rat q = g.point(j).x.query(m);
      const bool inside = left ? (q > margin && q < qe - margin)
                               : (q > qe + margin && q < 1 - margin);
      if (inside) cand.emplace_back(std::move(q), j);
    }
    std::sort(cand.begin(), cand.end());

    std::vector<CauchyReal> ys;
    ys.push_back(left ? g.point(0).y : end.y);
    Rat last = left ? Rat(0) : qe;
    for (auto& [q, j] : cand) {
      if (q - last <= margin) continue;
      ys.push_back(g.point(j).y);
      last = q;
    }
    ys.push_back(left ? end.y : g.point(1).y);

    return certified_sum(ys, n);
  });
}

// /g/(x_idx) from whatever the name offers, best source first: closed form
// for exact names, the bounds oracle's variation function, or partition
// sums over the point stream squeezed against the total.
CauchyReal variation_value(const BVName& g, const CauchyReal& var,
                           std::uint64_t idx) {
  if (g.exact()) {
    const PwAffine pw = *g.exact();
    const Rat xi = *g.point(idx).x.exact();
    LowerReal lower = LowerReal::from_fn([pw, xi](std::size_t n) -> Rat {
      return exact_grid_sum(pw, Rat(0), xi, static_cast<long>(n));
    });
    LowerReal comp = LowerReal::from_fn([pw, xi](std::size_t n) -> Rat {
      return exact_grid_sum(pw, xi, Rat(1), static_cast<long>(n));
    });
    return squeeze_sup(lower, comp, var);
  }
  if (g.bounds()) {
    const BVBoundsPtr b = g.bounds();
    const CauchyReal x = g.point(idx).x;
    return CauchyReal::from_fn([b, x](long k) -> Rat {
      for (long s = 0; s <= 1000000; ++s) {
        const long m = k + 2 + s;
        Rat q = x.query(m);
        Rat lt = q - pow2(-m);
        if (lt < 0) lt = Rat(0);
        Rat rt = q + pow2(-m);
        if (rt > 1) rt = Rat(1);
        Rat lo = b->varfn(lt, s).lo;
        Rat hi = b->varfn(rt, s).hi;
        if (hi - lo <= pow2(1 - k)) return (hi + lo) / 2;
      }
      throw EffortExhausted("variation value squeeze ran out of effort");
    });
  }
  LowerReal lower = stream_side_lower(g, idx, true);
  LowerReal comp = stream_side_lower(g, idx, false);
  return squeeze_sup(lower, comp, var);
}

// Closed forms for every bound of an exact function.
class ExactBounds : public BVBounds {
 public:
  explicit ExactBounds(PwAffine g)
      : g_(std::move(g)), tv_(g_.total_variation_fn()) {}

  RatBounds value(const Rat& t, long) override {
    Rat v = g_.value(t);
    return {v, v};
  }
  RatBounds varfn(const Rat& t, long) override {
    Rat v = g_.variation_to(t);
    return {v, v};
  }
  Rat var_interval_lower(const Rat& a, const Rat& b, long) override {
    // open interval: drop the jump taken when leaving a
    Rat v = g_.variation_to(b) - g_.variation_to(a);
    if (a < 1) v -= abs(g_.right_limit(a) - g_.value(a));
    return v > 0 ? v : Rat(0);
  }
  RatBounds integral(const Rat& u, const Rat& v, long) override {
    Rat q = g_.integral(u, v);
    return {q, q};
  }
  RatBounds varfn_integral(const Rat& u, const Rat& v, long) override {
    Rat q = tv_.integral(u, v);
    return {q, q};
  }

 private:
  PwAffine g_;
  PwAffine tv_;
};

// Bounds of /g/ from bounds of g: increments of /g/ have the same
// magnitudes, so interval variations coincide.
class VarfnBounds : public BVBounds {
 public:
  explicit VarfnBounds(BVBoundsPtr base) : base_(std::move(base)) {}

  RatBounds value(const Rat& t, long e) override { return base_->varfn(t, e); }
  RatBounds varfn(const Rat& t, long e) override { return base_->varfn(t, e); }
  Rat var_interval_lower(const Rat& a, const Rat& b, long e) override {
    return base_->var_interval_lower(a, b, e);
  }
  RatBounds integral(const Rat& u, const Rat& v, long e) override {
    return base_->varfn_integral(u, v, e);
  }
  RatBounds varfn_integral(const Rat& u, const Rat& v, long e) override {
    return base_->varfn_integral(u, v, e);
  }

 private:
  BVBoundsPtr base_;
};

// Bounds of the Jordan part (V_0^t(g) + sign*g(t))/2; the part is monotone
// starting at 0, so its variation function is the part itself and its
// interval variation is a difference of values just inside the interval.
class JordanPartBounds : public BVBounds {
 public:
  JordanPartBounds(BVBoundsPtr base, int sign)
      : base_(std::move(base)), sign_(sign) {}

  RatBounds value(const Rat& t, long e) override {
    return combine(base_->varfn(t, e), base_->value(t, e));
  }
  RatBounds varfn(const Rat& t, long e) override { return value(t, e); }
  Rat var_interval_lower(const Rat& a, const Rat& b, long e) override {
    Rat w = (b - a) * pow2(-(e < 0 ? 0 : e) - 2);
    Rat lo = value(b - w, e).lo - value(a + w, e).hi;
    return lo > 0 ? lo : Rat(0);
  }
  RatBounds integral(const Rat& u, const Rat& v, long e) override {
    return combine(base_->varfn_integral(u, v, e), base_->integral(u, v, e));
  }
  RatBounds varfn_integral(const Rat& u, const Rat& v, long e) override {
    return integral(u, v, e);
  }

 private:
  RatBounds combine(const RatBounds& v, const RatBounds& g) const {
    if (sign_ > 0) return {(v.lo + g.lo) / 2, (v.hi + g.hi) / 2};
    return {(v.lo - g.hi) / 2, (v.hi - g.lo) / 2};
  }

  BVBoundsPtr base_;
  int sign_;
};

}  // namespace

BVBoundsPtr exact_bounds(PwAffine g) {
  return std::make_shared<ExactBounds>(std::move(g));
}

struct BVName::Impl {
  std::function<Point(std::uint64_t)> gen;
  bool monotone = false;
  std::optional<PwAffine> exact;
  BVBoundsPtr bounds;
  std::map<std::uint64_t, Point> memo;
};

BVName::BVName() : BVName(from_exact(PwAffine::zero(), true)) {}

BVName BVName::from_exact(PwAffine g, bool monotone) {
  auto stream = std::make_shared<RationalStream>();
  stream->skip = g.jump_points();
  auto impl = std::make_shared<Impl>();
  impl->monotone = monotone;
  impl->exact = g;
  impl->bounds = exact_bounds(g);
  impl->gen = [stream, g](std::uint64_t i) -> Point {
    if (i == 0) return {CauchyReal::constant(Rat(0)), CauchyReal::constant(Rat(0))};
    if (i == 1) return {CauchyReal::constant(Rat(1)), CauchyReal::constant(g.g1())};
    const Rat& r = stream->at(i - 2);
    return {CauchyReal::constant(r), CauchyReal::constant(g.value(r))};
  };
  return BVName(std::move(impl));
}

BVName BVName::from_generator(std::function<Point(std::uint64_t)> gen,
                              bool monotone) {
  auto impl = std::make_shared<Impl>();
  impl->monotone = monotone;
  impl->gen = std::move(gen);
  return BVName(std::move(impl));
}

BVName::Point BVName::point(std::uint64_t i) const {
  auto it = impl_->memo.find(i);
  if (it != impl_->memo.end()) return it->second;
  Point p = impl_->gen(i);
  impl_->memo.emplace(i, p);
  return p;
}

bool BVName::monotone() const { return impl_->monotone; }

const std::optional<PwAffine>& BVName::exact() const { return impl_->exact; }

const BVBoundsPtr& BVName::bounds() const { return impl_->bounds; }

BVName BVName::with_exact(PwAffine g) const {
  impl_->bounds = exact_bounds(g);
  impl_->exact = std::move(g);
  return *this;
}

BVName BVName::with_bounds(BVBoundsPtr b) const {
  impl_->bounds = std::move(b);
  return *this;
}

BVName BVName::with_monotone() const {
  impl_->monotone = true;
  return *this;
}

Partition make_partition(const BVName& g, std::vector<std::uint64_t> indices,
                         long max_exponent) {
  if (indices.size() < 2 || indices.front() != 0)
    throw DomainError("a partition starts at point 0 and has at least two points");
  for (std::size_t i = 0; i + 1 < indices.size(); ++i) {
    auto w = lt_witness_within(g.point(indices[i]).x, g.point(indices[i + 1]).x,
                               max_exponent);
    if (!w)
      throw DomainError("partition points could not be ordered within the witness budget");
  }
  return Partition{std::move(indices)};
}

Rat partition_sum(const BVName& g, const Partition& z, long k) {
  const long n = static_cast<long>(z.indices.size()) - 1;
  const long kq = k + ceil_log2_abs(rat(n + 1)) + 1;
  Rat s(0);
  Rat prev = g.point(z.indices[0]).y.query(kq);
  for (std::size_t i = 1; i < z.indices.size(); ++i) {
    Rat cur = g.point(z.indices[i]).y.query(kq);
    s += abs(cur - prev);
    prev = cur;
  }
  return s;
}

bool partition_mesh_below(const BVName& g, const Partition& z, long p,
                          long max_exponent) {
  const CauchyReal mesh = CauchyReal::constant(pow2(-p));
  for (std::size_t i = 0; i + 1 < z.indices.size(); ++i) {
    CauchyReal gap = real_affine(Rat(1), g.point(z.indices[i + 1]).x, Rat(-1),
                                 g.point(z.indices[i]).x, Rat(0));
    if (!lt_witness_within(gap, mesh, max_exponent)) return false;
  }
  return true;
}

BVWithVar bv_from_expr(const BVExpr& e) {
  PwAffine g = denote(e);
  const bool monotone = g.non_decreasing();
  CauchyReal var = CauchyReal::constant(g.variation());
  return {BVName::from_exact(std::move(g), monotone), std::move(var)};
}

BVWithVar total_variation_fn(const BVWithVar& g) {
  const BVName base = g.name;
  const CauchyReal var = g.var;
  auto gen = [base, var](std::uint64_t i) -> BVName::Point {
    BVName::Point p = base.point(i);
    if (i == 0) return {p.x, CauchyReal::constant(Rat(0))};
    if (i == 1) return {p.x, var};
    return {p.x, variation_value(base, var, i)};
  };
  BVName out = BVName::from_generator(gen, true);
  if (base.exact())
    out = out.with_exact(base.exact()->total_variation_fn());
  else if (base.bounds())
    out = out.with_bounds(std::make_shared<VarfnBounds>(base.bounds()));
  return {out, var};
}

std::pair<BVWithVar, BVWithVar> jordan_bv(const BVWithVar& g) {
  const BVWithVar v = total_variation_fn(g);
  const BVName vb = v.name;
  const BVName gb = g.name;
  const Rat half = rat(1, 2);
  auto part = [&](int sign) -> BVWithVar {
    const Rat sh = sign > 0 ? half : -half;
    auto gen = [vb, gb, half, sh](std::uint64_t i) -> BVName::Point {
      BVName::Point pv = vb.point(i);
      BVName::Point pg = gb.point(i);
      return {pg.x, real_affine(half, pv.y, sh, pg.y, Rat(0))};
    };
    BVName nm = BVName::from_generator(gen, true);
    if (gb.exact()) {
      PwAffine ex = scale(half, add(gb.exact()->total_variation_fn(),
                                    scale(Rat(sign), *gb.exact())));
      nm = nm.with_exact(std::move(ex));
    } else if (gb.bounds()) {
      nm = nm.with_bounds(std::make_shared<JordanPartBounds>(gb.bounds(), sign));
    }
    CauchyReal var = real_affine(half, g.var, sh, gb.point(1).y, Rat(0));
    return {std::move(nm), std::move(var)};
  };
  return {part(+1), part(-1)};
}

BVName sum_monotone(const BVName& g1, const BVName& g2) {
  if (!g1.monotone() || !g2.monotone())
    throw DomainError("sum_monotone needs two monotone names");
  const NonnegMeasureName m =
      measure_sum_nonneg(measure_from_monotone(g1), measure_from_monotone(g2));
  const FunctionalWithNorm f = functional_from_nonneg_measure(m);
  return riesz_bv(f.fn, f.norm);
}

BVWithVar bv_from_monotone_difference(const BVName& g1, const BVName& g2,
                                      const CauchyReal& var) {
  if (!g1.monotone() || !g2.monotone())
    throw DomainError("bv_from_monotone_difference needs two monotone names");
  // The pair is not asserted minimal: cancellation between the parts is
  // allowed, which is why the promised Var(g) is taken from the caller.
  SignedMeasureName mu{measure_from_monotone(g1), measure_from_monotone(g2),
                       var, false};
  const FunctionalWithNorm f = functional_from_signed(mu);
  return {riesz_bv_probed(f.fn, f.norm), var};
}

}  // namespace cbv
