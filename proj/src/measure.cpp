#include "cbv/measure.hpp"

#include <bit>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cbv/errors.hpp"
#include "cbv/polygon.hpp"
#include "cbv/pw_affine.hpp"
#include "cbv/riesz.hpp"

namespace cbv {

namespace {

std::uint64_t isqrt64(std::uint64_t v) {
  const Int r = sqrt(Int(static_cast<unsigned long>(v)));
  return r.get_ui();
}

// Pairing by square shells: (0,0), (0,1), (1,1), (1,0), (0,2), (1,2),
// (2,2), (2,1), (2,0), ...  Every pair with max(a,b) = R lives in shell R.
std::pair<std::uint64_t, std::uint64_t> shell_unpair(std::uint64_t p) {
  const std::uint64_t r = isqrt64(p);
  const std::uint64_t off = p - r * r;
  if (off <= r) return {off, r};
  return {r, 2 * r - off};
}

// 0, 1, 1/2, 1/3, 2/3, 1/4, 3/4, 1/5, ...: the rationals of [0;1] in
// lowest terms, ordered by denominator.  Memoized; single-threaded use.
const Rat& unit_rat(std::uint64_t k) {
  static std::vector<Rat> memo{Rat(0), Rat(1)};
  static unsigned long num = 1, den = 1;
  while (memo.size() <= k) {
    ++num;
    if (num >= den) {
      ++den;
      num = 1;
    }
    if (std::gcd(num, den) == 1)
      memo.push_back(rat(static_cast<long>(num), static_cast<long>(den)));
  }
  return memo[k];
}

// 0, 1, -1, 2, -2, 1/2, -1/2, 3, -3, ...: all rationals in lowest terms,
// ordered by |p| + q, positive before negative.  Memoized as above.
const Rat& signed_rat(std::uint64_t k) {
  static std::vector<Rat> memo{Rat(0)};
  static unsigned long wt = 1, den = 0;
  static bool flip = false;
  while (memo.size() <= k) {
    if (flip) {
      memo.push_back(Rat(-memo.back()));
      flip = false;
      continue;
    }
    do {
      ++den;
      if (den >= wt) {
        ++wt;
        den = 1;
      }
    } while (std::gcd(wt - den, den) != 1);
    memo.push_back(rat(static_cast<long>(wt - den), static_cast<long>(den)));
    flip = true;
  }
  return memo[k];
}

// The interval with catalogue number j, or nothing when the number does
// not decode to a well-formed interval (padding slots).
std::optional<RationalInterval> interval_at(std::uint64_t j) {
  const auto [u, v] = shell_unpair(j / 4);
  switch (j % 4) {
    case 0: {
      const Rat& a = unit_rat(u);
      const Rat& b = unit_rat(v);
      if (!(a < b)) return std::nullopt;
      return RationalInterval::open_iv(a, b);
    }
    case 1: {
      if (v != 0) return std::nullopt;
      const Rat& b = unit_rat(u);
      if (!(b > 0)) return std::nullopt;
      return RationalInterval::left_closed(b);
    }
    case 2: {
      if (v != 0) return std::nullopt;
      const Rat& a = unit_rat(u);
      if (!(a < 1)) return std::nullopt;
      return RationalInterval::right_closed(a);
    }
    default:
      if (u != 0 || v != 0) return std::nullopt;
      return RationalInterval::full_iv();
  }
}

// Lattice shifts for the cover grids: the unit rationals with 1 skipped.
const Rat& lattice_shift(std::uint64_t r) { return unit_rat(r == 0 ? 0 : r + 1); }

std::string trimmed(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t')) --e;
  return s.substr(b, e - b);
}

}  // namespace

RationalInterval RationalInterval::open_iv(Rat a, Rat b) {
  if (!(a >= 0 && a < b && b <= 1))
    throw DomainError("interval (a;b) needs 0 <= a < b <= 1");
  RationalInterval j;
  j.kind = Kind::open;
  j.a = std::move(a);
  j.b = std::move(b);
  return j;
}

RationalInterval RationalInterval::left_closed(Rat b) {
  if (!(b > 0 && b <= 1)) throw DomainError("interval [0;b) needs 0 < b <= 1");
  RationalInterval j;
  j.kind = Kind::left_closed;
  j.b = std::move(b);
  return j;
}

RationalInterval RationalInterval::right_closed(Rat a) {
  if (!(a >= 0 && a < 1)) throw DomainError("interval (a;1] needs 0 <= a < 1");
  RationalInterval j;
  j.kind = Kind::right_closed;
  j.a = std::move(a);
  return j;
}

RationalInterval RationalInterval::full_iv() { return RationalInterval{}; }

RationalInterval parse_interval(const std::string& s) {
  const std::string t = trimmed(s);
  if (t.size() < 5)
    throw ParseError("interval too short: " + s);
  const char open = t.front();
  const char close = t.back();
  if ((open != '(' && open != '[') || (close != ')' && close != ']'))
    throw ParseError("interval must look like (a,b), [0,b), (a,1] or [0,1]: " + s);
  const std::size_t comma = t.find(',');
  if (comma == std::string::npos || t.rfind(',') != comma)
    throw ParseError("interval needs exactly one comma: " + s);
  const std::optional<Rat> a = parse_rat(trimmed(t.substr(1, comma - 1)));
  const std::optional<Rat> b =
      parse_rat(trimmed(t.substr(comma + 1, t.size() - comma - 2)));
  if (!a || !b) throw ParseError("bad rational endpoint in interval: " + s);
  if (open == '(' && close == ')') {
    if (!(*a >= 0 && *a < *b && *b <= 1))
      throw ParseError("open interval needs 0 <= a < b <= 1: " + s);
    return RationalInterval::open_iv(*a, *b);
  }
  if (open == '[' && close == ')') {
    if (*a != 0) throw ParseError("a left-closed interval starts at 0: " + s);
    if (!(*b > 0 && *b <= 1)) throw ParseError("[0,b) needs 0 < b <= 1: " + s);
    return RationalInterval::left_closed(*b);
  }
  if (open == '(' && close == ']') {
    if (*b != 1) throw ParseError("a right-closed interval ends at 1: " + s);
    if (!(*a >= 0 && *a < 1)) throw ParseError("(a,1] needs 0 <= a < 1: " + s);
    return RationalInterval::right_closed(*a);
  }
  if (*a != 0 || *b != 1)
    throw ParseError("the only closed interval is [0,1]: " + s);
  return RationalInterval::full_iv();
}

std::string interval_string(const RationalInterval& j) {
  switch (j.kind) {
    case RationalInterval::Kind::open:
      return "(" + rat_string(j.a) + "," + rat_string(j.b) + ")";
    case RationalInterval::Kind::left_closed:
      return "[0," + rat_string(j.b) + ")";
    case RationalInterval::Kind::right_closed:
      return "(" + rat_string(j.a) + ",1]";
    default:
      return "[0,1]";
  }
}

struct NonnegMeasureName::Impl {
  CauchyReal total;
  Cursor cursor;
  bool effort_independent = false;
  BVBoundsPtr dist;
};

NonnegMeasureName::NonnegMeasureName() {
  auto impl = std::make_shared<Impl>();
  impl->total = CauchyReal::constant(Rat(0));
  impl->cursor = [](const RationalInterval&, long) -> Rat { return Rat(0); };
  impl->effort_independent = true;
  impl_ = std::move(impl);
}

NonnegMeasureName NonnegMeasureName::from_cursor(CauchyReal total, Cursor cursor,
                                                 bool effort_independent) {
  auto impl = std::make_shared<Impl>();
  impl->total = std::move(total);
  impl->cursor = std::move(cursor);
  impl->effort_independent = effort_independent;
  return NonnegMeasureName(std::move(impl));
}

const CauchyReal& NonnegMeasureName::total() const { return impl_->total; }

// Running max over efforts 0..effort, recomputed statelessly so the value
// depends only on (j, effort), never on earlier calls.
Rat NonnegMeasureName::lower_bound(const RationalInterval& j, long effort) const {
  if (impl_->effort_independent) return impl_->cursor(j, 0);
  if (effort < 0) effort = 0;
  Rat best = impl_->cursor(j, 0);
  for (long e = 1; e <= effort; ++e) {
    Rat r = impl_->cursor(j, e);
    if (r > best) best = std::move(r);
  }
  return best;
}

FactStream<MeasureFact> NonnegMeasureName::facts() const {
  NonnegMeasureName self = *this;
  return FactStream<MeasureFact>(
      [self](std::uint64_t i) -> std::optional<MeasureFact> {
        const std::uint64_t v = i + 1;
        const int effort = std::countr_zero(v);
        const std::uint64_t p = (v >> effort) >> 1;
        const auto [pj, pd] = shell_unpair(p);
        const std::optional<RationalInterval> j = interval_at(pj);
        if (!j) return std::nullopt;
        const Rat d = signed_rat(pd);
        if (!(d < self.lower_bound(*j, effort))) return std::nullopt;
        return MeasureFact{d, *j};
      });
}

const BVBoundsPtr& NonnegMeasureName::distribution_bounds() const {
  return impl_->dist;
}

NonnegMeasureName NonnegMeasureName::with_distribution_bounds(BVBoundsPtr b) const {
  auto impl = std::make_shared<Impl>(*impl_);
  impl->dist = std::move(b);
  return NonnegMeasureName(std::move(impl));
}

namespace {

// Mass lower bound certified by stream points of a monotone name: take a
// prefix, keep the points provably inside the interval, and read off the
// increment of g between the extreme ones.  Margins make every bound true
// at every effort; density of the stream gives convergence.
Rat stream_mass_lower(const BVName& g, const RationalInterval& j, long e) {
  using K = RationalInterval::Kind;
  if (e < 0) e = 0;
  const long t = e + 2;
  const Rat margin = pow2(-t);
  const bool need_above_a = j.kind == K::open || j.kind == K::right_closed;
  const bool need_below_b = j.kind == K::open || j.kind == K::left_closed;
  bool have_min = false, have_max = false;
  Rat qmin, qmax;
  std::uint64_t imin = 0, imax = 0;
  for (std::uint64_t i = 2; i < 2 + static_cast<std::uint64_t>(e); ++i) {
    const Rat q = g.point(i).x.query(t);
    if (need_above_a && !(q - margin > j.a)) continue;
    if (need_below_b && !(q + margin < j.b)) continue;
    if (!have_min || q < qmin) {
      qmin = q;
      imin = i;
      have_min = true;
    }
    if (!have_max || q > qmax) {
      qmax = q;
      imax = i;
      have_max = true;
    }
  }
  Rat lo(0);
  switch (j.kind) {
    case K::open:
      if (have_min && have_max)
        lo = (g.point(imax).y.query(t) - margin) -
             (g.point(imin).y.query(t) + margin);
      break;
    case K::left_closed:
      if (have_max) lo = g.point(imax).y.query(t) - margin;
      break;
    case K::right_closed:
      if (have_min)
        lo = (g.point(1).y.query(t) - margin) -
             (g.point(imin).y.query(t) + margin);
      break;
    case K::full:
      lo = g.point(1).y.query(t) - margin;
      break;
  }
  return lo > 0 ? lo : Rat(0);
}

}  // namespace

NonnegMeasureName measure_from_monotone(const BVName& g) {
  if (!g.monotone())
    throw DomainError("measure_from_monotone needs a name with the monotone flag");
  const CauchyReal total = g.point(1).y;
  NonnegMeasureName::Cursor cursor;
  bool effort_independent = false;
  if (g.exact()) {
    const PwAffine m = *g.exact();
    effort_independent = true;
    cursor = [m](const RationalInterval& j, long) -> Rat {
      using K = RationalInterval::Kind;
      Rat v;
      switch (j.kind) {
        case K::open:
          v = m.value(j.b) - m.right_limit(j.a);
          break;
        case K::left_closed:
          v = m.value(j.b);
          break;
        case K::right_closed:
          v = m.g1() - m.right_limit(j.a);
          break;
        default:
          v = m.g1();
          break;
      }
      return v > 0 ? v : Rat(0);
    };
  } else if (g.bounds()) {
    const BVBoundsPtr bd = g.bounds();
    const CauchyReal tot = total;
    cursor = [bd, tot](const RationalInterval& j, long e) -> Rat {
      using K = RationalInterval::Kind;
      if (e < 0) e = 0;
      // value targets the left limit, so the right edge is read directly
      // and the left edge through a shrinking window above a
      const Rat total_lo =
          tot.exact() ? *tot.exact() : Rat(tot.query(e) - pow2(-e));
      Rat v;
      switch (j.kind) {
        case K::open: {
          const Rat w = (j.b - j.a) * pow2(-e - 2);
          v = bd->value(j.b - w, e).lo - bd->value(j.a + w, e).hi;
          break;
        }
        case K::left_closed:
          v = bd->value(j.b, e).lo;
          break;
        case K::right_closed: {
          const Rat w = (1 - j.a) * pow2(-e - 2);
          v = total_lo - bd->value(j.a + w, e).hi;
          break;
        }
        default:
          v = total_lo;
          break;
      }
      return v > 0 ? v : Rat(0);
    };
  } else {
    const BVName gg = g;
    cursor = [gg](const RationalInterval& j, long e) -> Rat {
      return stream_mass_lower(gg, j, e);
    };
  }
  NonnegMeasureName out =
      NonnegMeasureName::from_cursor(total, std::move(cursor), effort_independent);
  if (g.bounds()) out = out.with_distribution_bounds(g.bounds());
  return out;
}

namespace {

// Componentwise sums.  Sound as a bounds oracle of g1 + g2 only when both
// summands are monotone (variation is additive there); distribution
// functions of measures always are.
class SumBounds final : public BVBounds {
 public:
  SumBounds(BVBoundsPtr a, BVBoundsPtr b) : a_(std::move(a)), b_(std::move(b)) {}

  RatBounds value(const Rat& t, long effort) override {
    const RatBounds x = a_->value(t, effort);
    const RatBounds y = b_->value(t, effort);
    return {x.lo + y.lo, x.hi + y.hi};
  }
  RatBounds varfn(const Rat& t, long effort) override {
    const RatBounds x = a_->varfn(t, effort);
    const RatBounds y = b_->varfn(t, effort);
    return {x.lo + y.lo, x.hi + y.hi};
  }
  Rat var_interval_lower(const Rat& a, const Rat& b, long effort) override {
    return a_->var_interval_lower(a, b, effort) +
           b_->var_interval_lower(a, b, effort);
  }
  RatBounds integral(const Rat& u, const Rat& v, long effort) override {
    const RatBounds x = a_->integral(u, v, effort);
    const RatBounds y = b_->integral(u, v, effort);
    return {x.lo + y.lo, x.hi + y.hi};
  }
  RatBounds varfn_integral(const Rat& u, const Rat& v, long effort) override {
    const RatBounds x = a_->varfn_integral(u, v, effort);
    const RatBounds y = b_->varfn_integral(u, v, effort);
    return {x.lo + y.lo, x.hi + y.hi};
  }

 private:
  BVBoundsPtr a_, b_;
};

}  // namespace

NonnegMeasureName measure_sum_nonneg(const NonnegMeasureName& m1,
                                     const NonnegMeasureName& m2) {
  const CauchyReal total =
      real_affine(Rat(1), m1.total(), Rat(1), m2.total(), Rat(0));
  const NonnegMeasureName a = m1;
  const NonnegMeasureName b = m2;
  auto cursor = [a, b](const RationalInterval& j, long e) -> Rat {
    return a.lower_bound(j, e) + b.lower_bound(j, e);
  };
  NonnegMeasureName out = NonnegMeasureName::from_cursor(total, std::move(cursor));
  if (m1.distribution_bounds() && m2.distribution_bounds())
    out = out.with_distribution_bounds(std::make_shared<SumBounds>(
        m1.distribution_bounds(), m2.distribution_bounds()));
  return out;
}

std::pair<Rat, Rat> interval_mass_bounds(const NonnegMeasureName& mu, const Rat& a,
                                         const Rat& b, long effort) {
  if (!(a >= 0 && a < b && b <= 1))
    throw DomainError("interval_mass_bounds needs 0 <= a < b <= 1");
  const RationalInterval inner = RationalInterval::open_iv(a, b);
  if (effort < 0) effort = 0;
  Rat lo(0);
  std::optional<Rat> hi;
  for (long e = 0; e <= effort; ++e) {
    const Rat l = mu.lower_bound(inner, e);
    if (l > lo) lo = l;
    Rat up = mu.total().exact() ? *mu.total().exact()
                                : Rat(mu.total().query(e) + pow2(-e));
    if (a > 0) up -= mu.lower_bound(RationalInterval::left_closed(a), e);
    if (b < 1) up -= mu.lower_bound(RationalInterval::right_closed(b), e);
    if (!hi || up < *hi) hi = std::move(up);
  }
  return {std::move(lo), std::move(*hi)};
}

Rat integrate_measure(const NonnegMeasureName& mu, const ContinuousFunction& h,
                      long n) {
  Rat hb = h.norm().query(0) + 2;  // above sup|h| + 1
  if (hb < 1) hb = 1;
  Rat tb = mu.total().query(0) + 2;
  if (tb < 1) tb = 1;
  const long k = n + 2 + ceil_log2_abs(hb > tb ? hb : tb);
  const long s = h.modulus().at(k) + 1;
  const Rat mesh = pow2(-s);
  const Polygon hp = h.stage(k + 1);
  const Rat total_up = mu.total().exact()
                           ? *mu.total().exact()
                           : Rat(mu.total().query(k + 2) + pow2(-k - 2));
  const Rat slack = pow2(-k);
  Rat best_cand(0);
  std::optional<Rat> best_err;
  // Grids finer than the modulus, dovetailed over lattice shifts so the
  // cut points dodge atoms; each atom rules out one shift per level.
  for (long round = 0; round < 512; ++round) {
    const Rat& sigma = lattice_shift(static_cast<std::uint64_t>(round));
    std::vector<Rat> cuts;
    for (long i = 0;; ++i) {
      Rat c = (Rat(i) + sigma) * mesh;
      if (!(c < 1)) break;
      if (c > 0) cuts.push_back(std::move(c));
    }
    std::vector<RationalInterval> pieces;
    pieces.reserve(cuts.size() + 1);
    pieces.push_back(RationalInterval::left_closed(cuts.front()));
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
      pieces.push_back(RationalInterval::open_iv(cuts[i], cuts[i + 1]));
    pieces.push_back(RationalInterval::right_closed(cuts.back()));
    Rat covered(0);
    Rat cand(0);
    for (std::size_t i = 0; i < pieces.size(); ++i) {
      const Rat m = mu.lower_bound(pieces[i], round);
      if (m == 0) continue;
      covered += m;
      const Rat u = (i == 0) ? Rat(0) : pieces[i].a;
      const Rat v = (i + 1 == pieces.size()) ? Rat(1) : pieces[i].b;
      cand += m * hp.eval((u + v) / 2);
    }
    if (total_up - covered <= slack) return cand;
    const Rat err = (total_up - covered) * hb + pow2(-n);
    if (!best_err || err < *best_err) {
      best_err = err;
      best_cand = std::move(cand);
    }
  }
  throw EffortExhausted("integrate_measure: cover squeeze ran out of rounds",
                        best_cand - *best_err, best_cand + *best_err);
}

namespace {

// int h dmu through the distribution function m of mu:
//   int P dm = P(1) m(1) - sum_j s_j int over piece j of m(t) dt
// for a polygon stage P with slopes s_j; the integrals come from the
// bounds oracle, refined until the summed gaps fit the error budget.
// Cost scales with the stage size, not with any mesh, so thin probes
// stay cheap.
Rat integrate_by_parts(const NonnegMeasureName& mu, const BVBoundsPtr& bounds,
                       const ContinuousFunction& h, long n) {
  Rat tb = mu.total().query(0) + 1;
  if (tb < 1) tb = 1;
  const long stage_k = n + 2 + ceil_log2_abs(tb);
  const Polygon p = h.stage(stage_k);
  const auto& vs = p.vertices();
  const Rat p1 = vs.back().second;
  Rat m1;
  if (mu.total().exact()) {
    m1 = *mu.total().exact();
  } else {
    const Rat ap = abs(p1);
    m1 = mu.total().query(n + 3 + ceil_log2_abs(ap + 1));
  }
  struct Piece {
    Rat u, v, s;
  };
  std::vector<Piece> pieces;
  for (std::size_t i = 0; i + 1 < vs.size(); ++i) {
    const Rat slope =
        (vs[i + 1].second - vs[i].second) / (vs[i + 1].first - vs[i].first);
    if (slope != 0) pieces.push_back({vs[i].first, vs[i + 1].first, slope});
  }
  const Rat acc = p1 * m1;
  const Rat budget = pow2(-n - 2);
  Rat cand(0), half_gap(0);
  for (long e = 0; e <= 200; ++e) {
    Rat gapsum(0), twice(0);
    for (const Piece& pc : pieces) {
      const RatBounds ib = bounds->integral(pc.u, pc.v, e);
      const Rat widths = (pc.s < 0 ? Rat(-pc.s) : pc.s) * (ib.hi - ib.lo);
      gapsum += widths;
      twice += pc.s * (ib.lo + ib.hi);
    }
    cand = acc - twice / 2;
    half_gap = gapsum / 2;
    if (gapsum <= budget) return cand;
  }
  throw EffortExhausted(
      "functional application: distribution integral bounds did not close",
      cand - half_gap - pow2(-n - 1), cand + half_gap + pow2(-n - 1));
}

Rat integrate_for_apply(const NonnegMeasureName& mu, const ContinuousFunction& h,
                        long n) {
  if (mu.distribution_bounds())
    return integrate_by_parts(mu, mu.distribution_bounds(), h, n);
  return integrate_measure(mu, h, n);
}

}  // namespace

FunctionalWithNorm functional_from_signed(const SignedMeasureName& mu) {
  const NonnegMeasureName pos = mu.pos;
  const NonnegMeasureName neg = mu.neg;
  Functional f = Functional::from_fn([pos, neg](const ContinuousFunction& h) {
    return CauchyReal::from_fn([pos, neg, h](long n) -> Rat {
      return integrate_for_apply(pos, h, n + 1) - integrate_for_apply(neg, h, n + 1);
    });
  });
  f = f.with_payload("signed-measure", std::make_shared<SignedMeasureName>(mu));
  return {std::move(f), mu.norm, false};
}

FunctionalWithNorm functional_from_nonneg_measure(const NonnegMeasureName& mu) {
  const NonnegMeasureName m = mu;
  Functional f = Functional::from_fn([m](const ContinuousFunction& h) {
    return CauchyReal::from_fn(
        [m, h](long n) -> Rat { return integrate_for_apply(m, h, n); });
  });
  f = f.with_payload("nonneg-measure", std::make_shared<NonnegMeasureName>(m));
  return {std::move(f), m.total(), true};
}

SignedMeasureName signed_from_jordan(const NonnegMeasureName& mp,
                                     const NonnegMeasureName& mn) {
  CauchyReal norm = real_affine(Rat(1), mp.total(), Rat(1), mn.total(), Rat(0));
  return {mp, mn, std::move(norm), true};
}

std::pair<NonnegMeasureName, NonnegMeasureName> jordan_measure(
    const SignedMeasureName& mu) {
  const FunctionalWithNorm f = functional_from_signed(mu);
  const BVName g = riesz_bv(f.fn, f.norm);
  const auto parts = jordan_bv(BVWithVar{g, f.norm});
  return {measure_from_monotone(parts.first.name),
          measure_from_monotone(parts.second.name)};
}

}  // namespace cbv
