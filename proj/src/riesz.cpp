#include "cbv/riesz.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "cbv/errors.hpp"
#include "cbv/measure.hpp"
#include "cbv/polygon.hpp"

namespace cbv {

namespace {

// 1 on [0;a], affine to 0 at b, 0 after: the left-mass envelope
Polygon ramp_env(const Rat& a, const Rat& b) {
  std::vector<std::pair<Rat, Rat>> v;
  v.emplace_back(Rat(0), Rat(1));
  if (a > 0) v.emplace_back(a, Rat(1));
  v.emplace_back(b, Rat(0));
  if (b < 1) v.emplace_back(Rat(1), Rat(0));
  return Polygon::from_vertices(std::move(v));
}

// 0 on [0;a], affine to 1 at b, 1 after: the right-mass envelope
Polygon corner_env(const Rat& a, const Rat& b) {
  std::vector<std::pair<Rat, Rat>> v;
  if (a > 0) v.emplace_back(Rat(0), Rat(0));
  v.emplace_back(a, Rat(0));
  v.emplace_back(b, Rat(1));
  if (b < 1) v.emplace_back(Rat(1), Rat(1));
  return Polygon::from_vertices(std::move(v));
}

// 0 outside (a;b), 1 on [a+d;b-d]: the open-interval variation envelope
Polygon plateau_env(const Rat& a, const Rat& b, const Rat& d) {
  std::vector<std::pair<Rat, Rat>> v;
  if (a > 0) v.emplace_back(Rat(0), Rat(0));
  v.emplace_back(a, Rat(0));
  v.emplace_back(a + d, Rat(1));
  v.emplace_back(b - d, Rat(1));
  v.emplace_back(b, Rat(0));
  if (b < 1) v.emplace_back(Rat(1), Rat(0));
  return Polygon::from_vertices(std::move(v));
}

std::string poly_key(const Polygon& p) {
  std::string k;
  for (const auto& v : p.vertices()) {
    k += rat_string(v.first);
    k += ':';
    k += rat_string(v.second);
    k += ';';
  }
  return k;
}

// Nested rational intervals per stream cell.  Chain entry d is strictly
// inside entry d-1 and at most a quarter as wide, so midpoints converge
// to the shared limit point at rate 4^-d.  Each entry records a certified
// upper bound on the variation trapped in its open window.  The accept
// threshold shrinks like 2^-(s+d+1) down to a fixed floor: below the
// floor the chain keeps refining the point, and value queries walk deeper
// until the recorded bound is small enough or give up honestly.  The
// candidate scan tries every narrow placement on refining rational grids,
// so atom endpoints are eventually dodged; the scan is a pure function of
// the cell, so chains replay identically.
struct NestCell {
  Rat a, b;
  long eff;    // effort that certified this window
  Rat vbound;  // certified upper bound on the variation inside (a;b)
};

struct NestSet {
  // first effort <= cap certifying trapped variation <= tau over the open
  // window, paired with the certified bound; effort -1 when none fits
  std::function<std::pair<long, Rat>(const Rat&, const Rat&, long, const Rat&)>
      fits;
  std::map<std::uint64_t, std::vector<NestCell>> chains;

  static const Rat& var_floor() {
    static const Rat f = pow2(-12);
    return f;
  }

  const NestCell& at(std::uint64_t cell, long depth) {
    auto& ch = chains[cell];
    const long s = std::bit_width(cell) - 1;
    if (ch.empty()) {
      const std::uint64_t c = cell - (std::uint64_t(1) << s);
      ch.push_back({Rat(static_cast<long>(c)) * pow2(-s),
                    Rat(static_cast<long>(c) + 1) * pow2(-s), 0L, pow2(60)});
    }
    while (static_cast<long>(ch.size()) <= depth) {
      const long d = static_cast<long>(ch.size());
      const Rat a = ch.back().a;
      const Rat b = ch.back().b;
      const Rat h = b - a;
      Rat tau = pow2(-(s + d + 1));
      if (tau < var_floor()) tau = var_floor();
      bool placed = false;
      long tries = 0;
      for (long t = 0; t <= 16 && !placed; ++t) {
        const long eff = s + d + 1 + t;
        const long den = 4L << std::min(t, 10L);
        for (long u = 1; u + 1 < den && !placed && tries < 256; ++u) {
          ++tries;
          Rat ca = a + h * u / den;
          Rat cb = a + h * (u + 1) / den;
          auto got = fits(ca, cb, eff, tau);
          if (got.first >= 0) {
            ch.push_back({std::move(ca), std::move(cb), got.first,
                          std::move(got.second)});
            placed = true;
          }
        }
      }
      if (!placed)
        throw EffortExhausted(
            "stream point certification stalled; was the variation promise "
            "exact?");
    }
    return ch[static_cast<std::size_t>(depth)];
  }
};

// Midpoint of the first chain entry no wider than 2^(1-k); entries shrink
// by at least a quarter per depth, so this terminates and stays within
// 2^-k of the shared limit point.
CauchyReal nest_midpoint(std::shared_ptr<NestSet> nests, std::uint64_t i) {
  return CauchyReal::from_fn([nests, i](long k) -> Rat {
    const Rat need = pow2(1 - k);
    for (long d = 0;; ++d) {
      const NestCell& c = nests->at(i, d);
      if (c.b - c.a <= need) return (c.a + c.b) / 2;
    }
  });
}

// Probing state for one extraction.  Every bound below is a consequence
// of finitely many applications of f: means of g come from ramp probes
// (F(ramp(u,v)) is the mean of g over [u;v], by parts), mass below an
// envelope phi >= 0 comes from sign-guided probes |h| <= phi, and upper
// bounds come from the norm promise z minus certified mass elsewhere.
// Guides only pick which sound probes to take; they carry no trust.
struct ProbeEngine {
  Functional f;
  CauchyReal z;

  std::map<std::string, CauchyReal> applies;
  std::map<std::string, std::vector<Rat>> masses;  // cumulative best per config
  std::map<long, std::vector<int>> guides;  // dyadic level -> cell signs

  ProbeEngine(Functional fn, CauchyReal norm)
      : f(std::move(fn)), z(std::move(norm)) {}

  CauchyReal& probe(const Polygon& p) {
    std::string k = poly_key(p);
    auto it = applies.find(k);
    if (it != applies.end()) return it->second;
    CauchyReal r = f.apply(ContinuousFunction::from_polygon(p));
    return applies.emplace(std::move(k), std::move(r)).first->second;
  }

  // for one-shot probes of big train polygons: results land in the
  // cumulative mass table, so keeping the polygon keyed anywhere would
  // only hold memory
  CauchyReal probe_once(const Polygon& p) {
    return f.apply_once(ContinuousFunction::from_polygon(p));
  }

  CauchyReal& mean_probe(const Rat& u, const Rat& v) {
    return probe(ramp_env(u, v));
  }

  Rat z_upper(long e) {
    if (z.exact()) return *z.exact();
    return z.query(e) + pow2(-e);
  }

  // Cell signs of g on the absolute dyadic grid, estimated once per level
  // from window means and shared by every train.  Guides only decide which
  // sound probe gets taken, so their quality never affects correctness.
  const std::vector<int>& guide(long lg) {
    auto it = guides.find(lg);
    if (it != guides.end()) return it->second;
    const long n = 1L << lg;
    std::vector<int> sg(static_cast<std::size_t>(n), 1);
    const long prec = lg + 6;
    const Rat w = pow2(-lg - 2);
    Rat prev(0);
    for (long j = 1; j <= n; ++j) {
      const Rat x = Rat(j) * pow2(-lg);
      const Rat cur = mean_probe(x - w, x).query(prec);
      sg[static_cast<std::size_t>(j - 1)] = cur >= prev ? 1 : -1;
      prev = cur;
    }
    return guides.emplace(lg, std::move(sg)).first->second;
  }

  int guide_sign(long lg, const Rat& m) {
    const std::vector<int>& sg = guide(lg);
    const Rat t = m * pow2(lg);
    const Int fl = t.get_num() / t.get_den();
    long idx = fl.get_si();
    if (idx < 0) idx = 0;
    if (idx >= static_cast<long>(sg.size())) idx = static_cast<long>(sg.size()) - 1;
    return sg[static_cast<std::size_t>(idx)];
  }

  // direction of g across the single point p, from straddling window means;
  // picks up the sign of an atom sitting exactly at p
  int point_sign(const Rat& p, const Rat& width, long prec) {
    Rat w = width;
    if (w > p / 2) w = p / 2;
    if (w > (1 - p) / 2) w = (1 - p) / 2;
    if (w <= 0) return 1;
    const Rat left = mean_probe(p - w, p).query(prec);
    const Rat right = mean_probe(p, p + w).query(prec);
    return right >= left ? 1 : -1;
  }

  // direction of the jump of g at 1: F(corner(1-w,1)) = g(1) - mean near 1
  int end_sign(const Rat& width, long prec) {
    Rat w = width;
    if (w > rat(1, 2)) w = rat(1, 2);
    const Rat q = probe(corner_env(1 - w, 1)).query(prec);
    return q >= 0 ? 1 : -1;
  }

  // One guided probe under phi at grid level L and lattice shift: plateau
  // sign per cell from the guide table, vertices at grid points and cell
  // midpoints.  The grid contains the breakpoints of phi, so |h| <= phi
  // follows segment by segment from the vertex inequalities.  Shifts 0
  // and 1/3 cannot both put a grid point on the same atom.
  Rat train_lower(const Polygon& phi, long level, int shift) {
    const auto& pv = phi.vertices();
    std::size_t i = 0;
    while (i + 1 < pv.size() && pv[i].second == 0 && pv[i + 1].second == 0) ++i;
    std::size_t j = pv.size() - 1;
    while (j > 0 && pv[j].second == 0 && pv[j - 1].second == 0) --j;
    const Rat lo = pv[i].first;
    const Rat hi = pv[j].first;
    if (!(lo < hi)) return Rat(0);
    const long lvl = std::min(level, 15L);
    const long cells = 1L << lvl;
    const Rat cellw = (hi - lo) / cells;
    const Rat sig = shift == 0 ? Rat(0) : rat(1, 3);
    std::vector<Rat> grid;
    grid.push_back(lo);
    for (long c = 0; c <= cells; ++c) {
      Rat p = lo + (Rat(c) + sig) * cellw;
      if (p > lo && p < hi) grid.push_back(std::move(p));
    }
    for (const auto& vert : pv)
      if (vert.first > lo && vert.first < hi) grid.push_back(vert.first);
    grid.push_back(hi);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    // guide resolution comparable to the cell width, capped like the grid
    const Rat invw = Rat(1) / (hi - lo);
    long lg = lvl + ceil_log2_abs(invw);
    if (lg > 15) lg = 15;
    if (lg < 0) lg = 0;
    const std::size_t nc = grid.size() - 1;
    std::vector<int> sign(nc, 1);
    for (std::size_t c = 0; c < nc; ++c)
      sign[c] = guide_sign(lg, (grid[c] + grid[c + 1]) / 2);

    // h tracks sign * phi across each whole cell and switches sides only
    // inside narrow bands around the grid points, so an atom strictly
    // inside a cell is collected at full weight and the loss is confined
    // to the bands (1/128 of the neighbor gap) plus any cells whose guide
    // sign is off.  |h| <= phi segment by segment: every vertex is under
    // phi and phi is affine between consecutive vertices.
    std::vector<std::pair<Rat, Rat>> hv;
    if (lo > 0) hv.emplace_back(Rat(0), Rat(0));
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const int sl = k == 0 ? sign[0] : sign[k - 1];
      const int sr = k == nc ? sign[nc - 1] : sign[k];
      const Rat ph = phi.eval(grid[k]);
      int sp = sl;
      if (k == nc && hi == 1 && ph > 0) {
        // window means never see a jump of g at 1 itself, so the guide
        // cannot direct an atom there; probe its direction separately
        sp = end_sign(cellw / 4, lvl + 6);
      } else if (sl != sr && ph > 0) {
        // an atom can sit exactly on a flip point; take its own side
        // rather than pinning h to zero across the flip
        sp = point_sign(grid[k], cellw / 4, lvl + 6);
      }
      if (k > 0) {
        const Rat q = grid[k] - (grid[k] - grid[k - 1]) / 128;
        hv.emplace_back(q, Rat(sl) * phi.eval(q));
      }
      hv.emplace_back(grid[k], Rat(sp) * ph);
      if (k < nc) {
        const Rat q = grid[k] + (grid[k + 1] - grid[k]) / 128;
        hv.emplace_back(q, Rat(sr) * phi.eval(q));
      }
    }
    if (hi < 1) hv.emplace_back(Rat(1), Rat(0));
    const Polygon train = Polygon::from_vertices(std::move(hv));
    // charge precision well below the band loss: queries against closed-form
    // integrals cost by train size, not precision, and a coarse query slack
    // would force two extra levels before the capture target is met
    const long qp = lvl + 8;
    const Rat q = probe_once(train).query(qp);
    Rat cand = (q < 0 ? Rat(-q) : q) - pow2(-qp);
    return cand > 0 ? cand : Rat(0);
  }

  // Best certified lower bound of int phi d|mu| within the effort budget.
  Rat mass_lower(const Polygon& phi, long effort) {
    if (effort < 0) effort = 0;
    std::vector<Rat>& best = masses[poly_key(phi)];
    const long want = std::min(2 * effort + 1, 31L);
    while (static_cast<long>(best.size()) <= want) {
      const long cfg = static_cast<long>(best.size());
      Rat cand = train_lower(phi, cfg / 2, static_cast<int>(cfg % 2));
      if (!best.empty() && best.back() > cand) cand = best.back();
      best.push_back(std::move(cand));
    }
    return best[static_cast<std::size_t>(want)];
  }

  // First effort <= cap whose open-window variation bound fits under tau,
  // with the bound achieved; effort -1 if none does.  Escalating from
  // zero keeps the trains as small as the target allows; the mass tables
  // make revisits cheap.  Bails out when the bound stops moving, so a
  // target below the reachable resolution fails fast.
  std::pair<long, Rat> var_fits(const Rat& a, const Rat& b, long cap,
                                const Rat& tau) {
    Rat best(-1);
    long stale = 0;
    for (long e = 0; e <= cap; ++e) {
      Rat up = var_upper_open(a, b, e);
      if (up <= tau) return {e, std::move(up)};
      if (best < 0 || up < best * rat(15, 16)) {
        best = up;
        stale = 0;
      } else if (++stale >= 3) {
        break;
      }
    }
    return {-1, Rat(0)};
  }

  // z minus certified mass strictly left of a and strictly right of b.
  // The ramp wedges lean on the window by a fixed fraction of its width,
  // not on the effort, so the mass tables are shared across the whole
  // effort escalation for one window.
  Rat var_upper_open(const Rat& a, const Rat& b, long e) {
    if (e < 0) e = 0;
    Rat up = z_upper(e);
    if (a > 0) {
      Rat d = (b - a) / 16;
      if (d > a) d = a;
      up -= mass_lower(ramp_env(a - d, a), e);
    }
    if (b < 1) {
      Rat d = (b - a) / 16;
      if (d > 1 - b) d = 1 - b;
      up -= mass_lower(corner_env(b, b + d), e);
    }
    return up > 0 ? up : Rat(0);
  }

  // g(t-): window mean plus/minus the variation trapped around the window
  RatBounds value_bounds(const Rat& t, long e) {
    if (t <= 0) return {Rat(0), Rat(0)};
    if (e < 0) e = 0;
    const Rat w = t * pow2(-e - 3);
    const long p = e + 3;
    const Rat q = mean_probe(t - w, t).query(p);
    const Rat slack = var_upper_open(t - 2 * w, t, e) + pow2(-p);
    return {q - slack, q + slack};
  }

  RatBounds varfn_bounds(const Rat& t, long e) {
    if (t <= 0) return {Rat(0), Rat(0)};
    if (e < 0) e = 0;
    const Rat dl = t * pow2(-e - 2);
    const Rat lo = mass_lower(ramp_env(t - dl, t), e);
    Rat hi = z_upper(e);
    if (t < 1) {
      const Rat dr = (1 - t) * pow2(-e - 2);
      hi -= mass_lower(corner_env(t, t + dr), e);
    }
    return {lo, hi};
  }

  Rat var_iv_lower(const Rat& a, const Rat& b, long e) {
    if (e < 0) e = 0;
    const Rat d = (b - a) * pow2(-e - 3);
    return mass_lower(plateau_env(a, b, d), e);
  }

  // int_u^v g dt = (v-u) F(ramp(u,v)) exactly, so this closes geometrically
  RatBounds integral_bounds(const Rat& u, const Rat& v, long e) {
    if (!(u < v)) return {Rat(0), Rat(0)};
    if (e < 0) e = 0;
    const long p = e + 2;
    const Rat q = mean_probe(u, v).query(p);
    const Rat w = v - u;
    const Rat err = w * pow2(-p);
    return {w * q - err, w * q + err};
  }

  // int_u^v V_0^t dt = (v-u) int ramp(u,v) d|mu|; ramp and its complement
  // add up to 1, so the two mass bounds squeeze against z with no atom
  // caveat.
  RatBounds varint_bounds(const Rat& u, const Rat& v, long e) {
    if (!(u < v)) return {Rat(0), Rat(0)};
    if (e < 0) e = 0;
    const Rat w = v - u;
    const Rat lo = w * mass_lower(ramp_env(u, v), e);
    const Rat hi = w * (z_upper(e) - mass_lower(corner_env(u, v), e));
    return {lo, hi};
  }
};

class RieszBounds final : public BVBounds {
 public:
  explicit RieszBounds(std::shared_ptr<ProbeEngine> e) : e_(std::move(e)) {}
  RatBounds value(const Rat& t, long effort) override {
    return e_->value_bounds(t, effort);
  }
  RatBounds varfn(const Rat& t, long effort) override {
    return e_->varfn_bounds(t, effort);
  }
  Rat var_interval_lower(const Rat& a, const Rat& b, long effort) override {
    return e_->var_iv_lower(a, b, effort);
  }
  RatBounds integral(const Rat& u, const Rat& v, long effort) override {
    return e_->integral_bounds(u, v, effort);
  }
  RatBounds varfn_integral(const Rat& u, const Rat& v, long effort) override {
    return e_->varint_bounds(u, v, effort);
  }

 private:
  std::shared_ptr<ProbeEngine> e_;
};

BVName probed_name(std::shared_ptr<ProbeEngine> eng) {
  auto nests = std::make_shared<NestSet>();
  std::shared_ptr<ProbeEngine> e = eng;
  nests->fits = [e](const Rat& a, const Rat& b, long cap,
                    const Rat& tau) -> std::pair<long, Rat> {
    return e->var_fits(a, b, cap, tau);
  };
  auto gen = [eng, nests](std::uint64_t i) -> BVName::Point {
    if (i == 0)
      return {CauchyReal::constant(Rat(0)), CauchyReal::constant(Rat(0))};
    if (i == 1)
      return {CauchyReal::constant(Rat(1)), eng->probe(Polygon::constant(Rat(1)))};
    const long s = std::bit_width(i) - 1;
    // |mean over the window - g(x)| <= trapped variation, so walk deeper
    // until the recorded bound leaves room for the query slack; when the
    // chain bottoms out above the target, push effort on one window
    CauchyReal y = CauchyReal::from_fn([eng, nests, i, s](long k) -> Rat {
      const Rat need = pow2(-(k + 2));
      const long dmax = std::max(1L, k + 1 - s) + 12;
      for (long d = 1; d <= dmax; ++d) {
        const NestCell& c = nests->at(i, d);
        if (c.vbound <= need) return eng->mean_probe(c.a, c.b).query(k + 2);
      }
      const NestCell& c = nests->at(i, dmax);
      if (eng->var_fits(c.a, c.b, k + 8, need).first >= 0)
        return eng->mean_probe(c.a, c.b).query(k + 2);
      throw EffortExhausted(
          "stream point value needs variation resolution beyond the probing "
          "budget");
    });
    return {nest_midpoint(nests, i), std::move(y)};
  };
  return BVName::from_generator(gen, false)
      .with_bounds(std::make_shared<RieszBounds>(std::move(eng)));
}

Rat total_upper(const CauchyReal& t, long e) {
  if (t.exact()) return *t.exact();
  return t.query(e) + pow2(-e);
}

// Cursor-backed bounds for the distribution t -> mu([0;t)) of a
// non-negative measure; varfn coincides with value because the
// distribution is non-decreasing.
class CursorDistBounds final : public BVBounds {
 public:
  explicit CursorDistBounds(NonnegMeasureName m) : m_(std::move(m)) {}

  RatBounds value(const Rat& t, long e) override {
    if (t <= 0) return {Rat(0), Rat(0)};
    if (e < 0) e = 0;
    const Rat lo = m_.lower_bound(RationalInterval::left_closed(t), e);
    Rat hi = total_upper(m_.total(), e);
    if (t < 1) hi -= m_.lower_bound(RationalInterval::right_closed(t), e);
    return {lo, hi};
  }
  RatBounds varfn(const Rat& t, long e) override { return value(t, e); }
  Rat var_interval_lower(const Rat& a, const Rat& b, long e) override {
    return m_.lower_bound(RationalInterval::open_iv(a, b), e);
  }
  RatBounds integral(const Rat& u, const Rat& v, long e) override {
    if (!(u < v)) return {Rat(0), Rat(0)};
    if (e < 0) e = 0;
    const long pieces = 1L << std::min(e, 12L);
    const Rat w = (v - u) / pieces;
    Rat lo(0), hi(0);
    for (long i = 0; i < pieces; ++i) {
      lo += w * value(u + w * i, e).lo;
      hi += w * value(i + 1 == pieces ? v : Rat(u + w * (i + 1)), e).hi;
    }
    return {lo, hi};
  }
  RatBounds varfn_integral(const Rat& u, const Rat& v, long e) override {
    return integral(u, v, e);
  }

 private:
  NonnegMeasureName m_;
};

// Bounds of g = g+ - g- read off the part distributions of an asserted
// minimal pair: |mu| = mu+ + mu-, so varfn adds where value subtracts.
class MinimalDiffBounds final : public BVBounds {
 public:
  MinimalDiffBounds(BVBoundsPtr p, BVBoundsPtr n)
      : p_(std::move(p)), n_(std::move(n)) {}

  RatBounds value(const Rat& t, long e) override {
    const RatBounds a = p_->value(t, e);
    const RatBounds b = n_->value(t, e);
    return {a.lo - b.hi, a.hi - b.lo};
  }
  RatBounds varfn(const Rat& t, long e) override {
    const RatBounds a = p_->varfn(t, e);
    const RatBounds b = n_->varfn(t, e);
    return {a.lo + b.lo, a.hi + b.hi};
  }
  Rat var_interval_lower(const Rat& a, const Rat& b, long e) override {
    return p_->var_interval_lower(a, b, e) + n_->var_interval_lower(a, b, e);
  }
  RatBounds integral(const Rat& u, const Rat& v, long e) override {
    const RatBounds a = p_->integral(u, v, e);
    const RatBounds b = n_->integral(u, v, e);
    return {a.lo - b.hi, a.hi - b.lo};
  }
  RatBounds varfn_integral(const Rat& u, const Rat& v, long e) override {
    const RatBounds a = p_->varfn_integral(u, v, e);
    const RatBounds b = n_->varfn_integral(u, v, e);
    return {a.lo + b.lo, a.hi + b.hi};
  }

 private:
  BVBoundsPtr p_, n_;
};

BVName distribution_name(const NonnegMeasureName& mu) {
  const NonnegMeasureName m = mu;
  auto nests = std::make_shared<NestSet>();
  nests->fits = [m](const Rat& a, const Rat& b, long cap,
                    const Rat& tau) -> std::pair<long, Rat> {
    for (long e = 0; e <= cap; ++e) {
      Rat up = total_upper(m.total(), e);
      if (a > 0) up -= m.lower_bound(RationalInterval::left_closed(a), e);
      if (b < 1) up -= m.lower_bound(RationalInterval::right_closed(b), e);
      if (up < 0) up = Rat(0);
      if (up <= tau) return {e, std::move(up)};
    }
    return {-1, Rat(0)};
  };
  auto gen = [m, nests](std::uint64_t i) -> BVName::Point {
    if (i == 0)
      return {CauchyReal::constant(Rat(0)), CauchyReal::constant(Rat(0))};
    if (i == 1) return {CauchyReal::constant(Rat(1)), m.total()};
    const long s = std::bit_width(i) - 1;
    // the cursor bracket [mass below the window; total minus mass above]
    // pins g on the whole window; walk deeper until it closes to 2^-k
    CauchyReal y = CauchyReal::from_fn([m, nests, i, s](long k) -> Rat {
      const Rat need = pow2(1 - k);
      const long dmax = std::max(1L, k + 1 - s) + 40;
      for (long d = 1; d <= dmax; ++d) {
        const NestCell& c = nests->at(i, d);
        const Rat lo = m.lower_bound(RationalInterval::left_closed(c.a), c.eff);
        const Rat hi = total_upper(m.total(), c.eff) -
                       m.lower_bound(RationalInterval::right_closed(c.b), c.eff);
        if (hi - lo <= need) return (lo + hi) / 2;
      }
      throw EffortExhausted(
          "distribution value needs cursor resolution beyond the budget");
    });
    return {nest_midpoint(nests, i), std::move(y)};
  };
  BVBoundsPtr bd = mu.distribution_bounds();
  if (!bd) bd = std::make_shared<CursorDistBounds>(m);
  return BVName::from_generator(gen, true).with_bounds(std::move(bd));
}

BVName signed_distribution_name(const SignedMeasureName& sm) {
  const NonnegMeasureName mp = sm.pos;
  const NonnegMeasureName mn = sm.neg;
  auto nests = std::make_shared<NestSet>();
  nests->fits = [mp, mn](const Rat& a, const Rat& b, long cap,
                         const Rat& tau) -> std::pair<long, Rat> {
    for (long e = 0; e <= cap; ++e) {
      Rat up = total_upper(mp.total(), e) + total_upper(mn.total(), e);
      if (a > 0)
        up -= mp.lower_bound(RationalInterval::left_closed(a), e) +
              mn.lower_bound(RationalInterval::left_closed(a), e);
      if (b < 1)
        up -= mp.lower_bound(RationalInterval::right_closed(b), e) +
              mn.lower_bound(RationalInterval::right_closed(b), e);
      if (up < 0) up = Rat(0);
      if (up <= tau) return {e, std::move(up)};
    }
    return {-1, Rat(0)};
  };
  auto gen = [mp, mn, nests](std::uint64_t i) -> BVName::Point {
    if (i == 0)
      return {CauchyReal::constant(Rat(0)), CauchyReal::constant(Rat(0))};
    if (i == 1)
      return {CauchyReal::constant(Rat(1)),
              real_affine(Rat(1), mp.total(), Rat(-1), mn.total(), Rat(0))};
    const long s = std::bit_width(i) - 1;
    CauchyReal y = CauchyReal::from_fn([mp, mn, nests, i, s](long k) -> Rat {
      const Rat need = pow2(1 - k);
      const long dmax = std::max(1L, k + 1 - s) + 40;
      for (long d = 1; d <= dmax; ++d) {
        const NestCell& c = nests->at(i, d);
        const RationalInterval below = RationalInterval::left_closed(c.a);
        const RationalInterval above = RationalInterval::right_closed(c.b);
        const Rat lo =
            mp.lower_bound(below, c.eff) -
            (total_upper(mn.total(), c.eff) - mn.lower_bound(above, c.eff));
        const Rat hi =
            (total_upper(mp.total(), c.eff) - mp.lower_bound(above, c.eff)) -
            mn.lower_bound(below, c.eff);
        if (hi - lo <= need) return (lo + hi) / 2;
      }
      throw EffortExhausted(
          "distribution value needs cursor resolution beyond the budget");
    });
    return {nest_midpoint(nests, i), std::move(y)};
  };
  BVBoundsPtr pb = sm.pos.distribution_bounds();
  if (!pb) pb = std::make_shared<CursorDistBounds>(mp);
  BVBoundsPtr nb = sm.neg.distribution_bounds();
  if (!nb) nb = std::make_shared<CursorDistBounds>(mn);
  return BVName::from_generator(gen, false)
      .with_bounds(std::make_shared<MinimalDiffBounds>(std::move(pb), std::move(nb)));
}

}  // namespace

BVName riesz_bv_probed(const Functional& f, const CauchyReal& z) {
  return probed_name(std::make_shared<ProbeEngine>(f, z));
}

BVName riesz_bv(const Functional& f, const CauchyReal& z) {
  if (auto p = f.payload("nonneg-measure")) {
    const auto* m = static_cast<const NonnegMeasureName*>(p.get());
    if (z.same_object(m->total())) return distribution_name(*m);
  }
  if (auto p = f.payload("signed-measure")) {
    const auto* sm = static_cast<const SignedMeasureName*>(p.get());
    if (sm->minimal && z.same_object(sm->norm)) return signed_distribution_name(*sm);
  }
  return riesz_bv_probed(f, z);
}

std::pair<FunctionalWithNorm, FunctionalWithNorm> jordan_functional(
    const FunctionalWithNorm& f) {
  const BVName g = riesz_bv(f.fn, f.norm);
  const auto parts = jordan_bv(BVWithVar{g, f.norm});
  return {functional_from_nonneg_measure(measure_from_monotone(parts.first.name)),
          functional_from_nonneg_measure(measure_from_monotone(parts.second.name))};
}

}  // namespace cbv
