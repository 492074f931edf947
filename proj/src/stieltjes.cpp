#include "cbv/stieltjes.hpp"

#include <algorithm>
#include <cstdint>
#include <vector>

#include "cbv/errors.hpp"

namespace cbv {

namespace {

// int_u^v p(t) dt, exact.  Requires 0 <= u <= v <= 1.
Rat polygon_integral_on(const Polygon& p, const Rat& u, const Rat& v) {
  const auto& vs = p.vertices();
  Rat acc(0);
  for (std::size_t i = 0; i + 1 < vs.size(); ++i) {
    const Rat& a = vs[i].first;
    const Rat& b = vs[i + 1].first;
    Rat lo = a < u ? u : a;
    Rat hi = b < v ? b : v;
    if (!(lo < hi)) continue;
    const Rat& ya = vs[i].second;
    Rat s = (vs[i + 1].second - ya) / (b - a);
    Rat flo = ya + s * (lo - a);
    Rat fhi = ya + s * (hi - a);
    acc += (flo + fhi) * (hi - lo) / 2;
  }
  return acc;
}

// int p dg for exact g: jumps contribute p(x)*(r - g(x)), affine runs
// contribute s * int p over the run.
Rat exact_rs(const Polygon& p, const PwAffine& g) {
  const auto& segs = g.segments();
  Rat acc(0);
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const Rat& x = segs[i].x;
    Rat nx = i + 1 < segs.size() ? segs[i + 1].x : Rat(1);
    Rat jump = segs[i].r - g.value(x);
    if (jump != 0) acc += p.eval(x) * jump;
    if (segs[i].s != 0) acc += segs[i].s * polygon_integral_on(p, x, nx);
  }
  return acc;
}

// Scans the point stream for a partition with all true gaps < 2^-p.
// Candidates are kept only when their exponent-(p+4) approximation clears
// both neighbours by 2^-(p+3), which certifies the x order; the search
// stops once every kept gap is approximately below (3/4)*2^-p, so true
// gaps stay below 2^-p by a 2^-(p+3) margin the final mesh check can see.
Partition fine_partition(const BVName& g, long p) {
  const long t = p + 4;
  const Rat w = pow2(1 - t);
  const Rat stop_gap = Rat(3) * pow2(-p) / 4;
  struct Ent {
    Rat q;
    std::uint64_t idx;
  };
  std::vector<Ent> kept;
  kept.push_back({g.point(0).x.query(t), 0});
  kept.push_back({g.point(1).x.query(t), 1});
  std::size_t bad = kept[1].q - kept[0].q < stop_gap ? 0 : 1;
  std::uint64_t next = 2;
  const std::uint64_t cap = std::uint64_t(1) << 22;
  while (bad > 0) {
    if (next >= cap)
      throw Error("rs_integral: partition search exhausted the point stream");
    Rat q = g.point(next).x.query(t);
    ++next;
    auto it = std::upper_bound(
        kept.begin(), kept.end(), q,
        [](const Rat& a, const Ent& e) -> bool { return a < e.q; });
    if (it == kept.begin() || it == kept.end()) continue;
    std::size_t j = std::size_t(it - kept.begin());
    if (!(q - kept[j - 1].q > w) || !(kept[j].q - q > w)) continue;
    bool was_bad = !(kept[j].q - kept[j - 1].q < stop_gap);
    bool left_bad = !(q - kept[j - 1].q < stop_gap);
    bool right_bad = !(kept[j].q - q < stop_gap);
    bad += std::size_t(left_bad) + std::size_t(right_bad) - std::size_t(was_bad);
    kept.insert(it, Ent{q, next - 1});
  }
  std::vector<std::uint64_t> indices;
  indices.reserve(kept.size());
  for (const Ent& e : kept) indices.push_back(e.idx);
  Partition z = make_partition(g, std::move(indices), t + 16);
  if (!partition_mesh_below(g, z, p, t + 16))
    throw Error("rs_integral: partition failed its own mesh certificate");
  return z;
}

// S(g,h,Z) within 2^-(n+1): value queries get exponent n+3+log2(terms*H)
// with H > ||h||, h evaluations exponent n+3+log2(2^l+1).
Rat stieltjes_sum(const ContinuousFunction& h, const BVName& g,
                  const Partition& z, long l, long n) {
  const std::size_t nt = z.indices.size() - 1;
  Rat hb = h.norm().query(0) + 2;
  if (hb < 1) hb = 1;
  const long eg = n + 3 + ceil_log2_abs(Rat(Int(nt)) * hb);
  const long eh = n + 3 + ceil_log2_abs(pow2(l) + 1);
  Rat prev_y = g.point(z.indices[0]).y.query(eg);
  Rat acc(0);
  for (std::size_t i = 1; i <= nt; ++i) {
    BVName::Point pt = g.point(z.indices[i]);
    Rat y = pt.y.query(eg);
    Rat hv = h.eval(pt.x).query(eh);
    acc += hv * (y - prev_y);
    prev_y = y;
  }
  return acc;
}

}  // namespace

Rat rs_integral(const ContinuousFunction& h, const BVName& g, long l, long n) {
  const long k = n + l + 1;
  if (g.exact()) return exact_rs(h.stage(k), *g.exact());
  Partition z = fine_partition(g, h.modulus().at(k + 1));
  return stieltjes_sum(h, g, z, l, n);
}

FunctionalWithNorm functional_from_bv(const BVWithVar& g) {
  Rat bound = g.var.query(0) + 1;
  if (bound < 1) bound = 1;
  const long l = ceil_log2_abs(bound);
  BVName name = g.name;
  Functional f = Functional::from_fn([name, l](const ContinuousFunction& h) {
    return CauchyReal::from_fn(
        [name, l, h](long n) -> Rat { return rs_integral(h, name, l, n); });
  });
  return FunctionalWithNorm{f, g.var, name.monotone()};
}

}  // namespace cbv
