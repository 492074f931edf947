#include "cbv/pw_affine.hpp"

#include <algorithm>

#include "cbv/errors.hpp"

namespace cbv {

PwAffine PwAffine::zero() { return linear(Rat(0)); }

PwAffine PwAffine::linear(const Rat& a) {
  PwAffine g;
  g.segs_ = {{Rat(0), Rat(0), a}};
  return g;
}

PwAffine PwAffine::step(const Rat& c, const Rat& j) {
  if (!(0 < c && c < 1)) throw DomainError("step location must be inside (0;1)");
  PwAffine g;
  g.segs_ = {{Rat(0), Rat(0), Rat(0)}, {c, j, Rat(0)}};
  return g;
}

PwAffine PwAffine::from_polygon(const Polygon& p) {
  const auto& v = p.vertices();
  const Rat y0 = v.front().second;
  PwAffine g;
  for (std::size_t i = 0; i + 1 < v.size(); ++i) {
    Rat s = (v[i + 1].second - v[i].second) / (v[i + 1].first - v[i].first);
    g.segs_.push_back({v[i].first, v[i].second - y0, std::move(s)});
  }
  return g;
}

PwAffine PwAffine::from_segments(std::vector<Seg> segs) {
  if (segs.empty() || segs.front().x != 0)
    throw DomainError("segment list must start at 0");
  PwAffine g;
  for (Seg& sg : segs) {
    if (sg.x < 0 || sg.x >= 1) throw DomainError("breakpoints must lie in [0;1)");
    if (!g.segs_.empty()) {
      const Seg& p = g.segs_.back();
      if (sg.x <= p.x) throw DomainError("breakpoints must be strictly increasing");
      // drop collinear continuations so the form stays canonical
      if (sg.s == p.s && sg.r == p.r + p.s * (sg.x - p.x)) continue;
    }
    g.segs_.push_back(std::move(sg));
  }
  return g;
}

std::size_t PwAffine::locate(const Rat& x) const {
  std::size_t lo = 0, hi = segs_.size() - 1;
  while (lo < hi) {
    std::size_t mid = (lo + hi + 1) / 2;
    if (segs_[mid].x <= x)
      lo = mid;
    else
      hi = mid - 1;
  }
  return lo;
}

Rat PwAffine::value(const Rat& x) const {
  if (x < 0 || x > 1) throw DomainError("bv function evaluated outside [0;1]");
  if (x == 0) return Rat(0);
  std::size_t i = locate(x);
  if (segs_[i].x == x) {  // i >= 1 here since x > 0 = segs_[0].x or x==0 done
    const Seg& p = segs_[i - 1];
    return p.r + p.s * (x - p.x);
  }
  return segs_[i].r + segs_[i].s * (x - segs_[i].x);
}

Rat PwAffine::right_limit(const Rat& x) const {
  if (x < 0 || x >= 1) throw DomainError("right limit needs 0 <= x < 1");
  std::size_t i = locate(x);
  if (segs_[i].x == x) return segs_[i].r;
  return segs_[i].r + segs_[i].s * (x - segs_[i].x);
}

Rat PwAffine::left_limit(const Rat& x) const {
  if (x <= 0 || x > 1) throw DomainError("left limit needs 0 < x <= 1");
  // value() already answers the left limit everywhere right of 0
  std::size_t i = locate(x);
  if (segs_[i].x == x) {
    const Seg& p = segs_[i - 1];
    return p.r + p.s * (x - p.x);
  }
  return segs_[i].r + segs_[i].s * (x - segs_[i].x);
}

Rat PwAffine::variation() const { return variation_to(Rat(1)); }

Rat PwAffine::variation_to(const Rat& x) const {
  if (x < 0 || x > 1) throw DomainError("variation_to outside [0;1]");
  Rat v(0);
  for (std::size_t i = 0; i < segs_.size(); ++i) {
    const Seg& sg = segs_[i];
    if (sg.x >= x) break;
    Rat next = (i + 1 < segs_.size()) ? segs_[i + 1].x : Rat(1);
    v += abs(sg.r - value(sg.x));  // jump when leaving sg.x
    Rat end = next < x ? next : x;
    v += abs(sg.s) * (end - sg.x);
  }
  return v;
}

Rat PwAffine::integral(const Rat& u, const Rat& v) const {
  if (u < 0 || v > 1 || u > v) throw DomainError("integral needs 0 <= u <= v <= 1");
  Rat acc(0);
  for (std::size_t i = 0; i < segs_.size(); ++i) {
    const Seg& sg = segs_[i];
    Rat next = (i + 1 < segs_.size()) ? segs_[i + 1].x : Rat(1);
    Rat lo = sg.x < u ? u : sg.x;
    Rat hi = next < v ? next : v;
    if (!(lo < hi)) continue;
    Rat flo = sg.r + sg.s * (lo - sg.x);
    Rat fhi = sg.r + sg.s * (hi - sg.x);
    acc += (flo + fhi) * (hi - lo) / 2;
  }
  return acc;
}

PwAffine PwAffine::total_variation_fn() const {
  PwAffine out;
  Rat v(0);
  for (std::size_t i = 0; i < segs_.size(); ++i) {
    const Seg& sg = segs_[i];
    Rat jump = abs(sg.r - value(sg.x));
    out.segs_.push_back({sg.x, v + jump, abs(sg.s)});
    Rat next = (i + 1 < segs_.size()) ? segs_[i + 1].x : Rat(1);
    v += jump + abs(sg.s) * (next - sg.x);
  }
  return out;
}

bool PwAffine::non_decreasing() const {
  for (const Seg& sg : segs_) {
    if (sg.s < 0) return false;
    if (sg.r < value(sg.x)) return false;
  }
  return true;
}

bool PwAffine::continuous_at(const Rat& x) const {
  if (x == 1) return true;  // left-continuity is built in
  std::size_t i = locate(x);
  if (segs_[i].x != x) return true;
  return segs_[i].r == value(x);
}

std::vector<Rat> PwAffine::jump_points() const {
  std::vector<Rat> out;
  for (const Seg& sg : segs_)
    if (sg.r != value(sg.x)) out.push_back(sg.x);
  return out;
}

PwAffine add(const PwAffine& a, const PwAffine& b) {
  const auto& as = a.segments();
  const auto& bs = b.segments();
  std::vector<Rat> xs;
  xs.reserve(as.size() + bs.size());
  for (const auto& sg : as) xs.push_back(sg.x);
  for (const auto& sg : bs) xs.push_back(sg.x);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

  std::vector<PwAffine::Seg> segs;
  segs.reserve(xs.size());
  std::size_t i = 0, j = 0;
  for (const Rat& x : xs) {
    while (i + 1 < as.size() && as[i + 1].x <= x) ++i;
    while (j + 1 < bs.size() && bs[j + 1].x <= x) ++j;
    Rat ra = as[i].r + as[i].s * (x - as[i].x);
    Rat rb = bs[j].r + bs[j].s * (x - bs[j].x);
    segs.push_back({x, ra + rb, as[i].s + bs[j].s});
  }
  return PwAffine::from_segments(std::move(segs));
}

PwAffine scale(const Rat& c, const PwAffine& g) {
  std::vector<PwAffine::Seg> segs = g.segments();
  for (auto& sg : segs) {
    sg.r *= c;
    sg.s *= c;
  }
  return PwAffine::from_segments(std::move(segs));
}

}  // namespace cbv
