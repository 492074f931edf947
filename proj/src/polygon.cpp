#include "cbv/polygon.hpp"

#include <algorithm>
#include <cctype>

#include "cbv/errors.hpp"

namespace cbv {

Polygon Polygon::constant(const Rat& c) {
  Polygon p;
  p.v_ = {{Rat(0), c}, {Rat(1), c}};
  return p;
}

Polygon Polygon::from_vertices(std::vector<std::pair<Rat, Rat>> v) {
  if (v.size() < 2) throw ParseError("polygon needs at least two vertices");
  if (v.front().first != 0 || v.back().first != 1)
    throw ParseError("polygon must span [0;1]");
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i - 1].first < v[i].first))
      throw ParseError("polygon vertices must have strictly increasing x");
  Polygon p;
  p.v_ = std::move(v);
  return p;
}

Rat Polygon::eval(const Rat& x) const {
  if (x < 0 || x > 1) throw DomainError("polygon evaluated outside [0;1]");
  // rightmost vertex with vx <= x
  std::size_t lo = 0, hi = v_.size() - 1;
  while (lo + 1 < hi) {
    std::size_t mid = (lo + hi) / 2;
    if (v_[mid].first <= x)
      lo = mid;
    else
      hi = mid;
  }
  if (v_[hi].first <= x) lo = hi;
  if (v_[lo].first == x) return v_[lo].second;
  const auto& [x0, y0] = v_[lo];
  const auto& [x1, y1] = v_[lo + 1];
  return y0 + (y1 - y0) * (x - x0) / (x1 - x0);
}

Rat Polygon::sup_norm() const {
  Rat m(0);
  for (const auto& [x, y] : v_) {
    Rat a = abs(y);
    if (a > m) m = a;
  }
  return m;
}

Rat Polygon::lipschitz() const {
  Rat m(0);
  for (std::size_t i = 1; i < v_.size(); ++i) {
    Rat s = abs((v_[i].second - v_[i - 1].second) /
                (v_[i].first - v_[i - 1].first));
    if (s > m) m = s;
  }
  return m;
}

namespace {

std::vector<Rat> merged_xs(const Polygon& a, const Polygon& b) {
  std::vector<Rat> xs;
  for (const auto& [x, y] : a.vertices()) xs.push_back(x);
  for (const auto& [x, y] : b.vertices()) xs.push_back(x);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  return xs;
}

}  // namespace

Polygon add(const Polygon& a, const Polygon& b) {
  std::vector<std::pair<Rat, Rat>> v;
  for (const Rat& x : merged_xs(a, b)) v.emplace_back(x, a.eval(x) + b.eval(x));
  return Polygon::from_vertices(std::move(v));
}

Polygon scale(const Rat& c, const Polygon& p) {
  std::vector<std::pair<Rat, Rat>> v = p.vertices();
  for (auto& [x, y] : v) y *= c;
  return Polygon::from_vertices(std::move(v));
}

Polygon negate(const Polygon& p) { return scale(Rat(-1), p); }

Rat sup_dist(const Polygon& a, const Polygon& b) {
  Rat m(0);
  for (const Rat& x : merged_xs(a, b)) {
    Rat d = abs(a.eval(x) - b.eval(x));
    if (d > m) m = d;
  }
  return m;
}

namespace {

struct Cursor {
  const std::string& s;
  std::size_t i = 0;
  void ws() {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  }
  bool lit(char c) {
    ws();
    if (i < s.size() && s[i] == c) {
      ++i;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!lit(c)) throw ParseError(std::string("expected '") + c + "' in polygon literal");
  }
};

Rat parse_rat_token(Cursor& c) {
  c.ws();
  std::size_t start = c.i;
  while (c.i < c.s.size() &&
         (std::isdigit(static_cast<unsigned char>(c.s[c.i])) || c.s[c.i] == '/' ||
          c.s[c.i] == '.' || c.s[c.i] == '-' || c.s[c.i] == '+'))
    ++c.i;
  auto r = parse_rat(c.s.substr(start, c.i - start));
  if (!r) throw ParseError("bad rational in polygon literal");
  return *r;
}

}  // namespace

Polygon parse_polygon_prefix(const std::string& s, std::size_t& pos) {
  Cursor c{s, pos};
  c.ws();
  const std::string kw = "polygon";
  if (s.compare(c.i, kw.size(), kw) != 0) throw ParseError("expected 'polygon[...]'");
  c.i += kw.size();
  c.expect('[');
  std::vector<std::pair<Rat, Rat>> v;
  if (!c.lit(']')) {
    do {
      c.expect('(');
      Rat x = parse_rat_token(c);
      c.expect(',');
      Rat y = parse_rat_token(c);
      c.expect(')');
      v.emplace_back(std::move(x), std::move(y));
    } while (c.lit(','));
    c.expect(']');
  }
  pos = c.i;
  return Polygon::from_vertices(std::move(v));
}

Polygon parse_polygon(const std::string& s) {
  std::size_t pos = 0;
  Polygon p = parse_polygon_prefix(s, pos);
  while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  if (pos != s.size()) throw ParseError("trailing input after polygon literal");
  return p;
}

std::string polygon_string(const Polygon& p) {
  std::string out = "polygon[";
  bool first = true;
  for (const auto& [x, y] : p.vertices()) {
    if (!first) out += ",";
    first = false;
    out += "(" + rat_string(x) + "," + rat_string(y) + ")";
  }
  return out + "]";
}

}  // namespace cbv
