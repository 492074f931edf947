#pragma once

#include <string>
#include <utility>
#include <vector>

#include "cbv/rational.hpp"

namespace cbv {

// Piecewise linear function on [0;1] given by rational vertices with
// strictly increasing x, first x = 0, last x = 1.  Everything about it is
// exact: values, sup norm (attained at a vertex), Lipschitz constant.
class Polygon {
 public:
  static Polygon constant(const Rat& c);
  static Polygon from_vertices(std::vector<std::pair<Rat, Rat>> v);  // validates

  const std::vector<std::pair<Rat, Rat>>& vertices() const { return v_; }
  Rat eval(const Rat& x) const;  // requires 0 <= x <= 1
  Rat sup_norm() const;
  Rat lipschitz() const;

 private:
  std::vector<std::pair<Rat, Rat>> v_;
};

Polygon add(const Polygon& a, const Polygon& b);
Polygon scale(const Rat& c, const Polygon& p);
Polygon negate(const Polygon& p);
// exact sup |a - b|: the difference is piecewise linear with breaks at the
// union of vertex abscissas, so the max sits on a vertex.
Rat sup_dist(const Polygon& a, const Polygon& b);

// "polygon[(0,0),(1/2,1),(1,0)]", whitespace tolerated.  Throws ParseError.
Polygon parse_polygon(const std::string& s);
// Same, but starts at pos inside a larger text and leaves pos after ']'.
Polygon parse_polygon_prefix(const std::string& s, std::size_t& pos);
std::string polygon_string(const Polygon& p);

}  // namespace cbv
