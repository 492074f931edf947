#pragma once

#include <memory>
#include <string>
#include <variant>

#include "cbv/polygon.hpp"
#include "cbv/pw_affine.hpp"
#include "cbv/rational.hpp"

namespace cbv {

// Expression trees over the bv generators:
//   expr   := unary ('+' unary)*
//   unary  := '-' unary | RAT '*' unary | atom
//   atom   := linear(RAT) | step(RAT, RAT) | polygon[...] | '(' expr ')'
// Subtraction is spelled "+ -1*...": there is no binary '-'.  Step
// locations must lie strictly inside (0;1); that is checked at parse time.
struct BVExpr {
  struct Linear {
    Rat slope;
  };
  struct Step {
    Rat at;
    Rat jump;
  };
  struct Poly {
    Polygon p;
  };
  struct Scale {
    Rat c;
    std::shared_ptr<const BVExpr> body;
  };
  struct Neg {
    std::shared_ptr<const BVExpr> body;
  };
  struct Sum {
    std::shared_ptr<const BVExpr> lhs, rhs;
  };
  std::variant<Linear, Step, Poly, Scale, Neg, Sum> node;
};

BVExpr parse_bv_expr(const std::string& s);  // throws ParseError

// The normalized function the expression describes: value 0 at 0 and
// left continuous on (0;1), so polygon atoms are shifted by -p(0).
PwAffine denote(const BVExpr& e);

std::string bv_expr_string(const BVExpr& e);

}  // namespace cbv
