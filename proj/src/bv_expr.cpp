#include "cbv/bv_expr.hpp"

#include <cctype>
#include <utility>

#include "cbv/errors.hpp"

namespace cbv {

namespace {

std::shared_ptr<const BVExpr> share(BVExpr e) {
  return std::make_shared<const BVExpr>(std::move(e));
}

struct ExprCursor {
  const std::string& s;
  std::size_t i = 0;

  void ws() {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  }
  char peek() {
    ws();
    return i < s.size() ? s[i] : '\0';
  }
  bool lit(char c) {
    if (peek() == c) {
      ++i;
      return true;
    }
    return false;
  }
  void expect(char c, const char* where) {
    if (!lit(c))
      throw ParseError(std::string("expected '") + c + "' " + where);
  }
  bool looks_at(const char* w) {
    ws();
    std::size_t n = 0;
    while (w[n] != '\0') ++n;
    if (s.compare(i, n, w) != 0) return false;
    char after = i + n < s.size() ? s[i + n] : '\0';
    return !std::isalnum(static_cast<unsigned char>(after)) && after != '_';
  }
  bool keyword(const char* w) {
    if (!looks_at(w)) return false;
    while (*w != '\0') {
      ++i;
      ++w;
    }
    return true;
  }

  Rat rational(const char* where) {
    ws();
    std::size_t start = i;
    if (i < s.size() && s[i] == '-') ++i;
    std::size_t digits_from = i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
    if (i == digits_from)
      throw ParseError(std::string("expected a rational ") + where);
    if (i < s.size() && (s[i] == '/' || s[i] == '.')) {
      ++i;
      std::size_t frac_from = i;
      while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
      if (i == frac_from)
        throw ParseError(std::string("expected a rational ") + where);
    }
    auto r = parse_rat(s.substr(start, i - start));
    if (!r) throw ParseError(std::string("bad rational ") + where);
    return *r;
  }

  BVExpr expr() {
    BVExpr e = unary();
    while (lit('+')) {
      BVExpr rhs = unary();
      e = BVExpr{BVExpr::Sum{share(std::move(e)), share(std::move(rhs))}};
    }
    return e;
  }

  BVExpr unary() {
    if (lit('-')) return BVExpr{BVExpr::Neg{share(unary())}};
    char c = peek();
    if (std::isdigit(static_cast<unsigned char>(c))) {
      Rat f = rational("as a scale factor");
      expect('*', "after a scale factor");
      return BVExpr{BVExpr::Scale{std::move(f), share(unary())}};
    }
    return atom();
  }

  BVExpr atom() {
    if (lit('(')) {
      BVExpr e = expr();
      expect(')', "to close a subexpression");
      return e;
    }
    if (keyword("linear")) {
      expect('(', "after 'linear'");
      Rat a = rational("as the slope of linear(...)");
      expect(')', "to close linear(...)");
      return BVExpr{BVExpr::Linear{std::move(a)}};
    }
    if (keyword("step")) {
      expect('(', "after 'step'");
      Rat at = rational("as the location of step(...)");
      expect(',', "between the step arguments");
      Rat jump = rational("as the jump of step(...)");
      expect(')', "to close step(...)");
      if (!(0 < at && at < 1))
        throw ParseError("step location must lie strictly between 0 and 1");
      return BVExpr{BVExpr::Step{std::move(at), std::move(jump)}};
    }
    if (looks_at("polygon"))
      return BVExpr{BVExpr::Poly{parse_polygon_prefix(s, i)}};
    throw ParseError(
        "expected linear(...), step(...), polygon[...], a scale factor, or '('");
  }
};

std::string wrap_sums(const BVExpr& e) {
  std::string out = bv_expr_string(e);
  if (std::holds_alternative<BVExpr::Sum>(e.node)) return "(" + out + ")";
  return out;
}

}  // namespace

BVExpr parse_bv_expr(const std::string& s) {
  ExprCursor c{s};
  BVExpr e = c.expr();
  c.ws();
  if (c.i != s.size()) throw ParseError("trailing input after expression");
  return e;
}

PwAffine denote(const BVExpr& e) {
  if (auto* l = std::get_if<BVExpr::Linear>(&e.node)) return PwAffine::linear(l->slope);
  if (auto* st = std::get_if<BVExpr::Step>(&e.node)) return PwAffine::step(st->at, st->jump);
  if (auto* p = std::get_if<BVExpr::Poly>(&e.node)) return PwAffine::from_polygon(p->p);
  if (auto* sc = std::get_if<BVExpr::Scale>(&e.node)) return scale(sc->c, denote(*sc->body));
  if (auto* n = std::get_if<BVExpr::Neg>(&e.node)) return scale(Rat(-1), denote(*n->body));
  const auto& sum = std::get<BVExpr::Sum>(e.node);
  return add(denote(*sum.lhs), denote(*sum.rhs));
}

std::string bv_expr_string(const BVExpr& e) {
  if (auto* l = std::get_if<BVExpr::Linear>(&e.node))
    return "linear(" + rat_string(l->slope) + ")";
  if (auto* st = std::get_if<BVExpr::Step>(&e.node))
    return "step(" + rat_string(st->at) + "," + rat_string(st->jump) + ")";
  if (auto* p = std::get_if<BVExpr::Poly>(&e.node)) return polygon_string(p->p);
  if (auto* sc = std::get_if<BVExpr::Scale>(&e.node))
    return rat_string(sc->c) + "*" + wrap_sums(*sc->body);
  if (auto* n = std::get_if<BVExpr::Neg>(&e.node)) return "-" + wrap_sums(*n->body);
  const auto& sum = std::get<BVExpr::Sum>(e.node);
  return bv_expr_string(*sum.lhs) + " + " + bv_expr_string(*sum.rhs);
}

}  // namespace cbv
