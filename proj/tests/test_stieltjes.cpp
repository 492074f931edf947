#include <doctest.h>

#include <cstdint>
#include <vector>

#include "cbv/bv_expr.hpp"
#include "cbv/bv_name.hpp"
#include "cbv/continuous.hpp"
#include "cbv/stieltjes.hpp"
#include "support/oracles.hpp"

using namespace cbv;
using test_support::exact_stieltjes;

namespace {

BVWithVar bv(const char* expr) { return bv_from_expr(parse_bv_expr(expr)); }

ContinuousFunction cf(const char* poly) {
  return ContinuousFunction::from_polygon(parse_polygon(poly));
}

long var_exponent(const PwAffine& g) {
  Rat v = g.variation() + 1;
  return ceil_log2_abs(v);
}

BVName opaque(const BVName& g) {
  return BVName::from_generator([g](std::uint64_t i) { return g.point(i); },
                                g.monotone());
}

const char* const h_corpus[] = {
    "polygon[(0,1),(1,1)]",
    "polygon[(0,0),(1,1)]",
    "polygon[(0,0),(1/2,1),(1,0)]",
    "polygon[(0,1/3),(1/4,-1),(1/2,1/2),(3/4,-1/4),(1,1)]",
};

const char* const g_corpus[] = {
    "linear(1)",
    "step(1/2,1)",
    "polygon[(0,0),(1/2,1),(1,0)]",
    "linear(1) + -2*step(1/3,1)",
    "1/3*polygon[(0,0),(1/4,1),(3/4,-1),(1,0)] + step(2/3,1/2)",
    "-linear(1/2) + step(1/7,3)",
};

}  // namespace

TEST_CASE("rs_integral golden values") {
  // int 1 dg = g(1) for g(x) = x
  Rat q = rs_integral(cf("polygon[(0,1),(1,1)]"), bv("linear(1)").name, 0, 20);
  CHECK(abs(q - 1) <= pow2(-20));
  // tent against Lebesgue: exact polygon integral 1/2
  q = rs_integral(cf("polygon[(0,0),(1/2,1),(1,0)]"), bv("linear(1)").name, 0, 20);
  CHECK(abs(q - rat(1, 2)) <= pow2(-20));
  // identity against the Dirac step: evaluation at the jump point
  q = rs_integral(cf("polygon[(0,0),(1,1)]"), bv("step(1/2,1)").name, 0, 16);
  CHECK(abs(q - rat(1, 2)) <= pow2(-16));
}

TEST_CASE("rs_integral matches the exact Stieltjes oracle on the corpus") {
  for (const char* gs : g_corpus) {
    PwAffine pw = denote(parse_bv_expr(gs));
    BVWithVar g = bv(gs);
    long l = var_exponent(pw);
    for (const char* hs : h_corpus) {
      Polygon hp = parse_polygon(hs);
      ContinuousFunction h = ContinuousFunction::from_polygon(hp);
      Rat truth = exact_stieltjes(hp, pw);
      for (long n : {6L, 14L, 24L}) {
        Rat q = rs_integral(h, g.name, l, n);
        CHECK(abs(q - truth) <= pow2(-n));
      }
    }
  }
}

TEST_CASE("rs_integral runs at different precisions are consistent") {
  for (const char* gs : g_corpus) {
    PwAffine pw = denote(parse_bv_expr(gs));
    BVWithVar g = bv(gs);
    long l = var_exponent(pw);
    ContinuousFunction h = cf("polygon[(0,0),(1/2,1),(1,0)]");
    for (long n : {8L, 12L}) {
      Rat a = rs_integral(h, g.name, l, n);
      Rat b = rs_integral(h, g.name, l, n + 4);
      CHECK(abs(a - b) <= pow2(-n) + pow2(-n - 4));
    }
  }
}

TEST_CASE("rs_integral is linear in h within certified slack") {
  Polygon h1 = parse_polygon("polygon[(0,0),(1/2,1),(1,0)]");
  Polygon h2 = parse_polygon("polygon[(0,1/3),(1/4,-1),(1/2,1/2),(3/4,-1/4),(1,1)]");
  Rat a = rat(2, 3), b = rat(-3, 2);
  Polygon combo = add(scale(a, h1), scale(b, h2));
  for (const char* gs : {"linear(1)", "step(1/2,1)", "linear(1) + -2*step(1/3,1)"}) {
    PwAffine pw = denote(parse_bv_expr(gs));
    BVWithVar g = bv(gs);
    long l = var_exponent(pw);
    long n = 16;
    Rat lhs = rs_integral(ContinuousFunction::from_polygon(combo), g.name, l, n);
    Rat rhs = a * rs_integral(ContinuousFunction::from_polygon(h1), g.name, l, n) +
              b * rs_integral(ContinuousFunction::from_polygon(h2), g.name, l, n);
    CHECK(abs(lhs - rhs) <= (Rat(1) + abs(a) + abs(b)) * pow2(-n));
  }
}

TEST_CASE("rs_integral satisfies the operator norm bound") {
  for (const char* gs : g_corpus) {
    PwAffine pw = denote(parse_bv_expr(gs));
    BVWithVar g = bv(gs);
    long l = var_exponent(pw);
    for (const char* hs : h_corpus) {
      Polygon hp = parse_polygon(hs);
      Rat q = rs_integral(ContinuousFunction::from_polygon(hp), g.name, l, 12);
      CHECK(abs(q) <= hp.sup_norm() * pw.variation() + pow2(-12));
    }
  }
}

TEST_CASE("rs_integral partition path works on opaque names") {
  // same values as the closed form, but through the point-stream search
  for (const char* gs : {"polygon[(0,0),(1/2,1),(1,0)]", "step(1/2,1)",
                         "linear(1) + -2*step(1/2,1)"}) {
    PwAffine pw = denote(parse_bv_expr(gs));
    BVWithVar g = bv(gs);
    BVName hidden = opaque(g.name);
    long l = var_exponent(pw);
    for (const char* hs : {"polygon[(0,0),(1,1)]", "polygon[(0,0),(1/2,1),(1,0)]"}) {
      Polygon hp = parse_polygon(hs);
      Rat truth = exact_stieltjes(hp, pw);
      Rat q = rs_integral(ContinuousFunction::from_polygon(hp), hidden, l, 4);
      CHECK(abs(q - truth) <= pow2(-4));
    }
  }
}

TEST_CASE("functional_from_bv wraps the integral with the right norm") {
  FunctionalWithNorm leb = functional_from_bv(bv("linear(1)"));
  CHECK(leb.nonneg);
  CHECK(abs(leb.fn.apply(const_one()).query(20) - 1) <= pow2(-20));
  CHECK(abs(leb.norm.query(20) - 1) <= pow2(-20));

  FunctionalWithNorm dirac = functional_from_bv(bv("step(1/2,1)"));
  CHECK(dirac.nonneg);
  ContinuousFunction tent = cf("polygon[(0,0),(1/2,1),(1,0)]");
  CHECK(abs(dirac.fn.apply(tent).query(16) - 1) <= pow2(-16));

  FunctionalWithNorm half = functional_from_bv(bv("polygon[(0,0),(1/2,1/2),(1,0)]"));
  CHECK(!half.nonneg);
  CHECK(abs(half.norm.query(12) - 1) <= pow2(-12));
  CHECK(abs(half.fn.apply(const_one()).query(12)) <= pow2(-12));
}

TEST_CASE("apply memoizes per function name") {
  FunctionalWithNorm f = functional_from_bv(bv("linear(1)"));
  ContinuousFunction tent = cf("polygon[(0,0),(1/2,1),(1,0)]");
  CHECK(f.fn.apply(tent).same_object(f.fn.apply(tent)));
  ContinuousFunction tent2 = cf("polygon[(0,0),(1/2,1),(1,0)]");
  CHECK(!f.fn.apply(tent).same_object(f.fn.apply(tent2)));
}
