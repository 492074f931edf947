#include <doctest.h>

#include <cstdint>
#include <vector>

#include "cbv/bv_expr.hpp"
#include "cbv/bv_name.hpp"
#include "cbv/continuous.hpp"
#include "cbv/errors.hpp"
#include "cbv/measure.hpp"
#include "cbv/stieltjes.hpp"
#include "support/oracles.hpp"

using namespace cbv;
using test_support::exact_interval_measure;
using test_support::exact_stieltjes;

namespace {

BVWithVar bv(const char* expr) { return bv_from_expr(parse_bv_expr(expr)); }

ContinuousFunction cf(const char* poly) {
  return ContinuousFunction::from_polygon(parse_polygon(poly));
}

BVName opaque(const BVName& g) {
  return BVName::from_generator([g](std::uint64_t i) { return g.point(i); },
                                g.monotone());
}

// same closed form, but the cursor can only go through the bounds oracle
BVName bounds_only(const char* expr) {
  PwAffine pw = denote(parse_bv_expr(expr));
  return opaque(bv(expr).name).with_bounds(exact_bounds(std::move(pw)));
}

NonnegMeasureName measure(const char* expr) {
  return measure_from_monotone(bv(expr).name);
}

}  // namespace

TEST_CASE("interval parsing and printing") {
  RationalInterval j = parse_interval("(1/4,3/4)");
  CHECK(j.kind == RationalInterval::Kind::open);
  CHECK(j.a == rat(1, 4));
  CHECK(j.b == rat(3, 4));
  CHECK(interval_string(j) == "(1/4,3/4)");
  CHECK(parse_interval("[0,1/2)").kind == RationalInterval::Kind::left_closed);
  CHECK(parse_interval("(1/2,1]").kind == RationalInterval::Kind::right_closed);
  CHECK(parse_interval("[0,1]").kind == RationalInterval::Kind::full);
  CHECK(parse_interval("(0.25,0.75)").a == rat(1, 4));
  CHECK(interval_string(parse_interval("[0,1]")) == "[0,1]");
  CHECK(interval_string(parse_interval("(0,1]")) == "(0,1]");

  CHECK_THROWS_AS(parse_interval("(3/4,1/4)"), ParseError);  // empty
  CHECK_THROWS_AS(parse_interval("(1/2,1/2)"), ParseError);
  CHECK_THROWS_AS(parse_interval("[1/4,1)"), ParseError);  // must start at 0
  CHECK_THROWS_AS(parse_interval("(0,1/2]"), ParseError);  // must end at 1
  CHECK_THROWS_AS(parse_interval("(0,2)"), ParseError);
  CHECK_THROWS_AS(parse_interval("(0;1)"), ParseError);
  CHECK_THROWS_AS(parse_interval("(0,1"), ParseError);
  CHECK_THROWS_AS(parse_interval("x"), ParseError);
  CHECK_THROWS_AS(parse_interval(""), ParseError);
}

TEST_CASE("exact measure cursors hit the symbolic interval measure") {
  struct Row {
    const char* expr;
    const char* iv;
    Rat want;
  };
  const Row rows[] = {
      {"linear(1)", "(1/4,1/2)", rat(1, 4)},
      {"linear(1)", "[0,1/3)", rat(1, 3)},
      {"linear(1)", "(2/3,1]", rat(1, 3)},
      {"linear(1)", "[0,1]", Rat(1)},
      {"step(1/2,1)", "(1/4,3/4)", Rat(1)},
      {"step(1/2,1)", "(1/2,1)", Rat(0)},  // open interval misses the atom
      {"step(1/2,1)", "[0,1/2)", Rat(0)},  // left continuity stops before it
      {"step(1/2,1)", "[0,3/4)", Rat(1)},
      {"step(1/2,1)", "(1/2,1]", Rat(0)},
      {"linear(1) + step(1/2,1)", "(1/4,3/4)", rat(3, 2)},
      {"linear(1) + step(1/2,1)", "[0,1]", Rat(2)},
  };
  for (const Row& r : rows) {
    CAPTURE(r.expr);
    CAPTURE(r.iv);
    const PwAffine pw = denote(parse_bv_expr(r.expr));
    const RationalInterval j = parse_interval(r.iv);
    CHECK(exact_interval_measure(pw, j) == r.want);  // oracle sanity
    NonnegMeasureName m = measure(r.expr);
    // closed forms make the cursor exact at effort zero already
    CHECK(m.lower_bound(j, 0) == r.want);
    CHECK(m.lower_bound(j, 12) == r.want);
  }
  CHECK_THROWS_AS(measure_from_monotone(bv("polygon[(0,0),(1/2,1),(1,0)]").name),
                  DomainError);
}

TEST_CASE("fact streams are sound against the symbolic oracle") {
  for (const char* expr :
       {"linear(1)", "step(1/2,1)", "linear(1) + step(1/2,1)"}) {
    CAPTURE(expr);
    const PwAffine pw = denote(parse_bv_expr(expr));
    NonnegMeasureName m = measure(expr);
    FactStream<MeasureFact> fs = m.facts();
    long emitted = 0;
    for (std::uint64_t i = 0; i < 20000; ++i) {
      const auto f = fs.item(i);
      if (!f) continue;
      ++emitted;
      CHECK(f->lower < exact_interval_measure(pw, f->interval));
    }
    CHECK(emitted > 0);
  }
}

TEST_CASE("expected facts appear in the stream") {
  struct Target {
    const char* iv;
    Rat lower;
    bool found = false;
  };
  auto scan = [](NonnegMeasureName m, std::vector<Target> targets) {
    FactStream<MeasureFact> fs = m.facts();
    for (std::uint64_t i = 0; i < 200000; ++i) {
      const auto f = fs.item(i);
      if (!f) continue;
      for (Target& t : targets)
        if (!t.found && f->lower == t.lower &&
            interval_string(f->interval) == t.iv)
          t.found = true;
    }
    for (const Target& t : targets) {
      CAPTURE(t.iv);
      CHECK(t.found);
    }
  };
  scan(measure("linear(1)"),
       {{"(0,1)", rat(1, 2)}, {"(1/2,1)", rat(1, 4)}, {"[0,1]", rat(3, 4)}});
  scan(measure("step(1/2,1)"), {{"(1/4,3/4)", rat(1, 2)}, {"[0,1]", Rat(0)}});
}

TEST_CASE("the zero measure never claims positive mass") {
  NonnegMeasureName z;
  CHECK(z.total().query(30) == 0);
  CHECK(z.lower_bound(parse_interval("(1/4,3/4)"), 25) == 0);
  FactStream<MeasureFact> fs = z.facts();
  for (std::uint64_t i = 0; i < 40000; ++i) {
    const auto f = fs.item(i);
    if (f) CHECK(f->lower < 0);  // only vacuous facts survive
  }
}

TEST_CASE("sums of measures add totals and interval masses") {
  NonnegMeasureName s =
      measure_sum_nonneg(measure("linear(1)"), measure("step(1/2,1)"));
  CHECK(abs(s.total().query(30) - 2) <= pow2(-30));
  CHECK(s.lower_bound(parse_interval("(1/4,3/4)"), 0) == rat(3, 2));
  CHECK(s.lower_bound(parse_interval("(1/2,1)"), 0) == rat(1, 2));
  CHECK(s.lower_bound(parse_interval("[0,1/2)"), 0) == rat(1, 2));
  CHECK(s.distribution_bounds() != nullptr);
}

TEST_CASE("point and bounds backed cursors converge") {
  const RationalInterval mid = parse_interval("(1/4,3/4)");

  // Dirac mass seen through stream points only: flat values around the
  // atom make the bound close fast
  NonnegMeasureName hidden = measure_from_monotone(opaque(bv("step(1/2,1)").name));
  CHECK(hidden.lower_bound(mid, 0) == 0);
  CHECK(hidden.lower_bound(mid, 20) >= 1 - pow2(-12));
  CHECK(hidden.lower_bound(mid, 20) <= 1);
  CHECK(hidden.lower_bound(parse_interval("(1/2,1)"), 20) == 0);

  // absolutely continuous mass through stream points: slow but monotone
  NonnegMeasureName leb = measure_from_monotone(opaque(bv("linear(1)").name));
  const Rat l8 = leb.lower_bound(mid, 8);
  const Rat l24 = leb.lower_bound(mid, 24);
  CHECK(l8 <= l24);
  CHECK(l24 <= rat(1, 2));
  CHECK(l24 >= rat(1, 4));

  // the bounds oracle alone gives tight cursors
  NonnegMeasureName bo = measure_from_monotone(bounds_only("linear(1)"));
  CHECK(rat(1, 2) - bo.lower_bound(mid, 20) <= pow2(-17));
  CHECK(bo.lower_bound(mid, 20) <= rat(1, 2));
  NonnegMeasureName bd = measure_from_monotone(bounds_only("step(1/2,1)"));
  CHECK(bd.lower_bound(mid, 6) == 1);
}

TEST_CASE("interval sandwich exposes boundary atoms") {
  NonnegMeasureName dir = measure("step(1/2,1)");
  for (long e : {0L, 4L, 12L, 24L}) {
    auto [lo, hi] = interval_mass_bounds(dir, rat(1, 2), rat(3, 4), e);
    CHECK(lo == 0);  // open interior holds nothing
    CHECK(hi >= 1);  // closed hull keeps the atom
    CHECK(hi - lo >= rat(1, 2));
  }
  {
    auto [lo, hi] = interval_mass_bounds(dir, rat(1, 4), rat(3, 4), 14);
    CHECK(lo <= 1);
    CHECK(1 <= hi);
    CHECK(hi - lo <= pow2(-10));
  }
  {
    NonnegMeasureName leb = measure("linear(1)");
    auto [lo, hi] = interval_mass_bounds(leb, rat(1, 3), rat(2, 3), 16);
    CHECK(lo <= rat(1, 3));
    CHECK(rat(1, 3) <= hi);
    CHECK(hi - lo <= pow2(-12));
  }
  {
    // the same sandwich driven by stream points
    NonnegMeasureName hidden =
        measure_from_monotone(opaque(bv("step(1/2,1)").name));
    auto [lo, hi] = interval_mass_bounds(hidden, rat(1, 4), rat(3, 4), 20);
    CHECK(hi - lo <= pow2(-10));
    auto [lo2, hi2] = interval_mass_bounds(hidden, rat(1, 2), rat(3, 4), 20);
    CHECK(hi2 - lo2 >= rat(1, 2));
  }
  CHECK_THROWS_AS(interval_mass_bounds(dir, rat(3, 4), rat(1, 4), 4), DomainError);
}

TEST_CASE("integrate_measure golden values") {
  const ContinuousFunction tent = cf("polygon[(0,0),(1/2,1),(1,0)]");
  const ContinuousFunction ident = cf("polygon[(0,0),(1,1)]");
  // point evaluation at the atom, even though grid cuts start right on it
  CHECK(abs(integrate_measure(measure("step(1/2,1)"), tent, 12) - 1) <= pow2(-12));
  CHECK(abs(integrate_measure(measure("linear(1)"), tent, 12) - rat(1, 2)) <=
        pow2(-12));
  CHECK(abs(integrate_measure(measure("linear(1)"), ident, 12) - rat(1, 2)) <=
        pow2(-12));
  NonnegMeasureName s =
      measure_sum_nonneg(measure("linear(1)"), measure("step(1/2,1)"));
  CHECK(abs(integrate_measure(s, tent, 12) - rat(3, 2)) <= pow2(-12));
  CHECK(integrate_measure(NonnegMeasureName(), tent, 12) == 0);
}

TEST_CASE("integrate_measure agrees with the Stieltjes integral") {
  const char* gs[] = {"linear(1)", "step(1/2,1)", "linear(1) + step(1/2,1)"};
  const char* hs[] = {"polygon[(0,0),(1/2,1),(1,0)]", "polygon[(0,0),(1,1)]"};
  for (const char* ge : gs) {
    CAPTURE(ge);
    const PwAffine pw = denote(parse_bv_expr(ge));
    BVWithVar g = bv(ge);
    NonnegMeasureName m = measure_from_monotone(g.name);
    const long l = ceil_log2_abs(pw.variation() + 1);
    for (const char* he : hs) {
      const Polygon hp = parse_polygon(he);
      const ContinuousFunction h = ContinuousFunction::from_polygon(hp);
      const Rat a = integrate_measure(m, h, 10);
      const Rat b = rs_integral(h, g.name, l, 10);
      CHECK(abs(a - b) <= pow2(-9));
      CHECK(abs(a - exact_stieltjes(hp, pw)) <= pow2(-10));
    }
  }
}

TEST_CASE("measure-backed functionals integrate through the distribution") {
  FunctionalWithNorm leb = functional_from_nonneg_measure(measure("linear(1)"));
  CHECK(leb.nonneg);
  CHECK(abs(leb.norm.query(20) - 1) <= pow2(-20));
  CHECK(abs(leb.fn.apply(cf("polygon[(0,0),(1/2,1),(1,0)]")).query(16) -
            rat(1, 2)) <= pow2(-16));
  CHECK(abs(leb.fn.apply(const_one()).query(16) - 1) <= pow2(-16));

  FunctionalWithNorm dir = functional_from_nonneg_measure(measure("step(1/2,1)"));
  CHECK(abs(dir.fn.apply(cf("polygon[(0,0),(1/2,1),(1,0)]")).query(16) - 1) <=
        pow2(-16));
  CHECK(abs(dir.fn.apply(cf("polygon[(0,1/3),(1/4,-1),(1/2,1/2),(3/4,-1/4),(1,1)]"))
                .query(14) -
            rat(1, 2)) <= pow2(-14));
}

TEST_CASE("signed measures apply with split precision") {
  // d(linear) - d(2*step): the parts are mutually singular, so the
  // packaged pair really is minimal
  NonnegMeasureName mp = measure("linear(1)");
  NonnegMeasureName mn = measure("2*step(1/2,1)");
  SignedMeasureName sm = signed_from_jordan(mp, mn);
  CHECK(sm.minimal);
  CHECK(abs(sm.norm.query(20) - 3) <= pow2(-20));
  FunctionalWithNorm f = functional_from_signed(sm);
  CHECK(!f.nonneg);
  const PwAffine mixed = denote(parse_bv_expr("linear(1) + -2*step(1/2,1)"));
  for (const char* he :
       {"polygon[(0,0),(1/2,1),(1,0)]", "polygon[(0,0),(1,1)]",
        "polygon[(0,1),(1,1)]"}) {
    const Polygon hp = parse_polygon(he);
    const Rat truth = exact_stieltjes(hp, mixed);
    CHECK(abs(f.fn.apply(ContinuousFunction::from_polygon(hp)).query(14) -
              truth) <= pow2(-14));
  }
}

TEST_CASE("jordan_measure recovers the minimal parts") {
  SignedMeasureName sm =
      signed_from_jordan(measure("linear(1)"), measure("2*step(1/2,1)"));
  auto [pp, nn] = jordan_measure(sm);
  CHECK(abs(pp.total().query(12) - 1) <= pow2(-12));
  CHECK(abs(nn.total().query(12) - 2) <= pow2(-12));

  auto [plo, phi] = interval_mass_bounds(pp, rat(1, 4), rat(3, 4), 14);
  CHECK(abs(plo - rat(1, 2)) <= pow2(-10));
  CHECK(abs(phi - rat(1, 2)) <= pow2(-10));

  auto [nlo, nhi] = interval_mass_bounds(nn, rat(1, 4), rat(3, 4), 14);
  CHECK(abs(nlo - 2) <= pow2(-10));
  CHECK(abs(nhi - 2) <= pow2(-10));

  // atom of the negative part sits on the boundary here
  auto [blo, bhi] = interval_mass_bounds(nn, rat(1, 2), rat(3, 4), 14);
  CHECK(blo <= pow2(-10));
  CHECK(bhi >= 2 - pow2(-10));
}
