#include <doctest.h>

#include "cbv/bv_expr.hpp"
#include "cbv/bv_name.hpp"
#include "cbv/errors.hpp"
#include "cbv/pw_affine.hpp"
#include "support/oracles.hpp"

using namespace cbv;
using test_support::brute_force_variation;

TEST_CASE("bv expression parsing") {
  CHECK(denote(parse_bv_expr("linear(1)")).g1() == 1);
  CHECK(denote(parse_bv_expr(" 1/2 * linear(1) ")).value(rat(1, 2)) == rat(1, 4));
  CHECK(denote(parse_bv_expr("step(1/2,1) + step(1/2,1)")).g1() == 2);
  CHECK(denote(parse_bv_expr("-linear(1/3)")).g1() == rat(-1, 3));
  CHECK(denote(parse_bv_expr("-(linear(1) + step(1/2,1))")).g1() == -2);
  CHECK_THROWS_AS(parse_bv_expr("linear(1"), ParseError);
  CHECK_THROWS_AS(parse_bv_expr("step(0,1)"), ParseError);
  CHECK_THROWS_AS(parse_bv_expr("step(1,1)"), ParseError);
  CHECK_THROWS_AS(parse_bv_expr("linear(1) - linear(1)"), ParseError);
  CHECK_THROWS_AS(parse_bv_expr("frob(2)"), ParseError);
  CHECK_THROWS_AS(parse_bv_expr(""), ParseError);
  CHECK_THROWS_AS(parse_bv_expr("linear(1) +"), ParseError);
}

TEST_CASE("denotations are normalized and left-continuous") {
  PwAffine s = denote(parse_bv_expr("step(1/2,1)"));
  CHECK(s.value(Rat(0)) == 0);
  CHECK(s.value(rat(1, 2)) == 0);   // left-continuous at the jump
  CHECK(s.right_limit(rat(1, 2)) == 1);
  CHECK(s.value(rat(3, 4)) == 1);
  CHECK(s.value(Rat(1)) == 1);
  CHECK(!s.continuous_at(rat(1, 2)));
  CHECK(s.continuous_at(rat(1, 3)));
  CHECK(s.jump_points() == std::vector<Rat>{rat(1, 2)});

  // constant-shifted polygon drops to zero under normalization
  PwAffine c = denote(parse_bv_expr("polygon[(0,1),(1,1)]"));
  CHECK(c.g1() == 0);
  CHECK(c.variation() == 0);

  PwAffine tent = denote(parse_bv_expr("polygon[(0,0),(1/2,1),(1,0)]"));
  CHECK(tent.value(rat(1, 4)) == rat(1, 2));
  CHECK(tent.left_limit(rat(1, 2)) == 1);
  CHECK(tent.right_limit(rat(1, 2)) == 1);
}

TEST_CASE("symbolic variation matches the brute-force partition oracle") {
  struct Row {
    const char* expr;
    Rat want;
  };
  const Row rows[] = {
      {"linear(1)", Rat(1)},
      {"step(1/2,1)", Rat(1)},
      {"polygon[(0,0),(1/2,1),(1,0)]", Rat(2)},
      {"linear(1) + -2*step(1/2,1)", Rat(3)},
      {"1/2*polygon[(0,0),(1/2,1),(1,0)] + step(1/4,-1)", Rat(2)},
      {"step(1/3,1) + step(2/3,1)", Rat(2)},
  };
  for (const Row& r : rows) {
    PwAffine g = denote(parse_bv_expr(r.expr));
    CHECK(g.variation() == r.want);
    // oracle from below: refining dyadic partition sums converge to V
    Rat coarse = brute_force_variation(g, 4);
    Rat fine = brute_force_variation(g, 12);
    CHECK(coarse <= fine);
    CHECK(fine <= g.variation());
    CHECK(g.variation() - fine <= rat(1, 256));
  }
}

TEST_CASE("variation function and Jordan parts in closed form") {
  PwAffine tent = denote(parse_bv_expr("polygon[(0,0),(1/2,1),(1,0)]"));
  PwAffine v = tent.total_variation_fn();
  CHECK(v.value(rat(3, 4)) == rat(3, 2));  // == linear(2)
  CHECK(v.value(Rat(1)) == 2);
  CHECK(v.non_decreasing());

  PwAffine mixed = denote(parse_bv_expr("linear(1) + -2*step(1/2,1)"));
  PwAffine mv = mixed.total_variation_fn();
  CHECK(mv.value(rat(1, 2)) == rat(1, 2));
  CHECK(mv.right_limit(rat(1, 2)) == rat(5, 2));
  CHECK(mv.value(rat(3, 4)) == rat(11, 4));
  CHECK(mv.g1() == mixed.variation());

  // g+ = (v+g)/2, g- = (v-g)/2: monotone, and their variations split Var g
  PwAffine gp = scale(rat(1, 2), add(mv, mixed));
  PwAffine gm = scale(rat(1, 2), add(mv, scale(Rat(-1), mixed)));
  CHECK(gp.non_decreasing());
  CHECK(gm.non_decreasing());
  CHECK(gp.variation() + gm.variation() == mixed.variation());
  CHECK(gp.variation() - gm.variation() == mixed.g1());
  CHECK(add(gp, scale(Rat(-1), gm)).value(rat(2, 3)) == mixed.value(rat(2, 3)));
}

TEST_CASE("monotonicity detection") {
  CHECK(denote(parse_bv_expr("linear(1) + step(1/3,2)")).non_decreasing());
  CHECK(denote(parse_bv_expr("linear(0)")).non_decreasing());
  CHECK(!denote(parse_bv_expr("linear(1) + step(1/3,-1/4)")).non_decreasing());
  CHECK(!denote(parse_bv_expr("polygon[(0,0),(1/2,1),(1,0)]")).non_decreasing());
}

namespace {

BVWithVar bv(const char* expr) { return bv_from_expr(parse_bv_expr(expr)); }

std::uint64_t find_index(const BVName& g, const Rat& x) {
  for (std::uint64_t i = 0; i < 5000; ++i) {
    const auto& e = g.point(i).x.exact();
    if (e && *e == x) return i;
  }
  FAIL("point not found in stream prefix");
  return 0;
}

// the same stream with the exact backend stripped, to exercise the
// point-driven variation path
BVName opaque(const BVName& g) {
  return BVName::from_generator([g](std::uint64_t i) { return g.point(i); },
                                g.monotone());
}

}  // namespace

TEST_CASE("exact name streams: normalization, density, jump points skipped") {
  BVWithVar s = bv("step(1/2,1)");
  CHECK(s.name.monotone());
  CHECK(s.name.point(0).x.query(30) == 0);
  CHECK(s.name.point(0).y.query(30) == 0);
  CHECK(s.name.point(1).x.query(30) == 1);
  CHECK(s.name.point(1).y.query(30) == 1);
  bool saw_quarter = false, saw_third = false;
  for (std::uint64_t i = 2; i < 60; ++i) {
    const Rat x = *s.name.point(i).x.exact();
    CHECK(x != rat(1, 2));  // the jump location never shows up
    CHECK(0 < x);
    CHECK(x < 1);
    const Rat y = *s.name.point(i).y.exact();
    CHECK(y == (x < rat(1, 2) ? Rat(0) : Rat(1)));
    saw_quarter |= x == rat(1, 4);
    saw_third |= x == rat(1, 3);
  }
  CHECK(saw_quarter);
  CHECK(saw_third);
}

TEST_CASE("partition sums over name points") {
  BVWithVar lin = bv("linear(1)");
  Partition z = make_partition(lin.name, {0, find_index(lin.name, rat(1, 2)), 1});
  CHECK(partition_sum(lin.name, z, 20) == 1);

  BVWithVar tent = bv("polygon[(0,0),(1/2,1/2),(1,0)]");
  Partition z2 = make_partition(tent.name, {0, find_index(tent.name, rat(1, 2)), 1});
  CHECK(partition_sum(tent.name, z2, 20) == 1);
  Partition z3 = make_partition(tent.name, {0, 1});
  CHECK(partition_sum(tent.name, z3, 20) == 0);  // endpoints alone see nothing

  CHECK_THROWS_AS(make_partition(tent.name, {0, 2, 2}), DomainError);
  CHECK_THROWS_AS(make_partition(tent.name, {2, 1}), DomainError);

  CHECK(partition_mesh_below(tent.name, z2, 0));
  CHECK(!partition_mesh_below(tent.name, z2, 1));  // gaps are exactly 1/2
}

TEST_CASE("variation function squeezes to the closed form") {
  BVWithVar tent = bv("polygon[(0,0),(1/2,1/2),(1,0)]");
  CHECK(tent.var.query(40) == 1);
  BVWithVar v = total_variation_fn(tent);
  CHECK(v.name.monotone());
  CHECK(v.name.point(0).y.query(20) == 0);
  CHECK(v.name.point(1).y.query(20) == 1);
  std::uint64_t i34 = find_index(tent.name, rat(3, 4));
  for (long k : {6, 14, 30})
    CHECK(abs(v.name.point(i34).y.query(k) - rat(3, 4)) <= pow2(-k));

  BVWithVar neg = bv("-linear(1)");
  BVWithVar nv = total_variation_fn(neg);
  std::uint64_t i13 = find_index(neg.name, rat(1, 3));
  CHECK(abs(nv.name.point(i13).y.query(20) - rat(1, 3)) <= pow2(-20));

  // monotone input: /g/ agrees with g at every shared point
  BVWithVar lin = bv("linear(1)");
  BVWithVar lv = total_variation_fn(lin);
  for (std::uint64_t i : {2u, 5u, 9u}) {
    const Rat x = *lin.name.point(i).x.exact();
    CHECK(abs(lv.name.point(i).y.query(24) - x) <= pow2(-24));
  }
}

TEST_CASE("variation squeeze works from points alone") {
  BVWithVar tent = bv("polygon[(0,0),(1/2,1/2),(1,0)]");
  BVWithVar hidden{opaque(tent.name), tent.var};
  BVWithVar v = total_variation_fn(hidden);
  std::uint64_t i34 = find_index(tent.name, rat(3, 4));
  CHECK(abs(v.name.point(i34).y.query(16) - rat(3, 4)) <= pow2(-16));
}

TEST_CASE("jordan decomposition of names") {
  BVWithVar tent = bv("polygon[(0,0),(1/2,1/2),(1,0)]");
  auto [p, m] = jordan_bv(tent);
  CHECK(p.name.monotone());
  CHECK(m.name.monotone());
  CHECK(p.var.query(30) == rat(1, 2));  // (1 + 0)/2
  CHECK(m.var.query(30) == rat(1, 2));
  std::uint64_t i34 = find_index(tent.name, rat(3, 4));
  CHECK(abs(p.name.point(i34).y.query(20) - rat(1, 2)) <= pow2(-20));
  CHECK(abs(m.name.point(i34).y.query(20) - rat(1, 4)) <= pow2(-20));
  REQUIRE(p.name.exact().has_value());
  CHECK(p.name.exact()->value(rat(3, 4)) == rat(1, 2));
  CHECK(m.name.exact()->value(rat(3, 4)) == rat(1, 4));

  BVWithVar mixed = bv("linear(1) + -2*step(1/2,1)");
  auto [mp, mm] = jordan_bv(mixed);
  CHECK(mp.var.query(30) == 1);  // (3 + (-1))/2
  CHECK(mm.var.query(30) == 2);
  std::uint64_t j34 = find_index(mixed.name, rat(3, 4));
  CHECK(abs(mp.name.point(j34).y.query(20) - rat(3, 4)) <= pow2(-20));
  CHECK(abs(mm.name.point(j34).y.query(20) - 2) <= pow2(-20));

  // minimality: Var(g+) + Var(g-) stays within 2^-k+2 of Var(g)
  for (long k : {8, 20}) {
    Rat d = mp.var.query(k) + mm.var.query(k) - mixed.var.query(k);
    CHECK(abs(d) <= pow2(-k + 2));
  }

  // monotone flag is sound on sampled pairs
  for (std::uint64_t a = 2; a < 12; ++a)
    for (std::uint64_t b = a + 1; b < 12; ++b) {
      const Rat xa = *mixed.name.point(a).x.exact();
      const Rat xb = *mixed.name.point(b).x.exact();
      const Rat ya = mp.name.point(a).y.query(20);
      const Rat yb = mp.name.point(b).y.query(20);
      if (xa < xb)
        CHECK(ya <= yb + pow2(-19));
      else
        CHECK(yb <= ya + pow2(-19));
    }
}

TEST_CASE("exact integrals of pw affine functions") {
  CHECK(denote(parse_bv_expr("linear(1)")).integral(Rat(0), Rat(1)) == rat(1, 2));
  CHECK(denote(parse_bv_expr("linear(1)")).integral(rat(1, 4), rat(1, 2)) == rat(3, 32));
  CHECK(denote(parse_bv_expr("step(1/2,1)")).integral(Rat(0), Rat(1)) == rat(1, 2));
  CHECK(denote(parse_bv_expr("step(1/2,1)")).integral(rat(1, 4), rat(3, 4)) == rat(1, 4));
  CHECK(denote(parse_bv_expr("polygon[(0,0),(1/2,1),(1,0)]")).integral(Rat(0), Rat(1)) == rat(1, 2));
  CHECK(denote(parse_bv_expr("linear(1) + -2*step(1/2,1)")).integral(Rat(0), Rat(1)) == rat(-1, 2));
}

TEST_CASE("bounds oracles: exact, variation-function, jordan parts") {
  BVWithVar dirac = bv("step(1/2,1)");
  REQUIRE(dirac.name.bounds());
  BVBounds& db = *dirac.name.bounds();
  CHECK(db.value(rat(1, 2), 0).lo == 0);  // left limit at the jump
  CHECK(db.value(rat(3, 4), 0).lo == 1);
  CHECK(db.varfn(rat(1, 2), 0).hi == 0);
  CHECK(db.varfn(Rat(1), 0).lo == 1);
  // open intervals exclude boundary atoms
  CHECK(db.var_interval_lower(rat(1, 4), rat(3, 4), 5) == 1);
  CHECK(db.var_interval_lower(rat(1, 2), Rat(1), 5) == 0);
  CHECK(db.integral(Rat(0), Rat(1), 0).lo == rat(1, 2));

  // tent through an opaque name that carries only the bounds oracle
  PwAffine tentpw = denote(parse_bv_expr("polygon[(0,0),(1/2,1),(1,0)]"));
  BVWithVar tent = bv("polygon[(0,0),(1/2,1),(1,0)]");
  BVName hidden = opaque(tent.name).with_bounds(exact_bounds(tentpw));
  CHECK(!hidden.exact());

  // variation values flow through the bounds branch at high precision
  BVWithVar hv = total_variation_fn({hidden, tent.var});
  std::uint64_t i34 = find_index(tent.name, rat(3, 4));
  CHECK(abs(hv.name.point(i34).y.query(24) - rat(3, 2)) <= pow2(-24));
  REQUIRE(hv.name.bounds());
  CHECK(hv.name.bounds()->value(rat(1, 4), 0).lo == rat(1, 2));

  auto [hp, hm] = jordan_bv({hidden, tent.var});
  CHECK(abs(hp.name.point(i34).y.query(24) - 1) <= pow2(-24));
  CHECK(abs(hm.name.point(i34).y.query(24) - rat(1, 2)) <= pow2(-24));
  REQUIRE(hp.name.bounds());
  BVBounds& pb = *hp.name.bounds();
  CHECK(pb.value(rat(3, 4), 0).lo == 1);  // g+ flat at 1 past the peak
  CHECK(pb.value(rat(3, 4), 0).hi == 1);
  // interval variation of the monotone part closes in on 1 from below
  Rat w3 = pb.var_interval_lower(Rat(0), Rat(1), 3);
  Rat w6 = pb.var_interval_lower(Rat(0), Rat(1), 6);
  CHECK(w3 >= rat(7, 8));
  CHECK(w3 <= 1);
  CHECK(w6 >= w3);
  CHECK(pb.integral(Rat(0), Rat(1), 0).lo == rat(3, 4));  // 1/4 on the rise, 1/2 flat
}
