#include <doctest.h>

#include "skeinforge/library.hpp"
#include "skeinforge/lie.hpp"

using namespace skf;

namespace {

SkeinElement curve_plus2(SkeinContext& ctx, const std::string& w) {
  return SkeinElement::from_multicurve(Multicurve::single(ctx.S, ctx.S->word_from_string(w)),
                                       ctx.hprec) +
         SkeinElement::unit(ctx.S, ctx.hprec).scale(2);
}

}  // namespace

TEST_CASE("L series structure") {
  auto S = lib_S11();
  TruncationPolicy pol;
  ProductCache cache;
  SkeinContext ctx{S, pol.work_prec(), &cache};
  Filtration fil(ctx);
  OrientedCurve x{S, S->word_from_string("a")};
  SkeinElement L = L_of_curve(ctx, x.as_multicurve(), pol);

  // eps(L) = 0 and the leading term is -1/2 (c+2): the corrected series
  // gains two filtration levels
  CHECK(epsilon(L) == 0);
  SkeinElement corrected = L + curve_plus2(ctx, "a").scale(Rat(1, 2));
  CHECK(fil.degree_lower_bound(corrected, 4) >= 3);
  CHECK(fil.degree_lower_bound(L, 4) == 2);

  // rho class of L(c) is -1/4 [c].[c]
  SymHH pr = fil.proj_F2_mod_F3(L);
  SymHH want(S->num_bands());
  want.add(0, 0, Rat(-1, 4));
  CHECK(pr == want);
}

TEST_CASE("L at the trivial-loop value vanishes identically") {
  HSeries v = L_series_at_trivial_value(10);
  CHECK(v.prec() >= 10);
  CHECK(v.known_zero());
}

TEST_CASE("dynkin expansion low-order goldens") {
  auto lv1 = dynkin_level(1);
  CHECK(lv1.at("a") == 1);
  CHECK(lv1.at("b") == 1);
  auto lv2 = dynkin_level(2);
  CHECK(lv2.at("ab") == Rat(1, 2));
  CHECK(lv2.count("ba") == 0);
  auto lv3 = dynkin_level(3);
  CHECK(lv3.at("aab") == Rat(1, 12));
  CHECK(lv3.at("bba") == Rat(1, 12));
  // weight-4 checks against the standard expansion: -1/24 [y,[x,[x,y]]]
  auto lv4 = dynkin_level(4);
  Rat baab = lv4.count("baab") ? lv4.at("baab") : Rat(0);
  Rat abba = lv4.count("abba") ? lv4.at("abba") : Rat(0);
  CHECK(baab + abba * 0 == Rat(-1, 24));  // nested [b,[a,[a,b]]] coefficient
}

TEST_CASE("bch group laws on commuting and admissible arguments") {
  auto S = lib_S04();
  TruncationPolicy pol;
  ProductCache cache;
  SkeinContext ctx{S, pol.work_prec(), &cache};
  Filtration fil(ctx);
  OrientedCurve p{S, S->word_from_string("p")};
  OrientedCurve pq{S, S->word_from_string("p q")};
  for (auto& c : {"p", "q", "p q", "q r"}) fil.add_generating_curve(S->word_from_string(c));
  SkeinElement a = L_of_curve(ctx, p.as_multicurve(), pol, 8);
  SkeinElement b = L_of_curve(ctx, pq.as_multicurve(), pol, 8);

  // bch(a, 0) = a and bch(a, -a) = 0
  SkeinElement zero = SkeinElement::zero(S, ctx.hprec);
  CHECK(bch2(fil, a, zero, pol).terms == a.terms);
  CHECK(bch2(fil, a, -a, pol).known_zero());

  // disjoint curves: bch(a, b) = a + b exactly
  SkeinElement ab = bch2(fil, a, b, pol);
  CHECK(ab.terms == (a + b).terms);
}

TEST_CASE("exp sigma basics") {
  auto S = lib_S11();
  TruncationPolicy pol;
  ProductCache cache;
  SkeinContext ctx{S, pol.work_prec(), &cache};
  Filtration fil(ctx);
  OrientedCurve x{S, S->word_from_string("a")}, y{S, S->word_from_string("b")};
  SkeinElement z = SkeinElement::from_multicurve(y.as_multicurve(), ctx.hprec);

  // exp(sigma(0)) = id
  CHECK(exp_sigma(fil, SkeinElement::zero(S, ctx.hprec), z, pol).terms == z.terms);

  // disjoint: exp(sigma(L(c)))(z) = z
  SkeinElement Lx = L_of_curve(ctx, x.as_multicurve(), pol);
  SkeinElement zx = SkeinElement::from_multicurve(x.as_multicurve(), ctx.hprec);
  CHECK(exp_sigma(fil, Lx, zx, pol).terms == zx.terms);
}

TEST_CASE("admissibility reports") {
  TruncationPolicy pol;
  ProductCache cache;
  // mu(c1,c2) = 0 pair is admissible
  {
    auto S = lib_S04();
    SkeinContext ctx{S, pol.work_prec(), &cache};
    Filtration fil(ctx);
    SkeinElement a = L_of_curve(ctx, Multicurve::single(S, S->word_from_string("p q")), pol, 8);
    SkeinElement b = L_of_curve(ctx, Multicurve::single(S, S->word_from_string("q r")), pol, 8);
    auto rep = check_bch_admissible(fil, {a, b});
    CHECK(rep.admissible);
  }
  // mu = 1 on the torus: no qualifying pair of subspaces
  {
    auto S = lib_S11();
    SkeinContext ctx{S, pol.work_prec(), &cache};
    Filtration fil(ctx);
    SkeinElement a = L_of_curve(ctx, Multicurve::single(S, S->word_from_string("a")), pol, 8);
    SkeinElement b = L_of_curve(ctx, Multicurve::single(S, S->word_from_string("b")), pol, 8);
    auto rep = check_bch_admissible(fil, {a, b});
    CHECK_FALSE(rep.admissible);
  }
}

TEST_CASE("C of disjoint curves vanishes") {
  auto S = lib_S04();
  TruncationPolicy pol;
  ProductCache cache;
  SkeinContext ctx{S, pol.work_prec(), &cache};
  Filtration fil(ctx);
  OrientedCurve p{S, S->word_from_string("p")}, q{S, S->word_from_string("q")};
  CHECK(C_comm(fil, p, q, pol).known_zero());
  auto S11 = lib_S11();
  SkeinContext c1{S11, pol.work_prec(), &cache};
  Filtration f1(c1);
  OrientedCurve x{S11, S11->word_from_string("a")}, y{S11, S11->word_from_string("b")};
  CHECK_THROWS_AS(C_comm(f1, x, y, pol), NotAdmissible);
}
