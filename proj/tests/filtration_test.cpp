#include <doctest.h>

#include <random>

#include "skeinforge/filtration.hpp"
#include "skeinforge/library.hpp"

using namespace skf;

namespace {

SkeinElement elt(SkeinContext& ctx, const std::string& w) {
  return SkeinElement::from_multicurve(
      Multicurve::single(ctx.S, ctx.S->word_from_string(w)), ctx.hprec);
}

SkeinElement curve_plus2(SkeinContext& ctx, const std::string& w) {
  return elt(ctx, w) + SkeinElement::unit(ctx.S, ctx.hprec).scale(2);
}

SkeinElement h_unit(SkeinContext& ctx) {
  return SkeinElement::unit(ctx.S, ctx.hprec).scale_series(HSeries::monomial(1, 1, ctx.hprec));
}

SkeinElement bclass(SkeinContext& ctx, const std::vector<std::pair<Rat, std::string>>& combo) {
  std::vector<std::pair<Rat, Word>> c;
  for (auto& [r, w] : combo) c.push_back({r, ctx.S->word_from_string(w)});
  return bracket_class(ctx, c);
}

}  // namespace

TEST_CASE("aug expansion round trip") {
  auto S = lib_S11();
  ProductCache cache;
  SkeinContext ctx{S, 8, &cache};
  std::mt19937 rng(5);
  std::uniform_int_distribution<int> coef(-3, 3);
  std::vector<std::string> words = {"a", "b", "a b"};
  for (int trial = 0; trial < 10; ++trial) {
    SkeinElement x = SkeinElement::zero(S, ctx.hprec);
    for (auto& w : words) {
      BasisKey k;
      k.loops[loop_key(*S, S->word_from_string(w))] = 1 + (trial % 2);
      x.add_term(k, HSeries::monomial(trial % 3, coef(rng), ctx.hprec));
    }
    AugExpansion ex = expand_aug_coordinates(x);
    CHECK(ex.reassemble(S, ctx.hprec) == x);
  }
  // spec goldens: [c] -> (c+2) - 2, two-component distribution
  SkeinElement c = elt(ctx, "a");
  AugExpansion e1 = expand_aug_coordinates(c);
  CHECK(e1.terms.size() == 2);  // (a+2) and the -2 unit monomial
}

TEST_CASE("degree lower bounds") {
  auto S = lib_S11();
  ProductCache cache;
  SkeinContext ctx{S, 12, &cache};
  Filtration fil(ctx);
  // h -> 2
  CHECK(fil.degree_lower_bound(h_unit(ctx), 6) == 2);
  // (x+2)(y+2) -> 4
  SkeinElement p = mul(ctx, curve_plus2(ctx, "a"), curve_plus2(ctx, "b"));
  CHECK(fil.degree_lower_bound(p, 6) >= 4);
  // a single (x+2) stays at 2 (nonzero rho class)
  CHECK(fil.degree_lower_bound(curve_plus2(ctx, "a"), 6) == 2);
  // sub-additivity on random pairs
  SkeinElement q = mul(ctx, curve_plus2(ctx, "a b"), h_unit(ctx));
  CHECK(fil.degree_lower_bound(q, 6) >= 4);
}

TEST_CASE("rho projection") {
  auto S = lib_S11();
  ProductCache cache;
  SkeinContext ctx{S, 10, &cache};
  Filtration fil(ctx);
  SymHH pr = fil.proj_F2_mod_F3(curve_plus2(ctx, "a"));
  SymHH want(S->num_bands());
  want.add(0, 0, Rat(1, 2));
  CHECK(pr == want);
  // degree-4 content projects to zero
  SkeinElement p4 = mul(ctx, curve_plus2(ctx, "a"), curve_plus2(ctx, "b"));
  CHECK(fil.proj_F2_mod_F3(p4).is_zero());
  // the h coordinate is carried separately
  SymHH ph = fil.proj_F2_mod_F3(h_unit(ctx));
  CHECK(ph.hcoord == 1);
  CHECK_THROWS_AS(fil.proj_F2_mod_F3(elt(ctx, "a")), DegreeError);
}

TEST_CASE("rho and lambda representatives certify the quadratic identities") {
  auto S = lib_S21();
  ProductCache cache;
  SkeinContext ctx{S, 10, &cache};
  Filtration fil(ctx);
  for (auto* w : {"a1", "b1", "a2", "b2"}) fil.add_generating_curve(S->word_from_string(w));

  // (calc 5): <(a-1)(a-1)> = 2<a>
  SkeinElement lhs5 = bclass(ctx, {{1, "a1 a1"}, {-2, "a1"}, {1, ""}}) -
                      bclass(ctx, {{2, "a1"}});
  Certificate c5 = fil.membership_certificate(lhs5, 2);
  CHECK(c5.found);

  // (calc 3): <(a-1)(b-1)(b-1)> = 0
  SkeinElement lhs3 = bclass(ctx, {{1, "a1 b1 b1"}, {-2, "a1 b1"}, {1, "a1"},
                                   {-1, "b1 b1"}, {2, "b1"}, {-1, ""}});
  CHECK(fil.membership_certificate(lhs3, 2).found);

  // rho basis identity: <(a-1)(a-1)> - 2<a> in (ker eps)^2 via rho_eval
  SymHH s(S->num_bands());
  s.add(0, 0, 1);
  SkeinElement rho_aa = fil.rho_eval(s);
  SkeinElement diff = rho_aa - bclass(ctx, {{2, "a1"}});
  CHECK(fil.membership_certificate(diff, 2).found);
}

TEST_CASE("lambda calculus identities") {
  auto S = lib_S21();
  ProductCache cache;
  SkeinContext ctx{S, 10, &cache};
  Filtration fil(ctx);
  for (auto* w : {"a1", "b1", "a2", "b2"}) fil.add_generating_curve(S->word_from_string(w));

  // (calc 1): lambda is antisymmetric in the first slots
  Wedge3 w1(S->num_bands()), w2(S->num_bands());
  w1.add(0, 1, 2, 1);  // [a1]^[b1]^[a2]
  w2.add(1, 0, 2, 1);
  SkeinElement sum = fil.lambda_eval(w1) + fil.lambda_eval(w2);
  CHECK(fil.membership_certificate(sum, 2).found);
  CHECK(fil.lambda_eval(Wedge3(S->num_bands())).known_zero());

  // lambda is injective on the wedge basis: tau_extract returns each basis
  // vector from its own image
  for (auto& e : fil.wedge_basis()) {
    Wedge3 w(S->num_bands());
    w.add(e[0], e[1], e[2], 1);
    SkeinElement img = fil.lambda_eval(w);
    Wedge3 back = fil.tau_extract(img);
    CHECK(back == w);
  }
}

TEST_CASE("membership certificates: positives and inconclusives") {
  auto S = lib_S11();
  ProductCache cache;
  SkeinContext ctx{S, 10, &cache};
  Filtration fil(ctx);
  // (A - A^-1)^2 = u^2 as a unit-key series
  SkeinElement u2 = SkeinElement::unit(S, ctx.hprec)
                        .scale_series(to_hseries(LaurentPoly::u() * LaurentPoly::u(), ctx.hprec));
  Certificate c = fil.membership_certificate(u2, 2);
  CHECK(c.found);
  // a generic degree-2 element is not in (ker eps)^2: inconclusive expected
  Certificate bad = fil.membership_certificate(
      SkeinElement::from_multicurve(Multicurve::single(S, S->word_from_string("a")), ctx.hprec) +
          SkeinElement::unit(S, ctx.hprec).scale(2),
      2);
  CHECK_FALSE(bad.found);
}

TEST_CASE("tau extract preconditions") {
  auto S = lib_S21();
  ProductCache cache;
  SkeinContext ctx{S, 10, &cache};
  Filtration fil(ctx);
  SkeinElement x = SkeinElement::from_multicurve(
                       Multicurve::single(S, S->word_from_string("a1")), ctx.hprec) +
                   SkeinElement::unit(S, ctx.hprec).scale(2);
  CHECK_THROWS_AS(fil.tau_extract(x), NotInF3);
  // degree-4 content extracts to zero
  SkeinElement p = mul(ctx, x, x);
  CHECK(fil.tau_extract(p).is_zero());
}
