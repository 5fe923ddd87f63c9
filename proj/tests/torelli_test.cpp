#include <doctest.h>

#include "skeinforge/library.hpp"
#include "skeinforge/torelli.hpp"

using namespace skf;

namespace {

struct Fixture {
  SurfacePtr S = lib_S21();
  TruncationPolicy pol;
  ProductCache cache;
  SkeinContext ctx{S, pol.work_prec(), &cache};
  Filtration fil{ctx};
  OrientedCurve b2{S, S->word_from_string("b2")};
  OrientedCurve bp2{S, S->word_from_string("b2 a1 b1 a1' b1'")};
  OrientedCurve sep1{S, S->word_from_string("a1 b1 a1' b1'")};
};

}  // namespace

TEST_CASE("generator validation") {
  Fixture fx;
  // a valid separating generator
  TorelliGen s = make_generator(fx.fil, fx.pol, GenKind::Sep, fx.sep1, {}, "sep1");
  CHECK(s.zeta_value.err_order != ERR_NONE);
  // non-separating curve rejected for sep
  CHECK_THROWS_AS(make_generator(fx.fil, fx.pol, GenKind::Sep, fx.b2), InvalidPair);
  // a valid bounding pair
  CHECK_NOTHROW(make_generator(fx.fil, fx.pol, GenKind::Bp, fx.b2, fx.bp2, "bp"));
  // non-homologous pair rejected
  OrientedCurve a1{fx.S, fx.S->word_from_string("a1")};
  CHECK_THROWS_AS(make_generator(fx.fil, fx.pol, GenKind::Bp, fx.b2, a1), InvalidPair);
  // comm with nonzero algebraic intersection rejected
  OrientedCurve b1{fx.S, fx.S->word_from_string("b1")};
  CHECK_THROWS_AS(make_generator(fx.fil, fx.pol, GenKind::Comm, a1, b1), InvalidPair);
}

TEST_CASE("theta action") {
  Fixture fx;
  TorelliGen s = make_generator(fx.fil, fx.pol, GenKind::Sep, fx.sep1, {}, "sep1");
  TorelliWord w{{{s, 1}}};
  // disjoint targets are fixed
  Multicurve mb2 = Multicurve::single(fx.S, fx.S->word_from_string("b2"));
  CHECK(theta_action(w, mb2) == mb2);
  // bp generators preserve homology classes of every target
  TorelliGen bp = make_generator(fx.fil, fx.pol, GenKind::Bp, fx.b2, fx.bp2, "bp");
  TorelliWord wb{{{bp, 1}}};
  for (auto* t : {"a1", "b1", "a2", "b2", "a1 b1"}) {
    Word tw = fx.S->word_from_string(t);
    Multicurve img = theta_action(wb, Multicurve::single(fx.S, tw));
    Word iw = fx.S->word_from_string(img.loops.begin()->first);
    HClass h1 = homology_class(*fx.S, tw), h2 = homology_class(*fx.S, iw);
    CHECK((h1 == h2 || h1 == h2 * Rat(-1)));
  }
  // theta of a word followed by its inverse is the identity on targets
  TorelliWord winv{{{bp, 1}, {bp, -1}}};
  Multicurve msep = Multicurve::single(fx.S, fx.sep1.word);
  CHECK(theta_action(winv, msep) == msep);
}

TEST_CASE("zeta of a cancelling word vanishes") {
  Fixture fx;
  TorelliGen bp = make_generator(fx.fil, fx.pol, GenKind::Bp, fx.b2, fx.bp2, "bp");
  TorelliWord w{{{bp, 1}, {bp, -1}}};
  SkeinElement z = zeta(fx.fil, w, fx.pol);
  CHECK(z.known_zero());
  // single bp letter reproduces the cached zeta value
  TorelliWord w1{{{bp, 1}}};
  CHECK(zeta(fx.fil, w1, fx.pol).terms == bp.zeta_value.terms);
}

TEST_CASE("johnson golden bounding pair") {
  Fixture fx;
  fx.fil.add_generating_curve(fx.b2.word);
  fx.fil.add_generating_curve(fx.bp2.word);
  TorelliGen bp = make_generator(fx.fil, fx.pol, GenKind::Bp, fx.b2, fx.bp2, "bp");
  Wedge3 skein = johnson_tau_skein(fx.fil, bp, fx.pol);
  Wedge3 classical = johnson_tau_classical(
      fx.fil, fx.S->word_from_string("b2"),
      {{fx.S->word_from_string("a1"), fx.S->word_from_string("b1")}});
  CHECK(!skein.is_zero());
  CHECK(skein == classical);
  // a separating generator maps to zero
  TorelliGen s = make_generator(fx.fil, fx.pol, GenKind::Sep, fx.sep1, {}, "sep1");
  CHECK(johnson_tau_skein(fx.fil, s, fx.pol).is_zero());
}

TEST_CASE("exp sigma of zeta matches the geometric action") {
  Fixture fx;
  TorelliGen s = make_generator(fx.fil, fx.pol, GenKind::Sep, fx.sep1, {}, "sep1");
  TorelliWord w{{{s, 1}}};
  // target crossing the separating curve
  OrientedCurve b1{fx.S, fx.S->word_from_string("b1")};
  fx.fil.add_generating_curve(b1.word);
  fx.fil.add_generating_curve(fx.sep1.word);
  SkeinElement z = SkeinElement::from_multicurve(b1.as_multicurve(), fx.ctx.hprec);
  SkeinElement lhs = exp_sigma(fx.fil, zeta(fx.fil, w, fx.pol), z, fx.pol);
  Multicurve img = theta_action(w, b1.as_multicurve());
  SkeinElement rhs = SkeinElement::from_multicurve(img, fx.ctx.hprec);
  int d = fx.fil.degree_lower_bound(lhs - rhs, fx.pol.filt_cap);
  CHECK(d >= fx.pol.filt_cap);
}

TEST_CASE("unknown relations are reported per surface") {
  Fixture fx;
  CHECK_THROWS_AS(verify_relation(fx.fil, "lantern", fx.pol), UnknownRelation);
  CHECK_THROWS_AS(verify_relation(fx.fil, "nosuch", fx.pol), UnknownRelation);
}

TEST_CASE("f1 is exact") {
  Fixture fx;
  RelationReport rep = verify_relation(fx.fil, "f1", fx.pol);
  CHECK(rep.verdict == "pass");
}
