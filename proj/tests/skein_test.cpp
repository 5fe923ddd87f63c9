#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "skeinforge/library.hpp"
#include "skeinforge/skein.hpp"

using namespace skf;

namespace {

SkeinElement elt(SkeinContext& ctx, const std::string& w) {
  return SkeinElement::from_multicurve(
      Multicurve::single(ctx.S, ctx.S->word_from_string(w)), ctx.hprec);
}

BasisKey key1(SurfacePtr S, const std::string& w) {
  BasisKey k;
  k.loops[loop_key(*S, S->word_from_string(w))] = 1;
  return k;
}

}  // namespace

TEST_CASE("resolution goldens on the one-holed torus") {
  auto S = lib_S11();
  ProductCache cache;
  SkeinContext ctx{S, 8, &cache};

  // empty diagram
  Diagram empty = draw_strands(S, {}, DepthPolicy::Canonical);
  ExactElement u = resolve_diagram(empty);
  CHECK(u == ExactElement::unit(S));

  // single contractible loop: an unreduced pass resolves to the loop value
  // once every crossing is smoothed; the crossingless core stays itself
  ExactElement core = resolve_diagram(draw_key(S, key1(S, "a")));
  CHECK(core == ExactElement::basis(S, 0, key1(S, "a")));

  // x stacked over y: one crossing
  ExactElement xy = ctx.mul_basis(key1(S, "a"), key1(S, "b"), 0);
  ExactElement want = ExactElement::zero(S, 0);
  want.add_term(key1(S, "a b"), LaurentPoly::monomial(1, 1));
  want.add_term(key1(S, "a b'"), LaurentPoly::monomial(-1, 1));
  CHECK(xy == want);
}

TEST_CASE("unit laws and epsilon") {
  auto S = lib_S11();
  ProductCache cache;
  SkeinContext ctx{S, 8, &cache};
  SkeinElement one = SkeinElement::unit(S, ctx.hprec);
  SkeinElement z = elt(ctx, "a b");
  CHECK(mul(ctx, one, z) == z);
  CHECK(mul(ctx, z, one) == z);

  CHECK(epsilon(z) == -2);
  SkeinElement two = mul(ctx, elt(ctx, "a"), elt(ctx, "b"));
  CHECK(epsilon(two) == 4);
  SkeinElement h = one.scale_series(HSeries::monomial(1, 1, ctx.hprec));
  CHECK(epsilon(h) == 0);
}

TEST_CASE("bracket goldens and degenerate cases") {
  auto S = lib_S11();
  ProductCache cache;
  SkeinContext ctx{S, 8, &cache};
  SkeinElement x = elt(ctx, "a"), y = elt(ctx, "b");

  SkeinElement br = bracket(ctx, x, y);
  SkeinElement want = elt(ctx, "a b'") - elt(ctx, "a b");
  CHECK(br == want);

  CHECK(bracket(ctx, x, x).known_zero());
  SkeinElement sigma_unit = sigma_action(ctx, SkeinElement::unit(S, ctx.hprec), y);
  CHECK(sigma_unit.known_zero());

  auto S04 = lib_S04();
  SkeinContext c4{S04, 8, &cache};
  CHECK(bracket(c4, elt(c4, "p"), elt(c4, "q")).known_zero());  // disjoint curves commute
}

TEST_CASE("product algebra properties on randomized constructive curves") {
  auto S = lib_S11();
  ProductCache cache;
  SkeinContext ctx{S, 8, &cache};
  std::vector<std::string> words = {"a", "b", "a b", "a b'", "a a b"};
  std::mt19937 rng(99);
  std::uniform_int_distribution<size_t> pick(0, words.size() - 1);
  for (int trial = 0; trial < 12; ++trial) {
    SkeinElement a = elt(ctx, words[pick(rng)]);
    SkeinElement b = elt(ctx, words[pick(rng)]);
    SkeinElement c = elt(ctx, words[pick(rng)]);
    CHECK(mul(ctx, mul(ctx, a, b), c) == mul(ctx, a, mul(ctx, b, c)));
    // commutative mod h
    SkeinElement comm = mul(ctx, a, b) - mul(ctx, b, a);
    for (auto& [k, coeff] : comm.terms) CHECK(coeff.valuation() >= 1);
    CHECK(epsilon(mul(ctx, a, b)) == epsilon(a) * epsilon(b));
  }
}

TEST_CASE("leibniz rule for the sigma action") {
  auto S = lib_S11();
  ProductCache cache;
  SkeinContext ctx{S, 8, &cache};
  SkeinElement x = elt(ctx, "a"), z = elt(ctx, "b"), w = elt(ctx, "a b");
  SkeinElement lhs = sigma_action(ctx, x, mul(ctx, z, w));
  SkeinElement rhs = mul(ctx, sigma_action(ctx, x, z), w) + mul(ctx, z, sigma_action(ctx, x, w));
  CHECK(lhs == rhs);
}

TEST_CASE("diagram independence of the product") {
  auto S = lib_S11();
  ProductCache cache;
  SkeinContext ctx{S, 8, &cache};
  // resolve the same stacked pair drawn by the canonical and the perturbed
  // routing rules; the resolved element must agree exactly
  BasisKey ka = key1(S, "a b"), kb = key1(S, "a b'");
  Diagram top_c = draw_key(S, ka, DepthPolicy::Canonical);
  Diagram top_v = draw_key(S, ka, DepthPolicy::CanonicalVariant);
  Diagram bot_c = draw_key(S, kb, DepthPolicy::Canonical);
  Diagram bot_v = draw_key(S, kb, DepthPolicy::CanonicalVariant);
  ExactElement r1 = resolve_diagram(stack(top_c, bot_c));
  ExactElement r2 = resolve_diagram(stack(top_v, bot_v));
  ExactElement r3 = resolve_diagram(stack(top_c, bot_v));
  CHECK(r1 == r2);
  CHECK(r1 == r3);
}

TEST_CASE("disk evaluation") {
  auto S = lib_S11();
  ProductCache cache;
  SkeinContext ctx{S, 8, &cache};
  CHECK(evaluate_to_disk(ctx, SkeinElement::unit(S, ctx.hprec)).value ==
        HSeries::one(ctx.hprec));
  // a single zero-writhe curve flattens to the loop value
  DiskEval ex = evaluate_to_disk(ctx, elt(ctx, "a"));
  CHECK(ex.value == to_hseries(LaurentPoly::loop_value(), ctx.hprec));
  // e is an algebra map
  std::vector<std::string> words = {"a", "b", "a b", "a b'"};
  for (auto& w1 : words)
    for (auto& w2 : words) {
      SkeinElement a = elt(ctx, w1), b = elt(ctx, w2);
      CHECK(evaluate_to_disk(ctx, mul(ctx, a, b)).value ==
            evaluate_to_disk(ctx, a).value * evaluate_to_disk(ctx, b).value);
    }
  // e kills brackets exactly
  DiskEval br = evaluate_to_disk(ctx, bracket(ctx, elt(ctx, "a"), elt(ctx, "b")));
  CHECK(br.value.known_zero());
}

TEST_CASE("bracket classes") {
  auto S = lib_S11();
  ProductCache cache;
  SkeinContext ctx{S, 10, &cache};
  // <1> = (-A^2-A^-2) + 2 = -(A-A^-1)^2
  SkeinElement one = bracket_class_word(ctx, {});
  LaurentPoly m = LaurentPoly::a_minus_ainv();
  HSeries want = to_hseries(m * m, ctx.hprec) * Rat(-1);
  REQUIRE(one.terms.size() == 1);
  CHECK(one.terms.begin()->second == want);
  CHECK(epsilon(one) == 0);

  // representatives are elements of ker eps
  for (auto* w : {"a", "a b", "a b a' b'", "a a b"})
    CHECK(epsilon(bracket_class_word(ctx, S->word_from_string(w))) == 0);
}

TEST_CASE("module elements with arcs") {
  auto S2 = with_marked(lib_S11(), 2);
  ProductCache cache;
  SkeinContext ctx{S2, 8, &cache};
  BasisKey arc;
  arc.arcs.push_back({0, 1, ""});
  SkeinElement z = SkeinElement::zero(S2, ctx.hprec, 2);
  z.terms[arc] = HSeries::one(ctx.hprec);
  SkeinElement x = SkeinElement::zero(S2, ctx.hprec);
  x.terms[BasisKey{{ {loop_key(*S2, S2->word_from_string("a")), 1} }, {}}] =
      HSeries::one(ctx.hprec);
  // products in both module directions resolve
  SkeinElement xz = mul(ctx, x, z);
  SkeinElement zx = mul(ctx, z, x);
  CHECK(xz.marked == 2);
  CHECK(zx.marked == 2);
  // the plain arc is disjoint from the a-core, so sigma kills it
  CHECK(sigma_action(ctx, x, z).known_zero());
  CHECK_THROWS_AS(epsilon(xz), SurfaceMismatch);
}

TEST_CASE("product cache round trips") {
  auto S = lib_S11();
  std::string dir = "/tmp/skf-test-cache";
  std::filesystem::remove_all(dir);
  ExactElement stored = ExactElement::zero(S, 0);
  {
    ProductCache cache(dir);
    SkeinContext ctx{S, 8, &cache};
    stored = ctx.mul_basis(key1(S, "a"), key1(S, "b"), 0);
  }
  {
    ProductCache cache(dir);
    SkeinContext ctx{S, 8, &cache};
    ExactElement loaded = ctx.mul_basis(key1(S, "a"), key1(S, "b"), 0);
    CHECK(loaded == stored);
    CHECK(cache.disk_hits > 0);
  }
  // corrupt a record: recomputed transparently
  for (auto& e : std::filesystem::directory_iterator(dir)) {
    std::ofstream f(e.path());
    f << "garbage\n{broken";
  }
  {
    ProductCache cache(dir);
    SkeinContext ctx{S, 8, &cache};
    ExactElement again = ctx.mul_basis(key1(S, "a"), key1(S, "b"), 0);
    CHECK(again == stored);
  }
  std::filesystem::remove_all(dir);
}
