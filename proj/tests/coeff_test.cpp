#include <doctest.h>

#include <random>

#include "skeinforge/coeff.hpp"

using namespace skf;

namespace {

// independent oracle: compose cosh(sqrt(q)) for a candidate series q(t) and
// compare with 1 + t, order by order
bool cosh_sqrt_matches(const std::vector<Rat>& g, int M) {
  std::vector<Rat> q(M + 1, Rat(0));
  for (int i = 1; i <= M; ++i) q[i] = g[i - 1];
  std::vector<Rat> total(M + 1, Rat(0)), qp(M + 1, Rat(0));
  total[0] = 1;
  qp[0] = 1;
  Rat fact = 1;
  for (int m = 1; m <= M; ++m) {
    std::vector<Rat> nq(M + 1, Rat(0));
    for (int i = 0; i <= M; ++i)
      for (int j = 0; i + j <= M; ++j) nq[i + j] += qp[i] * q[j];
    qp = nq;
    fact *= Rat(2 * m - 1) * Rat(2 * m);
    for (int i = 0; i <= M; ++i) total[i] += qp[i] / fact;
  }
  if (total[0] != 1) return false;
  if (M >= 1 && total[1] != 1) return false;
  for (int i = 2; i <= M; ++i)
    if (total[i] != 0) return false;
  return true;
}

LaurentPoly random_poly(std::mt19937& rng) {
  std::uniform_int_distribution<int> exp(-4, 4), coef(-5, 5), terms(1, 5);
  LaurentPoly p;
  int n = terms(rng);
  for (int i = 0; i < n; ++i) p = p + LaurentPoly::monomial(exp(rng), coef(rng));
  return p;
}

}  // namespace

TEST_CASE("augmentation of coefficients is evaluation at A = -1") {
  CHECK(eval_epsilon_base(LaurentPoly::monomial(1, 1) + LaurentPoly::one()) == 0);  // A+1
  CHECK(eval_epsilon_base(LaurentPoly::one()) == 1);
  CHECK(eval_epsilon_base(LaurentPoly::loop_value()) == -2);  // -A^2-A^-2
}

TEST_CASE("h-series expansions of A and A^-1") {
  HSeries a = to_hseries(LaurentPoly::var(), 3);
  CHECK(a.coeff(0) == -1);
  CHECK(a.coeff(1) == 1);
  CHECK(a.coeff(2) == 0);
  // geometric series of 1/(h-1)
  HSeries ai = to_hseries(LaurentPoly::monomial(-1, 1), 3);
  CHECK(ai.coeff(0) == -1);
  CHECK(ai.coeff(1) == -1);
  CHECK(ai.coeff(2) == -1);
  // constant term of the loop value matches the augmentation
  HSeries lv = to_hseries(LaurentPoly::loop_value(), 2);
  CHECK(lv.coeff(0) == -2);
  CHECK(lv.coeff(1) == 0);
}

TEST_CASE("structural series") {
  StructuralSeries st = structural_series(4);
  CHECK(st.u.coeff(0) == 0);
  CHECK(st.u.coeff(1) == -2);
  CHECK(st.u.coeff(2) == -1);
  CHECK(st.u.coeff(3) == -1);
  CHECK(st.log_neg_a.coeff(1) == -1);
  CHECK(st.log_neg_a.coeff(2) == Rat(-1, 2));
  CHECK(st.log_neg_a.coeff(3) == Rat(-1, 3));
  CHECK(st.u.valuation() == 1);
  CHECK(st.log_neg_a.valuation() == 1);
  // the ratio u/(4 log(-A)) opens with 1/2
  HSeries ratio = div_by_valuation(st.u, st.log_neg_a * Rat(4));
  CHECK(ratio.coeff(0) == Rat(1, 2));
}

TEST_CASE("division by valuation") {
  StructuralSeries st = structural_series(4);
  HSeries one = HSeries::one(4);
  CHECK(div_by_valuation(st.u * one, st.u) == one.truncate(3));
  HSeries h = HSeries::monomial(1, 1, 4);
  HSeries q = div_by_valuation(h, st.u);
  CHECK(q.prec() == 3);
  CHECK(q.coeff(0) == Rat(-1, 2));
  CHECK_THROWS_AS(div_by_valuation(one, st.u), ValuationError);
}

TEST_CASE("arccosh squared series against the inversion oracle") {
  auto g = arccosh_sq_series(8);
  CHECK(g[0] == 2);           // g_1
  CHECK(g[1] == Rat(-1, 3));  // g_2
  for (int M = 1; M <= 8; ++M) {
    std::vector<Rat> prefix(g.begin(), g.begin() + M);
    CHECK(cosh_sqrt_matches(prefix, M));
  }
}

TEST_CASE("ring axioms on randomized inputs") {
  std::mt19937 rng(20260808);
  for (int trial = 0; trial < 40; ++trial) {
    LaurentPoly a = random_poly(rng), b = random_poly(rng), c = random_poly(rng);
    CHECK((a * b) * c == a * (b * c));
    CHECK(a * (b + c) == a * b + a * c);
    CHECK(a + b == b + a);
    // augmentation is a ring map
    CHECK(eval_epsilon_base(a * b) == eval_epsilon_base(a) * eval_epsilon_base(b));
    // h-expansion respects products
    CHECK(to_hseries(a * b, 6) == to_hseries(a, 6) * to_hseries(b, 6));
    // constant coefficient of the expansion equals the augmentation
    CHECK(to_hseries(a, 1).coeff(0) == eval_epsilon_base(a));
  }
}

TEST_CASE("series division round trip") {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> coef(-4, 4);
  for (int trial = 0; trial < 25; ++trial) {
    std::vector<Rat> ac(8), bc(8, Rat(0));
    for (auto& x : ac) x = coef(rng);
    bc[1] = coef(rng) * 2 + 1;  // valuation exactly 1
    for (int i = 2; i < 8; ++i) bc[i] = coef(rng);
    HSeries a = HSeries::from_coeffs(ac), b = HSeries::from_coeffs(bc);
    HSeries q = div_by_valuation(a * b, b);
    for (int i = 0; i < q.prec(); ++i) CHECK(q.coeff(i) == a.coeff(i));
  }
}

TEST_CASE("laurent exact division") {
  LaurentPoly u = LaurentPoly::u();
  LaurentPoly p = u * LaurentPoly::loop_value() * Rat(3, 7);
  CHECK(p.div_exact(u) == LaurentPoly::loop_value() * Rat(3, 7));
  CHECK_THROWS_AS(LaurentPoly::one().div_exact(u), ValuationError);
}

TEST_CASE("rational string round trip") {
  CHECK(rat_to_string(Rat(-3, 7)) == "-3/7");
  CHECK(rat_from_string("-3/7") == Rat(-3, 7));
  CHECK(rat_to_string(Rat(5)) == "5");
}
