// Development scratch pad: convergence and certificate experiments.
#include <iostream>

#include "skeinforge/filtration.hpp"
#include "skeinforge/library.hpp"
#include "skeinforge/lie.hpp"
#include "skeinforge/skein.hpp"

using namespace skf;

int main(int argc, char** argv) {
  std::string which = argc > 1 ? argv[1] : "twist";
  auto S11 = lib_S11();
  TruncationPolicy pol;
  ProductCache cache;
  SkeinContext ctx{S11, pol.work_prec(), &cache};
  Filtration fil(ctx);

  if (which == "twist") {
    OrientedCurve cx{S11, S11->word_from_string("a")};
    OrientedCurve cy{S11, S11->word_from_string("b")};
    SkeinElement L = L_of_curve(ctx, cx.as_multicurve(), pol, 10);
    std::cout << "deg L = " << fil.degree_lower_bound(L, 3) << "\n";
    SkeinElement y = SkeinElement::from_multicurve(cy.as_multicurve(), ctx.hprec);
    OrientedCurve t = dehn_twist(cx, cy, 1);
    SkeinElement R = SkeinElement::from_multicurve(t.as_multicurve(), ctx.hprec);

    fil.add_generating_curve(cx.word);
    fil.add_generating_curve(cy.word);
    fil.add_generating_curve(t.word);

    auto res = exp_sigma_full(fil, L, y, pol, 6, true);
    std::cout << "terms used: " << res.terms_used << "\nterm degrees:";
    for (int d : res.term_degrees) std::cout << " " << (d == ERR_NONE ? -1 : d);
    std::cout << "\n";
    for (size_t i = 0; i < res.partials.size(); ++i) {
      SkeinElement diff = res.partials[i] - R;
      int d = fil.degree_lower_bound(diff, 6);
      std::cout << "partial " << i << ": deg(S_i - R) = " << d << "\n";
    }
  } else if (which == "calc") {
    // (calc 5): <(a-1)(a-1)> = 2<a>  i.e. <aa> - 2<a> + <1> - 2<a> in (ker eps)^2
    Word a = S11->word_from_string("a"), b = S11->word_from_string("b");
    Word c = S11->word_from_string("a b");  // generic third word
    auto k0 = bracket_class(ctx, {{1, concat(a, a)}, {-2, a}, {1, {}}});
    SkeinElement lhs5 = k0 - bracket_class(ctx, {{2, a}});
    fil.add_generating_curve(a);
    fil.add_generating_curve(b);
    Certificate c5 = fil.membership_certificate(lhs5, 2);
    std::cout << "calc5 certificate: " << (c5.found ? "FOUND" : c5.note) << "\n";

    // (calc 1): <(a-1)(b-1)(c-1)> + <(b-1)(a-1)(c-1)> in (ker eps)^2
    auto term = [&](const Word& x, const Word& y, const Word& z) {
      std::vector<std::pair<Rat, Word>> combo;
      for (int sa = 0; sa < 2; ++sa)
        for (int sb = 0; sb < 2; ++sb)
          for (int sc = 0; sc < 2; ++sc) {
            Word w;
            if (!sa) w = concat(w, x);
            if (!sb) w = concat(w, y);
            if (!sc) w = concat(w, z);
            combo.push_back({((sa + sb + sc) % 2 == 0) ? 1 : -1, w});
          }
      return bracket_class(ctx, combo);
    };
    SkeinElement lhs1 = term(a, b, c) + term(b, a, c);
    fil.add_generating_curve(c);
    Certificate c1 = fil.membership_certificate(lhs1, 2);
    std::cout << "calc1 certificate: " << (c1.found ? "FOUND" : c1.note) << "\n";

    // <1> = -(A-A^-1)^2 certified
    SkeinElement one = bracket_class(ctx, {{1, {}}});
    Certificate cu = fil.membership_certificate(one, 2);
    std::cout << "<1> certificate: " << (cu.found ? "FOUND" : cu.note) << "\n";
  } else if (which == "bchlantern") {
    auto S04 = lib_S04();
    SkeinContext c4{S04, pol.work_prec(), &cache};
    Filtration f4(c4);
    auto Lc = [&](const std::string& s) {
      OrientedCurve c{S04, S04->word_from_string(s)};
      f4.add_generating_curve(c.word);
      return L_of_curve(c4, c.as_multicurve(), pol, 8);
    };
    std::vector<SkeinElement> args = {Lc("p q r"),      -Lc("p q"), -Lc("q r"),
                                      -Lc("q r q' p"), Lc("p"),    Lc("q"),
                                      Lc("r")};
    auto adm = check_bch_admissible(f4, {args.begin(), args.end()});
    std::cout << "admissible: " << adm.admissible << " (" << adm.witness << ")" << std::endl;
    try {
      SkeinElement V = bch_list(f4, args, pol, 8);
      std::cout << "bch computed, terms " << V.terms.size() << " err F^" << V.err_order
                << std::endl;
      auto de = evaluate_to_disk(c4, V);
      std::cout << "disk eval: " << de.value.to_string() << " reliable through h^"
                << de.reliable_through << std::endl;
      int d = f4.degree_lower_bound(V, 8);
      std::cout << "deg(V) = " << d << std::endl;
    } catch (const StalledConvergence& e) {
      std::cout << e.what() << std::endl;
    }
  } else if (which == "lantern") {
    auto S04 = lib_S04();
    SkeinContext c4{S04, pol.work_prec(), &cache};
    Filtration f4(c4);
    auto curve = [&](const std::string& s) {
      return OrientedCurve{S04, S04->word_from_string(s)};
    };
    // lantern curves: c1=(p), c2=(q), c3=(r), c12=(p q), c23=(q r),
    // c13 = (p q r q') ?, c123 = (p q r)
    std::vector<std::string> names = {"p", "q", "r", "p q", "q r", "q r q' p", "p q r"};
    for (auto& n : names) {
      try {
        OrientedCurve c = curve(n);
        c.as_multicurve().drawing();
        std::cout << "curve (" << n << ") embeds\n";
      } catch (const std::exception& e) {
        std::cout << "curve (" << n << ") FAILS: " << e.what() << "\n";
      }
    }
    // check the composition acts as identity
    auto tw = [&](const std::string& n, int k) { return std::pair(curve(n), k); };
    std::vector<std::pair<OrientedCurve, int>> comp = {
        tw("p q r", 1), tw("p q", -1), tw("q r", -1), tw("q r q' p", -1),
        tw("p", 1),     tw("q", 1),    tw("r", 1)};
    for (auto& probe : {"p q", "q r", "p q r", "p r'"}) {
      Word w = S04->word_from_string(probe);
      Word img = w;
      for (int i = static_cast<int>(comp.size()) - 1; i >= 0; --i)
        img = dehn_twist_word(comp[i].first, img, true, comp[i].second);
      std::cout << "lantern comp on (" << probe << ") -> ("
                << S04->word_to_string(cyclic_reduce(img)) << ")  [want same class]\n";
      std::cout << "   same class: "
                << (loop_key(*S04, img) == loop_key(*S04, w) ? "YES" : "no") << "\n";
    }
  }
  return 0;
}
