#include "skeinforge/lie.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace skf {

std::string TruncationPolicy::str() const {
  std::ostringstream os;
  os << "h_order=" << h_order << " filt_cap=" << filt_cap << " depth=" << depth;
  return os.str();
}

// ------------------------------------------------------------------- L(c)

static void l_series_pieces(int prec, int K, HSeries* pref, std::vector<Rat>* g,
                            HSeries* const_term) {
  StructuralSeries st = structural_series(prec + 2);
  *pref = div_by_valuation(st.u, st.log_neg_a * Rat(4)).truncate(prec);
  *g = arccosh_sq_series(K);
  *const_term = (-(st.u * st.log_neg_a)).truncate(prec);
}

SkeinElement L_of_curve(SkeinContext& ctx, const Multicurve& c, const TruncationPolicy& pol,
                        int filt_cap) {
  if (c.component_count() != 1) throw SkeinError("L(c) needs a single simple closed curve");
  int cap = filt_cap > 0 ? filt_cap : pol.filt_cap + 2;
  int K = std::max(1, (cap + 1) / 2);  // drop t^{K+1} and higher: F^{2K+2} > cap
  int prec = ctx.hprec;
  HSeries pref, cterm;
  std::vector<Rat> g;
  l_series_pieces(prec, K, &pref, &g, &cterm);

  const std::string ckey = c.loops.begin()->first;
  SkeinElement r = SkeinElement::zero(c.S, prec);
  // t^k = (-1/2)^k sum_j C(k,j) 2^{k-j} [c^j]
  for (int k = 1; k <= K; ++k) {
    if (g[k - 1] == 0) continue;
    HSeries base = pref * g[k - 1];
    Rat sgn = 1;
    for (int t = 0; t < k; ++t) sgn *= Rat(-1, 2);
    Rat binom = 1, two = 1;
    for (int t = 0; t < k; ++t) two *= 2;
    for (int j = 0; j <= k; ++j) {
      BasisKey key;
      if (j > 0) key.loops[ckey] = j;
      r.add_term(key, base * (sgn * binom * two));
      binom = binom * (k - j) / (j + 1);
      two /= 2;
    }
  }
  r.add_term(BasisKey::unit(), cterm);
  r.err_order = 2 * (K + 1);
  r.err_disk_val = 2 * (K + 1);  // e(c+2) has h-valuation exactly 2
  return r;
}

HSeries L_series_at_trivial_value(int prec) {
  int K = prec / 2 + 2;
  HSeries pref, cterm;
  std::vector<Rat> g;
  l_series_pieces(prec, K, &pref, &g, &cterm);
  // t0 = -(loop_value + 2)/2 = (A - A^-1)^2 / 2, h-valuation 2
  HSeries t0 = to_hseries(LaurentPoly::loop_value() + LaurentPoly::monomial(0, 2), prec) *
               Rat(-1, 2);
  HSeries acc = HSeries::zero(prec), tp = HSeries::one(prec);
  for (int k = 1; k <= K; ++k) {
    tp = tp * t0;
    acc = acc + tp * g[k - 1];
  }
  return (pref * acc + cterm).truncate(prec);
}

// -------------------------------------------------------------- exp(sigma)

namespace {

// sigma(x)(z) with every intermediate kept in normal form mod F^cap:
// multi-component keys act through the Leibniz rule
//   sigma(f1...fk)(z) = sum_j (f1..f_{j-1}) sigma(f_j)(z) (f_{j+1}..fk),
// so only single-curve products are ever resolved.
SkeinElement sigma_trunc(Filtration& fil, const SkeinElement& x, const SkeinElement& z, int cap,
                         int deg_x, int deg_z) {
  SkeinContext& ctx = fil.ctx();
  SkeinElement zt = fil.truncate_to_cap(z, cap);
  SkeinElement out = SkeinElement::zero(x.S, ctx.hprec, z.marked);
  for (auto& [kx, cx] : x.terms) {
    std::vector<std::string> factors;
    for (auto& [w, m] : kx.loops)
      for (int i = 0; i < m; ++i) factors.push_back(w);
    if (factors.empty()) continue;  // unit is central
    if (!kx.arcs.empty()) throw SurfaceMismatch("sigma needs J = 0 acting element");
    for (size_t j = 0; j < factors.size(); ++j) {
      SkeinElement single = SkeinElement::zero(x.S, ctx.hprec);
      BasisKey sk;
      sk.loops[factors[j]] = 1;
      single.terms[sk] = HSeries::one(ctx.hprec);
      SkeinElement piece = sigma_action(ctx, single, zt, 2, deg_z);
      piece = fil.truncate_to_cap(piece, cap);
      for (size_t i = j; i-- > 0;) {
        SkeinElement li = SkeinElement::zero(x.S, ctx.hprec);
        BasisKey lk;
        lk.loops[factors[i]] = 1;
        li.terms[lk] = HSeries::one(ctx.hprec);
        piece = fil.truncate_to_cap(mul(ctx, li, piece), cap);
      }
      for (size_t i = j + 1; i < factors.size(); ++i) {
        SkeinElement ri = SkeinElement::zero(x.S, ctx.hprec);
        BasisKey rk;
        rk.loops[factors[i]] = 1;
        ri.terms[rk] = HSeries::one(ctx.hprec);
        piece = fil.truncate_to_cap(mul(ctx, piece, ri), cap);
      }
      out = out + piece.scale_series(cx);
    }
  }
  // error propagation as for sigma_action, capped by the truncations
  int e = std::min({x.err_order == ERR_NONE ? ERR_NONE : x.err_order + deg_z - 2,
                    z.err_order == ERR_NONE ? ERR_NONE : z.err_order + deg_x - 2, cap});
  if (e != ERR_NONE) e = std::max(e, 2);
  out.err_order = std::min(out.err_order, e);
  out.err_disk_val = INT_MAX;  // sigma images die under e; truncation pieces
  out.err_disk_val = std::min(z.err_disk_val == INT_MAX ? INT_MAX : z.err_disk_val,
                              out.err_order == ERR_NONE ? INT_MAX : out.err_order / 2);
  return out;
}

}  // namespace

ExpSigmaResult exp_sigma_full(Filtration& fil, const SkeinElement& x, const SkeinElement& z,
                              const TruncationPolicy& pol, int cap, bool keep_partials) {
  if (cap < 0) cap = pol.filt_cap;
  SkeinContext& ctx = fil.ctx();
  ExpSigmaResult res;
  int deg_x = fil.degree_lower_bound(x, 3);
  SkeinElement term = z;
  int deg_term = 0;
  res.value = z;
  if (keep_partials) res.partials.push_back(res.value);
  for (int i = 1;; ++i) {
    term = sigma_trunc(fil, x, term, cap, deg_x, deg_term).scale(Rat(1, i));
    if (term.terms.empty() && term.err_order == ERR_NONE) {
      res.term_degrees.push_back(ERR_NONE);
      break;  // nilpotent: exact
    }
    int d = fil.degree_lower_bound(term, cap);
    res.term_degrees.push_back(d);
    deg_term = d;
    if (d >= cap) {
      // all later terms are sigma(x)-images of this one: degree never drops
      res.value.err_order = std::min(res.value.err_order, d);
      break;
    }
    res.value = res.value + term;
    res.terms_used = i;
    if (keep_partials) res.partials.push_back(res.value);
    if (i >= pol.depth)
      throw StalledConvergence("exp_sigma did not reach the filtration cap", d, i);
  }
  return res;
}

SkeinElement exp_sigma(Filtration& fil, const SkeinElement& x, const SkeinElement& z,
                       const TruncationPolicy& pol, int cap) {
  return exp_sigma_full(fil, x, z, pol, cap).value;
}

// --------------------------------------------------------------------- BCH

std::map<std::string, Rat> dynkin_level(int W) {
  std::map<std::string, Rat> out;
  // sum over n >= 1 and blocks (r_i, s_i), r_i + s_i > 0, total weight W:
  //   (-1)^{n-1} / (n * W * prod r_i! s_i!) * [word x^{r_1} y^{s_1} ...]
  std::function<void(int, int, std::string, Rat)> rec = [&](int n, int left, std::string word,
                                                            Rat denom) {
    if (left == 0) {
      if (n == 0) return;
      // right-nested bracket: zero when the last two letters agree
      size_t L = word.size();
      if (L >= 2 && word[L - 1] == word[L - 2]) return;
      Rat coeff = Rat((n % 2 == 1) ? 1 : -1) / (Rat(n) * Rat(W) * denom);
      auto it = out.find(word);
      if (it == out.end())
        out[word] = coeff;
      else {
        it->second += coeff;
        if (it->second == 0) out.erase(it);
      }
      return;
    }
    for (int r = 0; r <= left; ++r)
      for (int s = 0; s + r <= left; ++s) {
        if (r + s == 0) continue;
        Rat fact = denom;
        for (int t = 2; t <= r; ++t) fact *= t;
        for (int t = 2; t <= s; ++t) fact *= t;
        rec(n + 1, left - r - s, word + std::string(r, 'a') + std::string(s, 'b'), fact);
      }
  };
  rec(0, W, "", Rat(1));
  return out;
}

SkeinElement bch2(Filtration& fil, const SkeinElement& a, const SkeinElement& b,
                  const TruncationPolicy& pol, int cap) {
  if (cap < 0) cap = pol.filt_cap;
  SkeinContext& ctx = fil.ctx();
  int da = fil.degree_lower_bound(a, 3);
  int db = fil.degree_lower_bound(b, 3);
  int m = std::min(da, db);
  if (m < 2) throw NotAdmissible("bch argument outside ker eps");

  struct Memo {
    SkeinElement elt;
    int deg;
  };
  std::map<std::string, Memo> memo;
  std::function<const Memo&(const std::string&)> eval = [&](const std::string& w) -> const Memo& {
    auto it = memo.find(w);
    if (it != memo.end()) return it->second;
    Memo mres{SkeinElement::zero(a.S, ctx.hprec), 0};
    if (w.size() == 1) {
      mres = {w[0] == 'a' ? a : b, w[0] == 'a' ? da : db};
    } else {
      const Memo& sub = eval(w.substr(1));
      const SkeinElement& head = w[0] == 'a' ? a : b;
      int dh = w[0] == 'a' ? da : db;
      mres.elt = sigma_trunc(fil, head, sub.elt, cap, dh, sub.deg);
      mres.deg = std::min(std::max(2, dh + sub.deg - 2), cap);
    }
    return memo.emplace(w, std::move(mres)).first->second;
  };

  SkeinElement value = SkeinElement::zero(a.S, ctx.hprec);
  int consecutive_over = 0;
  int last_level_deg = m;
  for (int W = 1;; ++W) {
    // theoretical tail bound: weight-W terms lie in F^{W(m-2)+2}
    if (m >= 3 && W * (m - 2) + 2 >= cap + 1) {
      value.err_order = std::min(value.err_order, W * (m - 2) + 2);
      break;
    }
    auto level = dynkin_level(W);
    SkeinElement lv = SkeinElement::zero(a.S, ctx.hprec);
    for (auto& [word, coeff] : level) lv = lv + eval(word).elt.scale(coeff);
    if (lv.terms.empty() && lv.err_order == ERR_NONE) {
      if (++consecutive_over >= 2 && W > 2) break;
      continue;
    }
    int d = fil.degree_lower_bound(lv, cap);
    last_level_deg = d;
    if (d >= cap) {
      value.err_order = std::min(value.err_order, d);
      if (++consecutive_over >= 2) break;
    } else {
      consecutive_over = 0;
      value = value + lv;
    }
    if (W >= pol.depth)
      throw StalledConvergence("bch series did not reach the filtration cap", last_level_deg, W);
  }
  return value;
}

SkeinElement bch_list(Filtration& fil, const std::vector<SkeinElement>& args,
                      const TruncationPolicy& pol, int cap) {
  if (args.empty()) throw SkeinError("bch of no arguments");
  SkeinElement acc = args.back();
  for (int i = static_cast<int>(args.size()) - 2; i >= 0; --i)
    acc = bch2(fil, args[i], acc, pol, cap);
  return acc;
}

SkeinElement C_comm(Filtration& fil, const OrientedCurve& c1, const OrientedCurve& c2,
                    const TruncationPolicy& pol) {
  if (intersection_mu(c1, c2) != 0)
    throw NotAdmissible("C(c1,c2) needs algebraic intersection 0");
  SkeinContext& ctx = fil.ctx();
  int cap = pol.filt_cap + 2;
  SkeinElement L1 = L_of_curve(ctx, c1.as_multicurve(), pol, cap + 2);
  SkeinElement L2 = L_of_curve(ctx, c2.as_multicurve(), pol, cap + 2);
  // bch(L1, L2, -L1, -L2) = bch(exp(sigma(L1))(L2), -L2)
  SkeinElement t = exp_sigma(fil, L1, L2, pol, cap);
  return bch2(fil, t, -L2, pol, cap);
}

// ---------------------------------------------------------- admissibility

namespace {

// row-echelon span over Q
struct Span {
  std::vector<std::vector<Rat>> rows;  // echelon basis
  int n = 0;
  explicit Span(int n) : n(n) {}
  bool insert(std::vector<Rat> v) {
    for (auto& r : rows) {
      int p = pivot(r);
      if (v[p] != 0) {
        Rat f = v[p] / r[p];
        for (int i = 0; i < n; ++i) v[i] -= f * r[i];
      }
    }
    if (std::all_of(v.begin(), v.end(), [](const Rat& x) { return x == 0; })) return false;
    rows.push_back(std::move(v));
    std::sort(rows.begin(), rows.end(),
              [&](auto& a, auto& b) { return pivot(a) < pivot(b); });
    return true;
  }
  bool contains(std::vector<Rat> v) const {
    for (auto& r : rows) {
      int p = pivot(r);
      if (v[p] != 0) {
        Rat f = v[p] / r[p];
        for (int i = 0; i < n; ++i) v[i] -= f * r[i];
      }
    }
    return std::all_of(v.begin(), v.end(), [](const Rat& x) { return x == 0; });
  }
  static int pivot(const std::vector<Rat>& r) {
    for (size_t i = 0; i < r.size(); ++i)
      if (r[i] != 0) return static_cast<int>(i);
    return static_cast<int>(r.size());
  }
  int dim() const { return static_cast<int>(rows.size()); }
};

std::vector<std::vector<Rat>> annihilator(const Span& sp) {
  // null space of the matrix with the span's rows
  int n = sp.n;
  std::vector<int> pivots;
  for (auto& r : sp.rows) pivots.push_back(Span::pivot(r));
  std::vector<std::vector<Rat>> out;
  for (int f = 0; f < n; ++f) {
    if (std::find(pivots.begin(), pivots.end(), f) != pivots.end()) continue;
    std::vector<Rat> v(n, Rat(0));
    v[f] = 1;
    // back-substitute so that <v, row> = 0 for each row
    for (int i = static_cast<int>(sp.rows.size()) - 1; i >= 0; --i) {
      const auto& r = sp.rows[i];
      Rat dot = 0;
      for (int t = 0; t < n; ++t) dot += r[t] * v[t];
      if (dot != 0) v[pivots[i]] -= dot / r[pivots[i]];
    }
    out.push_back(std::move(v));
  }
  return out;
}

HClass to_hclass(const std::vector<Rat>& v) {
  HClass h(static_cast<int>(v.size()));
  h.v = v;
  return h;
}

}  // namespace

AdmissibilityReport check_bch_admissible(Filtration& fil, const std::vector<SkeinElement>& xs) {
  const Surface& S = fil.surface();
  int n = S.num_bands();
  std::vector<std::vector<std::vector<Rat>>> mats;
  for (auto& x : xs) mats.push_back(fil.proj_F2_mod_F3(x).matrix());

  AdmissibilityReport rep;
  auto mu0 = [&](const Span& A, const Span& B) {
    for (auto& a : A.rows)
      for (auto& b : B.rows)
        if (mu_form(S, to_hclass(a), to_hclass(b)) != 0) return false;
    return true;
  };

  Span Z(n);
  for (auto& M : mats)
    for (int j = 0; j < n; ++j) {
      std::vector<Rat> col(n);
      bool nz = false;
      for (int i = 0; i < n; ++i) {
        col[i] = M[i][j];
        nz = nz || col[i] != 0;
      }
      if (nz) Z.insert(col);
    }

  if (mu0(Z, Z)) {
    rep.admissible = true;
    for (auto& r : Z.rows) {
      rep.V1.push_back(to_hclass(r));
      rep.V2.push_back(to_hclass(r));
    }
    rep.witness = "V1 = V2 = span of all rho-class images (mu vanishes on it)";
    return rep;
  }

  // 1-dimensional V2 candidates: image columns and pairwise image meets
  std::vector<std::vector<Rat>> cands;
  auto push_cand = [&](std::vector<Rat> v) {
    Span test(n);
    for (auto& c : cands) test.insert(c);
    if (test.insert(v)) cands.push_back(v);
  };
  for (auto& M : mats)
    for (int j = 0; j < n; ++j) {
      std::vector<Rat> col(n);
      bool nz = false;
      for (int i = 0; i < n; ++i) {
        col[i] = M[i][j];
        nz = nz || col[i] != 0;
      }
      if (nz) push_cand(col);
    }
  // pairwise intersections of the 2-dim images via elimination
  for (size_t s1 = 0; s1 < mats.size(); ++s1)
    for (size_t s2 = s1 + 1; s2 < mats.size(); ++s2) {
      Span A(n), B(n);
      for (int j = 0; j < n; ++j) {
        std::vector<Rat> c1(n), c2(n);
        for (int i = 0; i < n; ++i) {
          c1[i] = mats[s1][i][j];
          c2[i] = mats[s2][i][j];
        }
        A.insert(c1);
        B.insert(c2);
      }
      // intersection: vectors of A inside B
      for (auto& a : A.rows) {
        if (B.contains(a)) push_cand(a);
        for (auto& a2 : A.rows) {
          if (&a2 == &a) continue;
          // try simple combinations a + t a2 landing in B: solve over 1 param
          // (covers rank-2 meets of rank-2 images)
          for (int t = -2; t <= 2; ++t) {
            std::vector<Rat> v(n);
            for (int i = 0; i < n; ++i) v[i] = a[i] + Rat(t) * a2[i];
            if (B.contains(v)) push_cand(v);
          }
        }
      }
    }

  for (auto& w : cands) {
    Span V2(n);
    V2.insert(w);
    Span V1 = Z;
    V1.insert(w);
    // every class must factor as V1 . V2: im(M) <= V1 (true: V1 >= Z) and
    // M(Ann V2) <= V2
    bool ok = true;
    auto ann = annihilator(V2);
    for (auto& M : mats) {
      for (auto& f : ann) {
        std::vector<Rat> img(n, Rat(0));
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) img[i] += M[i][j] * f[j];
        if (!V2.contains(img)) {
          ok = false;
          break;
        }
      }
      if (!ok) break;
    }
    if (ok && mu0(V2, V1)) {
      rep.admissible = true;
      for (auto& r : V1.rows) rep.V1.push_back(to_hclass(r));
      rep.V2.push_back(to_hclass(w));
      rep.witness = "V2 is one-dimensional; every rho-class factors through it";
      return rep;
    }
  }

  rep.admissible = false;
  rep.witness = "no qualifying pair (V1, V2) found";
  return rep;
}

}  // namespace skf
