#pragma once

// The completed Lie-theoretic layer: L(c), exp(sigma(.)), the BCH series
// with certified truncation, C(c1,c2), and BCH admissibility checks.

#include "skeinforge/filtration.hpp"

namespace skf {

struct TruncationPolicy {
  int h_order = 8;   // reported h precision N: equalities hold up to O(h^N)
  int filt_cap = 6;  // filtration cap D: remainders pushed into O(F^D)
  int depth = 12;    // max sigma-iteration / bracket-weight budget

  int work_prec() const { return h_order + 4; }
  std::string str() const;
};

/// L(c) = u/(4 log(-A)) (arccosh(-c/2))^2 - u log(-A), assembled as a finite
/// sum over parallel powers [c^j] with HSeries coefficients, truncated so
/// the dropped tail is certified in F^{cap+}, err_order recorded.
/// Pre: c has a single component.
SkeinElement L_of_curve(SkeinContext& ctx, const Multicurve& c, const TruncationPolicy& pol,
                        int filt_cap = -1);

/// The L series with c substituted by the trivial-loop value -A^2-A^-2
/// (pure coefficient arithmetic; identically 0 in the limit).
HSeries L_series_at_trivial_value(int prec);

struct ExpSigmaResult {
  SkeinElement value;
  std::vector<int> term_degrees;       // certified degree of each dropped/kept term
  std::vector<SkeinElement> partials;  // partial sums, when requested
  int terms_used = 0;
};

/// exp(sigma(x))(z) = sum sigma(x)^i(z)/i!, summed until the next term is
/// certified in F^cap; StalledConvergence when certified degrees stop
/// growing within the depth budget.
ExpSigmaResult exp_sigma_full(Filtration& fil, const SkeinElement& x, const SkeinElement& z,
                              const TruncationPolicy& pol, int cap = -1,
                              bool keep_partials = false);
SkeinElement exp_sigma(Filtration& fil, const SkeinElement& x, const SkeinElement& z,
                       const TruncationPolicy& pol, int cap = -1);

/// Two-argument BCH by the Dynkin expansion in nested brackets; terms are
/// dropped only when certified >= F^cap.
SkeinElement bch2(Filtration& fil, const SkeinElement& a, const SkeinElement& b,
                  const TruncationPolicy& pol, int cap = -1);

/// Multi-argument BCH by right folding.
SkeinElement bch_list(Filtration& fil, const std::vector<SkeinElement>& args,
                      const TruncationPolicy& pol, int cap = -1);

/// C(c1,c2) = bch(L(c1),L(c2),-L(c1),-L(c2)), computed through the rewriting
/// bch(exp(sigma(L1))(L2), -L2). Pre: algebraic intersection 0, else
/// NotAdmissible.
SkeinElement C_comm(Filtration& fil, const OrientedCurve& c1, const OrientedCurve& c2,
                    const TruncationPolicy& pol);

struct AdmissibilityReport {
  bool admissible = false;
  std::vector<HClass> V1, V2;
  std::string witness;  // human-readable description
};

/// Search for subspaces V2 <= V1 of H with every rho-class in V1.V2 and
/// mu(V2, V1) = 0 (the BCH convergence conditions).
AdmissibilityReport check_bch_admissible(Filtration& fil, const std::vector<SkeinElement>& xs);

/// Dynkin coefficients of weight-W BCH terms: word over {'a','b'} -> coeff.
std::map<std::string, Rat> dynkin_level(int W);

}  // namespace skf
