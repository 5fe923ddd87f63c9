#pragma once

// Torelli generators, the maps theta and zeta, the first Johnson
// homomorphism both ways, and checkers for every relation family the
// engine verifies (F.1-F.8, lantern, crossed lantern, push pairs,
// the Dehn-twist formula and Johnson agreement).

#include "skeinforge/lie.hpp"

namespace skf {

enum class GenKind { Sep, Bp, Comm };

struct TorelliGen {
  GenKind kind = GenKind::Sep;
  std::string name;
  OrientedCurve c1, c2;  // sep uses c1 only
  SkeinElement zeta_value;
  // classical presentation data for bp generators: c1 = (r)-curve,
  // c2 = (r [a_1,b_1]...[a_m,b_m])-curve
  Word r;
  std::vector<std::pair<Word, Word>> handles;
};

struct TorelliWord {
  std::vector<std::pair<TorelliGen, int>> letters;  // exponent +-1
};

/// Validates the kind-specific conditions and caches the zeta value
/// (L(c), L(c1)-L(c2), or C(c1,c2)). Throws InvalidPair naming the
/// violated condition.
TorelliGen make_generator(Filtration& fil, const TruncationPolicy& pol, GenKind kind,
                          const OrientedCurve& c1, const OrientedCurve& c2 = {},
                          const std::string& name = "");

/// Geometric action through Dehn twist compositions, applied right-to-left
/// (function composition order).
BasisKey theta_action_key(const TorelliWord& w, SurfacePtr S, const BasisKey& target);
Multicurve theta_action(const TorelliWord& w, const Multicurve& target);

/// bch over the word's zeta values with signs.
SkeinElement zeta(Filtration& fil, const TorelliWord& w, const TruncationPolicy& pol,
                  int cap = -1);

/// tau(t_{c1 c2}) from the pi_1 presentation: sign-pinned multiple of
/// sum_i [r] ^ [a_i] ^ [b_i].
Wedge3 johnson_tau_classical(Filtration& fil, const Word& r,
                             const std::vector<std::pair<Word, Word>>& handles);

/// tau through the skein side: lambda^{-1} of the zeta value mod F^4.
Wedge3 johnson_tau_skein(Filtration& fil, const TorelliGen& g, const TruncationPolicy& pol);

struct PanelProbe {
  std::string target;
  int surviving_order = 0;  // certified F-order of the sigma image
  int h_valuation = 0;      // observed leading h-order of the image
};

struct RelationReport {
  std::string relation, surface, instance;
  std::string policy;
  HSeries disk_eval;          // structural evaluation of the argument sum
  int disk_reliable_through = 0;
  std::vector<PanelProbe> panel;
  std::string verdict;  // "pass" / "fail" / "inconclusive"
  std::string detail;
  std::string value_terms;  // term dump of the computed element
  int value_degree = 0;     // certified degree of (value - expected)
};

/// Verify one library relation instance. Supported ids: "dehn-twist"
/// (params c, z), "lantern" (S04), "crossed-lantern" (S12), "push-pair"
/// (S12), "f1".."f8" (S21), "johnson" (S21), "bch-laws". Throws
/// UnknownRelation when the id/surface pair has no instance.
RelationReport verify_relation(Filtration& fil, const std::string& id,
                               const TruncationPolicy& pol,
                               const std::map<std::string, std::string>& params = {});

/// The standard curve/arc probe panel for a surface.
std::vector<std::pair<std::string, BasisKey>> standard_panel(SurfacePtr S);

}  // namespace skf
