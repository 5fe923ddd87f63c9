#pragma once

// The Kauffman bracket skein engine: resolution of drawn diagrams into the
// multicurve basis, the algebra product and module actions, the
// augmentation, disk evaluation, and bracket classes <x>.
//
// Two layers:
//  * ExactElement — Laurent-polynomial coefficients over basis keys. All
//    resolutions, products and Lie brackets are exact here ((xy-yx) is
//    exactly divisible by -A+A^-1). Cacheable and policy-independent.
//  * SkeinElement — truncated h-series coefficients plus a certified
//    filtration-order error term O(F^D). Everything the completed algebra
//    needs lives here.

#include <climits>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "skeinforge/coeff.hpp"
#include "skeinforge/surface.hpp"

namespace skf {

// ------------------------------------------------------------------ basis

struct ArcKey {
  int from = 0, to = 0;  // marked indices, from < to
  std::string word;      // reduced, oriented from -> to
  friend auto operator<=>(const ArcKey&, const ArcKey&) = default;
};

/// Basis label: multiset of unoriented loop classes plus an arc matching.
struct BasisKey {
  std::map<std::string, int> loops;
  std::vector<ArcKey> arcs;  // sorted
  friend auto operator<=>(const BasisKey&, const BasisKey&) = default;

  bool is_unit() const { return loops.empty() && arcs.empty(); }
  int loop_components() const;
  std::string str() const;
  static BasisKey unit() { return {}; }
  static BasisKey from_multicurve(const Multicurve& m);
  Multicurve loops_multicurve(SurfacePtr S) const;  // loop part
};

Diagram draw_key(SurfacePtr S, const BasisKey& k, DepthPolicy policy = DepthPolicy::Canonical);

// ---------------------------------------------------------------- elements

class ExactElement {
 public:
  SurfacePtr S;
  int marked = 0;
  std::map<BasisKey, LaurentPoly> terms;  // no zero terms

  static ExactElement zero(SurfacePtr S, int marked = 0);
  static ExactElement unit(SurfacePtr S);
  static ExactElement basis(SurfacePtr S, int marked, const BasisKey& k);

  bool is_zero() const { return terms.empty(); }
  void add_term(const BasisKey& k, const LaurentPoly& c);
  ExactElement operator+(const ExactElement&) const;
  ExactElement operator-(const ExactElement&) const;
  ExactElement operator*(const LaurentPoly&) const;
  ExactElement operator*(const Rat&) const;
  friend bool operator==(const ExactElement&, const ExactElement&) = default;
};

/// Kauffman resolution of a drawn diagram: every crossing smoothed both
/// ways (A and A^-1 weights), contractible loops removed with factor
/// -A^2-A^-2, remaining components keyed by reduced words.
ExactElement resolve_diagram(const Diagram& d);

// ------------------------------------------------------------------- cache

/// Content-addressed product cache. In-memory always; optionally persisted
/// one file per product (write-temp-then-rename, checksummed; corrupt
/// records recomputed and overwritten with a warning).
class ProductCache {
 public:
  explicit ProductCache(std::string dir = "");
  const std::string& dir() const { return dir_; }
  bool load(const std::string& surface_spec, const std::string& op_key, ExactElement* out,
            SurfacePtr S, int marked);
  void store(const std::string& surface_spec, const std::string& op_key, const ExactElement& e);
  int disk_hits = 0, mem_hits = 0, misses = 0;

 private:
  std::string dir_;
  std::map<std::string, ExactElement> mem_;
};

std::string exact_to_json(const ExactElement& e);
ExactElement exact_from_json(const std::string& s, SurfacePtr S, int marked);
std::string fnv1a_hex(const std::string& s);

// ----------------------------------------------------------------- context

struct SkeinContext {
  SurfacePtr S;
  int hprec = 12;                 // internal working precision
  ProductCache* cache = nullptr;  // optional

  SkeinContext(SurfacePtr s, int prec, ProductCache* c) : S(std::move(s)), hprec(prec), cache(c) {}

  ExactElement mul_basis(const BasisKey& a, const BasisKey& b, int marked);
  /// (ab - ba) / (-A + A^-1), exact.
  ExactElement bracket_basis(const BasisKey& a, const BasisKey& b, int marked);
  /// Disk evaluation of a single loop class (flattened bands, later band
  /// over earlier), exact Laurent value of the resulting unknot cluster.
  LaurentPoly disk_value_loop(const std::string& loop_key);

 private:
  ExactElement mul_single_loop(const std::string& c, const BasisKey& b, int marked);
  std::set<std::string> inflight_;
};

// ------------------------------------------------------------ SkeinElement

constexpr int ERR_NONE = INT_MAX;

class SkeinElement {
 public:
  SurfacePtr S;
  int marked = 0;
  std::map<BasisKey, HSeries> terms;
  int err_order = ERR_NONE;     // unrepresented remainder lies in F^{err_order}
  int err_disk_val = INT_MAX;   // h-valuation bound of e(remainder); INT_MAX
                                // when the remainder dies under e (sigma
                                // images) or there is none

  static SkeinElement zero(SurfacePtr S, int hprec, int marked = 0);
  static SkeinElement unit(SurfacePtr S, int hprec);
  static SkeinElement from_exact(const ExactElement& e, int hprec);
  static SkeinElement from_multicurve(const Multicurve& m, int hprec);

  bool known_zero() const { return terms.empty(); }
  int hprec() const;
  void add_term(const BasisKey& k, const HSeries& c);

  SkeinElement operator+(const SkeinElement&) const;
  SkeinElement operator-(const SkeinElement&) const;
  SkeinElement operator-() const;
  SkeinElement scale(const Rat& r) const;
  SkeinElement scale_series(const HSeries& s) const;
  /// Exact equality of represented parts (coefficients at shared precision).
  friend bool operator==(const SkeinElement&, const SkeinElement&) = default;

  std::string str() const;
};

/// Algebra/module product. deg_x/deg_y: certified filtration lower bounds of
/// the represented parts (conservative 0 if unknown); they refine the
/// propagated error order via F^m F^n in F^{m+n}.
SkeinElement mul(SkeinContext& ctx, const SkeinElement& x, const SkeinElement& y, int deg_x = 0,
                 int deg_y = 0);

/// sigma(x)(z) = (xz - zx)/(-A+A^-1); error via [F^m,F^n] in F^{m+n-2}.
SkeinElement sigma_action(SkeinContext& ctx, const SkeinElement& x, const SkeinElement& z,
                          int deg_x = 0, int deg_z = 0);

/// Lie bracket (J = 0 sigma).
SkeinElement bracket(SkeinContext& ctx, const SkeinElement& x, const SkeinElement& y,
                     int deg_x = 0, int deg_y = 0);

/// Augmentation: h^0 coefficient summed with (-2)^{#components} weights.
/// Requires J = 0 and err_order >= 1.
Rat epsilon(const SkeinElement& x);
Rat epsilon_exact(const ExactElement& x);

/// Disk evaluation e'' (algebra map to Q[[h]]); requires J = 0. The error
/// term's image is controlled through h^{reliable_through}.
struct DiskEval {
  HSeries value;
  int reliable_through = INT_MAX;
};
DiskEval evaluate_to_disk(SkeinContext& ctx, const SkeinElement& x);

/// Representative of <x> = [L_x] + 2 - 3 w(L_x)(A - A^-1) for a group-ring
/// combination sum_i c_i x_i (words x_i). Non-simple words get their naive
/// descending drawing.
SkeinElement bracket_class(SkeinContext& ctx, const std::vector<std::pair<Rat, Word>>& combo);
SkeinElement bracket_class_word(SkeinContext& ctx, const Word& w);

}  // namespace skf
