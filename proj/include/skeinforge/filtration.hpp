#pragma once

// The augmentation filtration F^n: expansion into augmentation coordinates,
// certified degree lower bounds, the graded projections via rho and lambda,
// and explicit (ker eps)^k membership certificates.
//
// F^1 = F^2 = ker eps, F^3 = preimage of im(lambda) in ker eps/(ker eps)^2,
// F^n = ker eps * F^{n-2}. Products add degrees, brackets add degrees minus
// two. All bounds here are certified lower bounds, never exact degrees.

#include <array>
#include <optional>

#include "skeinforge/skein.hpp"

namespace skf {

/// Symmetric 2-tensor over H = H_1(Sigma,Q) plus one conservative scalar
/// coordinate for the h^1 direction of F^2/F^3.
class SymHH {
 public:
  int n = 0;
  std::map<std::pair<int, int>, Rat> c;  // (i<=j) -> coefficient of e_i . e_j
  Rat hcoord = 0;

  SymHH() = default;
  explicit SymHH(int n) : n(n) {}
  void add(int i, int j, const Rat& v);
  bool is_zero() const;
  SymHH operator+(const SymHH&) const;
  SymHH operator-(const SymHH&) const;
  SymHH operator*(const Rat&) const;
  friend bool operator==(const SymHH&, const SymHH&) = default;
  std::vector<std::vector<Rat>> matrix() const;  // full symmetric matrix
  std::string str(const Surface& S) const;
};

/// Alternating 3-tensor over H.
class Wedge3 {
 public:
  int n = 0;
  std::map<std::array<int, 3>, Rat> c;  // keys i<j<k

  Wedge3() = default;
  explicit Wedge3(int n) : n(n) {}
  void add(int i, int j, int k, const Rat& v);  // any order, sign handled
  void add_vectors(const HClass& a, const HClass& b, const HClass& cc, const Rat& v);
  bool is_zero() const;
  Wedge3 operator+(const Wedge3&) const;
  Wedge3 operator-(const Wedge3&) const;
  Wedge3 operator*(const Rat&) const;
  friend bool operator==(const Wedge3&, const Wedge3&) = default;
  std::string str(const Surface& S) const;
};

/// One monomial of the augmentation-coordinate expansion:
/// coeff * h^hpow * prod (c_i + 2) over the factor multiset.
struct AugMonomial {
  int hpow = 0;
  std::map<std::string, int> factors;
  friend auto operator<=>(const AugMonomial&, const AugMonomial&) = default;
  int degree() const;
};

struct AugExpansion {
  std::map<AugMonomial, Rat> terms;
  int minprec = 0;  // coefficients were only known through h^minprec
  /// Exact inverse of the expansion (for the round-trip property).
  SkeinElement reassemble(SurfacePtr S, int hprec) const;
};

/// Rewrite every multicurve component c as (c+2) - 2 and distribute.
/// Requires J = 0.
AugExpansion expand_aug_coordinates(const SkeinElement& x);

struct CertificatePiece {
  std::string coeff;                 // exact rational or truncated series
  std::vector<std::string> factors;  // atom labels
};

struct Certificate {
  bool found = false;
  std::vector<CertificatePiece> pieces;
  int trunc_h = 0;   // checked through h^trunc_h
  int trunc_F = 0;   // modulo the element's own err order
  std::string note;
};

/// Filtration machinery bound to a skein context plus an instance-derived
/// generating list for certificate searches.
class Filtration {
 public:
  explicit Filtration(SkeinContext& ctx)
      : ctx_(&ctx), short_limit_(std::max(4, 2 * ctx.S->num_bands())) {}

  SkeinContext& ctx() { return *ctx_; }
  const Surface& surface() const { return *ctx_->S; }

  /// Extra ker-eps curve atoms for certificate searches (beyond the support
  /// of the element under test); twist-image closure up to `depth`.
  void add_generating_curve(const Word& w);
  void set_twist_depth(int d) { twist_depth_ = d; }

  /// Certified n with x in F^n. Monomial analysis plus rho/lambda upgrades
  /// plus certificate search, capped by the element's err_order and by the
  /// coefficient precision. `want` bounds the search effort.
  int degree_lower_bound(const SkeinElement& x, int want = 6);

  /// Normal form modulo F^cap: long support keys are eliminated against
  /// certified F^cap generators, which are then dropped into the error
  /// term. The result equals x in the completed algebra mod F^cap and has
  /// short support; its disk evaluation is only reliable through
  /// h^{cap/2}.
  SkeinElement truncate_to_cap(const SkeinElement& x, int cap);

  /// Graded projection F^2/F^3. Pre: degree >= 2 (eps(x) = 0), else
  /// DegreeError.
  SymHH proj_F2_mod_F3(const SkeinElement& x);

  /// lambda: [a]^[b]^[c] -> <(a-1)(b-1)(c-1)>, linear extension.
  SkeinElement lambda_eval(const Wedge3& w);
  /// rho: [a].[b] -> <(a-1)(b-1)>, h-coordinate -> h*[unit].
  SkeinElement rho_eval(const SymHH& s);

  /// Explicit decomposition witnessing x in (ker eps)^k up to truncation,
  /// or an inconclusive Failure (never a disproof).
  Certificate membership_certificate(const SkeinElement& x, int k);

  /// Unique w with x = lambda(w) mod (ker eps)^2. Pre: proj_F2_mod_F3(x)=0,
  /// else NotInF3; throws Inconclusive when the joint solve fails.
  Wedge3 tau_extract(const SkeinElement& x);
  /// Non-throwing variant.
  std::optional<Wedge3> try_tau_extract(const SkeinElement& x, Certificate* cert = nullptr);

  /// The engine's wedge basis (band generators i<j<k) and its lambda images.
  std::vector<std::array<int, 3>> wedge_basis() const;
  const SkeinElement& lambda_basis_image(const std::array<int, 3>& e);

 private:
  SkeinContext* ctx_;
  std::vector<Word> extra_curves_;
  int twist_depth_ = 2;
  int short_limit_;  // words longer than this get eliminated by reducers
  std::map<std::array<int, 3>, SkeinElement> lambda_cache_;
  std::map<std::string, std::optional<SkeinElement>> relation_cache_;
  std::map<std::pair<std::string, int>, std::optional<SkeinElement>> reducer_cache_;

  std::vector<std::pair<std::string, SkeinElement>> atoms2_for(const SkeinElement& x);
  std::vector<std::pair<std::string, SkeinElement>> atoms3_for();
  std::optional<std::vector<std::pair<Rat, std::vector<std::string>>>> solve_in_span(
      const SkeinElement& x, const std::vector<std::pair<std::string, SkeinElement>>& cols,
      int* used_prec);
  std::optional<std::vector<std::pair<HSeries, std::vector<std::string>>>> solve_in_span_series(
      const SkeinElement& x, const std::vector<std::pair<std::string, SkeinElement>>& cols,
      int* used_prec);

  /// The quadratic bracket-class relation based at the class of w: an
  /// explicit (ker eps)^2 element whose longest key is [w]. nullopt when no
  /// shortening splitting with drawable classes exists.
  std::optional<SkeinElement> bracket_relation(const Word& w);
  /// All quadratic relations <uv>+<uv^-1>-2<u>-2<v> over short words u from
  /// the given support and band-core v (certificate columns).
  std::vector<std::pair<std::string, SkeinElement>> relation_columns(const SkeinElement& x);
  /// Membership solve at even level d with atom products plus relation
  /// columns (internal refinement; membership_certificate stays pure).
  bool certify_level(const SkeinElement& x, int d);
  /// Certified F^want element with unit leading coefficient at [w] and all
  /// other keys shorter (relation element climbed by short core factors).
  std::optional<SkeinElement> reducer(const Word& w, int want);
  /// Subtract certified-degree multiples to shrink long support; returns the
  /// short-support remainder (equal to x modulo F^want).
  SkeinElement eliminate_long_keys(const SkeinElement& x, int want, bool* complete);

  friend struct FiltrationTestHook;
};

/// Exact sparse linear solve: coefficients c with sum c_i col_i = target.
std::optional<std::vector<Rat>> solve_linear(const std::vector<std::map<long, Rat>>& cols,
                                             const std::map<long, Rat>& target);

/// Layered series solve: find f_i in Q[[h]] with sum f_i col_i = target
/// through the shared precision. Solves the h^0 system once and
/// back-substitutes layer by layer (sufficient, not complete: free
/// directions are not re-activated at higher layers).
std::optional<std::vector<HSeries>> solve_linear_series(
    const std::vector<std::map<long, HSeries>>& cols, const std::map<long, HSeries>& target,
    int prec);

}  // namespace skf
