#pragma once

// Exact coefficient arithmetic: Q[A, A^-1] and truncated power series in
// h = A + 1. All values are immutable after construction and all operations
// are pure; there is no floating point anywhere in the engine.

#include <gmpxx.h>

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "skeinforge/errors.hpp"

namespace skf {

using Rat = mpq_class;

std::string rat_to_string(const Rat& r);   // "p" or "p/q", q > 0
Rat rat_from_string(const std::string& s);

/// Laurent polynomial in A with exact rational coefficients.
/// Invariant: no stored zero coefficients.
class LaurentPoly {
 public:
  LaurentPoly() = default;
  static LaurentPoly zero() { return LaurentPoly(); }
  static LaurentPoly one() { return monomial(0, 1); }
  static LaurentPoly var() { return monomial(1, 1); }  // A
  static LaurentPoly monomial(int exp, const Rat& c);

  /// -A + A^-1, the structural unit u.
  static LaurentPoly u();
  /// A - A^-1 (= -u).
  static LaurentPoly a_minus_ainv();
  /// -A^2 - A^-2, the trivial-loop value.
  static LaurentPoly loop_value();

  bool is_zero() const { return c_.empty(); }
  const std::map<int, Rat>& coeffs() const { return c_; }
  Rat coeff(int exp) const;

  LaurentPoly operator+(const LaurentPoly& o) const;
  LaurentPoly operator-(const LaurentPoly& o) const;
  LaurentPoly operator-() const;
  LaurentPoly operator*(const LaurentPoly& o) const;
  LaurentPoly operator*(const Rat& s) const;
  bool operator==(const LaurentPoly& o) const { return c_ == o.c_; }
  bool operator!=(const LaurentPoly& o) const { return !(*this == o); }

  LaurentPoly pow(int n) const;  // n >= 0

  /// Exact division; throws ValuationError when d does not divide exactly.
  LaurentPoly div_exact(const LaurentPoly& d) const;

  /// Evaluation at A = -1 (always defined).
  Rat eval_at_minus_one() const;

  std::string to_string() const;  // for diagnostics

 private:
  std::map<int, Rat> c_;
  void set(int exp, const Rat& c);
};

/// Augmentation on coefficients: A+1 |-> 0, i.e. p |-> p(-1).
Rat eval_epsilon_base(const LaurentPoly& p);

/// Truncated power series in h with exact rational coefficients.
/// Value means  sum c_k h^k  +  O(h^prec).  prec >= 0; prec == 0 carries no
/// information. Arithmetic never reports coefficients at or beyond the
/// precision of the result.
class HSeries {
 public:
  HSeries() : prec_(0) {}
  explicit HSeries(int prec)
      : c_(static_cast<size_t>(std::max(prec, 0)), Rat(0)), prec_(std::max(prec, 0)) {}
  static HSeries zero(int prec) { return HSeries(prec); }
  static HSeries one(int prec);
  static HSeries monomial(int k, const Rat& c, int prec);
  static HSeries from_coeffs(std::vector<Rat> coeffs);  // prec = coeffs.size()

  int prec() const { return prec_; }
  /// Coefficient of h^k; throws InsufficientPrecision for k >= prec.
  const Rat& coeff(int k) const;
  /// h-valuation of the known part; returns prec when all known coeffs are 0.
  int valuation() const;
  bool known_zero() const { return valuation() == prec_; }

  HSeries operator+(const HSeries& o) const;  // prec = min
  HSeries operator-(const HSeries& o) const;
  HSeries operator-() const;
  HSeries operator*(const HSeries& o) const;  // prec = min(pa+vb, pb+va)
  HSeries operator*(const Rat& s) const;
  HSeries shift(int k) const;  // * h^k, prec += k

  /// Exact equality of the shared known prefix AND equal precision.
  bool operator==(const HSeries& o) const { return prec_ == o.prec_ && c_ == o.c_; }
  bool operator!=(const HSeries& o) const { return !(*this == o); }

  HSeries truncate(int prec) const;  // prec may only shrink

  /// Multiplicative inverse; requires valuation 0 (unit).
  HSeries inverse() const;

  std::string to_string() const;

 private:
  std::vector<Rat> c_;
  int prec_;
};

/// Taylor expansion of p at h = 0 (A = h - 1), truncated to prec terms. Exact.
HSeries to_hseries(const LaurentPoly& p, int prec);

/// Quotient a/b with precision reduced by valuation(b).
/// pre: valuation(a) >= valuation(b), b not zero up to its precision.
/// Throws ValuationError when the precondition fails.
HSeries div_by_valuation(const HSeries& a, const HSeries& b);

struct StructuralSeries {
  HSeries u;         // -A + A^-1 = -2h - h^2 - h^3 - ...
  HSeries log_neg_a; // log(-A) = log(1-h) = -h - h^2/2 - h^3/3 - ...
};

/// pre: prec >= 2 (both series have h-valuation exactly 1).
StructuralSeries structural_series(int prec);

/// Coefficients g_1..g_M of g(t) = (arccosh(1+t))^2 = sum g_k t^k, computed
/// by exact series inversion of cosh(sqrt(q)) = 1 + t.
std::vector<Rat> arccosh_sq_series(int M);

}  // namespace skf
