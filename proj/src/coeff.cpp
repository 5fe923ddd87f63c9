#include "skeinforge/coeff.hpp"

#include <algorithm>
#include <sstream>

namespace skf {

std::string rat_to_string(const Rat& r) {
  Rat c = r;
  c.canonicalize();
  if (c.get_den() == 1) return c.get_num().get_str();
  return c.get_num().get_str() + "/" + c.get_den().get_str();
}

Rat rat_from_string(const std::string& s) {
  Rat r;
  if (r.set_str(s, 10) != 0) throw ParseError("bad rational '" + s + "'");
  r.canonicalize();
  return r;
}

// ---------------------------------------------------------------- LaurentPoly

void LaurentPoly::set(int exp, const Rat& c) {
  if (c == 0)
    c_.erase(exp);
  else
    c_[exp] = c;
}

LaurentPoly LaurentPoly::monomial(int exp, const Rat& c) {
  LaurentPoly p;
  p.set(exp, c);
  return p;
}

LaurentPoly LaurentPoly::u() {
  LaurentPoly p;
  p.set(1, -1);
  p.set(-1, 1);
  return p;
}

LaurentPoly LaurentPoly::a_minus_ainv() {
  LaurentPoly p;
  p.set(1, 1);
  p.set(-1, -1);
  return p;
}

LaurentPoly LaurentPoly::loop_value() {
  LaurentPoly p;
  p.set(2, -1);
  p.set(-2, -1);
  return p;
}

Rat LaurentPoly::coeff(int exp) const {
  auto it = c_.find(exp);
  return it == c_.end() ? Rat(0) : it->second;
}

LaurentPoly LaurentPoly::operator+(const LaurentPoly& o) const {
  LaurentPoly r = *this;
  for (auto& [e, c] : o.c_) r.set(e, r.coeff(e) + c);
  return r;
}

LaurentPoly LaurentPoly::operator-(const LaurentPoly& o) const {
  LaurentPoly r = *this;
  for (auto& [e, c] : o.c_) r.set(e, r.coeff(e) - c);
  return r;
}

LaurentPoly LaurentPoly::operator-() const {
  LaurentPoly r;
  for (auto& [e, c] : c_) r.c_[e] = -c;
  return r;
}

LaurentPoly LaurentPoly::operator*(const LaurentPoly& o) const {
  LaurentPoly r;
  for (auto& [e1, c1] : c_)
    for (auto& [e2, c2] : o.c_) r.set(e1 + e2, r.coeff(e1 + e2) + c1 * c2);
  return r;
}

LaurentPoly LaurentPoly::operator*(const Rat& s) const {
  LaurentPoly r;
  if (s == 0) return r;
  for (auto& [e, c] : c_) r.c_[e] = c * s;
  return r;
}

LaurentPoly LaurentPoly::pow(int n) const {
  LaurentPoly r = one();
  for (int i = 0; i < n; ++i) r = r * (*this);
  return r;
}

LaurentPoly LaurentPoly::div_exact(const LaurentPoly& d) const {
  if (d.is_zero()) throw ValuationError("division by zero Laurent polynomial");
  if (is_zero()) return LaurentPoly();
  // Quotient exponents of an exact division lie in
  // [min(p) - min(d), max(p) - max(d)]; leaving that window means remainder.
  const int qlo = c_.begin()->first - d.c_.begin()->first;
  LaurentPoly rem = *this, q;
  while (!rem.is_zero()) {
    int re = rem.c_.rbegin()->first;
    int de = d.c_.rbegin()->first;
    int qe = re - de;
    if (qe < qlo) throw ValuationError("Laurent division has a remainder");
    Rat qc = rem.c_.rbegin()->second / d.c_.rbegin()->second;
    q.set(qe, q.coeff(qe) + qc);
    rem = rem - d * LaurentPoly::monomial(qe, qc);
  }
  return q;
}

Rat LaurentPoly::eval_at_minus_one() const {
  Rat v = 0;
  for (auto& [e, c] : c_) v += (e % 2 == 0) ? c : -c;
  return v;
}

std::string LaurentPoly::to_string() const {
  if (c_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (auto& [e, c] : c_) {
    if (!first) os << " + ";
    os << "(" << rat_to_string(c) << ")A^" << e;
    first = false;
  }
  return os.str();
}

Rat eval_epsilon_base(const LaurentPoly& p) { return p.eval_at_minus_one(); }

// ------------------------------------------------------------------- HSeries

HSeries HSeries::one(int prec) {
  HSeries s(prec);
  if (prec > 0) s.c_[0] = 1;
  return s;
}

HSeries HSeries::monomial(int k, const Rat& c, int prec) {
  HSeries s(prec);
  if (k < prec) s.c_[k] = c;
  return s;
}

HSeries HSeries::from_coeffs(std::vector<Rat> coeffs) {
  HSeries s;
  s.prec_ = static_cast<int>(coeffs.size());
  s.c_ = std::move(coeffs);
  return s;
}

const Rat& HSeries::coeff(int k) const {
  if (k >= prec_ || k < 0)
    throw InsufficientPrecision("coefficient h^" + std::to_string(k) + " beyond O(h^" +
                                std::to_string(prec_) + ")");
  return c_[k];
}

int HSeries::valuation() const {
  for (int k = 0; k < prec_; ++k)
    if (c_[k] != 0) return k;
  return prec_;
}

HSeries HSeries::operator+(const HSeries& o) const {
  int p = std::min(prec_, o.prec_);
  HSeries r(p);
  for (int k = 0; k < p; ++k) r.c_[k] = c_[k] + o.c_[k];
  return r;
}

HSeries HSeries::operator-(const HSeries& o) const {
  int p = std::min(prec_, o.prec_);
  HSeries r(p);
  for (int k = 0; k < p; ++k) r.c_[k] = c_[k] - o.c_[k];
  return r;
}

HSeries HSeries::operator-() const {
  HSeries r(prec_);
  for (int k = 0; k < prec_; ++k) r.c_[k] = -c_[k];
  return r;
}

HSeries HSeries::operator*(const HSeries& o) const {
  int va = valuation(), vb = o.valuation();
  int p = std::min(prec_ + vb, o.prec_ + va);
  HSeries r(p);
  for (int i = 0; i < prec_ && i < p; ++i) {
    if (c_[i] == 0) continue;
    for (int j = 0; j < o.prec_ && i + j < p; ++j) {
      if (o.c_[j] == 0) continue;
      r.c_[i + j] += c_[i] * o.c_[j];
    }
  }
  return r;
}

HSeries HSeries::operator*(const Rat& s) const {
  HSeries r(prec_);
  for (int k = 0; k < prec_; ++k) r.c_[k] = c_[k] * s;
  return r;
}

HSeries HSeries::shift(int k) const {
  HSeries r(prec_ + k);
  for (int i = 0; i < prec_; ++i) r.c_[i + k] = c_[i];
  return r;
}

HSeries HSeries::truncate(int prec) const {
  prec = std::max(prec, 0);
  if (prec >= prec_) return *this;
  HSeries r(prec);
  for (int k = 0; k < prec; ++k) r.c_[k] = c_[k];
  return r;
}

HSeries HSeries::inverse() const {
  if (prec_ == 0 || c_[0] == 0) throw ValuationError("inverse of non-unit series");
  HSeries r(prec_);
  r.c_[0] = 1 / c_[0];
  for (int k = 1; k < prec_; ++k) {
    Rat acc = 0;
    for (int j = 0; j < k; ++j) acc += r.c_[j] * c_[k - j];
    r.c_[k] = -acc / c_[0];
  }
  return r;
}

std::string HSeries::to_string() const {
  std::ostringstream os;
  bool any = false;
  for (int k = 0; k < prec_; ++k) {
    if (c_[k] == 0) continue;
    if (any) os << " + ";
    os << "(" << rat_to_string(c_[k]) << ")h^" << k;
    any = true;
  }
  if (!any) os << "0";
  os << " + O(h^" << prec_ << ")";
  return os.str();
}

HSeries to_hseries(const LaurentPoly& p, int prec) {
  // A = h - 1; A^-1 = -(1 + h + h^2 + ...).
  HSeries a(prec);
  if (prec > 0) {
    a = HSeries::monomial(0, -1, prec) + HSeries::monomial(1, 1, prec);
  }
  HSeries ainv(prec);
  for (int k = 0; k < prec; ++k) ainv = ainv + HSeries::monomial(k, -1, prec);
  HSeries r(prec);
  for (auto& [e, c] : p.coeffs()) {
    HSeries pw = HSeries::one(prec);
    const HSeries& base = e >= 0 ? a : ainv;
    for (int i = 0; i < std::abs(e); ++i) pw = pw * base;
    r = r + pw.truncate(prec) * c;
  }
  return r;
}

HSeries div_by_valuation(const HSeries& a, const HSeries& b) {
  int vb = b.valuation();
  if (vb == b.prec()) throw ValuationError("division by series that is zero to its precision");
  if (a.valuation() < vb)
    throw ValuationError("valuation of numerator (" + std::to_string(a.valuation()) +
                         ") below valuation of denominator (" + std::to_string(vb) + ")");
  int p = std::max(std::min(a.prec(), b.prec()) - vb, 0);
  // Strip h^vb from both, then divide by the resulting unit.
  std::vector<Rat> na(p), nb(p);
  for (int k = 0; k < p; ++k) {
    na[k] = a.coeff(k + vb);
    nb[k] = b.coeff(k + vb);
  }
  HSeries nas = HSeries::from_coeffs(std::move(na));
  HSeries nbs = HSeries::from_coeffs(std::move(nb));
  return nas * nbs.inverse();
}

StructuralSeries structural_series(int prec) {
  if (prec < 2) throw SkeinError("structural_series requires prec >= 2");
  StructuralSeries s{to_hseries(LaurentPoly::u(), prec), HSeries(prec)};
  // log(-A) = log(1 - h) = -sum h^k / k.
  HSeries l(prec);
  std::vector<Rat> lc(prec, Rat(0));
  for (int k = 1; k < prec; ++k) lc[k] = Rat(-1, k);
  s.log_neg_a = HSeries::from_coeffs(std::move(lc));
  return s;
}

std::vector<Rat> arccosh_sq_series(int M) {
  if (M < 1) throw SkeinError("arccosh_sq_series requires M >= 1");
  // Solve F(q) = t where F(q) = sum_{m>=1} q^m/(2m)!  (cosh(sqrt(q)) - 1).
  // Order-by-order: with g_1..g_{k-1} fixed, the t^k coefficient of F(q) is
  // g_k/2 + (known lower terms).
  std::vector<Rat> g(M + 1, Rat(0));  // g[1..M]
  for (int k = 1; k <= M; ++k) {
    // q_partial = sum_{i<k} g_i t^i as a series mod t^{k+1}
    std::vector<Rat> q(k + 1, Rat(0));
    for (int i = 1; i < k; ++i) q[i] = g[i];
    // F(q_partial) mod t^{k+1}
    std::vector<Rat> F(k + 1, Rat(0));
    std::vector<Rat> qp(k + 1, Rat(0));
    qp[0] = 1;  // q^0
    Rat fact = 1;
    for (int m = 1; m <= k; ++m) {
      // qp = qp * q (truncated)
      std::vector<Rat> nq(k + 1, Rat(0));
      for (int i = 0; i <= k; ++i) {
        if (qp[i] == 0) continue;
        for (int j = 0; i + j <= k; ++j) nq[i + j] += qp[i] * q[j];
      }
      qp = nq;
      fact *= Rat(2 * m - 1) * Rat(2 * m);  // (2m)!
      for (int i = 0; i <= k; ++i) F[i] += qp[i] / fact;
    }
    Rat target = (k == 1) ? Rat(1) : Rat(0);
    g[k] = (target - F[k]) * 2;
  }
  return std::vector<Rat>(g.begin() + 1, g.end());
}

}  // namespace skf
