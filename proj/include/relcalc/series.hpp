#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "relcalc/algebra.hpp"

namespace relcalc {

struct WindowError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Coefficients of t^k are exact for lo <= k <= hi. An expansion at 0 has zero
// coefficients below lo and unknown ones above hi; an expansion at infinity
// is the mirror image (zero above hi, unknown below lo).
class TruncatedSeries {
 public:
  // Optional grading: coefficient of t^k is homogeneous of degree weight + step*k.
  struct Grading {
    int weight = 0;
    int step = 2;
  };

  TruncatedSeries() = default;
  TruncatedSeries(int lo, int hi, bool at_infinity = false)
      : lo_(lo), hi_(hi), inf_(at_infinity), c_(size_t(std::max(0, hi - lo + 1))) {
    if (hi < lo) throw WindowError("empty series window [" + std::to_string(lo) + "," +
                                   std::to_string(hi) + "]");
  }

  // Polynomial sum_k coeffs[k] t^k, exact on [lo, hi]. Entries outside the
  // window must be absent.
  static TruncatedSeries polynomial(const std::vector<GradedElement>& coeffs, int lo, int hi,
                                    bool at_infinity = false) {
    TruncatedSeries s(lo, hi, at_infinity);
    for (int k = 0; k < int(coeffs.size()); ++k)
      if (!coeffs[k].is_zero()) {
        if (k < lo || k > hi) throw WindowError("polynomial term outside window");
        s.set(k, coeffs[k]);
      }
    return s;
  }
  static TruncatedSeries constant(const GradedElement& c, int lo, int hi, bool at_infinity = false) {
    TruncatedSeries s(lo, hi, at_infinity);
    if (0 >= lo && 0 <= hi) s.set(0, c);
    else if (!c.is_zero()) throw WindowError("constant outside window");
    return s;
  }
  static TruncatedSeries monomial(const GradedElement& c, int power, int lo, int hi,
                                  bool at_infinity = false) {
    TruncatedSeries s(lo, hi, at_infinity);
    s.set(power, c);
    return s;
  }

  int lo() const { return lo_; }
  int hi() const { return hi_; }
  bool at_infinity() const { return inf_; }
  const std::optional<Grading>& grading() const { return grading_; }

  // Exact coefficient; rejects powers outside the window.
  const GradedElement& coeff(int k) const {
    if (k < lo_ || k > hi_)
      throw WindowError("coefficient of t^" + std::to_string(k) + " outside window [" +
                        std::to_string(lo_) + "," + std::to_string(hi_) + "]");
    return c_[size_t(k - lo_)];
  }
  const GradedElement& operator[](int k) const { return coeff(k); }
  void set(int k, GradedElement x) {
    if (k < lo_ || k > hi_) throw WindowError("set outside window");
    c_[size_t(k - lo_)] = std::move(x);
  }

  // Coefficient that is known to vanish on the structural side of the window.
  GradedElement coeff_or_zero(int k) const {
    if (!inf_ && k < lo_) return {};
    if (inf_ && k > hi_) return {};
    return coeff(k);
  }

  void set_grading(int weight, int step = 2) {
    for (int k = lo_; k <= hi_; ++k)
      if (!coeff(k).is_homogeneous(weight + step * k))
        throw std::logic_error("grading violated at t^" + std::to_string(k));
    grading_ = Grading{weight, step};
  }

  // Narrows the exact window; never widens it.
  TruncatedSeries restrict_window(int lo, int hi) const {
    if (!inf_ && lo < lo_) lo = lo_;
    if (inf_ && hi > hi_) hi = hi_;
    if (lo < lo_ || hi > hi_) throw WindowError("restrict_window would widen the window");
    TruncatedSeries s(lo, hi, inf_);
    for (int k = lo; k <= hi; ++k) s.set(k, coeff(k));
    s.grading_ = grading_;
    return s;
  }

  friend TruncatedSeries operator+(const TruncatedSeries& x, const TruncatedSeries& y) {
    return combine(x, y, 1);
  }
  friend TruncatedSeries operator-(const TruncatedSeries& x, const TruncatedSeries& y) {
    return combine(x, y, -1);
  }
  TruncatedSeries operator-() const {
    TruncatedSeries r = *this;
    for (auto& c : r.c_) c = -c;
    return r;
  }
  friend TruncatedSeries operator*(const TruncatedSeries& x, const GradedElement& e) {
    TruncatedSeries r = x;
    for (auto& c : r.c_) c = c * e;
    r.grading_.reset();
    return r;
  }
  friend TruncatedSeries operator*(const TruncatedSeries& x, const Q& q) {
    TruncatedSeries r = x;
    for (auto& c : r.c_) c = c * q;
    return r;
  }

  friend TruncatedSeries operator*(const TruncatedSeries& x, const TruncatedSeries& y) {
    check_same_side(x, y);
    int lo, hi;
    if (!x.inf_) {
      lo = x.lo_ + y.lo_;
      hi = std::min(x.hi_ + y.lo_, y.hi_ + x.lo_);
    } else {
      hi = x.hi_ + y.hi_;
      lo = std::max(x.lo_ + y.hi_, y.lo_ + x.hi_);
    }
    TruncatedSeries r(lo, hi, x.inf_);
    for (int k = lo; k <= hi; ++k) {
      Accumulator acc;
      for (int i = x.lo_; i <= x.hi_; ++i) {
        int j = k - i;
        if (j < y.lo_ || j > y.hi_) continue;
        const auto& a = x.coeff(i);
        const auto& b = y.coeff(j);
        if (a.is_zero() || b.is_zero()) continue;
        acc.add_product(a, b);
      }
      r.set(k, acc.finalize());
    }
    if (x.grading_ && y.grading_ && x.grading_->step == y.grading_->step)
      r.grading_ = Grading{x.grading_->weight + y.grading_->weight, x.grading_->step};
    return r;
  }

  // Multiplication by t^m.
  TruncatedSeries shift(int m) const {
    TruncatedSeries r(lo_ + m, hi_ + m, inf_);
    r.c_ = c_;
    if (grading_) r.grading_ = Grading{grading_->weight - grading_->step * m, grading_->step};
    return r;
  }

  // t -> 1/t; swaps the expansion point.
  TruncatedSeries reflect() const {
    TruncatedSeries r(-hi_, -lo_, !inf_);
    for (int k = lo_; k <= hi_; ++k) r.set(-k, coeff(k));
    if (grading_) r.grading_ = Grading{grading_->weight, -grading_->step};
    return r;
  }

  TruncatedSeries derivative() const {
    TruncatedSeries r(lo_ - 1, hi_ - 1, inf_);
    for (int k = lo_; k <= hi_; ++k) r.set(k - 1, coeff(k) * Q(k));
    return r;
  }

  // Termwise antiderivative with zero constant term; a nonzero t^{-1}
  // coefficient has no antiderivative and is rejected with its residue.
  TruncatedSeries integrate() const {
    if (-1 >= lo_ && -1 <= hi_ && !coeff(-1).is_zero())
      throw std::domain_error("integrate: nonzero t^-1 residue " + coeff(-1).str());
    TruncatedSeries r(lo_ + 1, hi_ + 1, inf_);
    for (int k = lo_; k <= hi_; ++k)
      if (k != -1) r.set(k + 1, coeff(k) * frac(1, k + 1));
    return r;
  }

  // Inverse of a series whose lowest coefficient (at 0: t^lo; at infinity:
  // t^hi) is a nonzero rational.
  TruncatedSeries inverse() const {
    if (inf_) return reflect().inverse().reflect();
    int v = lo_;
    if (!coeff(v).is_constant() || coeff(v).is_zero())
      throw std::domain_error("inverse: leading coefficient is not a nonzero rational");
    Q c0 = coeff(v).constant();
    int n = hi_ - lo_;
    std::vector<GradedElement> y(size_t(n + 1));
    y[0] = GradedElement(Q(1) / c0);
    for (int k = 1; k <= n; ++k) {
      Accumulator acc;
      for (int j = 1; j <= k; ++j) acc.add_product(coeff(v + j), y[size_t(k - j)]);
      y[size_t(k)] = acc.finalize() * Q(-Q(1) / c0);
    }
    TruncatedSeries r(-v, -v + n, false);
    for (int k = 0; k <= n; ++k) r.set(-v + k, y[size_t(k)]);
    return r;
  }

  // exp(x). The constant coefficient must be nilpotent: its powers are summed
  // until they vanish, up to `nilpotency` steps.
  TruncatedSeries exp(int nilpotency = 64) const {
    if (inf_) return reflect().exp(nilpotency).reflect();
    if (lo_ < 0)
      for (int k = lo_; k < 0; ++k)
        if (!coeff(k).is_zero()) throw std::domain_error("exp: negative powers present");
    for (auto& c : c_)
      if (!c.is_even()) throw std::domain_error("exp: odd coefficient");
    const int n = hi_;
    if (n < 0) throw WindowError("exp: window ends below t^0");
    std::vector<GradedElement> y(size_t(n + 1));
    y[0] = GradedElement(1L);
    auto xk = [&](int k) { return k >= lo_ ? coeff(k) : GradedElement(); };
    for (int k = 1; k <= n; ++k) {
      Accumulator acc;
      for (int j = 1; j <= k; ++j) {
        const GradedElement xj = xk(j);
        if (!xj.is_zero()) acc.add_product(xj, y[size_t(k - j)], Q(j));
      }
      y[size_t(k)] = acc.finalize() * frac(1, k);
    }
    TruncatedSeries r(0, n, false);
    for (int k = 0; k <= n; ++k) r.set(k, y[size_t(k)]);
    GradedElement x0 = xk(0);
    if (!x0.is_zero()) {
      if (x0.constant() != 0) throw std::domain_error("exp: constant term is not nilpotent");
      GradedElement e(1L), p(1L);
      int m = 1;
      for (; m <= nilpotency; ++m) {
        p = p * x0 * frac(1, m);
        if (p.is_zero()) break;
        e += p;
      }
      if (m > nilpotency) throw std::domain_error("exp: nilpotency bound exceeded");
      r = r * e;
    }
    return r;
  }

  // log(x) for x with constant coefficient 1 (at 0, lo <= 0 <= hi, no negative powers).
  TruncatedSeries log() const {
    if (inf_) return reflect().log().reflect();
    for (int k = lo_; k < 0; ++k)
      if (!coeff(k).is_zero()) throw std::domain_error("log: negative powers present");
    if (coeff_or_zero(0) != GradedElement(1L)) throw std::domain_error("log: constant term is not 1");
    const int n = hi_;
    std::vector<GradedElement> y(size_t(n + 1));
    for (int k = 1; k <= n; ++k) {
      Accumulator acc;
      acc.add_scaled(coeff_or_zero(k), Q(k));
      for (int j = 1; j < k; ++j) acc.add_product(y[size_t(j)], coeff_or_zero(k - j), Q(-j));
      y[size_t(k)] = acc.finalize() * frac(1, k);
    }
    TruncatedSeries r(0, n, false);
    for (int k = 1; k <= n; ++k) r.set(k, y[size_t(k)]);
    return r;
  }

  // x^m for integer m (negative via inverse).
  TruncatedSeries pow(int m) const {
    if (m < 0) return inverse().pow(-m);
    TruncatedSeries r = one_like();
    TruncatedSeries b = *this;
    while (m) {
      if (m & 1) r = r * b;
      m >>= 1;
      if (m) b = b * b;
    }
    return r;
  }

  // Substitution t -> t - c for an expansion at infinity.
  TruncatedSeries shift_variable(const GradedElement& c) const {
    if (!inf_) throw std::logic_error("shift_variable: expansion at infinity required");
    TruncatedSeries r(lo_, hi_, true);
    std::vector<Accumulator> acc(size_t(hi_ - lo_ + 1));
    std::vector<GradedElement> cpow{GradedElement(1L)};
    const GradedElement minus_c = -c;
    for (int k = lo_; k <= hi_; ++k) {
      const auto& a = coeff(k);
      if (a.is_zero()) continue;
      // (t - c)^k = sum_j binom(k, j) (-c)^j t^{k-j}, generalized binomial
      Q binom = 1;
      for (int j = 0; k - j >= lo_; ++j) {
        if (j > 0) binom = binom * Q(k - j + 1) / Q(j);
        if (binom == 0) break;
        while (int(cpow.size()) <= j) cpow.push_back(cpow.back() * minus_c);
        acc[size_t(k - j - lo_)].add_product(a, cpow[size_t(j)], binom);
      }
    }
    for (int k = lo_; k <= hi_; ++k) r.set(k, acc[size_t(k - lo_)].finalize());
    return r;
  }

  TruncatedSeries one_like() const {
    if (!inf_) return constant(GradedElement(1L), 0, hi_ - lo_, false);
    return constant(GradedElement(1L), lo_ - hi_, 0, true);
  }

  // Applies f to every coefficient.
  template <class Fn>
  TruncatedSeries map(Fn&& f) const {
    TruncatedSeries r(lo_, hi_, inf_);
    for (int k = lo_; k <= hi_; ++k) r.set(k, f(coeff(k)));
    return r;
  }

  friend bool operator==(const TruncatedSeries& x, const TruncatedSeries& y) {
    return x.lo_ == y.lo_ && x.hi_ == y.hi_ && x.inf_ == y.inf_ && x.c_ == y.c_;
  }

  // First power in the common window where x and y differ, if any.
  static std::optional<int> first_difference(const TruncatedSeries& x, const TruncatedSeries& y) {
    check_same_side(x, y);
    int lo = std::max(x.lo_, y.lo_), hi = std::min(x.hi_, y.hi_);
    for (int k = lo; k <= hi; ++k)
      if (x.coeff(k) != y.coeff(k)) return k;
    return std::nullopt;
  }

  nlohmann::json to_json() const {
    nlohmann::json coeffs = nlohmann::json::object();
    for (int k = lo_; k <= hi_; ++k) coeffs[std::to_string(k)] = relcalc::to_json(coeff(k));
    return {{"lo", lo_}, {"hi", hi_}, {"coeffs", coeffs}};
  }

 private:
  static void check_same_side(const TruncatedSeries& x, const TruncatedSeries& y) {
    if (x.inf_ != y.inf_) throw std::logic_error("series expanded at different points");
  }

  static TruncatedSeries combine(const TruncatedSeries& x, const TruncatedSeries& y, int sign) {
    check_same_side(x, y);
    int lo, hi;
    if (!x.inf_) {
      lo = std::min(x.lo_, y.lo_);
      hi = std::min(x.hi_, y.hi_);
    } else {
      lo = std::max(x.lo_, y.lo_);
      hi = std::max(x.hi_, y.hi_);
    }
    TruncatedSeries r(lo, hi, x.inf_);
    for (int k = lo; k <= hi; ++k) {
      GradedElement a = x.coeff_or_zero(k), b = y.coeff_or_zero(k);
      r.set(k, sign > 0 ? a + b : a - b);
    }
    if (x.grading_ && y.grading_ && x.grading_->weight == y.grading_->weight &&
        x.grading_->step == y.grading_->step)
      r.grading_ = x.grading_;
    return r;
  }

  int lo_ = 0, hi_ = 0;
  bool inf_ = false;
  std::optional<Grading> grading_;
  std::vector<GradedElement> c_;
};

inline GradedElement laurent_coeff(const TruncatedSeries& x, int k) { return x.coeff(k); }

}  // namespace relcalc
