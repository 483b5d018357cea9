#pragma once

#include <gmpxx.h>

#include <stdexcept>
#include <string>
#include <vector>

namespace relcalc {

// Integer polynomial, coefficient k of t^k.
using IntPoly = std::vector<mpz_class>;

inline IntPoly poly_trim(IntPoly p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
  return p;
}

inline IntPoly poly_mul(const IntPoly& x, const IntPoly& y) {
  if (x.empty() || y.empty()) return {};
  IntPoly r(x.size() + y.size() - 1, 0);
  for (size_t i = 0; i < x.size(); ++i)
    for (size_t j = 0; j < y.size(); ++j) r[i + j] += x[i] * y[j];
  return poly_trim(r);
}

inline IntPoly poly_add(IntPoly x, const IntPoly& y, int sign = 1) {
  if (x.size() < y.size()) x.resize(y.size(), 0);
  for (size_t i = 0; i < y.size(); ++i) x[i] += sign * y[i];
  return poly_trim(x);
}

inline IntPoly poly_pow(const IntPoly& x, unsigned e) {
  IntPoly r{1};
  for (unsigned i = 0; i < e; ++i) r = poly_mul(r, x);
  return r;
}

// Sparse builder: {{power, coeff}, ...}.
inline IntPoly poly_of(std::initializer_list<std::pair<unsigned, long>> terms) {
  IntPoly p;
  for (auto [k, c] : terms) {
    if (p.size() <= k) p.resize(k + 1, 0);
    p[k] += c;
  }
  return poly_trim(p);
}

struct RationalSeriesSpec {
  IntPoly numerator, denominator;
  std::string name;

  // t^{2g} (1+t)^{2g} / ((1-t^2)(1-t^4))
  static RationalSeriesSpec rank2(unsigned g) {
    IntPoly num = poly_mul(poly_of({{2 * g, 1}}), poly_pow(poly_of({{0, 1}, {1, 1}}), 2 * g));
    IntPoly den = poly_mul(poly_of({{0, 1}, {2, -1}}), poly_of({{0, 1}, {4, -1}}));
    return {num, den, "rank2"};
  }

  // ((1+t^2)^2 t^{4g-2} (1+t)^{2g} (1+t^3)^{2g} - (1+t^2+t^4) t^{6g-2} (1+t)^{4g})
  //   / ((1-t^2)(1-t^4)^2(1-t^6))
  static RationalSeriesSpec rank3(unsigned g) {
    IntPoly a = poly_mul(poly_mul(poly_pow(poly_of({{0, 1}, {2, 1}}), 2), poly_of({{4 * g - 2, 1}})),
                         poly_mul(poly_pow(poly_of({{0, 1}, {1, 1}}), 2 * g), poly_pow(poly_of({{0, 1}, {3, 1}}), 2 * g)));
    IntPoly b = poly_mul(poly_mul(poly_of({{0, 1}, {2, 1}, {4, 1}}), poly_of({{6 * g - 2, 1}})),
                         poly_pow(poly_of({{0, 1}, {1, 1}}), 4 * g));
    IntPoly den = poly_mul(poly_mul(poly_of({{0, 1}, {2, -1}}), poly_pow(poly_of({{0, 1}, {4, -1}}), 2)),
                           poly_of({{0, 1}, {6, -1}}));
    return {poly_add(a, b, -1), den, "rank3"};
  }
};

// First N+1 Taylor coefficients of numerator/denominator. Common powers of t
// are cancelled first; the remaining denominator must start with +-1.
inline IntPoly expand_poincare(const RationalSeriesSpec& spec, int N) {
  if (N < 0) throw std::invalid_argument("expand_poincare: N >= 0 required");
  IntPoly num = poly_trim(spec.numerator), den = poly_trim(spec.denominator);
  if (den.empty()) throw std::invalid_argument("expand_poincare: zero denominator");
  size_t shift = 0;
  while (den[shift] == 0) ++shift;
  for (size_t k = 0; k < shift && k < num.size(); ++k)
    if (num[k] != 0) throw std::invalid_argument("expand_poincare: not a power series");
  num.erase(num.begin(), num.begin() + std::min(shift, num.size()));
  den.erase(den.begin(), den.begin() + shift);
  if (den[0] != 1 && den[0] != -1) throw std::invalid_argument("expand_poincare: denominator is not a unit at 0");
  IntPoly out(size_t(N) + 1, 0);
  for (int k = 0; k <= N; ++k) {
    mpz_class c = size_t(k) < num.size() ? num[size_t(k)] : mpz_class(0);
    for (int j = 1; j <= k && size_t(j) < den.size(); ++j) c -= den[size_t(j)] * out[size_t(k - j)];
    out[size_t(k)] = c * den[0];  // den[0] is its own inverse
  }
  return out;
}

inline int lowest_nonzero_degree(const IntPoly& p) {
  for (size_t k = 0; k < p.size(); ++k)
    if (p[k] != 0) return int(k);
  return -1;
}

}  // namespace relcalc
