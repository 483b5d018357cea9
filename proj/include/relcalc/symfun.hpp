#pragma once

#include <map>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "relcalc/algebra.hpp"

namespace relcalc {

struct SymmetrizationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

// Splits x = sum_e coeffs[e] * g^e with coeffs free of g.
inline std::vector<GradedElement> split_by_power(const GradedElement& x, Gen g) {
  std::vector<Accumulator> acc;
  for (auto& [m, c] : x.terms()) {
    unsigned e;
    Monomial rest = m.without(g, e);
    if (acc.size() <= e) acc.resize(e + 1);
    acc[e].add(rest, c);
  }
  std::vector<GradedElement> out;
  for (auto& a : acc) out.push_back(a.finalize());
  return out;
}

// Exact quotient of x by (gi - gj), or nullopt when not divisible.
inline std::optional<GradedElement> divide_linear(const GradedElement& x, Gen gi, Gen gj) {
  if (x.is_zero()) return GradedElement();
  auto p = split_by_power(x, gi);
  const int m = int(p.size()) - 1;
  if (m == 0) return std::nullopt;
  const GradedElement c = gen(gj);
  std::vector<GradedElement> q(static_cast<size_t>(m));
  q[size_t(m - 1)] = p[size_t(m)];
  for (int e = m - 1; e >= 1; --e) q[size_t(e - 1)] = p[size_t(e)] + c * q[size_t(e)];
  if (!(p[0] + c * q[0]).is_zero()) return std::nullopt;
  Accumulator acc;
  GradedElement gp(1L);
  const GradedElement gi_e = gen(gi);
  for (int e = 0; e < m; ++e) {
    acc.add_product(q[size_t(e)], gp);
    gp = gp * gi_e;
  }
  return acc.finalize();
}

}  // namespace detail

// numerator / prod (d_i - d_j)^m over pairs of root generators, code(d_i) < code(d_j).
class SplitElement {
 public:
  using Pair = std::pair<uint32_t, uint32_t>;
  using Denominator = std::map<Pair, int>;

  SplitElement() = default;
  SplitElement(GradedElement num) : num_(std::move(num)) {}
  SplitElement(long c) : num_(c) {}
  SplitElement(GradedElement num, Denominator den) : num_(std::move(num)), den_(std::move(den)) {
    normalize_den();
  }

  const GradedElement& numerator() const { return num_; }
  const Denominator& denominator() const { return den_; }
  bool is_zero() const { return num_.is_zero(); }
  bool is_polynomial() const { return den_.empty(); }

  // Factor (a - b) for distinct root generators, oriented by code.
  static SplitElement inverse_difference(Gen a, Gen b, int power = 1) {
    if (a == b) throw std::invalid_argument("inverse_difference of a root with itself");
    if (a.code < b.code) return SplitElement(GradedElement(1L), {{{a.code, b.code}, power}});
    return SplitElement(GradedElement(power % 2 ? -1L : 1L), {{{b.code, a.code}, power}});
  }

  int degree_of_denominator() const {
    int d = 0;
    for (auto& [p, m] : den_) d += 2 * m;
    return d;
  }

  friend SplitElement operator+(const SplitElement& x, const SplitElement& y) {
    Denominator l = x.den_;
    for (auto& [p, m] : y.den_) l[p] = std::max(l[p], m);
    GradedElement nx = x.num_ * lift(x.den_, l), ny = y.num_ * lift(y.den_, l);
    SplitElement r(nx + ny, l);
    r.reduce();
    return r;
  }
  SplitElement operator-() const { return SplitElement(-num_, den_); }
  friend SplitElement operator-(const SplitElement& x, const SplitElement& y) { return x + (-y); }
  SplitElement& operator+=(const SplitElement& y) { return *this = *this + y; }

  friend SplitElement operator*(const SplitElement& x, const SplitElement& y) {
    Denominator d = x.den_;
    for (auto& [p, m] : y.den_) d[p] += m;
    SplitElement r(x.num_ * y.num_, d);
    r.reduce();
    return r;
  }
  friend SplitElement operator*(const SplitElement& x, const Q& q) {
    return SplitElement(x.num_ * q, x.den_);
  }

  // Cancels every linear factor of the denominator dividing the numerator.
  void reduce() {
    if (num_.is_zero()) {
      den_.clear();
      return;
    }
    for (auto it = den_.begin(); it != den_.end();) {
      while (it->second > 0) {
        auto q = detail::divide_linear(num_, Gen{it->first.first}, Gen{it->first.second});
        if (!q) break;
        num_ = std::move(*q);
        --it->second;
      }
      it = it->second == 0 ? den_.erase(it) : std::next(it);
    }
  }

  // Formal derivative with respect to an even root generator.
  SplitElement derivative(Gen root) const {
    SplitElement r(differentiate(num_, root), den_);
    for (auto& [p, m] : den_) {
      int sigma = 0;
      if (p.first == root.code) sigma = 1;
      else if (p.second == root.code) sigma = -1;
      if (!sigma) continue;
      Denominator d = den_;
      d[p] += 1;
      r += SplitElement(num_ * Q(-m * sigma), d);
    }
    r.reduce();
    return r;
  }

  SplitElement substitute_roots(const Assignment& a) const {
    if (!den_.empty()) throw std::logic_error("substitute_roots on a fraction");
    return SplitElement(substitute(num_, a));
  }

  const GradedElement& polynomial() const {
    if (!den_.empty()) throw SymmetrizationError("residual denominator " + den_str());
    return num_;
  }

  std::string den_str() const {
    std::string s;
    for (auto& [p, m] : den_)
      s += "(" + Gen{p.first}.name() + "-" + Gen{p.second}.name() + ")^" + std::to_string(m);
    return s.empty() ? "1" : s;
  }
  std::string str() const { return "[" + num_.str() + "] / " + den_str(); }

  friend bool operator==(const SplitElement& x, const SplitElement& y) { return (x - y).is_zero(); }

  nlohmann::json to_json() const {
    nlohmann::json den = nlohmann::json::array();
    for (auto& [p, m] : den_) den.push_back({Gen{p.first}.name(), Gen{p.second}.name(), m});
    return {{"numerator", relcalc::to_json(num_)}, {"denominator", den}};
  }

 private:
  static GradedElement lift(const Denominator& have, const Denominator& want) {
    GradedElement f(1L);
    for (auto& [p, m] : want) {
      auto it = have.find(p);
      int missing = m - (it == have.end() ? 0 : it->second);
      if (missing > 0) f = f * (gen(Gen{p.first}) - gen(Gen{p.second})).pow(unsigned(missing));
    }
    return f;
  }
  void normalize_den() {
    for (auto it = den_.begin(); it != den_.end();) {
      if (it->first.first >= it->first.second) throw std::invalid_argument("denominator pair unordered");
      it = it->second == 0 ? den_.erase(it) : std::next(it);
    }
  }

  GradedElement num_;
  Denominator den_;
};

inline std::vector<Gen> roots(unsigned n, unsigned part = 0) {
  std::vector<Gen> r;
  for (unsigned k = 1; k <= n; ++k) r.push_back(gen_delta(k, part));
  return r;
}

// e_r of the given root list.
inline GradedElement elementary_symmetric_of(const std::vector<Gen>& rs, unsigned r) {
  // coefficient of t^r in prod (1 + x t)
  std::vector<GradedElement> e{GradedElement(1L)};
  for (Gen x : rs) {
    e.push_back(GradedElement());
    for (size_t j = e.size() - 1; j >= 1; --j) e[j] = e[j] + e[j - 1] * gen(x);
  }
  return r < e.size() ? e[r] : GradedElement();
}

inline GradedElement elementary_symmetric(unsigned n, unsigned r, unsigned part = 0) {
  if (r > n) throw std::invalid_argument("elementary_symmetric: r > n");
  return elementary_symmetric_of(roots(n, part), r);
}

// a^part_r -> e_r(roots of part).
inline Assignment base_to_roots(unsigned n, unsigned part = 0) {
  Assignment a;
  for (unsigned r = 1; r <= n; ++r) a[gen_a(r, part)] = elementary_symmetric(n, r, part);
  return a;
}

inline GradedElement expand_in_roots(const GradedElement& x, unsigned n, unsigned part = 0) {
  return substitute(x, base_to_roots(n, part));
}

namespace detail {

inline GradedElement determinant(std::vector<std::vector<GradedElement>> m) {
  const size_t n = m.size();
  if (n == 1) return m[0][0];
  GradedElement det;
  for (size_t c = 0; c < n; ++c) {
    if (m[0][c].is_zero()) continue;
    std::vector<std::vector<GradedElement>> minor;
    for (size_t r = 1; r < n; ++r) {
      std::vector<GradedElement> row;
      for (size_t k = 0; k < n; ++k)
        if (k != c) row.push_back(m[r][k]);
      minor.push_back(row);
    }
    GradedElement term = m[0][c] * determinant(minor);
    det = (c % 2) ? det - term : det + term;
  }
  return det;
}

struct RootDerivativeTable {
  std::vector<std::vector<SplitElement>> first;                // [k][i]
  std::vector<std::vector<std::vector<SplitElement>>> second;  // [k][i][j]
};

inline const RootDerivativeTable& root_derivative_table(unsigned n, unsigned part) {
  static std::mutex mu;
  static std::map<std::pair<unsigned, unsigned>, RootDerivativeTable> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(n, part);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;

  const auto rs = roots(n, part);
  // J[i][k] = d a_{i+1} / d delta_{k+1} = e_i(roots without delta_{k+1})
  std::vector<std::vector<GradedElement>> J(n, std::vector<GradedElement>(n));
  for (unsigned k = 0; k < n; ++k) {
    std::vector<Gen> others;
    for (unsigned j = 0; j < n; ++j)
      if (j != k) others.push_back(rs[j]);
    for (unsigned i = 0; i < n; ++i) J[i][k] = elementary_symmetric_of(others, i);
  }
  GradedElement det = determinant(J);
  GradedElement vander(1L);
  SplitElement::Denominator den;
  for (unsigned a = 0; a < n; ++a)
    for (unsigned b = a + 1; b < n; ++b) {
      vander = vander * (gen(rs[a]) - gen(rs[b]));
      den[{rs[a].code, rs[b].code}] = 1;
    }
  int sign;
  if (det == vander) sign = 1;
  else if (det == -vander) sign = -1;
  else throw std::logic_error("Jacobian determinant is not a Vandermonde product");

  RootDerivativeTable t;
  t.first.assign(n, std::vector<SplitElement>(n));
  for (unsigned i = 0; i < n; ++i)
    for (unsigned k = 0; k < n; ++k) {
      // (J^{-1})_{k,i} = cofactor(i,k) / det
      std::vector<std::vector<GradedElement>> minor;
      for (unsigned r = 0; r < n; ++r) {
        if (r == i) continue;
        std::vector<GradedElement> row;
        for (unsigned c = 0; c < n; ++c)
          if (c != k) row.push_back(J[r][c]);
        minor.push_back(row);
      }
      GradedElement cof = n == 1 ? GradedElement(1L) : determinant(minor);
      if ((i + k) % 2) cof = -cof;
      SplitElement v(cof * Q(sign), den);
      v.reduce();
      t.first[k][i] = v;
    }
  t.second.assign(n, std::vector<std::vector<SplitElement>>(n, std::vector<SplitElement>(n)));
  for (unsigned k = 0; k < n; ++k)
    for (unsigned i = 0; i < n; ++i) {
      std::vector<SplitElement> grad;
      for (unsigned l = 0; l < n; ++l) grad.push_back(t.first[k][i].derivative(rs[l]));
      for (unsigned j = 0; j < n; ++j) {
        SplitElement s;
        for (unsigned l = 0; l < n; ++l) s += grad[l] * t.first[l][j];
        t.second[k][i][j] = s;
      }
    }
  return cache.emplace(key, std::move(t)).first->second;
}

}  // namespace detail

// d delta_k / d a_i (1-based), by inverting the Jacobian [e_{i-1}(roots \ delta_k)].
inline SplitElement root_derivative(unsigned n, unsigned k, unsigned i, unsigned part = 0) {
  if (k < 1 || k > n || i < 1 || i > n) throw std::invalid_argument("root_derivative index");
  return detail::root_derivative_table(n, part).first[k - 1][i - 1];
}

// d^2 delta_k / d a_i d a_j, by differentiating the first derivatives.
inline SplitElement root_second_derivative(unsigned n, unsigned k, unsigned i, unsigned j,
                                           unsigned part = 0) {
  return detail::root_derivative_table(n, part).second[k - 1][i - 1][j - 1];
}

// Rewrites a root-symmetric element in terms of a^part_1..a^part_n by
// iterated leading-term subtraction (lex order on root exponents).
inline GradedElement symmetrize_to_base(const SplitElement& x, unsigned n, unsigned part = 0) {
  SplitElement red = x;
  red.reduce();
  const GradedElement& p = red.polynomial();
  const auto rs = roots(n, part);

  for (unsigned k = 0; k + 1 < n; ++k) {
    Assignment swap{{rs[k], gen(rs[k + 1])}, {rs[k + 1], gen(rs[k])}};
    if (substitute(p, swap) != p)
      throw SymmetrizationError("not invariant under transposition (" + rs[k].name() + " " +
                                rs[k + 1].name() + ")");
  }

  using Exps = std::vector<unsigned>;
  std::map<Exps, Accumulator> work_acc;
  for (auto& [m, c] : p.terms()) {
    Exps e(n);
    Monomial rest = m;
    for (unsigned k = 0; k < n; ++k) {
      unsigned ek;
      rest = rest.without(rs[k], ek);
      e[k] = ek;
    }
    work_acc[e].add(rest, c);
  }
  std::map<Exps, GradedElement> work;
  for (auto& [e, a] : work_acc) {
    GradedElement v = a.finalize();
    if (!v.is_zero()) work.emplace(e, std::move(v));
  }

  static std::mutex mu;
  static std::map<std::pair<unsigned, Exps>, std::vector<std::pair<Exps, Q>>> expansion_cache;
  auto expansion = [&](const Exps& pows) -> std::vector<std::pair<Exps, Q>> {
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(part, pows);
    auto it = expansion_cache.find(key);
    if (it != expansion_cache.end()) return it->second;
    GradedElement prod(1L);
    for (unsigned r = 0; r < n; ++r)
      if (pows[r]) prod = prod * elementary_symmetric(n, r + 1, part).pow(pows[r]);
    std::vector<std::pair<Exps, Q>> out;
    for (auto& [m, c] : prod.terms()) {
      Exps e(n);
      for (unsigned k = 0; k < n; ++k) e[k] = m.exponent(rs[k]);
      out.emplace_back(e, c);
    }
    return expansion_cache.emplace(key, out).first->second;
  };

  Accumulator result;
  while (!work.empty()) {
    auto lead = std::prev(work.end());
    Exps e = lead->first;
    GradedElement c = lead->second;
    for (unsigned k = 0; k + 1 < n; ++k)
      if (e[k] < e[k + 1]) throw SymmetrizationError("leading exponent not a partition");
    Exps pows(n);
    std::vector<std::pair<Gen, unsigned>> amon;
    for (unsigned r = 0; r < n; ++r) {
      pows[r] = e[r] - (r + 1 < n ? e[r + 1] : 0);
      if (pows[r]) amon.emplace_back(gen_a(r + 1, part), pows[r]);
    }
    std::sort(amon.begin(), amon.end());
    result.add_product(c, GradedElement(Monomial::from_parts(amon, {}), 1));
    for (auto& [ex, q] : expansion(pows)) {
      auto it = work.find(ex);
      GradedElement nv = (it == work.end() ? GradedElement() : it->second) - c * q;
      if (nv.is_zero()) {
        if (it != work.end()) work.erase(it);
      } else if (it == work.end()) {
        work.emplace(ex, std::move(nv));
      } else {
        it->second = std::move(nv);
      }
    }
  }
  return result.finalize();
}

inline GradedElement symmetrize_to_base(const GradedElement& x, unsigned n, unsigned part = 0) {
  return symmetrize_to_base(SplitElement(x), n, part);
}

// b^{p,k,s} = sum_i b^{p,s}_i d delta_k / d a_i.
inline SplitElement root_odd(unsigned n, unsigned k, unsigned s, unsigned part = 0) {
  SplitElement r;
  for (unsigned i = 1; i <= n; ++i)
    r += SplitElement(gen(gen_b(i, s, part))) * root_derivative(n, k, i, part);
  return r;
}

struct WX {
  SplitElement W, X;
};

// W_k and X_k of a rank-n part; f_1 is the constant `f1` when given, else the
// (degree-zero) generator f_1.
inline WX build_W_X(unsigned n, unsigned k, unsigned g, std::optional<long> f1 = std::nullopt,
                    unsigned part = 0) {
  WX out;
  for (unsigned i = 1; i <= n; ++i) {
    GradedElement fi = (i == 1 && f1) ? GradedElement(*f1) : gen(gen_f(i, part));
    out.W += SplitElement(fi) * root_derivative(n, k, i, part);
  }
  for (unsigned i = 1; i <= n; ++i)
    for (unsigned j = 1; j <= n; ++j) {
      SplitElement x(xi(i, j, g, part, part));
      out.W += x * root_second_derivative(n, k, i, j, part);
      out.X += x * root_derivative(n, k, i, part) * root_derivative(n, k, j, part);
    }
  return out;
}

}  // namespace relcalc
