#pragma once

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "relcalc/strata.hpp"

namespace relcalc {

// Polynomials in the base root classes delta_1..delta_n (and rationals only).
using DeltaPoly = GradedElement;

inline GradedElement delta(unsigned k) { return gen(gen_delta(k)); }

// Free commuting symbols of degree 2, disjoint from every ring generator in use.
inline constexpr unsigned kSymbolPart = 15;
inline GradedElement symbol(unsigned k) { return gen(gen_delta(k, kSymbolPart)); }

// Number of root factors in a homogeneous DeltaPoly.
inline int root_degree(const DeltaPoly& x) {
  if (x.is_zero()) return 0;
  int d = x.terms().front().first.degree();
  if (!x.is_homogeneous(d)) throw std::invalid_argument("root_degree: inhomogeneous element");
  return d / 2;
}

// All monomials of the given root degree in delta_1..delta_n (with part index).
inline std::vector<Monomial> root_monomials(unsigned n, int deg, unsigned part = 0) {
  std::vector<Monomial> out;
  std::vector<unsigned> e(n, 0);
  std::function<void(unsigned, int)> rec = [&](unsigned k, int left) {
    if (k + 1 == n) {
      e[k] = unsigned(left);
      std::vector<std::pair<Gen, unsigned>> parts;
      for (unsigned i = 0; i < n; ++i)
        if (e[i]) parts.emplace_back(gen_delta(i + 1, part), e[i]);
      out.push_back(Monomial::from_parts(parts, {}));
      return;
    }
    for (int j = left; j >= 0; --j) {
      e[k] = unsigned(j);
      rec(k + 1, left - j);
    }
  };
  if (deg >= 0 && n > 0) rec(0, deg);
  return out;
}

// ---------------------------------------------------------------------------
// Total Pontryagin class.

// (1 + x T)^e at 0, exact on [0, cap].
inline TruncatedSeries binomial_factor(const GradedElement& x, long e, int cap) {
  TruncatedSeries s(0, cap);
  Q binom = 1;
  GradedElement xp(1L);
  for (int j = 0; j <= cap && j <= e; ++j) {
    if (j > 0) binom = binom * Q(e - j + 1) / Q(j), xp = xp * x;
    s.set(j, xp * binom);
  }
  return s;
}

// prod_{k<l} (1 + (delta_k - delta_l)^2 T)^{2 gbar}; p_r is the coefficient of T^r.
inline TruncatedSeries total_pontryagin_roots(unsigned n, unsigned g, int cap) {
  const long gbar = long(g) - 1;
  TruncatedSeries p = TruncatedSeries::constant(GradedElement(1L), 0, cap);
  for (unsigned k = 1; k <= n; ++k)
    for (unsigned l = k + 1; l <= n; ++l) {
      GradedElement x = delta(k) - delta(l);
      p = p * binomial_factor(x * x, 2 * gbar, cap);
    }
  return p;
}

// The same class with every p_r written in a_1..a_n.
inline TruncatedSeries total_pontryagin(unsigned n, unsigned g, int cap) {
  return total_pontryagin_roots(n, g, cap).map(
      [&](const GradedElement& x) { return symmetrize_to_base(x, n); });
}

// prod_{k != l} (1 + (delta_k - delta_l) u)^{gbar}, the Chern class of the tangent
// bundle built from the same root data.
inline TruncatedSeries tangent_chern_roots(unsigned n, unsigned g, int cap) {
  TruncatedSeries c = TruncatedSeries::constant(GradedElement(1L), 0, cap);
  for (unsigned k = 1; k <= n; ++k)
    for (unsigned l = 1; l <= n; ++l)
      if (k != l) c = c * binomial_factor(delta(k) - delta(l), long(g) - 1, cap);
  return c;
}

// Reads p(-u^2) = c(u) c(-u) as a series in T = u^2: coefficient of T^r is
// (-1)^r [u^{2r}] c(u) c(-u).
inline TruncatedSeries pontryagin_from_chern(unsigned n, unsigned g, int cap) {
  TruncatedSeries c = tangent_chern_roots(n, g, 2 * cap);
  TruncatedSeries cm = c;
  for (int k = 1; k <= 2 * cap; k += 2) cm.set(k, -c.coeff(k));
  TruncatedSeries prod = c * cm;
  TruncatedSeries p(0, cap);
  for (int r = 0; r <= cap; ++r) p.set(r, r % 2 ? -prod.coeff(2 * r) : prod.coeff(2 * r));
  return p;
}

// ---------------------------------------------------------------------------
// The rho system: for each i,
//   (-1)^g / n^{4g} * Pi_i^{2g} = sum_k rho^k (-delta_i)^k,  Pi_i = prod_{p != i} (delta_i - delta_p).

inline Q rho_scale(unsigned n, unsigned g) {
  mpz_class den;
  mpz_ui_pow_ui(den.get_mpz_t(), n, 4 * g);
  Q s(mpz_class(1), den);
  return g % 2 ? Q(-s) : s;
}

inline GradedElement root_product(unsigned n, unsigned i) {
  GradedElement p(1L);
  for (unsigned q = 1; q <= n; ++q)
    if (q != i) p = p * (delta(i) - delta(q));
  return p;
}

// e_k of {delta_p : p != i}.
inline GradedElement elementary_without(unsigned n, unsigned i, unsigned k) {
  std::vector<Gen> rs;
  for (unsigned p = 1; p <= n; ++p)
    if (p != i) rs.push_back(gen_delta(p));
  return elementary_symmetric_of(rs, k);
}

inline GradedElement rho_target(unsigned n, unsigned g, unsigned i) {
  return root_product(n, i).pow(2 * g) * rho_scale(n, g);
}

struct RhoSolution {
  unsigned n = 0, g = 0;
  std::vector<DeltaPoly> rho;       // rho^0..rho^{n-1} in the root classes
  std::vector<GradedElement> base;  // the same in a_1..a_n
  bool back_substitution = false;
  bool closed_form = false;         // matches (-1)^{g+n-1}/n^{4g} sum_i S_i^{n-1-k} Pi_i^{2g-1}
  bool transposed_variant = false;  // whether S_i^k with sign (-1)^{g+n} also solves the system

  nlohmann::json to_json() const {
    nlohmann::json r = nlohmann::json::array();
    for (unsigned k = 0; k < n; ++k)
      r.push_back({{"k", k}, {"roots", relcalc::to_json(rho[k])}, {"base", relcalc::to_json(base[k])}});
    return {{"n", n},
            {"g", g},
            {"rho", r},
            {"back_substitution", back_substitution},
            {"closed_form", closed_form},
            {"transposed_variant", transposed_variant}};
  }
};

inline bool solves_rho_system(const std::vector<DeltaPoly>& rho, unsigned n, unsigned g) {
  for (unsigned i = 1; i <= n; ++i) {
    GradedElement lhs, x(1L);
    for (unsigned k = 0; k < n; ++k, x = x * -delta(i)) lhs += rho[k] * x;
    if (lhs != rho_target(n, g, i)) return false;
  }
  return true;
}

// Lagrange interpolation at the nodes -delta_i, carried out with explicit
// inverse root differences; the result must reduce to polynomials.
inline RhoSolution solve_rho(unsigned n, unsigned g) {
  if (n < 2) throw std::invalid_argument("solve_rho: n >= 2 required");
  RhoSolution out;
  out.n = n;
  out.g = g;
  std::vector<SplitElement> acc(n);
  for (unsigned i = 1; i <= n; ++i) {
    SplitElement w(rho_target(n, g, i));
    for (unsigned p = 1; p <= n; ++p)
      if (p != i) w = w * SplitElement::inverse_difference(gen_delta(p), gen_delta(i));
    // coefficient of x^k in prod_{p != i} (x + delta_p) is e_{n-1-k}
    for (unsigned k = 0; k < n; ++k) acc[k] += w * SplitElement(elementary_without(n, i, n - 1 - k));
  }
  for (unsigned k = 0; k < n; ++k) {
    acc[k].reduce();
    out.rho.push_back(acc[k].polynomial());
  }
  out.back_substitution = solves_rho_system(out.rho, n, g);
  if (!out.back_substitution) throw std::logic_error("solve_rho: back-substitution failed");
  for (auto& r : out.rho) out.base.push_back(symmetrize_to_base(r, n));

  auto sum_form = [&](bool transposed) {
    Q s = rho_scale(n, g);  // (-1)^g / n^{4g}
    if (transposed ? n % 2 : (n - 1) % 2) s = -s;
    std::vector<DeltaPoly> r(n);
    for (unsigned k = 0; k < n; ++k)
      for (unsigned i = 1; i <= n; ++i)
        r[k] += elementary_without(n, i, transposed ? k : n - 1 - k) * root_product(n, i).pow(2 * g - 1) * s;
    return r;
  };
  out.closed_form = sum_form(false) == out.rho;
  out.transposed_variant = solves_rho_system(sum_form(true), n, g);
  return out;
}

// ---------------------------------------------------------------------------
// Ideal membership in Q[delta_1..delta_n] by graded linear algebra.

struct MembershipCertificate {
  bool member = false;
  bool verified = false;  // sum multipliers[j] * gens[j] == x re-checked
  int degree = 0;         // root degree
  std::vector<GradedElement> multipliers;

  nlohmann::json to_json() const {
    nlohmann::json m = nlohmann::json::array();
    for (size_t j = 0; j < multipliers.size(); ++j)
      if (!multipliers[j].is_zero()) m.push_back({{"generator", j}, {"multiplier", relcalc::to_json(multipliers[j])}});
    return {{"member", member}, {"verified", verified}, {"root_degree", degree}, {"combination", m}};
  }
};

// The degree-D piece of an ideal, spanned by monomial multiples of the
// generators, in echelon form. Basis vector i vanishes at the pivots of all
// earlier basis vectors, so reducing in insertion order is exact.
class IdealPiece {
 public:
  IdealPiece(const std::vector<DeltaPoly>& gens, unsigned n, int deg) : gens_(gens), n_(n), deg_(deg) {
    for (size_t j = 0; j < gens.size(); ++j) {
      if (gens[j].is_zero()) continue;
      int e = root_degree(gens[j]);
      if (e > deg) continue;
      for (const Monomial& m : root_monomials(n, deg - e)) {
        size_t col = columns_.size();
        columns_.emplace_back(j, m);
        Vec v = to_vec(GradedElement(m, 1) * gens[j]);
        Vec combo{{col, Q(1)}};
        reduce(v, combo);
        if (v.empty()) continue;
        basis_.push_back({v.begin()->first, std::move(v), std::move(combo)});
      }
    }
  }

  size_t rank() const { return basis_.size(); }

  MembershipCertificate test(const DeltaPoly& x) const {
    MembershipCertificate c;
    c.degree = deg_;
    c.multipliers.assign(gens_.size(), GradedElement());
    if (!x.is_zero() && root_degree(x) != deg_) return c;
    Vec v = to_vec(x), combo;
    reduce(v, combo);
    if (!v.empty()) return c;
    c.member = true;
    // x - sum combo * column = 0 after reduction, so x = -sum combo * column
    for (auto& [col, q] : combo) {
      auto& [j, m] = columns_[col];
      c.multipliers[j] += GradedElement(m, -q);
    }
    GradedElement back;
    for (size_t j = 0; j < gens_.size(); ++j) back += c.multipliers[j] * gens_[j];
    c.verified = back == x;
    return c;
  }

 private:
  using Vec = std::map<size_t, Q>;
  struct Row {
    size_t pivot;
    Vec v, combo;
  };

  Vec to_vec(const GradedElement& x) const {
    Vec v;
    for (auto& [m, c] : x.terms()) {
      auto it = index_.find(m);
      size_t k;
      if (it == index_.end()) {
        k = index_.size();
        index_.emplace(m, k);
      } else {
        k = it->second;
      }
      v[k] = c;
    }
    return v;
  }

  void reduce(Vec& v, Vec& combo) const {
    for (const Row& r : basis_) {
      auto it = v.find(r.pivot);
      if (it == v.end()) continue;
      Q f = it->second / r.v.at(r.pivot);
      axpy(v, r.v, f);
      axpy(combo, r.combo, f);
    }
  }

  static void axpy(Vec& v, const Vec& w, const Q& f) {
    for (auto& [k, q] : w) {
      auto it = v.find(k);
      if (it == v.end()) {
        v.emplace(k, -f * q);
      } else {
        it->second -= f * q;
        if (it->second == 0) v.erase(it);
      }
    }
  }

  std::vector<DeltaPoly> gens_;
  unsigned n_;
  int deg_;
  std::vector<std::pair<size_t, Monomial>> columns_;
  std::vector<Row> basis_;
  mutable std::map<Monomial, size_t> index_;
};

// Run-local cache of ideal pieces by degree.
class RootIdeal {
 public:
  RootIdeal(std::vector<DeltaPoly> gens, unsigned n) : gens_(std::move(gens)), n_(n) {}
  const std::vector<DeltaPoly>& generators() const { return gens_; }

  const IdealPiece& piece(int deg) {
    auto it = pieces_.find(deg);
    if (it == pieces_.end()) it = pieces_.emplace(deg, IdealPiece(gens_, n_, deg)).first;
    return it->second;
  }
  MembershipCertificate test(const DeltaPoly& x) { return piece(x.is_zero() ? 0 : root_degree(x)).test(x); }

 private:
  std::vector<DeltaPoly> gens_;
  unsigned n_;
  std::map<int, IdealPiece> pieces_;
};

inline MembershipCertificate ideal_membership(const DeltaPoly& x, const std::vector<DeltaPoly>& gens, unsigned n,
                                              std::optional<int> degree = std::nullopt) {
  int deg = degree ? *degree : (x.is_zero() ? 0 : root_degree(x));
  if (!x.is_zero() && root_degree(x) != deg) throw std::invalid_argument("ideal_membership: degree mismatch");
  return IdealPiece(gens, n, deg).test(x);
}

// ---------------------------------------------------------------------------
// Rank three: alpha = delta_1 - delta_2, beta = delta_2 - delta_3, gamma = delta_3 - delta_1.

inline GradedElement alpha3() { return delta(1) - delta(2); }
inline GradedElement beta3() { return delta(2) - delta(3); }
inline GradedElement gamma3() { return delta(3) - delta(1); }

using Triple3 = std::array<unsigned, 3>;

// F(u,v,w): alpha^u beta^v gamma^w summed over all six assignments of the exponents.
inline GradedElement f_sum(const GradedElement& a, const GradedElement& b, const GradedElement& c, unsigned u,
                           unsigned v, unsigned w) {
  const std::array<unsigned, 3> e{u, v, w};
  std::array<int, 3> perm{0, 1, 2};
  GradedElement s;
  do s += a.pow(e[perm[0]]) * b.pow(e[perm[1]]) * c.pow(e[perm[2]]);
  while (std::next_permutation(perm.begin(), perm.end()));
  return s;
}

inline DeltaPoly f_expr(unsigned u, unsigned v, unsigned w) { return f_sum(alpha3(), beta3(), gamma3(), u, v, w); }

inline Triple3 sorted_desc(Triple3 t) {
  std::sort(t.begin(), t.end(), std::greater<>());
  return t;
}

// Cyclic sums sum_j c_j * (pair product)^{2g-1} over the pairs (alpha beta),
// (beta gamma), (gamma alpha) with weights attached per pair.
inline DeltaPoly cyclic_sum(unsigned g, const GradedElement& w_ab, const GradedElement& w_bc,
                            const GradedElement& w_ca) {
  const unsigned e = 2 * g - 1;
  return w_ab * (alpha3() * beta3()).pow(e) + w_bc * (beta3() * gamma3()).pow(e) +
         w_ca * (gamma3() * alpha3()).pow(e);
}

// delta_2^k (alpha beta)^{2g-1} + delta_3^k (beta gamma)^{2g-1} + delta_1^k (gamma alpha)^{2g-1}.
inline DeltaPoly shifted_cyclic(unsigned g, unsigned k) {
  return cyclic_sum(g, delta(2).pow(k), delta(3).pow(k), delta(1).pow(k));
}

// Rewriting rule engine: a base rule for two exponents >= 2g-1 and the
// exchange F(u,v,w) = -F(u-1,v,w+1) - F(u-1,v+1,w) from alpha + beta + gamma = 0.
enum class FRule { Base, Exchange, Stuck };

inline const char* rule_name(FRule r) {
  switch (r) {
    case FRule::Base: return "base";
    case FRule::Exchange: return "exchange";
    default: return "stuck";
  }
}

struct FStep {
  Triple3 f{};
  FRule rule = FRule::Stuck;
  Triple3 left{}, right{};  // children of an exchange, sorted
};

struct FReduction {
  Triple3 root{};
  bool zero = false;
  size_t exchanges = 0, base_leaves = 0, stuck_leaves = 0;
  std::vector<FStep> steps;  // distinct nodes, children before parents

  nlohmann::json to_json(bool with_steps = false) const {
    nlohmann::json j{{"F", root},
                     {"zero", zero},
                     {"exchanges", exchanges},
                     {"base_leaves", base_leaves},
                     {"stuck_leaves", stuck_leaves},
                     {"trace_length", steps.size()}};
    if (with_steps) {
      nlohmann::json s = nlohmann::json::array();
      for (auto& st : steps) {
        nlohmann::json e{{"F", st.f}, {"rule", rule_name(st.rule)}};
        if (st.rule == FRule::Exchange) e["children"] = {st.left, st.right};
        s.push_back(e);
      }
      j["steps"] = s;
    }
    return j;
  }
};

// Memoized per instance; one instance per run.
class FReducer {
 public:
  explicit FReducer(unsigned g) : g_(g) {}

  FReduction reduce(unsigned u, unsigned v, unsigned w) {
    if ((u + v + w) % 2) throw std::invalid_argument("F reduction needs an even exponent sum");
    FReduction r;
    r.root = sorted_desc({u, v, w});
    std::set<Triple3> seen;
    r.zero = visit(r.root, r, seen, 0);
    return r;
  }

 private:
  bool visit(const Triple3& t, FReduction& r, std::set<Triple3>& seen, unsigned depth) {
    const unsigned big = 2 * g_ - 1, threshold = 6 * g_ - 4;
    const unsigned sum = t[0] + t[1] + t[2];
    if (depth > sum + 1) throw std::logic_error("F reduction exceeded its depth bound");
    auto memo = memo_.find(t);
    bool fresh = seen.insert(t).second;
    FStep step;
    step.f = t;
    bool zero;
    if (t[1] >= big) {
      step.rule = FRule::Base;
      zero = true;
    } else if (sum < threshold) {
      step.rule = FRule::Stuck;
      zero = false;
    } else {
      // max strictly drops unless t[0] - t[1] <= 1, which forces t[1] >= 2g-1 here
      if (t[0] < t[1] + 2) throw std::logic_error("F reduction: exchange would not descend");
      step.rule = FRule::Exchange;
      step.left = sorted_desc({t[0] - 1, t[1], t[2] + 1});
      step.right = sorted_desc({t[0] - 1, t[1] + 1, t[2]});
      bool a = visit(step.left, r, seen, depth + 1);
      bool b = visit(step.right, r, seen, depth + 1);
      zero = a && b;
    }
    if (memo != memo_.end() && memo->second != zero) throw std::logic_error("F reduction memo conflict");
    memo_[t] = zero;
    if (fresh) {
      if (step.rule == FRule::Exchange) ++r.exchanges;
      if (step.rule == FRule::Base) ++r.base_leaves;
      if (step.rule == FRule::Stuck) ++r.stuck_leaves;
      r.steps.push_back(step);
    }
    return zero;
  }

  unsigned g_;
  std::map<Triple3, bool> memo_;
};

inline FReduction rank3_reduce(unsigned u, unsigned v, unsigned w, unsigned g) {
  return FReducer(g).reduce(u, v, w);
}

// Pontryagin monomial P1^i P2^j P3^k with P_r = e_r(alpha^2, beta^2, gamma^2).
struct PontryaginMonomial {
  unsigned i = 0, j = 0, k = 0;
  int real_degree() const { return 4 * int(i + 2 * j + 3 * k); }
  std::string str() const {
    return "P1^" + std::to_string(i) + " P2^" + std::to_string(j) + " P3^" + std::to_string(k);
  }
};

inline std::vector<PontryaginMonomial> pontryagin_monomials(int real_lo, int real_hi) {
  std::vector<PontryaginMonomial> out;
  for (unsigned k = 0; 12 * int(k) <= real_hi; ++k)
    for (unsigned j = 0; 8 * int(j) + 12 * int(k) <= real_hi; ++j)
      for (unsigned i = 0; 4 * int(i + 2 * j + 3 * k) <= real_hi; ++i) {
        PontryaginMonomial m{i, j, k};
        if (m.real_degree() >= real_lo) out.push_back(m);
      }
  std::sort(out.begin(), out.end(), [](auto& x, auto& y) {
    return std::make_tuple(x.real_degree(), x.k, x.j, x.i) < std::make_tuple(y.real_degree(), y.k, y.j, y.i);
  });
  return out;
}

inline GradedElement pontryagin_generator(unsigned r, const GradedElement& a, const GradedElement& b,
                                          const GradedElement& c) {
  GradedElement A = a * a, B = b * b, C = c * c;
  switch (r) {
    case 1: return A + B + C;
    case 2: return A * B + B * C + C * A;
    case 3: return A * B * C;
  }
  throw std::invalid_argument("pontryagin_generator: r in 1..3");
}

inline GradedElement pontryagin_monomial(const PontryaginMonomial& m, const GradedElement& a,
                                         const GradedElement& b, const GradedElement& c) {
  return pontryagin_generator(1, a, b, c).pow(m.i) * pontryagin_generator(2, a, b, c).pow(m.j) *
         pontryagin_generator(3, a, b, c).pow(m.k);
}

inline DeltaPoly pontryagin_monomial_roots(const PontryaginMonomial& m) {
  return pontryagin_monomial(m, alpha3(), beta3(), gamma3());
}

// Writes a permutation-symmetric polynomial in independent alpha, beta, gamma
// as sum c * F(u,v,w) over sorted triples: each monomial contributes c/6.
inline std::map<Triple3, Q> f_decomposition(const GradedElement& sym_poly) {
  std::map<Triple3, Q> out;
  for (auto& [m, c] : sym_poly.terms()) {
    Triple3 t{m.exponent(gen_delta(1, kSymbolPart)), m.exponent(gen_delta(2, kSymbolPart)),
              m.exponent(gen_delta(3, kSymbolPart))};
    out[sorted_desc(t)] += c * frac(1, 6);
  }
  for (auto it = out.begin(); it != out.end();) it = it->second == 0 ? out.erase(it) : std::next(it);
  return out;
}

inline std::map<Triple3, Q> f_decomposition(const PontryaginMonomial& m) {
  return f_decomposition(pontryagin_monomial(m, symbol(1), symbol(2), symbol(3)));
}

// ---------------------------------------------------------------------------
// Rank-three identity report.

struct IdentityCheck {
  std::string id;
  bool ok = false;
  bool asserted = true;  // false: recorded only
  std::string detail;
};

struct Rank3Report {
  unsigned g = 0;
  std::vector<IdentityCheck> checks;
  bool ok() const {
    for (auto& c : checks)
      if (c.asserted && !c.ok) return false;
    return true;
  }
  const IdentityCheck* find(const std::string& id) const {
    for (auto& c : checks)
      if (c.id == id) return &c;
    return nullptr;
  }
  nlohmann::json to_json() const {
    nlohmann::json a = nlohmann::json::array();
    for (auto& c : checks) a.push_back({{"id", c.id}, {"ok", c.ok}, {"asserted", c.asserted}, {"detail", c.detail}});
    return {{"g", g}, {"ok", ok()}, {"checks", a}};
  }
};

// Whether x = lambda * y for a rational lambda (y nonzero); returns lambda.
inline std::optional<Q> rational_multiple(const GradedElement& x, const GradedElement& y) {
  if (y.is_zero()) return std::nullopt;
  const auto& [m, c] = y.terms().front();
  Q lambda = x.coeff(m) / c;
  if (x != y * lambda) return std::nullopt;
  return lambda;
}

inline Rank3Report rank3_identities(unsigned g, const RhoSolution* given = nullptr) {
  Rank3Report rep;
  rep.g = g;
  std::optional<RhoSolution> own;
  if (!given) own = solve_rho(3, g);
  const RhoSolution& sol = given ? *given : *own;
  if (sol.n != 3 || sol.g != g) throw std::invalid_argument("rank3_identities: rho solution mismatch");
  auto add = [&](std::string id, bool ok, std::string detail = "", bool asserted = true) {
    rep.checks.push_back({std::move(id), ok, asserted, std::move(detail)});
  };
  const GradedElement a1 = elementary_symmetric(3, 1), a2 = elementary_symmetric(3, 2),
                      a3 = elementary_symmetric(3, 3);
  const GradedElement al = alpha3(), be = beta3(), ga = gamma3();

  add("gamma_square", ga * ga == a1 * a1 - a2 * Q(4) + a1 * delta(2) * Q(2) - delta(2) * delta(2) * Q(3));
  add("alpha_linear", al * Q(2) == (a1 - delta(2) * Q(3)) - ga);
  add("beta_linear", be * Q(2) == (delta(2) * Q(3) - a1) - ga);

  // The three cyclic relations and their rho multiples.
  const DeltaPoly c0 = cyclic_sum(g, 1L, 1L, 1L);
  const DeltaPoly c1 = cyclic_sum(g, delta(1) + delta(3), delta(2) + delta(1), delta(3) + delta(2));
  const DeltaPoly c2 = cyclic_sum(g, delta(1) * delta(3), delta(2) * delta(1), delta(3) * delta(2));
  const DeltaPoly cyc[3] = {c0, c1, c2};
  for (unsigned j = 0; j < 3; ++j) {
    auto lambda = rational_multiple(cyc[j], sol.rho[2 - j]);
    add("cyclic_" + std::to_string(j) + "_multiple_of_rho_" + std::to_string(2 - j), bool(lambda),
        lambda ? "factor " + lambda->get_str() : "not a rational multiple");
  }

  // Derivation of the shifted cyclic relations for k = 0, 1, 2.
  add("shifted_k0", shifted_cyclic(g, 0) == c0);
  add("shifted_k1", shifted_cyclic(g, 1) == a1 * c0 - c1);
  const DeltaPoly literal = c2 + a1 * c1 - a2 * c0;
  bool lit = literal == shifted_cyclic(g, 2);
  add("shifted_k2_literal_combination", lit,
      lit ? "" : "c2 + a1 c1 - a2 c0 carries (delta_1 + delta_3)^2 on the (alpha beta) term", false);
  add("shifted_k2", shifted_cyclic(g, 2) == c2 + a1 * (a1 * c0 - c1) - a2 * c0);

  // Three-term recurrence in k.
  bool rec = true;
  for (unsigned i = 1; i <= 3; ++i)
    rec = rec && delta(i).pow(3) == a1 * delta(i).pow(2) - a2 * delta(i) + a3;
  for (unsigned k = 0; k <= 3 && rec; ++k)
    rec = shifted_cyclic(g, k + 3) ==
          a1 * shifted_cyclic(g, k + 2) - a2 * shifted_cyclic(g, k + 1) + a3 * shifted_cyclic(g, k);
  add("recurrence", rec);

  // Membership certificates for the cyclic and shifted relations.
  RootIdeal ideal(sol.rho, 3);
  bool mem = true;
  std::string fail;
  for (unsigned j = 0; j < 3; ++j) {
    auto c = ideal.test(cyc[j]);
    if (!(c.member && c.verified)) mem = false, fail += " cyclic_" + std::to_string(j);
  }
  for (unsigned k = 0; k <= 4; ++k) {
    auto c = ideal.test(shifted_cyclic(g, k));
    if (!(c.member && c.verified)) mem = false, fail += " shifted_" + std::to_string(k);
  }
  for (unsigned l = 1; l <= 2; ++l) {
    DeltaPoly x = cyclic_sum(g, ga.pow(2 * l) * delta(2), al.pow(2 * l) * delta(3), be.pow(2 * l) * delta(1));
    auto c = ideal.test(x);
    if (!(c.member && c.verified)) mem = false, fail += " square_weighted_" + std::to_string(l);
  }
  add("ideal_certificates", mem, fail);

  // Parity: (alpha^r beta^s + alpha^s beta^r) gamma^t in independent a_1, delta_2, gamma is even in gamma.
  const GradedElement A = symbol(1), D2 = symbol(2), G = symbol(3);
  const GradedElement sa = (A - D2 * Q(3) - G) * frac(1, 2), sb = (D2 * Q(3) - A - G) * frac(1, 2);
  bool parity = true;
  const std::array<Triple3, 6> samples{{{3, 1, 2}, {2, 2, 0}, {5, 1, 0}, {4, 1, 1}, {3, 3, 2}, {6, 2, 4}}};
  for (auto [r, s, t] : samples) {
    GradedElement x = (sa.pow(r) * sb.pow(s) + sa.pow(s) * sb.pow(r)) * G.pow(t);
    Assignment flip{{gen_delta(3, kSymbolPart), -G}};
    parity = parity && substitute(x, flip) == x;
    // and the substitution really is alpha, beta, gamma
    Assignment back{{gen_delta(1, kSymbolPart), a1}, {gen_delta(2, kSymbolPart), delta(2)},
                    {gen_delta(3, kSymbolPart), ga}};
    parity = parity && substitute(x, back) == (al.pow(r) * be.pow(s) + al.pow(s) * be.pow(r)) * ga.pow(t);
  }
  add("gamma_parity", parity);
  return rep;
}

// ---------------------------------------------------------------------------
// Vanishing suites.

struct MonomialVerdict {
  std::string monomial;
  int real_degree = 0;
  bool by_reduction = false;
  bool by_membership = false;
  bool certificate_verified = false;
  size_t trace_length = 0;
  size_t f_terms = 0;
  nlohmann::json certificate;
};

struct VanishingSuiteReport {
  unsigned n = 0, g = 0;
  int real_lo = 0, real_hi = 0;
  std::vector<MonomialVerdict> verdicts;
  std::vector<MonomialVerdict> below;  // recorded only: just under the threshold
  bool rank2_generator_member = false;

  bool ok() const {
    if (verdicts.empty()) return false;
    for (auto& v : verdicts)
      if (!(v.by_membership && v.certificate_verified && (n != 3 || v.by_reduction))) return false;
    return n != 2 || rank2_generator_member;
  }

  nlohmann::json to_json(bool certificates = false) const {
    auto one = [&](const MonomialVerdict& v) {
      nlohmann::json j{{"monomial", v.monomial},
                       {"real_degree", v.real_degree},
                       {"by_reduction", v.by_reduction},
                       {"by_membership", v.by_membership},
                       {"certificate_verified", v.certificate_verified},
                       {"trace_length", v.trace_length},
                       {"f_terms", v.f_terms}};
      if (certificates) j["certificate"] = v.certificate;
      return j;
    };
    nlohmann::json a = nlohmann::json::array(), b = nlohmann::json::array();
    for (auto& v : verdicts) a.push_back(one(v));
    for (auto& v : below) b.push_back(one(v));
    return {{"n", n}, {"g", g}, {"real_degree_range", {real_lo, real_hi}}, {"ok", ok()}, {"monomials", a},
            {"below_threshold", b}};
  }
};

// n = 3: every Pontryagin monomial in real degrees [12g-8, real_hi] is shown
// zero by the rewriting engine and by ideal membership; n = 2: p_1^k for
// real degree 4k >= 4g lies in the rho ideal.
inline VanishingSuiteReport pontryagin_vanishing_suite(unsigned n, unsigned g, int real_hi) {
  VanishingSuiteReport rep;
  rep.n = n;
  rep.g = g;
  RhoSolution sol = solve_rho(n, g);
  RootIdeal ideal(sol.rho, n);
  if (n == 2) {
    rep.real_lo = int(4 * g);
    rep.real_hi = real_hi;
    TruncatedSeries p = total_pontryagin_roots(2, g, std::max(1, real_hi / 4));
    const DeltaPoly p1 = p.coeff(1);
    auto gen_cert = ideal.test((delta(1) - delta(2)).pow(2 * g));
    rep.rank2_generator_member = gen_cert.member && gen_cert.verified;
    for (unsigned k = g - 1; int(4 * k) <= real_hi; ++k) {
      MonomialVerdict v;
      v.monomial = "p1^" + std::to_string(k);
      v.real_degree = int(4 * k);
      auto c = ideal.test(p1.pow(k));
      v.by_membership = c.member;
      v.certificate_verified = c.verified;
      v.certificate = c.to_json();
      (k >= g ? rep.verdicts : rep.below).push_back(std::move(v));
    }
    return rep;
  }
  if (n != 3) throw std::invalid_argument("pontryagin_vanishing_suite: n in {2, 3}");
  rep.real_lo = int(12 * g - 8);
  rep.real_hi = real_hi;
  FReducer reducer(g);
  auto judge = [&](const PontryaginMonomial& m) {
    MonomialVerdict v;
    v.monomial = m.str();
    v.real_degree = m.real_degree();
    auto fs = f_decomposition(m);
    v.f_terms = fs.size();
    DeltaPoly expanded;
    bool all = true;
    for (auto& [t, c] : fs) {
      auto r = reducer.reduce(t[0], t[1], t[2]);
      v.trace_length += r.steps.size();
      all = all && r.zero;
      expanded += f_expr(t[0], t[1], t[2]) * c;
    }
    const DeltaPoly x = pontryagin_monomial_roots(m);
    if (expanded != x) throw std::logic_error("F decomposition does not re-expand to " + m.str());
    v.by_reduction = all;
    auto c = ideal.test(x);
    v.by_membership = c.member;
    v.certificate_verified = c.verified;
    v.certificate = c.to_json();
    return v;
  };
  for (auto& m : pontryagin_monomials(rep.real_lo, real_hi)) rep.verdicts.push_back(judge(m));
  int below_deg = rep.real_lo - 4;
  for (auto& m : pontryagin_monomials(below_deg, below_deg)) rep.below.push_back(judge(m));
  return rep;
}

// ---------------------------------------------------------------------------
// Non-nilpotence witness for n >= 4.

inline Assignment witness_subspace(unsigned n) {
  Assignment as;
  if (n % 2 == 0) {
    for (unsigned k = 1; 2 * k <= n; ++k) as[gen_delta(2 * k)] = delta(2 * k - 1);
  } else {
    as[gen_delta(2)] = delta(1);
    as[gen_delta(3)] = delta(1);
    for (unsigned k = 2; 2 * k + 1 <= n; ++k) as[gen_delta(2 * k + 1)] = delta(2 * k);
  }
  return as;
}

// The product form of the total class on the witness subspace.
inline TruncatedSeries witness_product_form(unsigned n, unsigned g, int cap) {
  const long gbar = long(g) - 1;
  TruncatedSeries p = TruncatedSeries::constant(GradedElement(1L), 0, cap);
  auto sq = [](const GradedElement& x) { return x * x; };
  const unsigned m = n / 2;
  if (n % 2 == 0) {
    for (unsigned k = 1; k <= m; ++k)
      for (unsigned l = k + 1; l <= m; ++l)
        p = p * binomial_factor(sq(delta(2 * k - 1) - delta(2 * l - 1)), 8 * gbar, cap);
  } else {
    for (unsigned k = 2; k <= m; ++k) p = p * binomial_factor(sq(delta(1) - delta(2 * k)), 12 * gbar, cap);
    for (unsigned k = 2; k <= m; ++k)
      for (unsigned l = k + 1; l <= m; ++l)
        p = p * binomial_factor(sq(delta(2 * k) - delta(2 * l)), 8 * gbar, cap);
  }
  return p;
}

struct WitnessReport {
  unsigned n = 0, g = 0;
  int r_max = 0;
  bool rho_vanish = false;
  std::vector<bool> p_nonzero;  // index r = 1..r_max
  bool product_form = false;
  bool ok() const {
    if (!rho_vanish || !product_form) return false;
    for (bool b : p_nonzero)
      if (!b) return false;
    return true;
  }
  nlohmann::json to_json() const {
    return {{"n", n}, {"g", g}, {"r_max", r_max}, {"rho_vanish", rho_vanish},
            {"p_nonzero", p_nonzero}, {"product_form", product_form}, {"ok", ok()}};
  }
};

inline WitnessReport nonnilpotence_witness(unsigned n, unsigned g, int r_max) {
  if (n < 4) throw std::invalid_argument("nonnilpotence_witness: n >= 4 required");
  WitnessReport rep;
  rep.n = n;
  rep.g = g;
  rep.r_max = r_max;
  const Assignment as = witness_subspace(n);
  RhoSolution sol = solve_rho(n, g);
  rep.rho_vanish = true;
  for (auto& r : sol.rho)
    if (!substitute(r, as).is_zero()) rep.rho_vanish = false;
  if (!rep.rho_vanish) throw std::logic_error("nonnilpotence_witness: rho does not vanish on the subspace");
  TruncatedSeries p = total_pontryagin_roots(n, g, r_max).map([&](const GradedElement& x) { return substitute(x, as); });
  for (int r = 1; r <= r_max; ++r) rep.p_nonzero.push_back(!p.coeff(r).is_zero());
  rep.product_form = p == witness_product_form(n, g, r_max);
  return rep;
}

// ---------------------------------------------------------------------------
// Phi = Psi_full * Psi*_full and its level -1 decomposition.

// Coefficient of prod_s b_1^s in each coefficient, after rebasing so that the
// remaining generators carry no b_1; the result vanishes above t^{hi - g}.
inline TruncatedSeries full_coefficient_series(const TruncatedSeries& ps, unsigned n, unsigned g) {
  const auto uni = b1_universe(g);
  TruncatedSeries out = ps.map([&](const GradedElement& x) { return odd_coefficient(rebase(x, n, g), uni); });
  for (int k = out.hi(); k > out.hi() - int(g) && k >= out.lo(); --k)
    if (!out.coeff(k).is_zero()) throw std::logic_error("full coefficient above t^{top - g}");
  return out.restrict_window(out.lo(), out.hi() - int(g));
}

// Same extraction on a stratum, against the V classes.
inline TruncatedSeries full_coefficient_series(const TruncatedSeries& ps, const StratumType& mu, unsigned g) {
  const auto uni = v_universe(g);
  TruncatedSeries out = ps.map([&](const GradedElement& x) { return odd_coefficient(to_vw(x, mu, g), uni); });
  for (int k = out.hi(); k > out.hi() - int(g) && k >= out.lo(); --k)
    if (!out.coeff(k).is_zero()) throw std::logic_error("full coefficient above t^{top - g}");
  return out.restrict_window(out.lo(), out.hi() - int(g));
}

struct PhiRelations {
  ModuliConfig config;
  TruncatedSeries phi;
  std::vector<GradedElement> rho;  // rho_{-1}^0..rho_{-1}^{n-1}
  nlohmann::json to_json() const {
    nlohmann::json r = nlohmann::json::array();
    for (size_t k = 0; k < rho.size(); ++k) r.push_back({{"k", k}, {"element", relcalc::to_json(rho[k])}});
    return {{"config", config.to_json()}, {"rho", r}};
  }
};

inline PhiRelations phi_relations(const ModuliConfig& c) {
  const unsigned n = unsigned(c.n), g = unsigned(c.g);
  const int top = c.rank_push(), top_dual = c.rank_push_dual(), G = int(g);
  // Phi is needed down to t^{-n}; each full coefficient has degree top - g.
  TruncatedSeries ps = full_coefficient_series(psi(c, -int(n) - (top_dual - G)), n, g);
  TruncatedSeries pd = full_coefficient_series(psi_dual(c, -int(n) - (top - G)), n, g);
  PhiRelations out;
  out.config = c;
  out.phi = ps * pd;
  if (out.phi.lo() > -int(n)) throw WindowError("phi_relations: window shortfall");
  out.rho = decompose_level(out.phi, omega_tilde_coeffs(n, 0), -1);
  for (unsigned k = 0; k < n; ++k)
    if (!out.rho[k].is_zero() && !out.rho[k].is_homogeneous(int(4 * g * (n - 1) - 2 * k)))
      throw std::logic_error("phi_relations: degree audit failed for k = " + std::to_string(k));
  return out;
}

// A(t) = sum_p prod_{q != p} (t + a_1^q) as monic-degree coefficients (A = Omega~').
inline std::vector<GradedElement> a_polynomial(const StratumType& mu) {
  const auto top = omega_tilde_coeffs(mu);
  const int n = int(top.size()) - 1;
  std::vector<GradedElement> A(static_cast<size_t>(n));
  for (int k = 0; k < n; ++k) A[size_t(k)] = top[size_t(k)] * Q(n - k);
  return A;
}

// (-1)^g A^{2g} / (n^{4g} Omega~_mu) at infinity, exact down to t^lo.
inline TruncatedSeries phi_closed_form(const StratumType& mu, unsigned g, int lo) {
  const auto top = omega_tilde_coeffs(mu);
  const int n = int(top.size()) - 1;
  const int deg = 2 * int(g) * (n - 1) - n;
  // generous widths; the product is then cut back to [lo, deg]
  const int width = deg - lo + 2 * n;
  auto A = a_polynomial(mu);
  TruncatedSeries As(n - 1 - width, n - 1, true);
  for (int k = 0; k < n; ++k) As.set(n - 1 - k, A[size_t(k)]);
  TruncatedSeries w = monic_at_infinity(top, width);
  TruncatedSeries out = As.pow(int(2 * g)) * w.inverse() * rho_scale(unsigned(n), g);
  return out.restrict_window(lo, deg);
}

struct PhiRestrictionReport {
  StratumType mu;
  unsigned g = 0;
  bool stratum_path = false;  // restricted Psi_full * Psi*_full equals the closed form
  std::optional<int> first_difference;
  bool leading_coefficient = false;  // A(t) has leading coefficient n
  bool rho_system = false;           // rho^{k,mu} from the closed form solve the system at delta_i = a_1^i
  std::optional<bool> base_path;     // restricted base rho equals rho^{k,mu}, when supplied
  bool ok() const { return stratum_path && leading_coefficient && rho_system && base_path.value_or(true); }
  nlohmann::json to_json() const {
    nlohmann::json j{{"mu", mu.str()}, {"g", g}, {"stratum_path", stratum_path},
                     {"leading_coefficient", leading_coefficient}, {"rho_system", rho_system}, {"ok", ok()}};
    if (first_difference) j["first_difference"] = *first_difference;
    if (base_path) j["base_path"] = *base_path;
    return j;
  }
};

inline TruncatedSeries phi_on_stratum(const StratumType& mu, unsigned g) {
  const int n = int(mu.rank()), G = int(g);
  int top = 0, top_dual = 0;
  for (unsigned p = 1; p <= mu.size(); ++p) {
    top += psi_top(part_spec(mu, p), g, Flavor::Mumford);
    top_dual += psi_top(part_spec(mu, p), g, Flavor::Dual);
  }
  TruncatedSeries ps = full_coefficient_series(psi_stratum(mu, g, -n - (top_dual - G), Flavor::Mumford), mu, g);
  TruncatedSeries pd = full_coefficient_series(psi_stratum(mu, g, -n - (top - G), Flavor::Dual), mu, g);
  return ps * pd;
}

// delta_i -> a_1^i on a Delta stratum.
inline Assignment roots_to_parts(unsigned n) {
  Assignment as;
  for (unsigned i = 1; i <= n; ++i) as[gen_delta(i)] = gen(gen_a(1, i));
  return as;
}

inline PhiRestrictionReport phi_restriction_check(const StratumType& mu, unsigned g,
                                                  const PhiRelations* base = nullptr) {
  if (!mu.is_delta()) throw std::invalid_argument("phi_restriction_check: Delta stratum required");
  const unsigned n = unsigned(mu.rank());
  PhiRestrictionReport rep;
  rep.mu = mu;
  rep.g = g;
  rep.leading_coefficient = a_polynomial(mu).front() == GradedElement(long(n));
  TruncatedSeries lhs = phi_on_stratum(mu, g);
  if (lhs.lo() > -int(n)) throw WindowError("phi_restriction_check: window shortfall");
  TruncatedSeries rhs = phi_closed_form(mu, g, lhs.lo());
  if (lhs.hi() != rhs.hi()) throw std::logic_error("phi_restriction_check: top degrees differ");
  rep.first_difference = TruncatedSeries::first_difference(lhs, rhs);
  rep.stratum_path = !rep.first_difference;

  auto rho_mu = decompose_level(rhs, omega_tilde_coeffs(mu), -1);
  RhoSolution sol = solve_rho(n, g);
  const Assignment as = roots_to_parts(n);
  rep.rho_system = true;
  for (unsigned k = 0; k < n; ++k) rep.rho_system = rep.rho_system && substitute(sol.rho[k], as) == rho_mu[k];
  if (base) {
    bool same = true;
    for (unsigned k = 0; k < n; ++k) {
      GradedElement r = to_vw(restrict(base->rho[k], mu, g), mu, g);
      same = same && r == rho_mu[k];
    }
    rep.base_path = same;
  }
  return rep;
}

}  // namespace relcalc
