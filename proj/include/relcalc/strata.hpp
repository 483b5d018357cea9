#pragma once

#include <algorithm>
#include <functional>
#include <mutex>
#include <sstream>
#include <string>
#include <vector>

#include "relcalc/chern.hpp"

namespace relcalc {

struct StratumPart {
  long d = 0;
  unsigned n = 1;
  friend bool operator==(const StratumPart& x, const StratumPart& y) { return x.d == y.d && x.n == y.n; }
};

// Harder-Narasimhan type ((d_1,n_1),...,(d_P,n_P)) with strictly decreasing slopes.
struct StratumType {
  std::vector<StratumPart> parts;

  StratumType() = default;
  explicit StratumType(std::vector<StratumPart> p) : parts(std::move(p)) { validate(); }

  unsigned size() const { return unsigned(parts.size()); }
  unsigned rank() const {
    unsigned n = 0;
    for (auto& p : parts) n += p.n;
    return n;
  }
  long degree() const {
    long d = 0;
    for (auto& p : parts) d += p.d;
    return d;
  }
  bool is_semistable() const { return parts.size() == 1; }
  bool is_delta() const {
    return std::all_of(parts.begin(), parts.end(), [](auto& p) { return p.n == 1; });
  }
  const StratumPart& part(unsigned p) const { return parts.at(p - 1); }  // 1-based
  Q slope(unsigned p) const { return frac(part(p).d, long(part(p).n)); }

  void validate() const {
    if (parts.empty()) throw std::invalid_argument("empty stratum type");
    if (parts.size() > 15) throw std::invalid_argument("at most 15 parts are supported");
    for (size_t i = 0; i < parts.size(); ++i) {
      if (parts[i].n == 0) throw std::invalid_argument("part rank must be positive");
      if (i && !(frac(parts[i - 1].d, parts[i - 1].n) > frac(parts[i].d, parts[i].n)))
        throw std::invalid_argument("slopes must be strictly decreasing: " + str());
    }
  }

  // Slopes repeated with multiplicity n_p.
  std::vector<Q> slope_vector() const {
    std::vector<Q> v;
    for (unsigned p = 1; p <= size(); ++p)
      for (unsigned k = 0; k < part(p).n; ++k) v.push_back(slope(p));
    return v;
  }

  std::string str() const {
    std::string s;
    for (auto& p : parts) s += (s.empty() ? "" : ",") + std::to_string(p.d) + "/" + std::to_string(p.n);
    return s;
  }

  // "3/1,2/1" as degree/rank pairs.
  static StratumType parse(const std::string& text) {
    std::vector<StratumPart> ps;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
      auto slash = item.find('/');
      if (slash == std::string::npos) throw std::invalid_argument("expected d/n in '" + item + "'");
      StratumPart p;
      p.d = std::stol(item.substr(0, slash));
      long n = std::stol(item.substr(slash + 1));
      if (n <= 0) throw std::invalid_argument("part rank must be positive");
      p.n = unsigned(n);
      ps.push_back(p);
    }
    return StratumType(ps);
  }

  nlohmann::json to_json() const {
    nlohmann::json a = nlohmann::json::array();
    for (auto& p : parts) a.push_back({{"d", p.d}, {"n", p.n}});
    return a;
  }

  friend bool operator==(const StratumType& x, const StratumType& y) { return x.parts == y.parts; }
  friend bool operator!=(const StratumType& x, const StratumType& y) { return !(x == y); }
};

// Complex codimension sum_{i>j} (n_i d_j - n_j d_i + n_i n_j gbar).
inline long codim(const StratumType& mu, unsigned g) {
  const long gbar = long(g) - 1;
  long c = 0;
  for (size_t i = 0; i < mu.parts.size(); ++i)
    for (size_t j = 0; j < i; ++j) {
      const auto &pi = mu.parts[i], &pj = mu.parts[j];
      c += long(pi.n) * pj.d - long(pj.n) * pi.d + long(pi.n * pj.n) * gbar;
    }
  return c;
}

// All types of rank n and degree d with codimension <= codim_max. Every
// prefix cut (A | B) bounds d_A through n d_A - n_A d + n_A n_B gbar <= codim_max,
// since coarsening a type never increases its codimension.
inline std::vector<StratumType> enumerate_types(int n, long d, unsigned g, long codim_max,
                                                bool include_semistable = false) {
  const long gbar = long(g) - 1;
  std::vector<StratumType> out;
  std::vector<StratumPart> cur;
  std::function<void(unsigned, long)> rec = [&](unsigned n_used, long d_used) {
    if (n_used == unsigned(n)) {
      if (d_used != d) return;
      if (cur.size() == 1 && !include_semistable) return;
      StratumType t(cur);
      if (codim(t, g) <= codim_max) out.push_back(t);
      return;
    }
    for (unsigned np = 1; n_used + np <= unsigned(n); ++np) {
      const unsigned nA = n_used + np;
      const bool last = nA == unsigned(n);
      long lo, hi;
      if (last) {
        lo = hi = d - d_used;
      } else {
        const long nB = n - long(nA);
        // n_A d / n < d_A <= (codim_max + n_A d - n_A n_B gbar) / n
        lo = (long(nA) * d) / n;
        while (lo * n <= long(nA) * d) ++lo;
        long num = codim_max + long(nA) * d - long(nA) * nB * gbar;
        hi = num >= 0 ? num / n : -((-num + n - 1) / n);
        lo -= d_used, hi -= d_used;
      }
      for (long dp = lo; dp <= hi; ++dp) {
        if (!cur.empty() && !(frac(cur.back().d, cur.back().n) > frac(dp, long(np)))) continue;
        cur.push_back({dp, np});
        rec(nA, d_used + dp);
        cur.pop_back();
      }
    }
  };
  rec(0, 0);
  return out;
}

// sigma <= tau: the partial sums of tau's slope vector dominate sigma's.
inline bool dominance_leq(const StratumType& sigma, const StratumType& tau) {
  if (sigma.rank() != tau.rank() || sigma.degree() != tau.degree())
    throw std::invalid_argument("dominance_leq: types of different (n, d)");
  auto s = sigma.slope_vector(), t = tau.slope_vector();
  Q ps = 0, pt = 0;
  for (size_t i = 0; i < s.size(); ++i) {
    ps += s[i], pt += t[i];
    if (ps > pt) return false;
  }
  return true;
}

// nu precedes mu: at the last index T where the slope vectors differ, nu_T > mu_T.
inline bool total_order_prec(const StratumType& nu, const StratumType& mu) {
  if (nu.rank() != mu.rank() || nu.degree() != mu.degree())
    throw std::invalid_argument("total_order_prec: types of different (n, d)");
  auto a = nu.slope_vector(), b = mu.slope_vector();
  for (size_t i = a.size(); i-- > 0;)
    if (a[i] != b[i]) return a[i] > b[i];
  return false;
}

inline StratumType semistable_type(int n, long d) { return StratumType({{d, unsigned(n)}}); }

inline StratumType predecessor(const StratumType& mu, std::vector<StratumType> universe) {
  std::sort(universe.begin(), universe.end(), total_order_prec);
  auto it = std::find(universe.begin(), universe.end(), mu);
  if (it == universe.end()) throw std::invalid_argument("predecessor: type not in universe");
  if (it == universe.begin()) throw std::invalid_argument("predecessor: no type precedes " + mu.str());
  return *std::prev(it);
}

// ---------------------------------------------------------------------------
// Restriction to a stratum. Part p of mu owns generators with part index p.

namespace detail {

// Kunneth components (1, alpha_s, omega) of a class in H*(stratum) (x) H*(C).
struct Triple {
  GradedElement x;
  std::vector<GradedElement> y;  // s = 1..2g stored at s-1
  GradedElement z;
};

// alpha_s alpha_{s+g} = omega = -alpha_{s+g} alpha_s; an odd coefficient passing
// an odd alpha picks up a sign, which the ordering y_s y'_{s+g} absorbs.
inline Triple triple_mul(const Triple& u, const Triple& v, unsigned g) {
  Triple w;
  w.x = u.x * v.x;
  w.y.resize(2 * g);
  for (unsigned s = 0; s < 2 * g; ++s) w.y[s] = u.x * v.y[s] + u.y[s] * v.x;
  Accumulator z;
  z.add_product(u.x, v.z);
  z.add_product(u.z, v.x);
  for (unsigned s = 0; s < g; ++s) {
    z.add_product(u.y[s], v.y[s + g]);
    z.add_product(u.y[s + g], v.y[s], -1);
  }
  w.z = z.finalize();
  return w;
}

}  // namespace detail

// a_r, b_r^s, f_r (r >= 2) sent to the t^r components of prod_p c(V_p), with f^p_1 = d_p.
inline Assignment restriction_map(const StratumType& mu, unsigned g) {
  const unsigned n = mu.rank();
  using detail::Triple;
  auto zero_triple = [&] {
    Triple t;
    t.y.assign(2 * g, GradedElement());
    return t;
  };
  std::vector<Triple> total(n + 1, zero_triple());
  total[0].x = GradedElement(1L);
  for (unsigned p = 1; p <= mu.size(); ++p) {
    const unsigned np = mu.part(p).n;
    std::vector<Triple> fac(np + 1, zero_triple());
    fac[0].x = GradedElement(1L);
    for (unsigned r = 1; r <= np; ++r) {
      fac[r].x = gen(gen_a(r, p));
      for (unsigned s = 1; s <= 2 * g; ++s) fac[r].y[s - 1] = gen(gen_b(r, s, p));
      fac[r].z = r == 1 ? GradedElement(mu.part(p).d) : gen(gen_f(r, p));
    }
    std::vector<Triple> next(n + 1, zero_triple());
    for (unsigned i = 0; i <= n; ++i)
      for (unsigned j = 0; j <= np && i + j <= n; ++j) {
        Triple prod = detail::triple_mul(total[i], fac[j], g);
        next[i + j].x += prod.x;
        for (unsigned s = 0; s < 2 * g; ++s) next[i + j].y[s] += prod.y[s];
        next[i + j].z += prod.z;
      }
    total = std::move(next);
  }
  if (total[1].z != GradedElement(mu.degree())) throw std::logic_error("restriction: f_1 image is not d");
  Assignment as;
  for (unsigned r = 1; r <= n; ++r) {
    as[gen_a(r)] = total[r].x;
    for (unsigned s = 1; s <= 2 * g; ++s) as[gen_b(r, s)] = total[r].y[s - 1];
    if (r >= 2) as[gen_f(r)] = total[r].z;
  }
  return as;
}

inline bool uses_rebased_generators(const GradedElement& x) {
  for (const auto& gg : generators(x))
    if (gg.family() == Family::RB || gg.family() == Family::RF) return true;
  return false;
}

// Ring homomorphism from the base ring to the stratum context of mu. Rebased
// generators are first written back in the original ones.
inline GradedElement restrict(const GradedElement& x, const StratumType& mu, unsigned g) {
  static std::mutex m;
  static std::map<std::pair<std::string, unsigned>, Assignment> cache;
  Assignment as;
  {
    std::lock_guard<std::mutex> lock(m);
    auto key = std::make_pair(mu.str(), g);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, restriction_map(mu, g)).first;
    as = it->second;
  }
  for (const auto& gg : generators(x))
    if ((gg.family() == Family::RB || gg.family() == Family::RF) && gg.part() != 0)
      throw std::invalid_argument("restrict: input must be over base generators");
  if (!uses_rebased_generators(x)) return substitute(x, as);
  // Compose with the generating set change instead of expanding x first.
  const unsigned n = mu.rank();
  Assignment composite = as;
  for (unsigned r = 2; r <= n; ++r) {
    composite[gen_rf(r)] = substitute(rebased_f_definition(n, g, r), as);
    for (unsigned s = 1; s <= 2 * g; ++s) composite[gen_rb(r, s)] = substitute(rebased_b_definition(n, r, s), as);
  }
  return substitute(x, composite);
}

inline PartSpec part_spec(const StratumType& mu, unsigned p) { return {mu.part(p).n, mu.part(p).d, p}; }

// prod_p of the per-part Chern series; equals restrict() applied to the base series.
inline TruncatedSeries restrict_pushforward(const StratumType& mu, unsigned g, int hi,
                                            Flavor fl = Flavor::Mumford) {
  TruncatedSeries c = chern_series(part_spec(mu, 1), g, hi, fl);
  for (unsigned p = 2; p <= mu.size(); ++p) c = c * chern_series(part_spec(mu, p), g, hi, fl);
  return c;
}

inline TruncatedSeries restrict_series(const TruncatedSeries& s, const StratumType& mu, unsigned g) {
  return s.map([&](const GradedElement& x) { return restrict(x, mu, g); });
}

// Omega~_mu = prod_p Omega~_p as monic coefficients.
inline std::vector<GradedElement> omega_tilde_coeffs(const StratumType& mu) {
  std::vector<GradedElement> top{GradedElement(1L)};
  for (unsigned p = 1; p <= mu.size(); ++p) {
    auto f = omega_tilde_coeffs(mu.part(p).n, p);
    std::vector<GradedElement> next(top.size() + f.size() - 1);
    for (size_t i = 0; i < top.size(); ++i)
      for (size_t j = 0; j < f.size(); ++j) next[i + j] += top[i] * f[j];
    top = std::move(next);
  }
  return top;
}

// prod_p Psi_p (or Psi*_p), exact down to t^lo.
inline TruncatedSeries psi_stratum(const StratumType& mu, unsigned g, int lo, Flavor fl) {
  int top = 0;
  for (unsigned p = 1; p <= mu.size(); ++p) top += psi_top(part_spec(mu, p), g, fl);
  TruncatedSeries acc;
  for (unsigned p = 1; p <= mu.size(); ++p) {
    auto spec = part_spec(mu, p);
    // the other factors are monic of total degree top - top_p
    int lo_p = lo - (top - psi_top(spec, g, fl));
    TruncatedSeries s = psi_series(spec, g, lo_p, fl);
    acc = p == 1 ? s : acc * s;
  }
  return acc.restrict_window(std::max(acc.lo(), lo), acc.hi());
}

// b_1^{p,s} = (n_p/n)(V_s + n W_p^s - sum_j n_j W_j^s) with W_P = 0, so that
// V_s is the restriction of b_1^s and W_p^s = b_1^{p,s}/n_p - b_1^{P,s}/n_P.
inline Assignment vw_basis(const StratumType& mu, unsigned g) {
  const long n = mu.rank();
  const unsigned P = mu.size();
  Assignment as;
  for (unsigned s = 1; s <= 2 * g; ++s) {
    GradedElement sum;
    for (unsigned j = 1; j < P; ++j) sum += gen(gen_w(j, s)) * Q(long(mu.part(j).n));
    for (unsigned p = 1; p <= P; ++p) {
      GradedElement wp = p < P ? gen(gen_w(p, s)) * Q(n) : GradedElement();
      as[gen_b(1, s, p)] = (gen(gen_v(s)) + wp - sum) * frac(long(mu.part(p).n), n);
    }
  }
  return as;
}

// Parts of rank >= 2 are first rebased on their own, which leaves b_1^{p,s}
// as the only classes moved by a common shift of all root classes.
inline GradedElement to_vw(const GradedElement& x, const StratumType& mu, unsigned g) {
  GradedElement y = x;
  for (unsigned p = 1; p <= mu.size(); ++p)
    if (mu.part(p).n >= 2) y = rebase(y, mu.part(p).n, g, p);
  return substitute(y, vw_basis(mu, g));
}

inline std::vector<Gen> v_universe(unsigned g) {
  std::vector<Gen> u;
  for (unsigned s = 1; s <= 2 * g; ++s) u.push_back(gen_v(s));
  return u;
}

// ---------------------------------------------------------------------------
// Normal bundle and Euler class.

struct EulerError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Log coefficients of c(N_mu)(t) from N_mu = -pi_!(sum_{I<J} V_I^* (x) V_J):
// for each pair of roots, exponent gbar + W_k^I - W_l^J on (1 + (delta_l^J - delta_k^I) t)
// and exp(-Xi t / (1 + (delta_l^J - delta_k^I) t)).
inline TruncatedSeries normal_chern(const StratumType& mu, unsigned g, int hi) {
  const unsigned P = mu.size();
  const long gbar = long(g) - 1;
  struct Root {
    GradedElement delta;
    SplitElement W;
    std::vector<SplitElement> beta;
  };
  std::vector<std::vector<Root>> roots_of(P + 1);
  for (unsigned p = 1; p <= P; ++p) {
    const unsigned np = mu.part(p).n;
    for (unsigned k = 1; k <= np; ++k) {
      Root r;
      r.delta = gen(gen_delta(k, p));
      r.W = build_W_X(np, k, g, mu.part(p).d, p).W;
      for (unsigned s = 1; s <= 2 * g; ++s) r.beta.push_back(root_odd(np, k, s, p));
      roots_of[p].push_back(std::move(r));
    }
  }
  std::vector<SplitElement> L(static_cast<size_t>(hi + 1));
  for (unsigned I = 1; I <= P; ++I)
    for (unsigned J = I + 1; J <= P; ++J)
      for (auto& rk : roots_of[I])
        for (auto& rl : roots_of[J]) {
          GradedElement y = rl.delta - rk.delta;
          SplitElement E = SplitElement(GradedElement(gbar)) + rk.W - rl.W;
          SplitElement Xi;
          for (unsigned s = 0; s < g; ++s) Xi += (rk.beta[s] - rl.beta[s]) * (rk.beta[s + g] - rl.beta[s + g]);
          GradedElement ypow(1L);
          for (int m = 1; m <= hi; ++m) {
            const Q sign = (m - 1) % 2 ? -1 : 1;
            // -Xi (-1)^{m-1} y^{m-1}
            L[size_t(m)] += Xi * SplitElement(ypow * (-sign));
            ypow = ypow * y;
            L[size_t(m)] += E * SplitElement(ypow * (sign * frac(1, m)));
          }
        }
  TruncatedSeries log_part(0, hi);
  for (int m = 1; m <= hi; ++m) {
    GradedElement v;
    SplitElement cur = L[size_t(m)];
    for (unsigned p = 1; p <= P; ++p) {
      v = symmetrize_to_base(cur, mu.part(p).n, p);
      cur = SplitElement(v);
    }
    log_part.set(m, v);
  }
  TruncatedSeries c = log_part.exp();
  c.set_grading(0);
  return c;
}

// Top Chern class of the normal bundle: the t^{d_mu} coefficient.
inline GradedElement euler_class(const StratumType& mu, unsigned g) {
  const long dm = codim(mu, g);
  if (dm <= 0) throw EulerError("euler_class: semistable or invalid type " + mu.str());
  GradedElement e = normal_chern(mu, g, int(dm)).coeff(int(dm));
  if (e.is_zero()) throw EulerError("euler_class vanishes for " + mu.str());
  return e;
}

// ---------------------------------------------------------------------------
// Vanishing of restricted relations.

// sigma_r|mu vanishes when r < d_P/n_P - 2g + 1; tau_r|mu when r < 2 gbar - d_1/n_1.
inline int vanishing_bound(const StratumType& mu, unsigned g, Flavor fl) {
  // largest integer r satisfying the strict bound
  const long G = long(g);
  Q b = fl == Flavor::Mumford ? mu.slope(mu.size()) - Q(2 * G - 1) : Q(2 * (G - 1)) - mu.slope(1);
  mpz_class fl_ = b.get_num() / b.get_den();  // truncation
  long f = fl_.get_si();
  if (Q(f) > b) --f;
  if (Q(f) == b) --f;
  return int(f);
}

// On a Delta stratum each restricted factor is (t + a_p)^{e_p} exp(+-xi_p/(t + a_p)),
// so sigma_r^{n-k}|mu = sum_m prod_p (+-xi_p)^{m_p}/m_p! * P_{m,k}(a), where the
// P_{m,k} are polynomials in the a_1^p and the xi-products over distinct m are
// linearly independent. Returns the P_{m,k}, indexed by m then k.
struct DeltaDecomposition {
  std::vector<std::vector<unsigned>> m;
  std::vector<std::vector<GradedElement>> sigma;  // [index of m][k] for sigma^k, k = 0..n-1
};

inline std::vector<GradedElement> elementary_in_parts(const StratumType& mu) {
  // e_r(a_1^1, ..., a_1^P)
  std::vector<GradedElement> e{GradedElement(1L)};
  for (unsigned p = 1; p <= mu.size(); ++p) {
    std::vector<GradedElement> next(e.size() + 1);
    for (size_t i = 0; i < e.size(); ++i) {
      next[i] += e[i];
      next[i + 1] += e[i] * gen(gen_a(1, p));
    }
    e = std::move(next);
  }
  return e;
}

// (t + a)^e at infinity, exact on [lo, e].
inline TruncatedSeries linear_power_at_infinity(const GradedElement& a, long e, int lo) {
  TruncatedSeries s(std::min<int>(lo, int(e)), int(e), true);
  Q binom = 1;
  GradedElement apow(1L);
  for (long j = 0; e - j >= s.lo(); ++j) {
    if (j > 0) {
      binom = binom * Q(e - j + 1) / Q(j);
      apow = apow * a;
    }
    s.set(int(e - j), apow * binom);
  }
  return s;
}

inline DeltaDecomposition delta_decomposition(const StratumType& mu, unsigned g, int r, Flavor fl) {
  if (!mu.is_delta()) throw std::invalid_argument("delta_decomposition: not a Delta stratum");
  const unsigned P = mu.size(), n = P;
  const long gbar = long(g) - 1;
  auto e = elementary_in_parts(mu);
  DeltaDecomposition out;
  std::vector<unsigned> m(P, 0);
  while (true) {
    // exponents e_p = top_p - m_p - r - 1
    std::vector<long> ex(P);
    long total = 0;
    for (unsigned p = 0; p < P; ++p) {
      long top = fl == Flavor::Mumford ? mu.parts[p].d - gbar : 3 * gbar + 1 - mu.parts[p].d;
      ex[p] = top - long(m[p]) - r - 1;
      total += ex[p];
    }
    // need down to t^{-n}; each factor is monic, so others contribute at most total - ex_p
    TruncatedSeries prod;
    for (unsigned p = 0; p < P; ++p) {
      int lo = int(-long(n) - (total - ex[p]));
      auto f = linear_power_at_infinity(gen(gen_a(1, p + 1)), ex[p], lo);
      prod = p == 0 ? f : prod * f;
    }
    std::vector<GradedElement> sig(n);
    for (unsigned k = 1; k <= n; ++k) {
      Accumulator acc;
      for (unsigned i = 1; i <= k; ++i) acc.add_product(e[k - i], prod.coeff_or_zero(-int(i)));
      sig[n - k] = acc.finalize();
    }
    out.m.push_back(m);
    out.sigma.push_back(std::move(sig));
    unsigned p = 0;
    while (p < P && m[p] == g) m[p++] = 0;
    if (p == P) break;
    ++m[p];
  }
  return out;
}

// The restricted sigma_r^k assembled from the decomposition.
inline std::vector<GradedElement> assemble_delta(const DeltaDecomposition& dd, const StratumType& mu,
                                                 unsigned g, Flavor fl) {
  const unsigned P = mu.size();
  std::vector<GradedElement> out(P);
  for (size_t i = 0; i < dd.m.size(); ++i) {
    GradedElement w(1L);
    for (unsigned p = 0; p < P; ++p) {
      unsigned mp = dd.m[i][p];
      Q c = 1;
      for (unsigned j = 2; j <= mp; ++j) c /= j;
      if (fl == Flavor::Dual && mp % 2) c = -c;
      w = w * xi(1, 1, g, p + 1, p + 1).pow(mp) * c;
    }
    for (unsigned k = 0; k < P; ++k) out[k] += w * dd.sigma[i][k];
  }
  return out;
}

// Restricted sigma_r^k (tau) from the stratum-side Psi_mu, any stratum type.
inline std::vector<GradedElement> restricted_level(const StratumType& mu, unsigned g, int r, Flavor fl) {
  const int n = int(mu.rank());
  TruncatedSeries ps = psi_stratum(mu, g, psi_lo_for(n, r), fl);
  return decompose_level(ps, omega_tilde_coeffs(mu), r);
}

struct VanishingFailure {
  int r = 0;
  unsigned k = 0;
  std::string residue;
};

struct VanishingReport {
  StratumType mu;
  Flavor flavor = Flavor::Mumford;
  int bound = 0;  // largest r asserted
  int r_min = 0;
  std::string method;
  bool ok = true;
  std::vector<VanishingFailure> failures;
  // boundary level r = bound + 1: whether it is nonzero (not asserted)
  bool boundary_nonzero = false;

  nlohmann::json to_json() const {
    nlohmann::json f = nlohmann::json::array();
    for (auto& x : failures) f.push_back({{"r", x.r}, {"k", x.k}, {"residue", x.residue}});
    return {{"mu", mu.str()},        {"flavor", flavor_name(flavor)}, {"r_max_asserted", bound},
            {"r_min", r_min},        {"method", method},              {"ok", ok},
            {"failures", f},         {"boundary_nonzero", boundary_nonzero}};
  }
};

// Asserts sigma_r^k|mu = 0 (hence sigma_{r,S}^k|mu = 0 for every S) for
// r_min <= r <= bound. Delta strata use the factorized evaluation; other
// types use the stratum-side series.
inline VanishingReport verify_vanishing(const StratumType& mu, unsigned g, Flavor fl, int depth = 2) {
  VanishingReport rep;
  rep.mu = mu;
  rep.flavor = fl;
  rep.bound = vanishing_bound(mu, g, fl);
  rep.r_min = rep.bound - depth + 1;
  rep.method = mu.is_delta() ? "delta-factorized" : "stratum-series";
  auto level = [&](int r) -> std::vector<std::vector<GradedElement>> {
    if (mu.is_delta()) return delta_decomposition(mu, g, r, fl).sigma;
    return {restricted_level(mu, g, r, fl)};
  };
  for (int r = rep.bound; r >= rep.r_min; --r) {
    auto blocks = level(r);
    for (auto& b : blocks)
      for (unsigned k = 0; k < b.size(); ++k)
        if (!b[k].is_zero()) {
          rep.ok = false;
          rep.failures.push_back({r, k, b[k].str()});
        }
  }
  for (auto& b : level(rep.bound + 1))
    for (auto& x : b)
      if (!x.is_zero()) rep.boundary_nonzero = true;
  return rep;
}

// ---------------------------------------------------------------------------
// Theta identity for a type whose last part has rank 1.

struct ThetaReport {
  StratumType mu;
  int D = 0;
  unsigned K = 0;
  bool shift_identity = false;   // C = sum_m xi^m/m! [t^{m-g}]((t-a)^{K-1} F)
  bool collapse_identity = false;  // xi^g [t^j] F = xi^g [t^j] theta
  bool theta_identity = false;   // C - residual = (-a)^{K-1} xi^g Theta / g!
  bool residual_zero = false;
  size_t residual_terms = 0;
  GradedElement lhs, Theta, residual;
  std::string detail;

  bool ok() const { return shift_identity && collapse_identity && theta_identity; }

  nlohmann::json to_json() const {
    return {{"mu", mu.str()},
            {"D", D},
            {"K", K},
            {"shift_identity", shift_identity},
            {"collapse_identity", collapse_identity},
            {"theta_identity", theta_identity},
            {"residual_zero", residual_zero},
            {"residual_terms", residual_terms},
            {"detail", detail}};
  }
};

inline int theta_D(const StratumType& mu, unsigned g) {
  return int(2 * (long(g) - 1) + 1 - mu.part(mu.size()).d);
}

// theta(t) = t^e prod_{p<P} prod_k (1 + x_k/t)^{W_k^p + gbar - d_P} exp(Xi_k/(t + x_k)),
// x_k = delta_k^p - a_1^P, e = d - n d_P + (n-1) gbar; exact on [e - width, e].
inline TruncatedSeries theta_series(const StratumType& mu, unsigned g, int width) {
  const unsigned P = mu.size();
  const long gbar = long(g) - 1, dP = mu.part(P).d;
  const long n = mu.rank();
  const long e = mu.degree() - n * dP + (n - 1) * gbar;
  GradedElement a = gen(gen_a(1, P));
  TruncatedSeries acc = TruncatedSeries::constant(GradedElement(1L), 0, width);
  for (unsigned p = 1; p < P; ++p) {
    const unsigned np = mu.part(p).n;
    std::vector<SplitElement> L(static_cast<size_t>(width + 1));
    for (unsigned k = 1; k <= np; ++k) {
      SplitElement E = build_W_X(np, k, g, mu.part(p).d, p).W + SplitElement(GradedElement(gbar - dP));
      SplitElement Xi;
      for (unsigned s = 1; s <= g; ++s)
        Xi += (root_odd(np, k, s, p) - SplitElement(gen(gen_b(1, s, P)))) *
              (root_odd(np, k, s + g, p) - SplitElement(gen(gen_b(1, s + g, P))));
      GradedElement x = gen(gen_delta(k, p)) - a;
      GradedElement xpow(1L);
      for (int m = 1; m <= width; ++m) {
        const Q sign = (m - 1) % 2 ? -1 : 1;
        L[size_t(m)] += Xi * SplitElement(xpow * sign);
        xpow = xpow * x;
        L[size_t(m)] += E * SplitElement(xpow * (sign * frac(1, m)));
      }
    }
    TruncatedSeries lp(0, width);
    for (int m = 1; m <= width; ++m) lp.set(m, symmetrize_to_base(L[size_t(m)], np, p));
    acc = acc * lp.exp();
  }
  return acc.reflect().shift(int(e));
}

inline ThetaReport theta_identity(const StratumType& mu, unsigned g, unsigned K) {
  const unsigned P = mu.size();
  if (P < 2 || mu.part(P).n != 1) throw std::invalid_argument("theta_identity needs n_P = 1 and P >= 2");
  const int n = int(mu.rank());
  if (K < 1 || int(K) > n) throw std::invalid_argument("theta_identity: K out of range");
  ThetaReport rep;
  rep.mu = mu;
  rep.K = K;
  const int D = theta_D(mu, g);
  rep.D = D;
  const GradedElement a = gen(gen_a(1, P));
  const GradedElement xiP = xi(1, 1, g, P, P);
  const int G = int(g);

  // Left side: [t^{-K}] prod_p Psi_p Omega~_mu^{D-1}.
  TruncatedSeries psm = psi_stratum(mu, g, psi_lo_for(n, -D) - 2 * n, Flavor::Mumford);
  rep.lhs = c_coefficients(psm, omega_tilde_coeffs(mu), -D)[K];

  // F(t) = prod_{p<P} Psi_p(t - a) Omega~_p(t - a)^{D-1}; needed down to t^{-g-n}.
  const int need_lo = -G - n - 1;
  TruncatedSeries Fq;
  int top_total = 0;
  for (unsigned p = 1; p < P; ++p)
    top_total += psi_top(part_spec(mu, p), g, Flavor::Mumford) + int(mu.part(p).n) * (D - 1);
  for (unsigned p = 1; p < P; ++p) {
    auto spec = part_spec(mu, p);
    int top_p = psi_top(spec, g, Flavor::Mumford) + int(spec.n) * (D - 1);
    int lo_p = need_lo - (top_total - top_p);
    int width = top_p - lo_p;
    TruncatedSeries ps = psi_series(spec, g, psi_top(spec, g, Flavor::Mumford) - width, Flavor::Mumford);
    TruncatedSeries w = monic_at_infinity(omega_tilde_coeffs(spec.n, p), width);
    TruncatedSeries wp = D - 1 >= 0 ? w.pow(D - 1) : w.inverse().pow(1 - D);
    TruncatedSeries q = ps * wp;
    Fq = p == 1 ? q : Fq * q;
  }
  TruncatedSeries F = Fq.shift_variable(a);

  // (t - a)^{K-1} F, and the split at t^0 into polynomial and negative parts.
  TruncatedSeries lin = linear_power_at_infinity(-a, long(K) - 1, F.lo() - int(K));
  TruncatedSeries G1 = lin * F;
  TruncatedSeries Fneg(F.lo(), std::min(F.hi(), -1), true);
  for (int j = Fneg.lo(); j <= Fneg.hi(); ++j) Fneg.set(j, F.coeff(j));
  TruncatedSeries Gneg = lin * Fneg;

  Accumulator shifted, residual;
  Q fact = 1;
  GradedElement xipow(1L);
  for (int m = 0; m <= G; ++m) {
    if (m > 0) fact *= m, xipow = xipow * xiP;
    Q c = Q(1) / fact;
    shifted.add_product(xipow, G1.coeff_or_zero(m - G), c);
    residual.add_product(xipow, Gneg.coeff_or_zero(m - G), c);
  }
  rep.shift_identity = shifted.finalize() == rep.lhs;
  rep.residual = residual.finalize();
  rep.residual_zero = rep.residual.is_zero();
  rep.residual_terms = rep.residual.size();

  // theta and the odd collapse
  const long e = mu.degree() - long(n) * mu.part(P).d + long(n - 1) * long(g - 1);
  const int width = int(e) - F.lo();
  TruncatedSeries th = theta_series(mu, g, width);
  const GradedElement xig = xiP.pow(g);
  rep.collapse_identity = true;
  for (int j = F.lo(); j <= F.hi(); ++j)
    if (xig * F.coeff(j) != xig * th.coeff_or_zero(j)) {
      rep.collapse_identity = false;
      rep.detail = "collapse fails at t^" + std::to_string(j);
      break;
    }
  rep.Theta = th.coeff_or_zero(0);
  Q gfact = 1;
  for (int j = 2; j <= G; ++j) gfact *= j;
  GradedElement rhs = (-a).pow(K - 1) * xig * rep.Theta * (Q(1) / gfact);
  rep.theta_identity = rep.lhs - rep.residual == rhs;
  if (!rep.theta_identity && rep.detail.empty()) rep.detail = "Theta identity differs";
  return rep;
}

}  // namespace relcalc
