#pragma once

#include <cstdlib>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "relcalc/algebra.hpp"
#include "relcalc/series.hpp"
#include "relcalc/symfun.hpp"

namespace relcalc {

struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Rank n, genus g, degree d normalized to d = 2n*gbar + delta with 0 < delta < n.
struct ModuliConfig {
  int n = 0, g = 0, d = 0;
  int gbar = 0, delta = 0;
  int shift = 0;  // d(normalized) - d(requested), a multiple of n

  static ModuliConfig make(int n, int d, int g) {
    if (n < 1) throw ConfigError("rank must be >= 1");
    if (g < 2) throw ConfigError("genus must be >= 2");
    if (std::gcd(n, d) != 1) throw ConfigError("gcd(n, d) must be 1");
    ModuliConfig c;
    c.n = n;
    c.g = g;
    c.gbar = g - 1;
    int base = 2 * n * c.gbar;
    int r = ((d - base) % n + n) % n;
    c.d = base + r;
    c.delta = r;
    c.shift = c.d - d;
    if (n > 1 && (c.delta <= 0 || c.delta >= n)) throw ConfigError("normalization failed");
    return c;
  }

  int rank_push() const { return d - n * gbar; }                 // n*gbar + delta
  int rank_push_dual() const { return (3 * gbar + 1) * n - d; }  // n*g - delta

  nlohmann::json to_json() const { return {{"n", n}, {"d", d}, {"g", g}, {"delta", delta}}; }
};

enum class Flavor { Mumford, Dual };

inline const char* flavor_name(Flavor f) { return f == Flavor::Mumford ? "mumford" : "dual"; }

// A rank-n bundle whose Chern data live in generator part `part`
// (0 = base ring, p >= 1 = stratum factor p).
struct PartSpec {
  unsigned n = 1;
  long d = 0;
  unsigned part = 0;
};

// 1 + a_1 t + ... + a_n t^n at 0, exact on [0, hi].
inline TruncatedSeries omega_series(unsigned n, unsigned part, int hi) {
  std::vector<GradedElement> c{GradedElement(1L)};
  for (unsigned r = 1; r <= n && int(r) <= hi; ++r) c.push_back(gen(gen_a(r, part)));
  return TruncatedSeries::polynomial(c, 0, hi);
}

// Polynomial sum_k top[k] t^{deg-k} (top[0] = 1) as a series at infinity of
// the given width.
inline TruncatedSeries monic_at_infinity(const std::vector<GradedElement>& top, int width) {
  const int deg = int(top.size()) - 1;
  TruncatedSeries s(deg - width, deg, true);
  for (int k = 0; k <= deg && deg - k >= deg - width; ++k) s.set(deg - k, top[size_t(k)]);
  return s;
}

inline std::vector<GradedElement> omega_tilde_coeffs(unsigned n, unsigned part) {
  std::vector<GradedElement> c{GradedElement(1L)};
  for (unsigned r = 1; r <= n; ++r) c.push_back(gen(gen_a(r, part)));
  return c;
}

// The integrand d/u - sum f_i u^{i-2}/Omega + sum xi_ij u^{i+j-2}/Omega^2 with
// f_1 = d, exact on [-1, hi - 1]; the u^{-1} terms are kept so that integrate()
// can audit their cancellation.
inline TruncatedSeries chern_integrand(const PartSpec& p, unsigned g, int hi) {
  TruncatedSeries inv = omega_series(p.n, p.part, hi).inverse();
  TruncatedSeries inv2 = inv * inv;
  TruncatedSeries I = TruncatedSeries::monomial(GradedElement(p.d), -1, -1, hi - 1);
  for (unsigned i = 1; i <= p.n && int(i) - 2 <= hi - 1; ++i) {
    GradedElement fi = i == 1 ? GradedElement(p.d) : gen(gen_f(i, p.part));
    I = I - (inv * fi).shift(int(i) - 2).restrict_window(-1, hi - 1);
  }
  for (unsigned i = 1; i <= p.n; ++i)
    for (unsigned j = 1; j <= p.n && int(i + j) - 2 <= hi - 1; ++j) {
      GradedElement x = xi(i, j, g, p.part, p.part);
      I = I + (inv2 * x).shift(int(i + j) - 2).restrict_window(-1, hi - 1);
    }
  return I;
}

// c(pi_! V)(t) (Mumford) or c(pi_!(V* x L))(-t) (Dual) in the base-ring form,
// exact on [0, hi].
inline TruncatedSeries chern_series(const PartSpec& p, unsigned g, int hi, Flavor fl) {
  const int gbar = int(g) - 1;
  TruncatedSeries integral = chern_integrand(p, g, hi).integrate().restrict_window(0, hi);
  if (fl == Flavor::Dual) integral = -integral;
  TruncatedSeries w = omega_series(p.n, p.part, hi);
  TruncatedSeries c = w.pow(fl == Flavor::Mumford ? -gbar : 3 * gbar + 1) * integral.exp();
  c.set_grading(0);
  return c;
}

// Log coefficients sum_k [W_k (-1)^{m-1} delta_k^m / m + X_k (-1)^{m-1} delta_k^{m-1}]
// symmetrized back to the base generators of the part, m = 1..hi.
inline std::vector<GradedElement> split_log_coefficients(const PartSpec& p, unsigned g, int hi) {
  std::vector<WX> wx;
  for (unsigned k = 1; k <= p.n; ++k) wx.push_back(build_W_X(p.n, k, g, p.d, p.part));
  std::vector<GradedElement> out(static_cast<size_t>(hi + 1));
  for (int m = 1; m <= hi; ++m) {
    SplitElement L;
    const Q sign = (m - 1) % 2 ? -1 : 1;
    for (unsigned k = 1; k <= p.n; ++k) {
      GradedElement dk = gen(gen_delta(k, p.part));
      L += wx[k - 1].W * SplitElement(dk.pow(unsigned(m)) * (sign * frac(1, m)));
      L += wx[k - 1].X * SplitElement(dk.pow(unsigned(m - 1)) * sign);
    }
    out[size_t(m)] = symmetrize_to_base(L, p.n, p.part);
  }
  return out;
}

// Same series from the splitting-principle form, used as an independent oracle.
// (1 + x)^W is exp(W log(1 + x)), since W has a non-rational degree-zero part.
inline TruncatedSeries chern_series_split(const PartSpec& p, unsigned g, int hi, Flavor fl) {
  const int gbar = int(g) - 1;
  auto L = split_log_coefficients(p, g, hi);
  TruncatedSeries log_part(0, hi);
  for (int m = 1; m <= hi; ++m) log_part.set(m, fl == Flavor::Mumford ? L[size_t(m)] : -L[size_t(m)]);
  TruncatedSeries w = omega_series(p.n, p.part, hi);
  TruncatedSeries c = w.pow(fl == Flavor::Mumford ? -gbar : 3 * gbar + 1) * log_part.exp();
  c.set_grading(0);
  return c;
}

inline TruncatedSeries chern_pushforward(const ModuliConfig& c, int hi) {
  return chern_series({unsigned(c.n), c.d, 0}, unsigned(c.g), hi, Flavor::Mumford);
}
inline TruncatedSeries chern_pushforward_split(const ModuliConfig& c, int hi) {
  return chern_series_split({unsigned(c.n), c.d, 0}, unsigned(c.g), hi, Flavor::Mumford);
}
inline TruncatedSeries chern_pushforward_dual(const ModuliConfig& c, int hi) {
  return chern_series({unsigned(c.n), c.d, 0}, unsigned(c.g), hi, Flavor::Dual);
}
inline TruncatedSeries chern_pushforward_dual_split(const ModuliConfig& c, int hi) {
  return chern_series_split({unsigned(c.n), c.d, 0}, unsigned(c.g), hi, Flavor::Dual);
}

// t^top * c(1/t) as a series at infinity.
inline TruncatedSeries psi_from_chern(const TruncatedSeries& c, int top) {
  TruncatedSeries s = c.reflect().shift(top);
  return s;
}

inline int psi_top(const PartSpec& p, unsigned g, Flavor fl) {
  const long gbar = long(g) - 1;
  return int(fl == Flavor::Mumford ? p.d - long(p.n) * gbar : long(p.n) * (3 * gbar + 1) - p.d);
}

// Psi (or Psi*) of a part, exact down to t^lo.
inline TruncatedSeries psi_series(const PartSpec& p, unsigned g, int lo, Flavor fl) {
  const int top = psi_top(p, g, fl);
  if (lo > top) lo = top;
  return psi_from_chern(chern_series(p, g, top - lo, fl), top);
}

inline TruncatedSeries psi(const ModuliConfig& c, int lo) {
  return psi_series({unsigned(c.n), c.d, 0}, unsigned(c.g), lo, Flavor::Mumford);
}
inline TruncatedSeries psi_dual(const ModuliConfig& c, int lo) {
  return psi_series({unsigned(c.n), c.d, 0}, unsigned(c.g), lo, Flavor::Dual);
}

// Lowest power of Psi needed to extract level r: t^{n*r}.
inline int psi_lo_for(int n, int r_min) { return n * std::min(r_min, 0) - n; }

// C^i = [t^{-i}] psi * Omega~^{-r-1}, i = 1..n, where Omega~ has the given monic
// coefficients (top[0] = 1, top[k] the coefficient of t^{n-k}).
inline std::vector<GradedElement> c_coefficients(const TruncatedSeries& psi,
                                                 const std::vector<GradedElement>& top, int r) {
  const int n = int(top.size()) - 1;
  const int m = -r - 1;
  // width needed so that the product is exact down to t^{-n}
  const int width = n * m + n + psi.hi();
  TruncatedSeries w = monic_at_infinity(top, std::max(width, n));
  TruncatedSeries wm = m >= 0 ? w.pow(m) : w.inverse().pow(-m);
  TruncatedSeries prod = psi * wm;
  std::vector<GradedElement> C(static_cast<size_t>(n + 1));
  for (int i = 1; i <= n; ++i) C[size_t(i)] = prod.coeff_or_zero(-i);
  return C;
}

// sigma_r^0..sigma_r^{n-1} of psi written as sum_r (sigma_r^0 + ... + sigma_r^{n-1} t^{n-1}) Omega~^r.
inline std::vector<GradedElement> decompose_level(const TruncatedSeries& psi,
                                                  const std::vector<GradedElement>& top, int r) {
  const int n = int(top.size()) - 1;
  auto C = c_coefficients(psi, top, r);
  std::vector<GradedElement> sigma(static_cast<size_t>(n));
  for (int k = 1; k <= n; ++k) {
    Accumulator acc;
    for (int i = 1; i <= k; ++i) acc.add_product(top[size_t(k - i)], C[size_t(i)]);
    sigma[size_t(n - k)] = acc.finalize();
  }
  return sigma;
}

// Generating set change of the base ring:
//   bt_r^s = n b_r^s - (n-r+1) a_{r-1} b_1^s
//   ft_r   = n^2 f_r - n(n-r+1)(xi_{r-1,1} + xi_{1,r-1}) + (n-r+1)(n-r+2) a_{r-2} xi_{1,1}
// for 2 <= r <= n, with a_0 = 1.
inline GradedElement a_or_one(unsigned r, unsigned part = 0) {
  return r == 0 ? GradedElement(1L) : gen(gen_a(r, part));
}

inline GradedElement rebased_b_definition(unsigned n, unsigned r, unsigned s, unsigned part = 0) {
  return gen(gen_b(r, s, part)) * Q(long(n)) -
         a_or_one(r - 1, part) * gen(gen_b(1, s, part)) * Q(long(n - r + 1));
}

inline GradedElement rebased_f_definition(unsigned n, unsigned g, unsigned r, unsigned part = 0) {
  const long N = long(n), R = long(r);
  return gen(gen_f(r, part)) * Q(N * N) -
         (xi(r - 1, 1, g, part, part) + xi(1, r - 1, g, part, part)) * Q(N * (N - R + 1)) +
         a_or_one(r - 2, part) * xi(1, 1, g, part, part) * Q((N - R + 1) * (N - R + 2));
}

// The same generating set change applies to any rank-n factor (part index).
inline GradedElement unrebase(const GradedElement& x, unsigned n, unsigned g, unsigned part = 0) {
  Assignment as;
  for (unsigned r = 2; r <= n; ++r) {
    as[gen_rf(r, part)] = rebased_f_definition(n, g, r, part);
    for (unsigned s = 1; s <= 2 * g; ++s) as[gen_rb(r, s, part)] = rebased_b_definition(n, r, s, part);
  }
  return substitute(x, as);
}

inline GradedElement rebase(const GradedElement& x, unsigned n, unsigned g, unsigned part = 0) {
  const long N = long(n);
  Assignment fmap, bmap;
  for (unsigned r = 2; r <= n; ++r) {
    const long R = long(r);
    fmap[gen_f(r, part)] =
        (gen(gen_rf(r, part)) + (xi(r - 1, 1, g, part, part) + xi(1, r - 1, g, part, part)) * Q(N * (N - R + 1)) -
         a_or_one(r - 2, part) * xi(1, 1, g, part, part) * Q((N - R + 1) * (N - R + 2))) *
        frac(1, N * N);
    for (unsigned s = 1; s <= 2 * g; ++s)
      bmap[gen_b(r, s, part)] =
          (gen(gen_rb(r, s, part)) + a_or_one(r - 1, part) * gen(gen_b(1, s, part)) * Q(N - R + 1)) *
          frac(1, N);
  }
  return substitute(substitute(x, fmap), bmap);
}

inline std::vector<Gen> b1_universe(unsigned g, unsigned part = 0) {
  std::vector<Gen> u;
  for (unsigned s = 1; s <= 2 * g; ++s) u.push_back(gen_b(1, s, part));
  return u;
}

inline std::vector<Gen> subset_gens(unsigned mask, const std::vector<Gen>& universe) {
  std::vector<Gen> out;
  for (unsigned s = 0; s < universe.size(); ++s)
    if (mask >> s & 1) out.push_back(universe[s]);
  return out;
}

inline std::vector<unsigned> subset_members(unsigned mask) {
  std::vector<unsigned> out;
  for (unsigned s = 0; s < 32; ++s)
    if (mask >> s & 1) out.push_back(s + 1);
  return out;
}

struct RelationEntry {
  int r = 0;
  unsigned k = 0;
  unsigned mask = 0;  // S as a bit set, bit s-1 for s
  int degree = 0;     // closed-form degree
  GradedElement element;
};

struct RelationSet {
  Flavor flavor = Flavor::Mumford;
  ModuliConfig config;
  int r_min = -1;
  std::vector<RelationEntry> entries;

  // 2(top - n r - k) - |S| with top = n*gbar + delta (Mumford) or n*g - delta (dual).
  static int expected_degree(const ModuliConfig& c, Flavor f, int r, unsigned k, unsigned mask) {
    int top = f == Flavor::Mumford ? c.rank_push() : c.rank_push_dual();
    return 2 * (top - c.n * r - int(k)) - __builtin_popcount(mask);
  }

  const RelationEntry* find(int r, unsigned k, unsigned mask) const {
    for (auto& e : entries)
      if (e.r == r && e.k == k && e.mask == mask) return &e;
    return nullptr;
  }

  // Smallest degree among nonzero entries.
  std::optional<int> minimal_degree() const {
    std::optional<int> m;
    for (auto& e : entries)
      if (!e.element.is_zero() && (!m || e.degree < *m)) m = e.degree;
    return m;
  }

  nlohmann::json to_json() const {
    nlohmann::json es = nlohmann::json::array();
    for (auto& e : entries)
      es.push_back({{"r", e.r},
                    {"k", e.k},
                    {"S", subset_members(e.mask)},
                    {"degree", e.degree},
                    {"zero", e.element.is_zero()},
                    {"element", relcalc::to_json(e.element)}});
    return {{"flavor", flavor_name(flavor)}, {"config", config.to_json()}, {"r_min", r_min}, {"entries", es}};
  }
};

// sigma_{r,S}^k (or tau) for r_min <= r <= -1, all k, and the requested subsets
// (default: all of them). Coefficients are taken after rebasing, so no entry
// contains b_1^s.
inline RelationSet relations(const ModuliConfig& c, int r_min, Flavor fl,
                             std::optional<std::vector<unsigned>> masks = std::nullopt) {
  if (r_min >= 0) throw std::invalid_argument("r_min must be negative");
  const unsigned n = unsigned(c.n), g = unsigned(c.g);
  if (!masks) {
    masks.emplace();
    for (unsigned m = 0; m < (1u << (2 * g)); ++m) masks->push_back(m);
  }
  RelationSet out;
  out.flavor = fl;
  out.config = c;
  out.r_min = r_min;
  TruncatedSeries ps = psi_series({n, c.d, 0}, g, psi_lo_for(c.n, r_min), fl);
  const auto top = omega_tilde_coeffs(n, 0);
  const auto universe = b1_universe(g);
  for (int r = -1; r >= r_min; --r) {
    auto sigma = decompose_level(ps, top, r);
    for (unsigned k = 0; k < n; ++k) {
      GradedElement rb = rebase(sigma[k], n, g);
      for (unsigned mask : *masks) {
        RelationEntry e;
        e.r = r;
        e.k = k;
        e.mask = mask;
        e.degree = RelationSet::expected_degree(c, fl, r, k, mask);
        e.element = odd_coefficient(rb, subset_gens(mask, universe), universe);
        if (!e.element.is_zero() && !e.element.is_homogeneous(e.degree))
          throw std::logic_error("relation degree mismatch at r=" + std::to_string(r) +
                                 " k=" + std::to_string(k));
        out.entries.push_back(std::move(e));
      }
    }
  }
  return out;
}

inline RelationSet mumford_relations(const ModuliConfig& c, int r_min = -2,
                                     std::optional<std::vector<unsigned>> masks = std::nullopt) {
  return relations(c, r_min, Flavor::Mumford, std::move(masks));
}
inline RelationSet dual_mumford_relations(const ModuliConfig& c, int r_min = -2,
                                          std::optional<std::vector<unsigned>> masks = std::nullopt) {
  return relations(c, r_min, Flavor::Dual, std::move(masks));
}

struct NormalizationWitness {
  long u = 0, v = 0;
  GradedElement relation;
};

// u n + v (d - n gbar) = 1 with |u| minimal (ties resolved towards negative u).
inline NormalizationWitness normalization_relation(const ModuliConfig& c) {
  const long n = c.n, m = c.rank_push();
  if (std::gcd(n, m) != 1) throw ConfigError("n and d - n*gbar are not coprime");
  // u ranges over the residue class of n^{-1} mod m; keep the smaller |u|.
  long u0 = 0;
  while ((u0 * n) % m != 1 % m) ++u0;
  long u = (std::labs(u0 - m) <= u0) ? u0 - m : u0;
  NormalizationWitness w;
  w.u = u;
  w.v = (1 - u * n) / m;
  GradedElement c1 = chern_pushforward(c, 1).coeff(1);
  w.relation = gen(gen_a(1)) * Q(w.u) + c1 * Q(w.v);
  return w;
}

struct LogDerivativeReport {
  bool ok = true;
  int numerator_degree = -1;
  std::optional<int> first_bad_power;
  std::string detail;
};

// Checks Psi' Omega~^2 = N Psi with
// N = -gbar Omega~ Omega~' + Omega~ sum_i f_i t^{n-i} - sum_ij xi_ij t^{2n-i-j},
// and that Psi'/Psi computed from the substituted integrand, times Omega~^2,
// is this polynomial of degree <= 2n-1.
inline LogDerivativeReport verify_logderiv_recurrence(const ModuliConfig& c, int lo) {
  const unsigned n = unsigned(c.n), g = unsigned(c.g);
  const int N = int(n);
  LogDerivativeReport rep;
  TruncatedSeries ps = psi(c, lo);
  const auto top = omega_tilde_coeffs(n, 0);
  const int width = ps.hi() - ps.lo() + 4 * N;
  TruncatedSeries wt = monic_at_infinity(top, width);
  TruncatedSeries wt2 = wt * wt;
  // N(t) as a polynomial series at infinity
  TruncatedSeries wtd = wt.derivative();
  TruncatedSeries fsum(-width, N - 1, true);
  for (unsigned i = 1; i <= n; ++i)
    fsum.set(N - int(i), i == 1 ? GradedElement(long(c.d)) : gen(gen_f(i)));
  TruncatedSeries xsum(-width, 2 * N - 2, true);
  for (unsigned i = 1; i <= n; ++i)
    for (unsigned j = 1; j <= n; ++j) {
      int p = 2 * N - int(i + j);
      xsum.set(p, xsum.coeff(p) + xi(i, j, g));
    }
  TruncatedSeries numer = (wt * wtd) * Q(-c.gbar) + wt * fsum - xsum;
  for (int k = numer.hi(); k >= 0; --k)
    if (!numer.coeff(k).is_zero()) {
      rep.numerator_degree = k;
      break;
    }
  if (rep.numerator_degree > 2 * N - 1) {
    rep.ok = false;
    rep.detail = "numerator degree exceeds 2n-1";
    return rep;
  }
  // Psi'/Psi from the integrand, times Omega~^2
  TruncatedSeries logd = (ps.derivative() * ps.inverse()) * wt2;
  for (int k = logd.lo(); k <= logd.hi(); ++k) {
    GradedElement want = (k >= 0 && k <= numer.hi()) ? numer.coeff(k) : GradedElement();
    if (logd.coeff(k) != want) {
      rep.ok = false;
      rep.first_bad_power = k;
      rep.detail = "log-derivative numerator differs at t^" + std::to_string(k);
      return rep;
    }
  }
  TruncatedSeries lhs = ps.derivative() * wt2;
  TruncatedSeries rhs = numer * ps;
  if (auto k = TruncatedSeries::first_difference(lhs, rhs)) {
    rep.ok = false;
    rep.first_bad_power = *k;
    rep.detail = "Psi' Omega~^2 != N Psi at t^" + std::to_string(*k);
  }
  return rep;
}

}  // namespace relcalc
