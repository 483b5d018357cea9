#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <regex>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <boost/container/small_vector.hpp>

#include "json.hpp"

namespace relcalc {

using Q = mpq_class;

// a/b in lowest terms; mpq_class(a, b) alone does not canonicalize.
inline Q frac(long a, long b) {
  Q q(a, b);
  q.canonicalize();
  return q;
}

// Families are ordered; the numeric value fixes canonical generator order.
// Values >= 8 are odd.
enum class Family : uint8_t {
  A = 0,      // a_r, a^p_r
  F = 1,      // f_r, f^p_r
  Delta = 2,  // Chern roots
  RF = 3,     // rebased f
  B = 8,      // b_r^s, b^{p,s}_r
  RB = 9,     // rebased b
  V = 10,     // v_s = sum_p b^{p,s}_1
  W = 11,     // w^p_s = b^{p,s}_1 - b^{P,s}_1
};

struct Gen {
  uint32_t code = 0;  // family:4 | part:4 | r:8 | s:8

  static constexpr Gen make(Family f, unsigned part, unsigned r, unsigned s) {
    return Gen{(uint32_t(f) << 20) | ((part & 0xF) << 16) | ((r & 0xFF) << 8) | (s & 0xFF)};
  }
  constexpr Family family() const { return Family((code >> 20) & 0xF); }
  constexpr unsigned part() const { return (code >> 16) & 0xF; }
  constexpr unsigned r() const { return (code >> 8) & 0xFF; }
  constexpr unsigned s() const { return code & 0xFF; }
  constexpr bool odd() const { return uint8_t(family()) >= 8; }

  int degree() const {
    switch (family()) {
      case Family::A: return 2 * int(r());
      case Family::F:
      case Family::RF: return 2 * int(r()) - 2;
      case Family::Delta: return 2;
      case Family::B:
      case Family::RB: return 2 * int(r()) - 1;
      case Family::V:
      case Family::W: return 1;
    }
    return 0;
  }

  std::string name() const;

  friend constexpr bool operator==(Gen x, Gen y) { return x.code == y.code; }
  friend constexpr bool operator!=(Gen x, Gen y) { return x.code != y.code; }
  friend constexpr bool operator<(Gen x, Gen y) { return x.code < y.code; }
};

// part 0 is the base ring; strata use parts 1..15.
inline Gen gen_a(unsigned r, unsigned part = 0) { return Gen::make(Family::A, part, r, 0); }
inline Gen gen_f(unsigned r, unsigned part = 0) { return Gen::make(Family::F, part, r, 0); }
inline Gen gen_b(unsigned r, unsigned s, unsigned part = 0) { return Gen::make(Family::B, part, r, s); }
inline Gen gen_delta(unsigned k, unsigned part = 0) { return Gen::make(Family::Delta, part, k, 0); }
inline Gen gen_rb(unsigned r, unsigned s, unsigned part = 0) { return Gen::make(Family::RB, part, r, s); }
inline Gen gen_rf(unsigned r, unsigned part = 0) { return Gen::make(Family::RF, part, r, 0); }
inline Gen gen_v(unsigned s) { return Gen::make(Family::V, 0, 1, s); }
inline Gen gen_w(unsigned p, unsigned s) { return Gen::make(Family::W, p, 1, s); }

inline std::string Gen::name() const {
  auto sup = [&](const std::string& base) {
    return part() == 0 ? base : base + "^{p=" + std::to_string(part()) + "}";
  };
  const std::string R = std::to_string(r()), S = std::to_string(s());
  switch (family()) {
    case Family::A: return sup("a") + "_" + R;
    case Family::F: return sup("f") + "_" + R;
    case Family::Delta: return sup("delta") + "_" + R;
    case Family::RF: return sup("ft") + "_" + R;
    case Family::B: return sup("b") + "_" + R + "^" + S;
    case Family::RB: return sup("bt") + "_" + R + "^" + S;
    case Family::V: return "v_" + S;
    case Family::W: return sup("w") + "_" + S;
  }
  return "?";
}

// Even entries are (code << 8 | exponent), odd entries are bare codes; both
// sorted ascending. The odd product is taken in that order.
class Monomial {
 public:
  using Store = boost::container::small_vector<uint32_t, 10>;

  Monomial() = default;

  static Monomial of(Gen g, unsigned e = 1) {
    Monomial m;
    if (e == 0) return m;
    if (g.odd()) {
      if (e > 1) throw std::domain_error("odd generator to power > 1");
      m.d_.push_back(g.code);
    } else {
      check_exp(e);
      m.d_.push_back((g.code << 8) | e);
      m.ne_ = 1;
    }
    m.deg_ = uint16_t(g.degree() * int(e));
    return m;
  }

  unsigned n_even() const { return ne_; }
  unsigned n_odd() const { return unsigned(d_.size()) - ne_; }
  Gen even_gen(unsigned i) const { return Gen{d_[i] >> 8}; }
  unsigned even_exp(unsigned i) const { return d_[i] & 0xFF; }
  Gen odd_gen(unsigned i) const { return Gen{d_[ne_ + i]}; }
  int degree() const { return deg_; }
  bool is_one() const { return d_.empty(); }

  unsigned exponent(Gen g) const {
    for (unsigned i = 0; i < ne_; ++i)
      if (even_gen(i) == g) return even_exp(i);
    for (unsigned i = 0; i < n_odd(); ++i)
      if (odd_gen(i) == g) return 1;
    return 0;
  }

  // Returns the sign (+1/-1) of x*y, or 0 if an odd generator repeats.
  static int mul(const Monomial& x, const Monomial& y, Monomial& out) {
    out.d_.clear();
    out.deg_ = uint16_t(x.deg_ + y.deg_);
    unsigned i = 0, j = 0;
    while (i < x.ne_ && j < y.ne_) {
      uint32_t cx = x.d_[i] >> 8, cy = y.d_[j] >> 8;
      if (cx < cy) out.d_.push_back(x.d_[i++]);
      else if (cy < cx) out.d_.push_back(y.d_[j++]);
      else {
        unsigned e = (x.d_[i] & 0xFF) + (y.d_[j] & 0xFF);
        check_exp(e);
        out.d_.push_back((cx << 8) | e);
        ++i, ++j;
      }
    }
    while (i < x.ne_) out.d_.push_back(x.d_[i++]);
    while (j < y.ne_) out.d_.push_back(y.d_[j++]);
    out.ne_ = uint8_t(out.d_.size());
    unsigned xi = x.ne_, yi = y.ne_;
    const unsigned xe = unsigned(x.d_.size()), ye = unsigned(y.d_.size());
    unsigned inversions = 0;
    while (xi < xe && yi < ye) {
      if (x.d_[xi] < y.d_[yi]) out.d_.push_back(x.d_[xi++]);
      else if (y.d_[yi] < x.d_[xi]) {
        inversions += xe - xi;
        out.d_.push_back(y.d_[yi++]);
      } else return 0;
    }
    while (xi < xe) out.d_.push_back(x.d_[xi++]);
    while (yi < ye) out.d_.push_back(y.d_[yi++]);
    return (inversions & 1) ? -1 : 1;
  }

  // Copy of this monomial without generator g; `removed` receives its exponent.
  Monomial without(Gen g, unsigned& removed) const {
    Monomial m;
    removed = 0;
    for (unsigned i = 0; i < ne_; ++i) {
      if (even_gen(i) == g) removed = even_exp(i);
      else m.d_.push_back(d_[i]);
    }
    m.ne_ = uint8_t(m.d_.size());
    for (unsigned i = ne_; i < d_.size(); ++i) {
      if (d_[i] == g.code) removed = 1;
      else m.d_.push_back(d_[i]);
    }
    m.deg_ = uint16_t(deg_ - g.degree() * int(removed));
    return m;
  }

  // Builds from raw sorted entries; odd list must already be sorted and distinct.
  static Monomial from_parts(const std::vector<std::pair<Gen, unsigned>>& even,
                             const std::vector<Gen>& odd) {
    Monomial m;
    int deg = 0;
    for (auto& [g, e] : even) {
      if (e == 0) continue;
      check_exp(e);
      m.d_.push_back((g.code << 8) | e);
      deg += g.degree() * int(e);
    }
    m.ne_ = uint8_t(m.d_.size());
    for (Gen g : odd) {
      m.d_.push_back(g.code);
      deg += g.degree();
    }
    m.deg_ = uint16_t(deg);
    return m;
  }

  friend bool operator==(const Monomial& x, const Monomial& y) {
    return x.ne_ == y.ne_ && x.d_ == y.d_;
  }
  friend bool operator!=(const Monomial& x, const Monomial& y) { return !(x == y); }
  friend bool operator<(const Monomial& x, const Monomial& y) {
    if (x.deg_ != y.deg_) return x.deg_ < y.deg_;
    if (x.ne_ != y.ne_) return x.ne_ < y.ne_;
    return std::lexicographical_compare(x.d_.begin(), x.d_.end(), y.d_.begin(), y.d_.end());
  }

  size_t hash() const {
    uint64_t h = 1469598103934665603ull ^ ne_;
    for (uint32_t v : d_) {
      h ^= v;
      h *= 1099511628211ull;
      h ^= h >> 29;
    }
    return size_t(h);
  }

  std::string str() const {
    if (d_.empty()) return "1";
    std::string s;
    for (unsigned i = 0; i < ne_; ++i) {
      if (!s.empty()) s += "*";
      s += even_gen(i).name();
      if (even_exp(i) > 1) s += "^(" + std::to_string(even_exp(i)) + ")";
    }
    for (unsigned i = 0; i < n_odd(); ++i) {
      if (!s.empty()) s += "*";
      s += odd_gen(i).name();
    }
    return s;
  }

 private:
  static void check_exp(unsigned e) {
    if (e > 0xFF) throw std::overflow_error("monomial exponent exceeds 255");
  }

  Store d_;
  uint8_t ne_ = 0;
  uint16_t deg_ = 0;
};

struct MonomialHash {
  size_t operator()(const Monomial& m) const { return m.hash(); }
};

class GradedElement;

// Hash accumulator for sums of many products; finalize() yields canonical form.
class Accumulator {
 public:
  explicit Accumulator(int cap = -1) : cap_(cap) {}
  void add(const Monomial& m, const Q& c) {
    if (cap_ >= 0 && m.degree() > cap_) return;
    auto [it, fresh] = map_.try_emplace(m, c);
    if (!fresh) it->second += c;
  }
  void add_product(const GradedElement& x, const GradedElement& y, const Q& scale = 1);
  void add_scaled(const GradedElement& x, const Q& scale);
  GradedElement finalize();
  void reserve(size_t n) { map_.reserve(n); }

 private:
  int cap_;
  std::unordered_map<Monomial, Q, MonomialHash> map_;
};

class GradedElement {
 public:
  using Term = std::pair<Monomial, Q>;

  GradedElement() = default;
  GradedElement(long c) {
    if (c != 0) terms_.emplace_back(Monomial(), Q(c));
  }
  GradedElement(const Q& c) {
    if (c != 0) terms_.emplace_back(Monomial(), c);
  }
  explicit GradedElement(Gen g, const Q& c = 1) {
    if (c != 0) terms_.emplace_back(Monomial::of(g), c);
  }
  GradedElement(const Monomial& m, const Q& c) {
    if (c != 0) terms_.emplace_back(m, c);
  }

  // Terms must be sorted, distinct and nonzero.
  static GradedElement from_sorted(std::vector<Term>&& t) {
    GradedElement x;
    x.terms_ = std::move(t);
    return x;
  }

  const std::vector<Term>& terms() const { return terms_; }
  size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }

  Q constant() const {
    if (!terms_.empty() && terms_.front().first.is_one()) return terms_.front().second;
    return 0;
  }
  bool is_constant() const {
    return terms_.empty() || (terms_.size() == 1 && terms_.front().first.is_one());
  }

  // -1 for zero; otherwise max term degree.
  int max_degree() const {
    int d = -1;
    for (auto& t : terms_) d = std::max(d, t.first.degree());
    return d;
  }
  bool is_homogeneous(int k) const {
    for (auto& t : terms_)
      if (t.first.degree() != k) return false;
    return true;
  }
  bool is_even() const {
    for (auto& t : terms_)
      if (t.first.degree() % 2) return false;
    return true;
  }

  GradedElement grade_component(int k) const {
    if (k < 0) throw std::invalid_argument("grade_component: negative degree");
    std::vector<Term> out;
    for (auto& t : terms_)
      if (t.first.degree() == k) out.push_back(t);
    return from_sorted(std::move(out));
  }

  GradedElement truncate(int cap) const {
    std::vector<Term> out;
    for (auto& t : terms_)
      if (t.first.degree() <= cap) out.push_back(t);
    return from_sorted(std::move(out));
  }

  friend GradedElement operator+(const GradedElement& x, const GradedElement& y) {
    return merge(x, y, 1);
  }
  friend GradedElement operator-(const GradedElement& x, const GradedElement& y) {
    return merge(x, y, -1);
  }
  GradedElement operator-() const {
    GradedElement r = *this;
    for (auto& t : r.terms_) t.second = -t.second;
    return r;
  }
  GradedElement& operator+=(const GradedElement& y) { return *this = *this + y; }
  GradedElement& operator-=(const GradedElement& y) { return *this = *this - y; }

  friend GradedElement operator*(const GradedElement& x, const Q& c) {
    if (c == 0) return {};
    GradedElement r = x;
    for (auto& t : r.terms_) t.second *= c;
    return r;
  }
  friend GradedElement operator*(const Q& c, const GradedElement& x) { return x * c; }

  friend GradedElement operator*(const GradedElement& x, const GradedElement& y) {
    return mul(x, y);
  }
  GradedElement& operator*=(const GradedElement& y) { return *this = mul(*this, y); }

  // Product with optional degree cap (cap < 0 means none).
  static GradedElement mul(const GradedElement& x, const GradedElement& y, int cap = -1) {
    if (x.is_zero() || y.is_zero()) return {};
    if (x.is_constant() && cap < 0) return y * x.constant();
    if (y.is_constant() && cap < 0) return x * y.constant();
    Accumulator acc(cap);
    acc.reserve(x.size() * y.size());
    acc.add_product(x, y);
    return acc.finalize();
  }

  GradedElement pow(unsigned e, int cap = -1) const {
    GradedElement r(1L), b = *this;
    while (e) {
      if (e & 1) r = mul(r, b, cap);
      e >>= 1;
      if (e) b = mul(b, b, cap);
    }
    return r;
  }

  friend bool operator==(const GradedElement& x, const GradedElement& y) {
    return x.terms_ == y.terms_;
  }
  friend bool operator!=(const GradedElement& x, const GradedElement& y) { return !(x == y); }

  // Coefficient of one monomial (zero if absent).
  Q coeff(const Monomial& m) const {
    auto it = std::lower_bound(terms_.begin(), terms_.end(), m,
                               [](const Term& t, const Monomial& k) { return t.first < k; });
    if (it != terms_.end() && it->first == m) return it->second;
    return 0;
  }

  bool contains(Gen g) const {
    for (auto& t : terms_)
      if (t.first.exponent(g)) return true;
    return false;
  }

  std::string str() const {
    if (terms_.empty()) return "0";
    std::string s;
    for (auto& [m, c] : terms_) {
      std::string cs = c.get_str();
      if (!s.empty()) s += (cs[0] == '-') ? " " : " + ";
      if (m.is_one()) s += cs;
      else if (c == 1) s += m.str();
      else if (c == -1) s += "-" + m.str();
      else s += cs + "*" + m.str();
    }
    return s;
  }

 private:
  static GradedElement merge(const GradedElement& x, const GradedElement& y, int sign) {
    std::vector<Term> out;
    out.reserve(x.size() + y.size());
    auto i = x.terms_.begin(), j = y.terms_.begin();
    while (i != x.terms_.end() && j != y.terms_.end()) {
      if (i->first < j->first) out.push_back(*i++);
      else if (j->first < i->first) {
        out.emplace_back(j->first, sign > 0 ? j->second : Q(-j->second));
        ++j;
      } else {
        Q c = sign > 0 ? Q(i->second + j->second) : Q(i->second - j->second);
        if (c != 0) out.emplace_back(i->first, std::move(c));
        ++i, ++j;
      }
    }
    for (; i != x.terms_.end(); ++i) out.push_back(*i);
    for (; j != y.terms_.end(); ++j) out.emplace_back(j->first, sign > 0 ? j->second : Q(-j->second));
    return from_sorted(std::move(out));
  }

  std::vector<Term> terms_;
};

inline void Accumulator::add_product(const GradedElement& x, const GradedElement& y,
                                     const Q& scale) {
  Monomial m;
  Q c;
  for (auto& [mx, cx] : x.terms()) {
    for (auto& [my, cy] : y.terms()) {
      if (cap_ >= 0 && mx.degree() + my.degree() > cap_) continue;
      int s = Monomial::mul(mx, my, m);
      if (!s) continue;
      c = cx * cy;
      if (scale != 1) c *= scale;
      if (s < 0) c = -c;
      add(m, c);
    }
  }
}

inline void Accumulator::add_scaled(const GradedElement& x, const Q& scale) {
  for (auto& [m, c] : x.terms()) add(m, c * scale);
}

inline GradedElement Accumulator::finalize() {
  std::vector<GradedElement::Term> out;
  out.reserve(map_.size());
  for (auto& [m, c] : map_)
    if (c != 0) out.emplace_back(m, std::move(c));
  map_.clear();
  std::sort(out.begin(), out.end(),
            [](const GradedElement::Term& a, const GradedElement::Term& b) { return a.first < b.first; });
  return GradedElement::from_sorted(std::move(out));
}

inline GradedElement gen(Gen g) { return GradedElement(g); }

inline GradedElement grade_component(const GradedElement& x, int k) { return x.grade_component(k); }

// Sum of terms of x whose degree lies in [0, cap].
inline GradedElement mul(const GradedElement& x, const GradedElement& y, int cap = -1) {
  return GradedElement::mul(x, y, cap);
}

// xi_{i,j} = sum_{s<=g} b_i^s b_j^{s+g}; stratum version uses parts p, q.
inline GradedElement xi(unsigned i, unsigned j, unsigned g, unsigned p = 0, unsigned q = 0) {
  Accumulator acc;
  for (unsigned s = 1; s <= g; ++s)
    acc.add_product(gen(gen_b(i, s, p)), gen(gen_b(j, s + g, q)));
  return acc.finalize();
}

using Assignment = std::map<Gen, GradedElement>;

// Algebra homomorphism extending `assignment`; unlisted generators are fixed.
inline GradedElement substitute(const GradedElement& x, const Assignment& assignment, int cap = -1) {
  for (auto& [g, img] : assignment) {
    for (auto& [m, c] : img.terms()) {
      if (m.degree() != g.degree() || (m.degree() % 2) != int(g.odd()))
        throw std::invalid_argument("substitute: image of " + g.name() +
                                    " has a term of degree " + std::to_string(m.degree()) +
                                    ", expected " + std::to_string(g.degree()));
    }
  }
  std::map<std::pair<uint32_t, unsigned>, GradedElement> powers;
  auto image_pow = [&](Gen g, unsigned e) -> const GradedElement& {
    auto key = std::make_pair(g.code, e);
    auto it = powers.find(key);
    if (it != powers.end()) return it->second;
    auto a = assignment.find(g);
    GradedElement base = a == assignment.end() ? gen(g) : a->second;
    return powers.emplace(key, base.pow(e, cap)).first->second;
  };
  // Multivariate Horner scheme. Each touched monomial is read as its factor
  // sequence (even generators repeated by exponent in descending code order,
  // then odd generators in order); with sequences sorted, those sharing a prefix are contiguous and
  // T(prefix) = c(prefix) + sum_h image(h) * T(prefix h) stays collected.
  std::vector<std::pair<std::vector<uint32_t>, Q>> seqs;
  Accumulator acc(cap);
  for (auto& [m, c] : x.terms()) {
    bool touched = false;
    for (unsigned i = 0; i < m.n_even() && !touched; ++i) touched = assignment.count(m.even_gen(i));
    for (unsigned i = 0; i < m.n_odd() && !touched; ++i) touched = assignment.count(m.odd_gen(i));
    if (!touched) {
      acc.add(m, c);
      continue;
    }
    std::vector<uint32_t> seq;
    for (unsigned i = m.n_even(); i-- > 0;) seq.insert(seq.end(), m.even_exp(i), m.even_gen(i).code);
    for (unsigned i = 0; i < m.n_odd(); ++i) seq.push_back(m.odd_gen(i).code);
    seqs.emplace_back(std::move(seq), c);
  }
  std::sort(seqs.begin(), seqs.end(), [](auto& u, auto& v) { return u.first < v.first; });
  using It = decltype(seqs)::const_iterator;
  std::function<GradedElement(It, It, size_t)> horner = [&](It lo, It hi, size_t depth) {
    Accumulator node(cap);
    if (lo != hi && lo->first.size() == depth) node.add(Monomial(), (lo++)->second);
    while (lo != hi) {
      const uint32_t h = lo->first[depth];
      It mid = lo;
      while (mid != hi && mid->first[depth] == h) ++mid;
      GradedElement tail = horner(lo, mid, depth + 1);
      if (!tail.is_zero()) node.add_product(image_pow(Gen{h}, 1), tail);
      lo = mid;
    }
    return node.finalize();
  };
  acc.add_scaled(horner(seqs.cbegin(), seqs.cend(), 0), 1);
  return acc.finalize();
}

// Coefficient c in x = c * (listed[0] * listed[1] * ...) + (rest), where c and
// rest contain no generator of `universe` beyond those listed (for c: none at
// all). `universe` defaults to `listed`.
inline GradedElement odd_coefficient(const GradedElement& x, const std::vector<Gen>& listed,
                                     const std::vector<Gen>& universe = {}) {
  const std::vector<Gen>& uni = universe.empty() ? listed : universe;
  std::vector<uint32_t> want;
  for (Gen g : listed) {
    if (!g.odd()) throw std::invalid_argument("odd_coefficient: " + g.name() + " is even");
    want.push_back(g.code);
  }
  std::vector<uint32_t> sorted_want = want;
  std::sort(sorted_want.begin(), sorted_want.end());
  if (std::adjacent_find(sorted_want.begin(), sorted_want.end()) != sorted_want.end()) return {};
  std::vector<uint32_t> uni_codes;
  for (Gen g : uni) uni_codes.push_back(g.code);
  std::sort(uni_codes.begin(), uni_codes.end());

  Accumulator acc;
  for (auto& [m, c] : x.terms()) {
    // Split the odd part into kept generators K and universe members U.
    std::vector<uint32_t> kept, hit;
    std::vector<int> pos_hit;  // positions in the sorted odd list
    for (unsigned i = 0; i < m.n_odd(); ++i) {
      uint32_t code = m.odd_gen(i).code;
      if (std::binary_search(uni_codes.begin(), uni_codes.end(), code)) hit.push_back(code);
      else kept.push_back(code);
    }
    if (hit != sorted_want) continue;
    // Sign of reordering sorted odd list into (kept..., listed order...).
    std::vector<uint32_t> target = kept;
    target.insert(target.end(), want.begin(), want.end());
    std::vector<uint32_t> src;
    for (unsigned i = 0; i < m.n_odd(); ++i) src.push_back(m.odd_gen(i).code);
    // parity of the permutation mapping src -> target
    std::vector<int> perm;
    for (uint32_t t : target) perm.push_back(int(std::find(src.begin(), src.end(), t) - src.begin()));
    int inv = 0;
    for (size_t a = 0; a < perm.size(); ++a)
      for (size_t b = a + 1; b < perm.size(); ++b)
        if (perm[a] > perm[b]) ++inv;
    std::vector<std::pair<Gen, unsigned>> even;
    for (unsigned i = 0; i < m.n_even(); ++i) even.emplace_back(m.even_gen(i), m.even_exp(i));
    std::vector<Gen> odd;
    for (uint32_t k : kept) odd.push_back(Gen{k});
    acc.add(Monomial::from_parts(even, odd), (inv & 1) ? Q(-c) : c);
  }
  return acc.finalize();
}

// Partial derivative with respect to an even generator.
inline GradedElement differentiate(const GradedElement& x, Gen g) {
  if (g.odd()) throw std::invalid_argument("differentiate: odd generator " + g.name());
  Accumulator acc;
  for (auto& [m, c] : x.terms()) {
    unsigned e;
    Monomial rest = m.without(g, e);
    if (!e) continue;
    if (e > 1) {
      Monomial out;
      Monomial::mul(Monomial::of(g, e - 1), rest, out);
      acc.add(out, c * e);
    } else {
      acc.add(rest, c);
    }
  }
  return acc.finalize();
}

// Collects the generators appearing in x.
inline std::vector<Gen> generators(const GradedElement& x) {
  std::vector<Gen> out;
  for (auto& [m, c] : x.terms()) {
    for (unsigned i = 0; i < m.n_even(); ++i) out.push_back(m.even_gen(i));
    for (unsigned i = 0; i < m.n_odd(); ++i) out.push_back(m.odd_gen(i));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

inline nlohmann::json to_json(const GradedElement& x) {
  nlohmann::json arr = nlohmann::json::array();
  for (auto& [m, c] : x.terms()) {
    nlohmann::json even = nlohmann::json::array(), odd = nlohmann::json::array();
    for (unsigned i = 0; i < m.n_even(); ++i) even.push_back({m.even_gen(i).name(), m.even_exp(i)});
    for (unsigned i = 0; i < m.n_odd(); ++i) odd.push_back(m.odd_gen(i).name());
    arr.push_back({{"coeff", c.get_str()}, {"even", even}, {"odd", odd}});
  }
  return arr;
}

// Inverse of Gen::name().
inline Gen gen_from_name(const std::string& name) {
  static const std::regex re(R"(^(a|f|delta|ft|b|bt|v|w)(\^\{p=(\d+)\})?_(\d+)(\^(\d+))?$)");
  std::smatch m;
  if (!std::regex_match(name, m, re)) throw std::invalid_argument("unknown generator name: " + name);
  const std::string fam = m[1];
  const unsigned part = m[3].matched ? unsigned(std::stoul(m[3])) : 0;
  const unsigned i = unsigned(std::stoul(m[4]));
  const bool has_s = m[6].matched;
  const unsigned s = has_s ? unsigned(std::stoul(m[6])) : 0;
  Gen g;
  if (fam == "a") g = gen_a(i, part);
  else if (fam == "f") g = gen_f(i, part);
  else if (fam == "delta") g = gen_delta(i, part);
  else if (fam == "ft") g = gen_rf(i, part);
  else if (fam == "b" && has_s) g = gen_b(i, s, part);
  else if (fam == "bt" && has_s) g = gen_rb(i, s, part);
  else if (fam == "v" && part == 0) g = gen_v(i);
  else if (fam == "w") g = gen_w(part, i);
  else throw std::invalid_argument("malformed generator name: " + name);
  if (g.name() != name) throw std::invalid_argument("non-canonical generator name: " + name);
  return g;
}

// Inverse of to_json(GradedElement).
inline GradedElement element_from_json(const nlohmann::json& j) {
  Accumulator acc;
  for (const auto& t : j) {
    Q c(t.at("coeff").get<std::string>());
    c.canonicalize();
    GradedElement m(c);
    for (const auto& e : t.at("even")) m = m * gen(gen_from_name(e.at(0).get<std::string>())).pow(e.at(1).get<unsigned>());
    for (const auto& o : t.at("odd")) m = m * gen(gen_from_name(o.get<std::string>()));
    acc.add_scaled(m, 1);
  }
  return acc.finalize();
}

}  // namespace relcalc
