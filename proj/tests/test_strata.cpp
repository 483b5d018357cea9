#include <gtest/gtest.h>

#include <random>
#include <set>

#include "relcalc/strata.hpp"
#include "support.hpp"

using namespace relcalc;

namespace {

GradedElement ap(unsigned p) { return gen(gen_a(1, p)); }

// Every sequence of parts with slopes in [d/n - cap, d/n + cap], filtered by
// the invariants and the codimension; independent of the pruning in
// enumerate_types.
std::set<std::string> brute_force_types(int n, long d, unsigned g, long codim_max, long cap) {
  std::set<std::string> out;
  std::vector<StratumPart> cur;
  std::function<void(int, long)> rec = [&](int n_left, long d_left) {
    if (n_left == 0) {
      if (d_left != 0 || cur.size() < 2) return;
      for (size_t i = 1; i < cur.size(); ++i)
        if (!(frac(cur[i - 1].d, cur[i - 1].n) > frac(cur[i].d, cur[i].n))) return;
      StratumType t;
      t.parts = cur;
      if (codim(t, g) <= codim_max) out.insert(t.str());
      return;
    }
    for (int np = 1; np <= n_left; ++np)
      for (long dp = np * (d / n - cap); dp <= np * (d / n + cap); ++dp) {
        cur.push_back({dp, unsigned(np)});
        rec(n_left - np, d_left - dp);
        cur.pop_back();
      }
  };
  rec(n, d);
  return out;
}

}  // namespace

TEST(StratumType, ParseAndValidate) {
  auto mu = StratumType::parse("3/1,2/1");
  EXPECT_EQ(mu.size(), 2u);
  EXPECT_EQ(mu.rank(), 2u);
  EXPECT_EQ(mu.degree(), 5);
  EXPECT_TRUE(mu.is_delta());
  EXPECT_EQ(mu.str(), "3/1,2/1");
  EXPECT_THROW(StratumType::parse("2/1,3/1"), std::invalid_argument);
  EXPECT_THROW(StratumType::parse("4/2,3/1"), std::invalid_argument);
  EXPECT_THROW(StratumType::parse("4/0"), std::invalid_argument);
}

TEST(Codim, HandValues) {
  EXPECT_EQ(codim(StratumType::parse("3/1,2/1"), 2), 2);
  EXPECT_EQ(codim(semistable_type(2, 5), 2), 0);
  // n_2 d_1 - n_1 d_2 + n_1 n_2 gbar = 2*3 - 4 + 2
  EXPECT_EQ(codim(StratumType::parse("3/1,4/2"), 2), 4);
  // three pairs: (1*4-2+1) + (1*4-1+1) + (1*2-1+1)
  EXPECT_EQ(codim(StratumType::parse("4/1,2/1,1/1"), 2), 3 + 4 + 2);
}

TEST(Enumerate, MatchesBruteForce) {
  for (auto [n, d, g] : {std::tuple{2, 5, 2u}, {3, 7, 2u}, {3, 8, 2u}, {4, 13, 2u}, {3, 13, 3u}}) {
    for (long cm : {4L, 8L}) {
      std::set<std::string> got;
      for (auto& t : enumerate_types(n, d, g, cm)) EXPECT_TRUE(got.insert(t.str()).second) << t.str();
      EXPECT_EQ(got, brute_force_types(n, d, g, cm, 12)) << n << " " << d << " " << cm;
    }
  }
  EXPECT_EQ(enumerate_types(2, 5, 2, 4).size(), 2u);  // d_1 = 3, 4
  auto with = enumerate_types(2, 5, 2, 4, true);
  EXPECT_EQ(with.size(), 3u);
}

TEST(Enumerate, MinimalCodimensionDichotomy) {
  for (int n : {2, 3, 4})
    for (unsigned g : {2u, 3u})
      for (int delta = 1; delta < n; ++delta) {
        if (std::gcd(n, delta) != 1) continue;
        const long gbar = long(g) - 1;
        const long d = 2 * n * gbar + delta;
        long best = -1;
        for (auto& t : enumerate_types(n, d, g, 40)) {
          long c = codim(t, g);
          if (best < 0 || c < best) best = c;
        }
        long expect = 2 * delta < n ? delta + (n - 1) * gbar : n - delta + (n - 1) * gbar;
        EXPECT_EQ(2 * best, 2 * expect) << n << " " << g << " " << delta;
      }
}

TEST(Enumerate, CodimensionAdditivity) {
  for (auto [n, d, g] : {std::tuple{2, 5, 2u}, {3, 7, 2u}, {3, 8, 3u}, {4, 13, 2u}}) {
    const long gbar = long(g) - 1;
    for (auto& mu : enumerate_types(n, d, g, 12)) {
      if (mu.part(mu.size()).n != 1) continue;
      const long dP = mu.part(mu.size()).d;
      StratumType prime;
      prime.parts.assign(mu.parts.begin(), mu.parts.end() - 1);
      EXPECT_EQ(codim(prime, g) + d - n * dP + (n - 1) * gbar, codim(mu, g)) << mu.str();
    }
  }
}

TEST(Orders, DominanceAndTotalOrder) {
  const int n = 3;
  const long d = 7;
  const unsigned g = 2;
  auto all = enumerate_types(n, d, g, 8, true);
  auto mu0 = semistable_type(n, d);
  for (auto& x : all) {
    EXPECT_TRUE(dominance_leq(x, x));
    EXPECT_TRUE(dominance_leq(mu0, x));
    if (x != mu0) EXPECT_TRUE(total_order_prec(mu0, x));
    for (auto& y : all) {
      if (x != y && dominance_leq(x, y)) {
        EXPECT_FALSE(dominance_leq(y, x));
        EXPECT_TRUE(total_order_prec(x, y)) << x.str() << " " << y.str();
      }
      if (x != y) EXPECT_NE(total_order_prec(x, y), total_order_prec(y, x));
    }
  }
  EXPECT_THROW(predecessor(mu0, all), std::invalid_argument);
  auto sorted = all;
  std::sort(sorted.begin(), sorted.end(), total_order_prec);
  EXPECT_EQ(sorted.front(), mu0);
  EXPECT_EQ(predecessor(sorted[2], all), sorted[1]);
  EXPECT_THROW(dominance_leq(mu0, semistable_type(2, 5)), std::invalid_argument);
}

TEST(Restrict, RankTwoDeltaImages) {
  auto mu = StratumType::parse("3/1,2/1");
  const unsigned g = 2;
  EXPECT_EQ(restrict(gen(gen_a(1)), mu, g), ap(1) + ap(2));
  EXPECT_EQ(restrict(gen(gen_a(2)), mu, g), ap(1) * ap(2));
  for (unsigned s = 1; s <= 4; ++s)
    EXPECT_EQ(restrict(gen(gen_b(1, s)), mu, g), gen(gen_b(1, s, 1)) + gen(gen_b(1, s, 2)));
  // d-part sum_i d_i d a_2 / d a_1^i plus the cross pairing of odd classes
  GradedElement cross;
  for (unsigned s = 1; s <= g; ++s)
    cross += gen(gen_b(1, s, 1)) * gen(gen_b(1, s + g, 2)) - gen(gen_b(1, s + g, 1)) * gen(gen_b(1, s, 2));
  EXPECT_EQ(restrict(gen(gen_f(2)), mu, g), ap(2) * Q(3) + ap(1) * Q(2) + cross);
}

TEST(Restrict, IsDegreePreservingHomomorphism) {
  std::mt19937 rng(11);
  const unsigned g = 2;
  for (auto text : {"3/1,2/1", "5/2,2/1", "4/1,2/1,1/1"}) {
    auto mu = StratumType::parse(text);
    const unsigned n = mu.rank();
    std::vector<Gen> pool;
    for (unsigned r = 1; r <= n; ++r) {
      pool.push_back(gen_a(r));
      if (r >= 2) pool.push_back(gen_f(r));
      for (unsigned s = 1; s <= 2 * g; ++s) pool.push_back(gen_b(r, s));
    }
    for (int trial = 0; trial < 6; ++trial) {
      auto x = fixtures::random_element(rng, pool, 3, 2);
      auto y = fixtures::random_element(rng, pool, 3, 2);
      EXPECT_EQ(restrict(x * y, mu, g), restrict(x, mu, g) * restrict(y, mu, g));
      for (auto& [m, c] : x.terms()) {
        auto img = restrict(GradedElement(m, c), mu, g);
        if (!img.is_zero()) EXPECT_TRUE(img.is_homogeneous(m.degree()));
      }
    }
    auto top = omega_tilde_coeffs(mu);
    for (unsigned r = 1; r <= n; ++r) EXPECT_EQ(restrict(gen(gen_a(r)), mu, g), top[r]);
  }
}

TEST(Restrict, PushforwardMatchesClosedForm) {
  const unsigned g = 2;
  auto mu = StratumType::parse("3/1,2/1");
  auto c = restrict_pushforward(mu, g, 6);
  EXPECT_EQ(c.coeff(0), GradedElement(1L));
  // (1 + a^1 t)^2 exp(xi^11 t/(1 + a^1 t)) (1 + a^2 t) exp(xi^22 t/(1 + a^2 t))
  TruncatedSeries expect = TruncatedSeries::constant(GradedElement(1L), 0, 6);
  for (unsigned p : {1u, 2u}) {
    auto w = omega_series(1, p, 6);
    auto lin = TruncatedSeries::monomial(xi(1, 1, g, p, p), 1, 0, 6);
    expect = expect * w.pow(p == 1 ? 2 : 1) * (lin * w.inverse()).exp();
  }
  EXPECT_EQ(c, expect);
  auto cfg = ModuliConfig::make(2, 5, 2);
  EXPECT_EQ(restrict_series(chern_pushforward(cfg, 6), mu, g), c);
  EXPECT_EQ(restrict_series(chern_pushforward_dual(cfg, 6), mu, g),
            restrict_pushforward(mu, g, 6, Flavor::Dual));
}

TEST(Restrict, PushforwardRankTwoPart) {
  const unsigned g = 2;
  auto cfg = ModuliConfig::make(3, 7, 2);
  for (auto text : {"5/2,2/1", "3/1,4/2", "4/1,2/1,1/1"}) {
    auto mu = StratumType::parse(text);
    EXPECT_EQ(restrict_series(chern_pushforward(cfg, 4), mu, g), restrict_pushforward(mu, g, 4)) << text;
  }
}

// Twisting a rank-1 part by a degree-D line bundle multiplies by Omega_p^D.
TEST(Restrict, TensoringIdentityRankOne) {
  for (int D : {1, 2, 3}) {
    auto lhs = chern_series({1, 3 + D, 1}, 2, 6, Flavor::Mumford);
    auto rhs = omega_series(1, 1, 6).pow(D) * chern_series({1, 3, 1}, 2, 6, Flavor::Mumford);
    EXPECT_EQ(lhs, rhs);
  }
}

TEST(VWBasis, RebasedGeneratorsRestrictWithoutV) {
  const unsigned g = 2;
  for (auto text : {"3/1,2/1", "4/1,2/1,1/1", "5/2,2/1", "3/1,4/2"}) {
    auto mu = StratumType::parse(text);
    const unsigned n = mu.rank();
    for (unsigned s = 1; s <= 2 * g; ++s)
      EXPECT_EQ(to_vw(restrict(gen(gen_b(1, s)), mu, g), mu, g), gen(gen_v(s))) << text;
    for (unsigned r = 2; r <= n; ++r) {
      std::vector<GradedElement> imgs{restrict(gen(gen_rf(r)), mu, g)};
      for (unsigned s = 1; s <= 2 * g; ++s) imgs.push_back(restrict(gen(gen_rb(r, s)), mu, g));
      for (auto& x : imgs)
        for (auto gg : generators(to_vw(x, mu, g))) EXPECT_NE(gg.family(), Family::V) << text << " r=" << r;
    }
  }
}

TEST(NormalChern, RankTwoDeltaExample) {
  const unsigned g = 2;
  auto mu = StratumType::parse("3/1,2/1");
  auto c = normal_chern(mu, g, 4);
  GradedElement x = ap(2) - ap(1);
  GradedElement Xi;
  for (unsigned s = 1; s <= g; ++s)
    Xi += (gen(gen_b(1, s, 1)) - gen(gen_b(1, s, 2))) * (gen(gen_b(1, s + g, 1)) - gen(gen_b(1, s + g, 2)));
  auto w = TruncatedSeries::polynomial({GradedElement(1L), x}, 0, 4);
  auto expect = w.pow(2) * (TruncatedSeries::monomial(-Xi, 1, 0, 4) * w.inverse()).exp();
  EXPECT_EQ(c, expect);
  EXPECT_EQ(euler_class(mu, g), x * x - x * Xi + Xi * Xi * frac(1, 2));
  EXPECT_TRUE(euler_class(mu, g).is_homogeneous(4));
}

TEST(NormalChern, EulerDegreeIsTwiceCodimension) {
  for (auto [n, d, g] : {std::tuple{2, 5, 2u}, {3, 7, 2u}, {3, 8, 2u}}) {
    for (auto& mu : enumerate_types(n, d, g, 6)) {
      auto e = euler_class(mu, g);
      EXPECT_TRUE(e.is_homogeneous(int(2 * codim(mu, g)))) << mu.str();
    }
  }
  EXPECT_THROW(euler_class(semistable_type(2, 5), 2), EulerError);
}

TEST(Vanishing, BoundValues) {
  auto mu = StratumType::parse("3/1,2/1");
  EXPECT_EQ(vanishing_bound(mu, 2, Flavor::Mumford), -2);
  EXPECT_EQ(vanishing_bound(mu, 2, Flavor::Dual), -2);
  auto nu = StratumType::parse("4/1,2/1,1/1");
  EXPECT_EQ(vanishing_bound(nu, 2, Flavor::Mumford), -3);
  EXPECT_EQ(vanishing_bound(nu, 2, Flavor::Dual), -3);
  EXPECT_EQ(vanishing_bound(StratumType::parse("5/2,2/1"), 2, Flavor::Dual), -1);
}

// Restricting the base relations directly agrees with the stratum-side level.
TEST(Vanishing, BaseRestrictionRankTwo) {
  const unsigned g = 2;
  auto cfg = ModuliConfig::make(2, 5, 2);
  auto mu = StratumType::parse("3/1,2/1");
  for (Flavor fl : {Flavor::Mumford, Flavor::Dual}) {
    auto rs = relations(cfg, -3, fl);
    const int bound = vanishing_bound(mu, g, fl);
    for (auto& e : rs.entries) {
      auto img = restrict(e.element, mu, g);
      if (e.r <= bound) EXPECT_TRUE(img.is_zero()) << e.r << " " << e.k << " " << e.mask;
      // S-component extraction on the stratum side
      auto level = restricted_level(mu, g, e.r, fl)[e.k];
      auto vw = to_vw(level, mu, g);
      auto comp = odd_coefficient(vw, subset_gens(e.mask, v_universe(g)), v_universe(g));
      EXPECT_EQ(to_vw(img, mu, g), comp) << e.r << " " << e.k << " " << e.mask;
    }
    bool boundary_nonzero = false;
    for (auto& e : rs.entries)
      if (e.r == bound + 1 && !restrict(e.element, mu, g).is_zero()) boundary_nonzero = true;
    EXPECT_TRUE(boundary_nonzero);
  }
}

TEST(Vanishing, DeltaFactorizationMatchesSeries) {
  const unsigned g = 2;
  for (auto text : {"3/1,2/1", "4/1,2/1,1/1"}) {
    auto mu = StratumType::parse(text);
    for (Flavor fl : {Flavor::Mumford, Flavor::Dual})
      for (int r : {-1, -2}) {
        auto dd = delta_decomposition(mu, g, r, fl);
        EXPECT_EQ(assemble_delta(dd, mu, g, fl), restricted_level(mu, g, r, fl)) << text << " " << r;
      }
  }
}

TEST(Vanishing, Reports) {
  auto rep = verify_vanishing(StratumType::parse("3/1,2/1"), 2, Flavor::Mumford, 3);
  EXPECT_TRUE(rep.ok);
  EXPECT_TRUE(rep.boundary_nonzero);
  auto rep2 = verify_vanishing(StratumType::parse("4/1,2/1,1/1"), 2, Flavor::Dual, 2);
  EXPECT_TRUE(rep2.ok);
  EXPECT_EQ(rep2.to_json()["method"], "delta-factorized");
}

TEST(Theta, RankTwoExample) {
  auto mu = StratumType::parse("3/1,2/1");
  EXPECT_EQ(theta_D(mu, 2), 1);
  for (unsigned K : {1u, 2u}) {
    auto rep = theta_identity(mu, 2, K);
    EXPECT_TRUE(rep.shift_identity) << K;
    EXPECT_TRUE(rep.collapse_identity) << rep.detail;
    EXPECT_TRUE(rep.residual_zero);
    EXPECT_TRUE(rep.theta_identity) << rep.detail;
    EXPECT_FALSE(rep.lhs.is_zero());
  }
}

TEST(Theta, MatchesRestrictedBaseCoefficient) {
  auto cfg = ModuliConfig::make(2, 5, 2);
  auto mu = StratumType::parse("3/1,2/1");
  const int D = theta_D(mu, 2);
  auto C = c_coefficients(psi(cfg, psi_lo_for(2, -D) - 4), omega_tilde_coeffs(2, 0), -D);
  for (unsigned K : {1u, 2u}) EXPECT_EQ(restrict(C[K], mu, 2), theta_identity(mu, 2, K).lhs);
}
