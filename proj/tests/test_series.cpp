#include <gtest/gtest.h>

#include <random>

#include "relcalc/series.hpp"
#include "support.hpp"

using namespace relcalc;

namespace {

GradedElement a(unsigned r) { return gen(gen_a(r)); }

// Omega(t) = 1 + a_1 t + ... + a_n t^n, exact on [0, hi].
TruncatedSeries omega(unsigned n, int hi) {
  std::vector<GradedElement> c{GradedElement(1L)};
  for (unsigned r = 1; r <= n && int(r) <= hi; ++r) c.push_back(a(r));
  return TruncatedSeries::polynomial(c, 0, hi);
}

}  // namespace

TEST(Series, GeometricInverse) {
  TruncatedSeries x = TruncatedSeries::polynomial({GradedElement(1L), a(1)}, 0, 5);
  TruncatedSeries inv = x.inverse();
  for (int k = 0; k <= 5; ++k) EXPECT_EQ(inv[k], a(1).pow(unsigned(k)) * Q(k % 2 ? -1 : 1));
  TruncatedSeries one = x * inv;
  EXPECT_EQ(one.lo(), 0);
  EXPECT_EQ(one.hi(), 5);
  EXPECT_EQ(one[0], GradedElement(1L));
  for (int k = 1; k <= 5; ++k) EXPECT_TRUE(one[k].is_zero());
}

TEST(Series, OmegaTimesInverse) {
  TruncatedSeries w = omega(3, 7);
  TruncatedSeries one = w * w.inverse();
  EXPECT_EQ(one[0], GradedElement(1L));
  for (int k = 1; k <= 7; ++k) EXPECT_TRUE(one[k].is_zero());
}

TEST(Series, ProductWindowAtZero) {
  TruncatedSeries x(0, 5), y(0, 5);
  auto p = x * y;
  EXPECT_EQ(p.lo(), 0);
  EXPECT_EQ(p.hi(), 5);
  auto q = x.shift(-2) * y;
  EXPECT_EQ(q.lo(), -2);
  EXPECT_EQ(q.hi(), 3);
}

TEST(Series, ExpOfZero) {
  TruncatedSeries z(0, 4);
  auto e = z.exp();
  EXPECT_EQ(e[0], GradedElement(1L));
  for (int k = 1; k <= 4; ++k) EXPECT_TRUE(e[k].is_zero());
}

TEST(Series, ExpOfNilpotentXi) {
  GradedElement x = xi(1, 1, 2);
  auto e = TruncatedSeries::monomial(x, 1, 0, 4).exp();
  EXPECT_EQ(e[0], GradedElement(1L));
  EXPECT_EQ(e[1], x);
  EXPECT_EQ(e[2], x * x * frac(1, 2));
  EXPECT_TRUE(e[3].is_zero());
  EXPECT_TRUE(e[4].is_zero());
}

TEST(Series, ExpTimesExpOfNegative) {
  TruncatedSeries x = TruncatedSeries::polynomial({GradedElement(), a(1), a(2) + xi(1, 1, 2)}, 0, 6);
  auto one = x.exp() * (-x).exp();
  EXPECT_EQ(one[0], GradedElement(1L));
  for (int k = 1; k <= 6; ++k) EXPECT_TRUE(one[k].is_zero()) << k;
}

TEST(Series, ExpLogRoundTrip) {
  TruncatedSeries x =
      TruncatedSeries::polynomial({GradedElement(), a(1) * Q(3), a(2) - xi(1, 1, 2), a(3)}, 0, 7);
  EXPECT_EQ(x.exp().log(), x);
  TruncatedSeries w = omega(3, 7);
  EXPECT_EQ(w.log().exp(), w);
}

TEST(Series, ExpWithNilpotentConstant) {
  GradedElement x = xi(1, 1, 2);
  auto e = TruncatedSeries::constant(x, 0, 3).exp();
  EXPECT_EQ(e[0], GradedElement(1L) + x + x * x * frac(1, 2));
  EXPECT_THROW(TruncatedSeries::constant(GradedElement(1L), 0, 3).exp(), std::domain_error);
}

TEST(Series, Integrate) {
  auto one = TruncatedSeries::constant(GradedElement(1L), 0, 3);
  auto t = one.integrate();
  EXPECT_EQ(t[1], GradedElement(1L));
  EXPECT_TRUE(t.coeff_or_zero(0).is_zero());
  auto lin = TruncatedSeries::monomial(a(1) * Q(2), 1, 0, 3).integrate();
  EXPECT_EQ(lin[2], a(1));
}

TEST(Series, IntegrateCancelledResidue) {
  const long d = 5;
  GradedElement f1(d);
  auto x = TruncatedSeries::monomial(GradedElement(d), -1, -1, 3) -
           TruncatedSeries::monomial(f1, -1, -1, 3);
  auto r = x.integrate();
  for (int k = r.lo(); k <= r.hi(); ++k) EXPECT_TRUE(r[k].is_zero());
}

TEST(Series, IntegrateRejectsResidue) {
  auto x = TruncatedSeries::monomial(a(1) * Q(0) + GradedElement(3L), -1, -1, 2);
  try {
    x.integrate();
    FAIL();
  } catch (const std::domain_error& e) {
    EXPECT_NE(std::string(e.what()).find("3"), std::string::npos);
  }
}

TEST(Series, LaurentCoefficients) {
  auto t3 = TruncatedSeries::monomial(GradedElement(1L), 3, 0, 5);
  EXPECT_EQ(laurent_coeff(t3, 3), GradedElement(1L));
  EXPECT_TRUE(laurent_coeff(t3, 0).is_zero());
  EXPECT_THROW(laurent_coeff(t3, 6), WindowError);
  EXPECT_THROW(laurent_coeff(t3, -1), WindowError);
}

TEST(Series, OmegaTildeInverseAtInfinity) {
  // Omega~(t) = t^n Omega(1/t), expanded at infinity.
  const unsigned n = 3;
  TruncatedSeries wt = omega(n, 10).reflect().shift(int(n));
  EXPECT_TRUE(wt.at_infinity());
  auto inv = wt.inverse();
  EXPECT_EQ(inv.hi(), -int(n));
  EXPECT_EQ(laurent_coeff(inv, -int(n)), GradedElement(1L));
  EXPECT_EQ(laurent_coeff(inv, -int(n) - 1), -a(1));
}

TEST(Series, ResidueInvariantUnderShift) {
  std::mt19937 rng(23);
  std::vector<Gen> pool{gen_a(1), gen_a(2), gen_f(2)};
  for (int trial = 0; trial < 10; ++trial) {
    // Laurent polynomial sum_{k=-4}^{3} c_k t^k, c_k of degree 2(3-k) (so the
    // grading is uniform), shifted by t -> t - a_1.
    TruncatedSeries x(-12, 3, true);
    for (int k = -4; k <= 3; ++k) {
      GradedElement c;
      for (int rep = 0; rep < 3; ++rep) {
        GradedElement m(frac(long(rng() % 7) - 3, 1));
        int deg = 2 * (3 - k);
        while (deg > 0) {
          Gen g = pool[rng() % pool.size()];
          if (g.degree() > deg) g = gen_a(1);
          m = m * gen(g);
          deg -= g.degree();
        }
        c += m;
      }
      x.set(k, c);
    }
    auto y = x.shift_variable(a(1));
    EXPECT_EQ(y[-1], x[-1]);
  }
}

TEST(Series, ShiftVariableMatchesBinomial) {
  // (t - c)^2 from t^2
  auto t2 = TruncatedSeries::monomial(GradedElement(1L), 2, -3, 2, true);
  auto s = t2.shift_variable(a(1));
  EXPECT_EQ(s[2], GradedElement(1L));
  EXPECT_EQ(s[1], a(1) * Q(-2));
  EXPECT_EQ(s[0], a(1).pow(2));
  EXPECT_TRUE(s[-1].is_zero());
}

TEST(Series, GradingPreserved) {
  TruncatedSeries w = omega(2, 6);
  w.set_grading(0);
  auto sq = w * w;
  ASSERT_TRUE(sq.grading().has_value());
  EXPECT_NO_THROW(sq.set_grading(0));
  TruncatedSeries bad = TruncatedSeries::polynomial({GradedElement(1L), a(2)}, 0, 3);
  EXPECT_THROW(bad.set_grading(0), std::logic_error);
}

TEST(Series, Json) {
  auto j = omega(2, 2).to_json();
  EXPECT_EQ(j["lo"], 0);
  EXPECT_EQ(j["hi"], 2);
  EXPECT_EQ(j["coeffs"]["1"][0]["even"][0][0], "a_1");
}
