#include <gtest/gtest.h>

#include "relcalc/symfun.hpp"

using namespace relcalc;

namespace {

GradedElement d(unsigned k, unsigned part = 0) { return gen(gen_delta(k, part)); }
GradedElement a(unsigned r, unsigned part = 0) { return gen(gen_a(r, part)); }

}  // namespace

TEST(Symfun, ElementarySymmetric) {
  EXPECT_EQ(elementary_symmetric(3, 0), GradedElement(1L));
  EXPECT_EQ(elementary_symmetric(2, 1), d(1) + d(2));
  EXPECT_EQ(elementary_symmetric(2, 2), d(1) * d(2));
  EXPECT_EQ(elementary_symmetric(3, 2), d(1) * d(2) + d(1) * d(3) + d(2) * d(3));
}

TEST(Symfun, RootDerivativeRankOne) { EXPECT_EQ(root_derivative(1, 1, 1), SplitElement(1L)); }

TEST(Symfun, RootDerivativeRankTwoByHand) {
  // J = [[1, 1], [d2, d1]], J^{-1} = [[d1, -1], [-d2, 1]] / (d1 - d2)
  auto inv = SplitElement::inverse_difference(gen_delta(1), gen_delta(2));
  EXPECT_EQ(root_derivative(2, 1, 1), SplitElement(d(1)) * inv);
  EXPECT_EQ(root_derivative(2, 1, 2), SplitElement(-1L) * inv);
  EXPECT_EQ(root_derivative(2, 2, 1), SplitElement(-d(2)) * inv);
  EXPECT_EQ(root_derivative(2, 2, 2), SplitElement(1L) * inv);
}

TEST(Symfun, RootDerivativeClosedForm) {
  // d delta_k / d a_i = (-1)^{i-1} delta_k^{n-i} / prod_{j != k} (delta_k - delta_j)
  for (unsigned n = 2; n <= 4; ++n)
    for (unsigned k = 1; k <= n; ++k)
      for (unsigned i = 1; i <= n; ++i) {
        SplitElement expect(d(k).pow(n - i) * Q((i - 1) % 2 ? -1 : 1));
        for (unsigned j = 1; j <= n; ++j)
          if (j != k) expect = expect * SplitElement::inverse_difference(gen_delta(k), gen_delta(j));
        EXPECT_EQ(root_derivative(n, k, i), expect) << n << k << i;
      }
}

TEST(Symfun, JacobianInverse) {
  for (unsigned n = 1; n <= 4; ++n) {
    auto rs = roots(n);
    for (unsigned i = 1; i <= n; ++i)
      for (unsigned j = 1; j <= n; ++j) {
        SplitElement sum;
        for (unsigned k = 1; k <= n; ++k) {
          std::vector<Gen> others;
          for (unsigned l = 1; l <= n; ++l)
            if (l != k) others.push_back(rs[l - 1]);
          sum += SplitElement(elementary_symmetric_of(others, i - 1)) * root_derivative(n, k, j);
        }
        EXPECT_EQ(sum, SplitElement(i == j ? 1L : 0L)) << n << i << j;
      }
  }
}

TEST(Symfun, TraceIdentities) {
  for (unsigned n = 2; n <= 4; ++n)
    for (unsigned i = 1; i <= n; ++i) {
      SplitElement s;
      for (unsigned k = 1; k <= n; ++k) s += root_derivative(n, k, i);
      EXPECT_EQ(s, SplitElement(i == 1 ? 1L : 0L));
      for (unsigned j = 1; j <= n; ++j) {
        SplitElement s2;
        for (unsigned k = 1; k <= n; ++k) s2 += root_second_derivative(n, k, i, j);
        EXPECT_TRUE(s2.is_zero()) << n << i << j;
      }
    }
}

TEST(Symfun, SecondDerivativeRankTwoByHand) {
  // delta_1 = (a1 + D)/2 with D^2 = a1^2 - 4 a2, so d^2 delta_1 / d a2^2 = -4 / D^3 * (1/2)*...;
  // compare against differentiating the closed form d delta_1/d a2 = -1/(d1 - d2):
  // d/d a2 of -(d1-d2)^{-1} = (d1-d2)^{-2} (d d1/d a2 - d d2/d a2) = -2/(d1-d2)^3.
  auto inv = SplitElement::inverse_difference(gen_delta(1), gen_delta(2), 3);
  EXPECT_EQ(root_second_derivative(2, 1, 2, 2), SplitElement(-2L) * inv);
  EXPECT_EQ(root_second_derivative(2, 1, 1, 2), root_second_derivative(2, 1, 2, 1));
}

TEST(Symfun, SymmetrizeExamples) {
  EXPECT_EQ(symmetrize_to_base(d(1) + d(2), 2), a(1));
  EXPECT_EQ(symmetrize_to_base((d(1) - d(2)).pow(2), 2), a(1).pow(2) - a(2) * Q(4));
  EXPECT_EQ(symmetrize_to_base(d(1).pow(2) + d(2).pow(2) + d(3).pow(2), 3), a(1).pow(2) - a(2) * Q(2));
}

TEST(Symfun, SymmetrizeRejects) {
  try {
    symmetrize_to_base(d(1), 2);
    FAIL();
  } catch (const SymmetrizationError& e) {
    EXPECT_NE(std::string(e.what()).find("delta_1"), std::string::npos);
  }
  EXPECT_THROW(symmetrize_to_base(SplitElement::inverse_difference(gen_delta(1), gen_delta(2), 2), 2),
               SymmetrizationError);
}

TEST(Symfun, SymmetrizeRoundTrip) {
  // polynomials in a_1..a_3 with odd coefficients mixed in
  GradedElement b = gen(gen_b(2, 1)) * gen(gen_b(1, 3));
  std::vector<GradedElement> xs{a(1).pow(3) - a(2) * a(1) * Q(5) + a(3),
                                a(2).pow(2) * b + a(3) * a(1),
                                a(1).pow(4) * Q(7) - a(3) * a(1) * b};
  for (auto& x : xs) EXPECT_EQ(symmetrize_to_base(expand_in_roots(x, 3), 3), x);
}

TEST(Symfun, SymmetrizeInPart) {
  GradedElement x = d(1, 2) * d(2, 2) + d(1, 1);
  EXPECT_EQ(symmetrize_to_base(x, 2, 2), a(2, 2) + d(1, 1));
}

TEST(Symfun, DerivativeQuotientRule) {
  // d/d delta_1 of delta_1 / (delta_1 - delta_2) = -delta_2 / (delta_1 - delta_2)^2
  auto x = SplitElement(d(1)) * SplitElement::inverse_difference(gen_delta(1), gen_delta(2));
  auto expect = SplitElement(-d(2)) * SplitElement::inverse_difference(gen_delta(1), gen_delta(2), 2);
  EXPECT_EQ(x.derivative(gen_delta(1)), expect);
}

TEST(Symfun, CancellationIsMinimal) {
  auto x = SplitElement((d(1) - d(2)) * d(3)) * SplitElement::inverse_difference(gen_delta(1), gen_delta(2));
  EXPECT_TRUE(x.is_polynomial());
  EXPECT_EQ(x.numerator(), d(3));
}

TEST(Symfun, WXRankOne) {
  auto wx = build_W_X(1, 1, 2);
  EXPECT_EQ(wx.W, SplitElement(gen(gen_f(1))));
  EXPECT_EQ(wx.X, SplitElement(xi(1, 1, 2)));
}

TEST(Symfun, WSumsToDegree) {
  for (unsigned n = 2; n <= 3; ++n) {
    SplitElement s;
    for (unsigned k = 1; k <= n; ++k) s += build_W_X(n, k, 2, 7).W;
    EXPECT_EQ(s, SplitElement(7L)) << n;
  }
}

TEST(Symfun, WRankTwoClosedForm) {
  // W_1 = f1 d1/(d1-d2) - f2/(d1-d2) + sum_ij xi_ij d^2 delta_1/da_i da_j with the
  // 2x2 oracle: d^2 d1/da1^2 = -2 d1 d2/(d1-d2)^3, d^2 d1/da1 da2 = (d1+d2)/(d1-d2)^3,
  // d^2 d1/da2^2 = -2/(d1-d2)^3.
  const unsigned g = 2;
  auto i1 = SplitElement::inverse_difference(gen_delta(1), gen_delta(2));
  auto i3 = SplitElement::inverse_difference(gen_delta(1), gen_delta(2), 3);
  SplitElement expect = SplitElement(gen(gen_f(1)) * d(1)) * i1 - SplitElement(gen(gen_f(2))) * i1;
  expect += SplitElement(xi(1, 1, g) * d(1) * d(2) * Q(-2)) * i3;
  expect += SplitElement((xi(1, 2, g) + xi(2, 1, g)) * (d(1) + d(2))) * i3;
  expect += SplitElement(xi(2, 2, g) * Q(-2)) * i3;
  EXPECT_EQ(build_W_X(2, 1, g).W, expect);
}

TEST(Symfun, JsonShape) {
  auto j = root_derivative(2, 1, 1).to_json();
  EXPECT_EQ(j["denominator"][0][0], "delta_1");
  EXPECT_EQ(j["denominator"][0][2], 1);
}
