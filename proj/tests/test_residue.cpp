#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "lwl/residue.hpp"

using namespace lwl;

TEST(Residue, FieldModelBasics) {
  FieldModel F(5);
  EXPECT_EQ(F.p(), 5);
  EXPECT_EQ(F.epsilon(), 2);
  EXPECT_EQ(F.generator(), 2);
  EXPECT_EQ(F.legendre(F.epsilon()), -1);
  EXPECT_EQ(F.pk(3), 125);
  EXPECT_THROW(FieldModel(9), Error);
}

TEST(Residue, PsiOnIntegersAndFirstShell) {
  FieldModel F(5);
  EXPECT_NEAR(std::abs(psi_eval(F, PAdic::from_int(F, 17)) - cplx(1.0)), 0.0, 1e-12);
  // psi(1/p) is the standard primitive root of unity.
  cplx z = psi_eval(F, PAdic::make(F, -1, 1));
  EXPECT_NEAR(std::abs(z - std::polar(1.0, 2 * kPi / 5)), 0.0, 1e-12);
}

TEST(Residue, PsiIsAdditive) {
  FieldModel F(7, 4);
  std::mt19937_64 rng(7);
  for (int it = 0; it < 1000; ++it) {
    PAdic a = PAdic::make(F, static_cast<int>(rng() % 4) - 3, 1 + static_cast<i64>(rng() % 2400) * 7 % 2401);
    PAdic b = PAdic::make(F, static_cast<int>(rng() % 4) - 3, 3 + static_cast<i64>(rng() % 2400) * 7 % 2401);
    PAdic c = padd(F, a, b);
    cplx lhs = psi_eval(F, a) * psi_eval(F, b);
    EXPECT_NEAR(std::abs(lhs - psi_eval(F, c)), 0.0, 1e-9);
  }
}

TEST(Residue, PrecisionExhausted) {
  FieldModel F(5, 3);
  EXPECT_THROW(psi_eval(F, PAdic::make(F, -4, 1)), Error);
  PAdic a = PAdic::make(F, 0, 1), b = PAdic::make(F, 0, 124);
  // 1 + 124 = 125 is zero modulo p^3, so equality with 0 is undetermined.
  EXPECT_THROW(pequal(F, padd(F, a, b), PAdic::make(F, 5, 1)), Error);
}

TEST(Residue, CharacterCounts) {
  FieldModel F(5);
  auto c1 = enumerate_chars(F, 1);
  ASSERT_EQ(c1.size(), 4u);
  int unram = 0;
  for (const auto& c : c1) unram += c.conductor == 0;
  EXPECT_EQ(unram, 1);
  auto c2 = enumerate_chars(F, 2);
  ASSERT_EQ(c2.size(), 20u);
  int low = 0;
  for (const auto& c : c2) low += c.conductor <= 1;
  EXPECT_EQ(low, 4);
}

TEST(Residue, Orthogonality) {
  FieldModel F(7);
  auto chars = enumerate_chars(F, 2);
  const auto& G = F.units(2);
  for (size_t a = 0; a < chars.size(); ++a)
    for (size_t b = 0; b < chars.size(); ++b) {
      cplx s = 0.0;
      for (i64 j = 0; j < G.order(); ++j)
        s += char_index(F, chars[a], 2, j) * std::conj(char_index(F, chars[b], 2, j));
      s /= static_cast<double>(G.order());
      EXPECT_NEAR(std::abs(s - cplx(a == b ? 1.0 : 0.0)), 0.0, 1e-9);
    }
}

TEST(Residue, ConductorsAgreeWithKernelTest) {
  FieldModel F(5);
  for (const auto& c : enumerate_chars(F, 3)) {
    // smallest n with chi trivial on 1 + p^n, found by evaluation
    int cond = 3;
    for (int n = 0; n <= 3; ++n) {
      bool trivial = true;
      for (i64 x = 0; x < F.pk(3) && trivial; x += (n == 0 ? 1 : F.pk(n))) {
        i64 u = n == 0 ? x : 1 + x;
        if (u % 5 == 0) continue;
        trivial = std::abs(char_unit(F, c, u) - cplx(1.0)) < 1e-9;
      }
      if (trivial) {
        cond = n;
        break;
      }
    }
    EXPECT_EQ(c.conductor, cond);
  }
}

TEST(Residue, QuadraticGaussIntegral) {
  FieldModel F(5);
  MultChar eta = legendre_char(F);
  cplx g = gauss_integral(F, eta, 1);
  // 5^{-1} times the classical sum sqrt(5)
  EXPECT_NEAR(std::abs(g - cplx(1.0 / std::sqrt(5.0))), 0.0, 1e-12);
}

TEST(Residue, GaussIntegralSupportAndModulus) {
  FieldModel F7(7);
  for (const auto& c : enumerate_chars(F7, 1))
    if (c.conductor == 1) EXPECT_NEAR(std::abs(gauss_integral(F7, c, 2)), 0.0, 1e-12);
  FieldModel F(5);
  for (int m = 1; m <= 3; ++m)
    for (auto c : enumerate_chars(F, m)) {
      c.at_pi = std::polar(1.0, 0.3 * m);
      if (c.conductor != m) continue;
      EXPECT_NEAR(std::abs(gauss_integral(F, c, m)), std::pow(5.0, -0.5 * m), 1e-12);
    }
}

TEST(Residue, FourierInversionOnUnits) {
  FieldModel F(5);
  const auto& G = F.units(2);
  std::vector<cplx> f(static_cast<size_t>(G.order()));
  for (size_t j = 0; j < f.size(); ++j) f[j] = cplx(std::sin(1.0 + j), std::cos(3.0 * j));
  auto chars = enumerate_chars(F, 2);
  std::vector<cplx> hat;
  for (const auto& c : chars) {
    cplx s = 0.0;
    for (i64 j = 0; j < G.order(); ++j) s += f[static_cast<size_t>(j)] * std::conj(char_index(F, c, 2, j));
    hat.push_back(s / static_cast<double>(G.order()));
  }
  for (i64 j = 0; j < G.order(); ++j) {
    cplx s = 0.0;
    for (size_t a = 0; a < chars.size(); ++a) s += hat[a] * char_index(F, chars[a], 2, j);
    EXPECT_NEAR(std::abs(s - f[static_cast<size_t>(j)]), 0.0, 1e-12);
  }
}
