#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "lwl/symbolics.hpp"

using namespace lwl;

namespace {

double coeff_gap(const LaurentPoly& a, const LaurentPoly& b) {
  double m = 0.0;
  for (const auto& [e, c] : a.terms()) m = std::max(m, std::abs(c - b.coeff(e)));
  for (const auto& [e, c] : b.terms()) m = std::max(m, std::abs(c - a.coeff(e)));
  return m;
}

}  // namespace

TEST(Symbolics, LaurentArithmetic) {
  LaurentPoly a = LaurentPoly::monomial(-1, 2.0) + LaurentPoly::constant(1.0);
  LaurentPoly b = LaurentPoly::monomial(1, 3.0);
  LaurentPoly c = a * b;
  EXPECT_EQ(c.min_exp(), 0);
  EXPECT_NEAR(std::abs(c.coeff(0) - cplx(6.0)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(c.coeff(1) - cplx(3.0)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(a.eval(2.0) - cplx(2.0)), 0.0, 1e-15);
}

TEST(Symbolics, ExpansionOfGeometricSeries) {
  RationalLaurent f(LaurentPoly::constant(1.0), {Pole{0.5, 2}});
  LaurentPoly s = f.expand(0, 6);
  // 1/(1 - x/2)^2 = sum (k+1) 2^{-k} x^k
  for (int k = 0; k <= 6; ++k) EXPECT_NEAR(std::abs(s.coeff(k) - cplx((k + 1) * std::pow(0.5, k))), 0.0, 1e-14);
}

TEST(Symbolics, PlusOfTrivialCases) {
  RationalLaurent f(LaurentPoly::constant(1.0), {Pole{0.3, 1}});
  RationalLaurent g = laurent_plus(f, PlusMode::series);
  EXPECT_NEAR(std::abs(g.eval(0.7) - f.eval(0.7)), 0.0, 1e-14);
  RationalLaurent h(LaurentPoly::monomial(-1, 1.0), {});
  EXPECT_TRUE(laurent_plus(h, PlusMode::series).is_zero());
}

TEST(Symbolics, PlusRemovesNegativePart) {
  LaurentPoly num = LaurentPoly::monomial(-2, 1.0) + LaurentPoly::monomial(1, 1.0);
  RationalLaurent f(num, {Pole{0.5, 1}});
  RationalLaurent fp = laurent_plus(f, PlusMode::series);
  // the negative part of the expansion is X^{-2} + 0.5 X^{-1}
  for (cplx X : {cplx(0.3), cplx(0.2, 0.4), cplx(-1.1)}) {
    cplx expect = f.eval(X) - 1.0 / (X * X) - 0.5 / X;
    EXPECT_NEAR(std::abs(fp.eval(X) - expect), 0.0, 1e-12);
  }
  RationalLaurent fpp = laurent_plus(fp, PlusMode::series);
  EXPECT_NEAR(std::abs(fpp.eval(0.4) - fp.eval(0.4)), 0.0, 1e-14);
}

TEST(Symbolics, SeriesAndPartialFractionsAgree) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  const double q = 5.0;
  for (int it = 0; it < 50; ++it) {
    std::vector<Pole> poles;
    int r = 1 + static_cast<int>(rng() % 3), deg = 0;
    for (int j = 0; j < r; ++j) {
      double rad = std::pow(q, -0.5) * (0.3 + 0.7 * std::abs(U(rng)));
      cplx b = std::polar(rad, kPi * U(rng));
      int m = 1 + static_cast<int>(rng() % 2);
      poles.push_back(Pole{b, m});
      deg += m;
    }
    LaurentPoly Q;
    int lo = -1 - static_cast<int>(rng() % 4);
    for (int e = lo; e < deg; ++e) Q.add_term(e, cplx(U(rng), U(rng)));
    RationalLaurent f(Q, poles);
    RationalLaurent a = laurent_plus(f, PlusMode::series);
    RationalLaurent b = laurent_plus(f, PlusMode::partial_fraction);
    EXPECT_LE(coeff_gap(a.expand(0, 12), b.expand(0, 12)), 1e-8);
    EXPECT_NEAR(std::abs(a.eval(std::sqrt(q)) - b.eval(std::sqrt(q))), 0.0, 1e-8);
  }
}

TEST(Symbolics, PartialFractionDegreeCheck) {
  RationalLaurent f(LaurentPoly::monomial(2, 1.0), {Pole{0.2, 1}});
  EXPECT_THROW(laurent_plus(f, PlusMode::partial_fraction), Error);
}

TEST(Symbolics, TaylorInS) {
  RationalLaurent X(LaurentPoly::monomial(1, 1.0), {});
  EXPECT_NEAR(std::abs(taylor_in_s(X, 1, 0.0, 5.0) - cplx(std::log(5.0))), 0.0, 1e-14);
  LaurentPoly num = LaurentPoly::monomial(-1, cplx(0.3, 0.1)) + LaurentPoly::constant(1.0) + LaurentPoly::monomial(2, 0.2);
  RationalLaurent f(num, {Pole{0.2, 1}, Pole{cplx(0.1, 0.15), 2}});
  const double q = 7.0, h = 1e-4;
  for (double s0 : {-0.5, 0.5}) {
    auto fs = [&](double s) { return f.eval(std::pow(q, s)); };
    auto c = taylor_coeffs_in_s(f, 2, s0, q);
    EXPECT_NEAR(std::abs(c[0] - fs(s0)), 0.0, 1e-12);
    auto err1 = [&](double hh) { return std::abs(c[1] - (fs(s0 + hh) - fs(s0 - hh)) / (2 * hh)); };
    auto err2 = [&](double hh) {
      return std::abs(c[2] - (fs(s0 + hh) - 2.0 * fs(s0) + fs(s0 - hh)) / (hh * hh) / 2.0);
    };
    // central differences: halving h divides the error by four
    EXPECT_NEAR(err1(2 * h) / err1(h), 4.0, 0.5);
    EXPECT_LE(err1(h), 1e-5);
    EXPECT_LE(err2(1e-3), 1e-2);
    EXPECT_NEAR(err2(2e-3) / err2(1e-3), 4.0, 0.5);
  }
}

TEST(Symbolics, GammaOfTrivialPi) {
  FieldModel F(5);
  PiData pi = unramified_pi(F, 1.0, 1.0);
  RationalLaurent g = gamma_factor(F, pi, trivial_char());
  for (double s : {0.2, 0.5, 0.9}) {
    double X = std::pow(5.0, s);
    // (L(1-s)/L(s))^3 with L(s) = (1 - 5^{-s})^{-1}
    double one = (1 - 1 / X) / (1 - X / 5.0);
    EXPECT_NEAR(std::abs(g.eval(X) - cplx(one * one * one)), 0.0, 1e-12);
  }
}

TEST(Symbolics, GammaStabilizesToCube) {
  FieldModel F(5);
  PiData pi = unramified_pi(F, std::polar(1.0, 0.4), std::polar(1.0, -1.3));
  for (const auto& chi0 : enumerate_chars(F, 2)) {
    if (chi0.conductor < 2) continue;
    MultChar chi = chi0;
    chi.at_pi = std::polar(1.0, 0.7);
    RationalLaurent g = gamma_factor(F, pi, chi);
    RationalLaurent g1 = gamma_gl1(F, chi);
    RationalLaurent cube = g1 * g1 * g1;
    EXPECT_TRUE(g.poles().empty());
    EXPECT_NEAR(std::abs(g.eval(1.7) - cube.eval(1.7)), 0.0, 1e-12);
    // unit modulus at s = 1/2
    EXPECT_NEAR(std::abs(g1.eval(std::sqrt(5.0))), 1.0, 1e-12);
  }
}

TEST(Symbolics, StabilityBarrier) {
  FieldModel F(5);
  EXPECT_EQ(stability_barrier(F, unramified_pi(F, 1.0, 1.0)), 2);
  auto c2 = enumerate_chars(F, 2);
  MultChar m2;
  for (const auto& c : c2)
    if (c.conductor == 2) m2 = c;
  PiData pi = make_pi(F, {m2, char_inv(m2), trivial_char()});
  EXPECT_EQ(stability_barrier(F, pi), 4);
  MultChar m1 = make_char(F, 1, 1);
  // conductors (1, 1, 2)
  MultChar m3 = char_inv(char_mul(F, m1, m2));
  PiData pi2 = make_pi(F, {m1, m2, m3});
  EXPECT_EQ(stability_barrier(F, pi2), 4);
  EXPECT_THROW(make_pi(F, {m1, trivial_char(), trivial_char()}), Error);
}

TEST(Symbolics, ExponentsAndRho) {
  FieldModel F(5);
  PiData pi = unramified_pi(F, 1.0, 1.0);
  auto d0 = exponents_and_rho(F, pi, trivial_char());
  EXPECT_EQ(d0.d, 3);
  EXPECT_EQ(d0.rho, 3);
  auto d1 = exponents_and_rho(F, pi, make_char(F, 1, 1));
  EXPECT_EQ(d1.d, 0);
  EXPECT_EQ(d1.rho, 3);
  MultChar m1 = make_char(F, 1, 1);
  PiData pi2 = make_pi(F, {m1, char_inv(m1), trivial_char()});
  for (const PiData* P : {&pi, &pi2}) {
    int count = 0;
    for (const auto& xi : enumerate_chars(F, 2)) {
      auto d = exponents_and_rho(F, *P, xi);
      count += d.exponent;
      if (d.exponent) EXPECT_LE(d.rho, 2 * pi_conductor(F, *P) + 3);
    }
    EXPECT_LE(count, 3);
  }
}
