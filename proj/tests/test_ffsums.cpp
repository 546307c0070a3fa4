#include <gtest/gtest.h>

#include <cmath>

#include "lwl/ffsums.hpp"

using namespace lwl;

TEST(FfSums, GaussSumValues) {
  FiniteField K(5);
  EXPECT_NEAR(std::abs(tau(K, K.trivial()) - cplx(-1.0)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(tau(K, K.eta()) - cplx(std::sqrt(5.0))), 0.0, 1e-12);
  for (i64 p : {5, 7, 11, 13}) {
    FiniteField Kp(p);
    for (auto r : Kp.all_chars())
      if (!Kp.is_trivial(r)) EXPECT_NEAR(std::abs(tau(Kp, r)), std::sqrt(static_cast<double>(p)), 1e-10);
  }
}

TEST(FfSums, Duplication) {
  for (i64 p : {5, 7, 11, 13}) {
    FiniteField K(p);
    for (auto r : K.all_chars()) EXPECT_LE(duplication_residual(K, r), 1e-9);
  }
}

TEST(FfSums, HyperKloostermanVariant) {
  for (i64 p : {5, 7, 11}) {
    FiniteField K(p);
    cplx total = 0.0;
    for (i64 d = 1; d < p; ++d) {
      cplx k = kl3(K, d);
      // The two sides differ by the rho = eta Jacobi-sum term.
      cplx defect = -K.chi(K.eta(), -d) * tau(K, K.eta());
      EXPECT_NEAR(std::abs(hyperkl_lhs(K, d) - k - defect), 0.0, 1e-9);
      EXPECT_LE(std::abs(k), 3.0 * p);
      total += k;
    }
    EXPECT_NEAR(std::abs(total - cplx(-1.0)), 0.0, 1e-9);
  }
  EXPECT_THROW(kl3(FiniteField(5), 0), Error);
}

TEST(FfSums, Kl3MellinIsCubeOfGaussSum) {
  FiniteField K(7);
  for (auto r : K.all_chars()) {
    cplx s = 0.0;
    for (i64 d = 1; d < 7; ++d) s += kl3(K, d) * K.chi(r, d);
    cplx t = tau(K, r);
    EXPECT_NEAR(std::abs(s - t * t * t), 0.0, 1e-9);
  }
}

TEST(FfSums, KatzWithoutDenominatorIsKl3) {
  FiniteField K(11);
  auto tab = katz_H_table(K, {K.trivial(), K.trivial(), K.trivial()}, {});
  for (i64 t = 1; t < 11; ++t) EXPECT_NEAR(std::abs(tab[static_cast<size_t>(t)] - kl3(K, t) / 11.0), 0.0, 1e-10);
}

TEST(FfSums, KatzMatchesBruteForce) {
  FiniteField K(7);
  std::vector<FqChar> A{K.trivial(), FqChar{2}}, B{FqChar{1}, K.eta()};
  for (i64 t = 1; t < 7; ++t) {
    cplx s = 0.0;
    for (i64 x1 = 1; x1 < 7; ++x1)
      for (i64 x2 = 1; x2 < 7; ++x2)
        for (i64 y1 = 1; y1 < 7; ++y1) {
          // x1 x2 = t y1 y2 fixes y2
          i64 y2 = x1 * x2 % 7 * K.inv_elem(t * y1 % 7) % 7;
          s += K.chi(A[0], x1) * K.chi(A[1], x2) * std::conj(K.chi(B[0], y1) * K.chi(B[1], y2)) *
               K.psi(x1 + x2 - y1 - y2);
        }
    s *= -std::pow(7.0, -1.5);
    EXPECT_NEAR(std::abs(katz_H(K, t, A, B) - s), 0.0, 1e-10);
  }
}

TEST(FfSums, SAndTSymmetries) {
  for (i64 p : {5, 7, 11}) {
    FiniteField K(p);
    for (auto c0 : K.all_chars())
      for (auto c : K.all_chars()) {
        if (K.is_trivial(c0) || K.is_trivial(c)) continue;
        // alpha -> -alpha swaps chi0 and its inverse in S
        EXPECT_NEAR(std::abs(sum_S(K, c0, c) - sum_S(K, K.inv(c0), c)), 0.0, 1e-9);
        // u <-> v and complex conjugation in T
        EXPECT_NEAR(std::abs(sum_T(K, c0, c) - sum_T(K, c0, K.inv(c))), 0.0, 1e-9);
        EXPECT_NEAR(std::abs(sum_T(K, K.inv(c0), c) - std::conj(sum_T(K, c0, c))), 0.0, 1e-9);
        EXPECT_LE(std::abs(sum_T(K, c0, c)), 8.0 * p);
      }
  }
  FiniteField K(5);
  EXPECT_THROW(sum_T(K, K.trivial(), K.eta()), Error);
  EXPECT_THROW(sum_S(K, K.eta(), K.trivial()), Error);
}

TEST(FfSums, FrozenValuesAtSeven) {
  FiniteField K(7);
  // frozen from the direct double sums
  cplx t = sum_T(K, FqChar{1}, FqChar{1});
  EXPECT_NEAR(t.real(), 4.5, 1e-9);
  EXPECT_NEAR(t.imag(), std::sqrt(3.0) / 2, 1e-9);
  EXPECT_NEAR(std::abs(sum_T(K, FqChar{3}, FqChar{2}) - cplx(4.0)), 0.0, 1e-9);
}
