#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "lwl/voronoi.hpp"

using namespace lwl;

namespace {

// max |a - b| over shells lo..hi, shells missing from a window read as 0
double window_diff(const ShellFunction& a, const ShellFunction& b, int lo, int hi) {
  int level = std::max(a.level(), b.level());
  ShellFunction x = a.refined(level), y = b.refined(level);
  double m = 0.0;
  for (int v = lo; v <= hi; ++v)
    for (i64 j = 0; j < x.shell_size(); ++j) {
      cplx s = x.in_window(v) ? x.at_index(v, j) : cplx(0.0);
      cplx t = y.in_window(v) ? y.at_index(v, j) : cplx(0.0);
      m = std::max(m, std::abs(s - t));
    }
  return m;
}

PiData unram(const FieldModel& F) { return unramified_pi(F, std::polar(1.0, 0.7), std::polar(1.0, -2.1)); }

// xi z1 + xi^{-1} z2 + z3 with xi of conductor 1
PiData one_ramified(const FieldModel& F) {
  cplx z1 = std::polar(1.0, 0.4), z2 = std::polar(1.0, 1.3);
  MultChar xi = make_char(F, 1, 1, z1);
  MultChar xinv = make_char(F, 1, F.p() - 2, z2);
  return make_pi(F, {xi, xinv, unramified_char(1.0 / (z1 * z2))});
}

ShellFunction random_function(const FieldModel& F, int vmin, int vmax, int level, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  return ShellFunction::from_fn(F, vmin, vmax, level, [&](int, i64) { return cplx(U(rng), U(rng)); });
}

}  // namespace

TEST(Voronoi, StableElementaryFunctions) {
  FieldModel F(5);
  for (const PiData& pi : {unram(F), one_ramified(F)}) {
    int a = stability_barrier(F, pi);
    EXPECT_EQ(a, 2);
    for (int m : {a, a + 1}) {
      ShellFunction f = op_m(elementary_E(F, m), trivial_char(), -1.0);
      ShellFunction vh = vh_transform(f, pi, -m - 2, 2);
      ShellFunction cf = vh_closed_form(F, VhClosed::E_stable, pi, {m, -m - 2, 2});
      EXPECT_LT(window_diff(vh, cf, -m - 2, 2), 1e-8) << "m=" << m;
    }
  }
}

TEST(Voronoi, SingleShellStaysSingleShell) {
  // all twists ramified: the gamma factor is a monomial
  FieldModel F(7);
  ShellFunction f = op_m(elementary_E(F, 2), trivial_char(), -1.0);
  ShellFunction vh = vh_transform(f, unram(F), -6, 3);
  EXPECT_TRUE(vh.window_exact());
  for (int v = vh.vmin(); v <= vh.vmax(); ++v)
    for (const auto& x : vh.shell(v))
      if (v != -2) EXPECT_LT(std::abs(x), 1e-10);
}

TEST(Voronoi, QuadraticStableForms) {
  for (i64 p : {5, 7}) {
    FieldModel F(p);
    for (const PiData& pi : {unram(F), one_ramified(F)})
      for (int n : {2, 3}) {
        ShellFunction vf = vh_transform(qef_F(F, n), pi, -n - 2, 2);
        ShellFunction cf = vh_closed_form(F, VhClosed::F_n, pi, {n, -n - 2, 2});
        double scale = std::pow(F.qd(), 1.5 * n);
        EXPECT_LT(window_diff(vf, cf, -n - 2, 2), 1e-8 * scale) << "F p=" << p << " n=" << n;
        ShellFunction vg = vh_transform(qef_G(F, n), pi, -n - 2, 2);
        ShellFunction cg = vh_closed_form(F, VhClosed::G_n, pi, {n, -n - 2, 2});
        EXPECT_LT(window_diff(vg, cg, -n - 2, 2), 1e-8 * scale) << "G p=" << p << " n=" << n;
      }
  }
}

TEST(Voronoi, SmallIndexUnramifiedForms) {
  FieldModel F(5);
  PiData pi = unram(F);
  struct Case {
    VhClosed which;
    ShellFunction f;
  };
  std::vector<Case> cases = {{VhClosed::F0_unram, qef_F(F, 0)},
                             {VhClosed::F1_unram, qef_F(F, 1)},
                             {VhClosed::G0_unram, qef_G(F, 0)},
                             {VhClosed::G1_unram, qef_G(F, 1)}};
  int k = 0;
  for (const auto& c : cases) {
    ShellFunction vh = vh_transform(c.f, pi, -6, 3);
    ShellFunction cf = vh_closed_form(F, c.which, pi, {0, -6, 3});
    EXPECT_LT(window_diff(vh, cf, -6, 3), 1e-8) << "case " << k;
    ++k;
  }
}

// the convolution term of VH(F_1) needs the factor zeta_F(1)
TEST(Voronoi, FirstFormWithoutZetaIsOff) {
  FieldModel F(5);
  PiData pi = unram(F);
  ShellFunction vh = vh_transform(qef_F(F, 1), pi, -6, 3);
  ShellFunction lit = vh_closed_form(F, VhClosed::F1_unram_literal, pi, {0, -6, 3});
  // on shell -1 the convolution is -1 and the gap is (zeta - 1) / q
  EXPECT_NEAR(std::abs(vh.value(-1, 1) - lit.value(-1, 1)), (F.zeta1() - 1.0) / F.qd(), 1e-12);
  ShellFunction fixed = vh_closed_form(F, VhClosed::F1_unram, pi, {0, -6, 3});
  for (int v = 0; v <= 3; ++v) {
    cplx conv = vh.value(v, 1);
    EXPECT_NEAR(std::abs(conv - F.zeta1() * lit.value(v, 1)), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(conv - fixed.value(v, 1)), 0.0, 1e-12);
  }
}

TEST(Voronoi, SecondFunctionVanishesWhenMinusOneIsNotASquare) {
  FieldModel F(7);
  EXPECT_EQ(qef_G(F, 0).max_abs(), 0.0);
  EXPECT_EQ(vh_closed_form(F, VhClosed::G0_unram, unram(F), {}).max_abs(), 0.0);
}

TEST(Voronoi, FunctionalEquationRoundTrip) {
  for (i64 p : {5, 7}) {
    FieldModel F(p);
    for (const PiData& pi : {unram(F), one_ramified(F)}) {
      ShellFunction f = random_function(F, -3, 1, 2, 11 + static_cast<unsigned>(p));
      const int hi = 4;
      ShellFunction vh = vh_transform(f, pi, -8, hi);
      // the window values are exact; read them as an exact function
      ShellFunction w = ShellFunction::from_fn(F, vh.vmin(), hi, vh.level(),
                                               [&](int v, i64 u) { return vh.value(v, u); });
      for (const auto& xi : enumerate_chars(F, 2)) {
        LaurentPoly lhs = mellin(w, char_inv(xi));
        LaurentPoly rhs = gamma_factor(F, pi, xi).times_poly(mellin(f, xi)).expand(vh.vmin(), hi);
        for (int e = vh.vmin(); e <= hi; ++e) EXPECT_LT(std::abs(lhs.coeff(-e) - rhs.coeff(e)), 1e-8);
      }
    }
  }
}

TEST(Voronoi, TruncatedOutputRefusesOutsideWindow) {
  FieldModel F(5);
  ShellFunction vh = vh_transform(qef_F(F, 0), unram(F), -4, 1);
  EXPECT_FALSE(vh.window_exact());
  EXPECT_GT(vh.tail_bound(), 0.0);
  EXPECT_LT(vh.tail_bound(), 1.0);
  try {
    vh.value(2, 1);
    FAIL() << "expected truncation-unsound";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "truncation-unsound");
  }
}

TEST(Voronoi, ParameterRanges) {
  FieldModel F(5);
  EXPECT_THROW(vh_closed_form(F, VhClosed::F_n, unram(F), {1, -4, 0}), Error);
  EXPECT_THROW(vh_closed_form(F, VhClosed::F0_unram, one_ramified(F), {}), Error);
}

// chi(4) gamma(1/2, chi) = gamma(1/2, chi)^3 gamma(1/2, chi^{-2}) for even conductor,
// read off from the Mellin transform of VH(F_n)
TEST(Voronoi, CubeOfGammaIdentity) {
  for (i64 p : {5, 7}) {
    FieldModel F(p);
    for (const auto& chi : enumerate_chars(F, 2)) {
      if (char_reduce(F, chi).conductor != 2) continue;
      cplx lhs = char_unit(F, chi, 4) * gamma_half_ramified(F, chi);
      cplx rhs = std::pow(gamma_half_ramified(F, chi), 3) * gamma_half_ramified(F, char_pow(F, chi, -2));
      EXPECT_LT(std::abs(lhs - rhs), 1e-10);
    }
  }
}
