#include <gtest/gtest.h>

#include <cmath>

#include "lwl/dualweight.hpp"
#include "lwl/voronoi.hpp"

using namespace lwl;

namespace {

struct Dw {
  FieldModel F;
  QuadExtModel L;
  PiData pi;
  OrbitalParam par;
  TestFunctionH H;
  DualWeight dw;
  Dw(ExtKind k, int n0, int n1 = 0)
      : F(5), L(F, k), pi(generic_unramified_pi(F)), par(make_par(L, n0, n1)), H(build_H(par)), dw(H, pi) {}
  static OrbitalParam make_par(const QuadExtModel& L, int n0, int n1) {
    OrbitalParam p;
    p.L = &L;
    p.beta = default_beta(L, n0);
    p.n1 = n1 > 0 ? n1 : default_n1(L, p.beta);
    return p;
  }
};

bool all_pass(const std::vector<Verdict>& vs) {
  bool ok = true;
  for (const auto& v : vs) {
    EXPECT_TRUE(v.pass) << v.name << " max=" << v.max_abs << " tail=" << v.tail << " " << v.detail;
    ok = ok && v.pass;
  }
  return ok;
}

}  // namespace

TEST(DualWeight, InftyClosedForm) {
  FieldModel F(5);
  const double q = 5.0;
  EXPECT_NEAR(std::abs(dual_weight_infty(F, trivial_char(), 2) - 1.0 / q / (1.0 - 1.0 / std::sqrt(q))), 0.0, 1e-15);
  EXPECT_EQ(dual_weight_infty(F, make_char(F, 1, 1), 2), cplx(0.0));
  EXPECT_THROW(dual_weight_infty(F, unramified_char(std::sqrt(q)), 2), Error);
}

TEST(DualWeight, InftyDirectWithinTail) {
  FieldModel F(5);
  const PiData pi = generic_unramified_pi(F);
  const MultChar chi = unramified_char(std::polar(1.0, 0.4));
  const TruncatedValue t = dual_weight_infty_direct(F, pi, chi, 2, 3);
  EXPECT_GT(t.tail_bound, 0.0);
  EXPECT_LE(std::abs(t.value - dual_weight_infty(F, chi, 2)), t.tail_bound);
  // the first omitted shell alone is q^{-5/2}
  EXPECT_GE(std::abs(t.value - dual_weight_infty(F, chi, 2)), 0.5 * std::pow(5.0, -2.5));
}

TEST(DualWeight, FinitePartShellRange) {
  Dw a(ExtKind::split, 3);
  EXPECT_EQ(a.dw.shells(), (std::vector<int>{6, 8, 10}));
  Dw b(ExtKind::ramified, 2);
  EXPECT_EQ(b.dw.shells(), (std::vector<int>{3, 4, 5}));
  // n1 = 1 leaves H_c empty and h~ = h~_infty
  Dw c(ExtKind::split, 2, 1);
  EXPECT_TRUE(c.dw.shells().empty());
  const MultChar chi = unramified_char(std::polar(1.0, 0.2));
  const DualWeightRow r = dual_weight_total(c.dw, chi, 1.0, 1.0);
  EXPECT_EQ(r.total, r.h_inf);
}

TEST(DualWeight, ShellCoefficientsMatchEpsBrute) {
  Dw a(ExtKind::unramified, 2);
  for (int n : a.dw.shells())
    for (const auto& chi0 : enumerate_chars(a.F, 2)) {
      MultChar chi = chi0;
      chi.at_pi = std::polar(1.0, 0.3);
      EXPECT_NEAR(std::abs(a.dw.eps(n, chi) - eps_n(a.H, chi, n, EpsRoute::brute)), 0.0, 1e-12);
    }
}

TEST(DualWeight, PlusPartRoutesAgree) {
  Dw a(ExtKind::split, 2);
  const double rq = std::sqrt(5.0);
  int checked = 0;
  for (int n : a.dw.shells())
    for (const auto& chi : enumerate_chars(a.F, 1)) {
      const RationalLaurent f = a.dw.f_n(n, chi);
      if (f.is_zero()) continue;
      const cplx series = laurent_plus(f, PlusMode::series).eval(rq);
      EXPECT_NEAR(std::abs(a.dw.plus(n, chi) - series), 0.0, 1e-12);
      // without negative powers the truncation is the identity
      if (f.num().min_exp() >= 0) EXPECT_NEAR(std::abs(a.dw.plus(n, chi) - f.eval(rq)), 0.0, 1e-12);
      ++checked;
    }
  EXPECT_GT(checked, 0);
}

TEST(DualWeight, PlusVanishesWithEps) {
  Dw a(ExtKind::split, 3);
  for (int n : a.dw.shells())
    for (const auto& chi : enumerate_chars(a.F, 2))
      if (std::abs(a.dw.eps(n, chi)) < 1e-14) EXPECT_NEAR(std::abs(a.dw.plus(n, chi)), 0.0, 1e-14);
}

TEST(DualWeight, MinusFamiliesAreSingleShells) {
  // e = 1, n0 = 3: h~_10^-(|.|^s) is a nonzero multiple of X^{-5}
  Dw a(ExtKind::split, 3);
  const LaurentPoly f10 = a.dw.minus_family(10);
  EXPECT_GT(std::abs(f10.coeff(-5)), 1e-6);
  for (const auto& [k, c] : f10.terms())
    if (k != -5) EXPECT_NEAR(std::abs(c), 0.0, 1e-12);
  // e = 1, n0 = 1: h~_2^-(|.|^s) = q^{-s} h~_2^-(1)
  Dw b(ExtKind::unramified, 1);
  const LaurentPoly f2 = b.dw.minus_family(2);
  EXPECT_GT(std::abs(f2.coeff(-1)), 1e-6);
  const double s = 0.37;
  EXPECT_NEAR(std::abs(f2.eval(std::pow(5.0, s)) - std::pow(5.0, -s) * f2.eval(1.0)), 0.0, 1e-12);
}

TEST(DualWeight, TotalSupportWindow) {
  Dw a(ExtKind::unramified, 2);
  const DualWeightReport rep = bound_report(a.dw, 2);
  int outside = 0;
  for (const auto& r : rep.rows)
    if (r.conductor > 2) {
      ++outside;
      EXPECT_NEAR(std::abs(r.total), 0.0, 1e-12) << r.id;
    }
  EXPECT_GT(outside, 0);
}

TEST(DualWeight, ReportDeterministicAcrossJobs) {
  Dw a(ExtKind::ramified, 2);
  const std::string j1 = to_json(bound_report(a.dw, 1));
  const std::string j4 = to_json(bound_report(a.dw, 4));
  EXPECT_EQ(j1, j4);
  const std::string csv = to_csv(bound_report(a.dw, 1));
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "chi-id,conductor,h_inf,h_plus,h_minus,total,ratio,flags,tail_bound");
}

TEST(DualWeight, ExceptionalRowsFlagged) {
  // p = 5: eta0(-1) = 1 = eps_L for split L, n0 = 3 odd
  Dw a(ExtKind::split, 3);
  const DualWeightReport rep = bound_report(a.dw, 4);
  int flagged = 0;
  for (const auto& r : rep.rows)
    for (const auto& f : r.flags)
      if (f == "exceptional") {
        ++flagged;
        EXPECT_EQ(r.conductor, 3);
      }
  EXPECT_GT(flagged, 0);
  EXPECT_GT(rep.max_ratio, 0.0);
}

TEST(DualWeight, HypGKFrozenValue) {
  FieldModel F(5);
  // delta = 1: delta - 4 is a unit and eta0(1 / (1 - 4)) = eta0(3) = -1
  const cplx closed = k_tilde(F, 1, trivial_char(), KRoute::closed);
  EXPECT_NEAR(std::abs(closed - cplx(-std::pow(5.0, -1.5))), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(k_tilde(F, 1, trivial_char(), KRoute::definition) - closed), 0.0, 1e-15);
  // delta = 4 drops the second term
  EXPECT_NEAR(std::abs(k_tilde(F, 4, trivial_char(), KRoute::quadruple) - 1.25 * std::pow(5.0, -2.5)), 0.0, 1e-15);
  // conductor 2 gives 0
  EXPECT_EQ(k_tilde(F, 2, make_char(F, 2, 1), KRoute::definition), cplx(0.0));
}

TEST(DualWeight, NormalizedInftyAndSelectivity) {
  Dw a(ExtKind::unramified, 2);
  const NormalizedDualWeight N = normalized_dual_weight(a.dw);
  const double q = 5.0;
  cplx Linv = 1.0;
  for (const auto& m : a.pi.mu) Linv *= 1.0 - 1.0 / m.at_pi;
  EXPECT_NEAR(std::abs(normalized_taylor(N.infty, 0.5, 0, q)[0] - std::pow(q, -a.par.n1) * Linv), 0.0, 1e-14);
  // only n = 2 n0 / e + e - 1 = 4 contributes to H~_c^+
  for (const auto& [n, g] : N.plus)
    for (const auto& x : normalized_taylor(g, -0.5, 2, q))
      if (n != 4) EXPECT_NEAR(std::abs(x), 0.0, 1e-12) << n;
  EXPECT_GT(std::abs(normalized_taylor(N.plus.at(4), 0.5, 0, q)[0]), 1e-6);
}

TEST(DualWeight, TaylorMatchesCentralDifferences) {
  Dw a(ExtKind::ramified, 2);
  const NormalizedDualWeight N = normalized_dual_weight(a.dw);
  for (double s0 : {0.5, -0.5}) {
    const auto tay = normalized_taylor(N.total, s0, 2, 5.0);
    const auto fd = normalized_fd(a.dw, s0, 1e-4);
    for (size_t k = 0; k < 3; ++k)
      EXPECT_NEAR(std::abs(tay[k] - fd[k]), 0.0, 1e-6 * std::max(1.0, std::abs(tay[k]))) << k;
  }
}

TEST(DualWeight, VanishingSuiteSmallGrid) {
  FieldModel F(5);
  const std::vector<DualWeightCase> grid = {{ExtKind::split, 2, 0}, {ExtKind::ramified, 2, 0}};
  EXPECT_TRUE(all_pass(vanishing_suite(F, grid, 1e-8, 2)));
}

TEST(DualWeight, ConsistencySuiteSmallGrid) {
  FieldModel F(5);
  const std::vector<DualWeightCase> grid = {{ExtKind::unramified, 1, 0}, {ExtKind::ramified, 2, 0}};
  EXPECT_TRUE(all_pass(consistency_suite(F, grid, 1e-8, 2)));
}
