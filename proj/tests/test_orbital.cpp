#include <gtest/gtest.h>

#include <cmath>

#include "lwl/orbital.hpp"

using namespace lwl;

namespace {

const ExtKind kKinds[] = {ExtKind::split, ExtKind::unramified, ExtKind::ramified};

struct Orb {
  FieldModel F;
  QuadExtModel L;
  OrbitalParam par;
  Orb(i64 p, ExtKind k, int n0, int n1 = 0) : F(p), L(F, k) {
    par.L = &L;
    par.beta = default_beta(L, n0);
    par.n1 = n1 > 0 ? n1 : default_n1(L, par.beta);
  }
  Orb(i64 p, ExtKind k, const std::function<BetaChar(const QuadExtModel&)>& mk, int n1 = 0) : F(p), L(F, k) {
    par.L = &L;
    par.beta = mk(L);
    par.n1 = n1 > 0 ? n1 : default_n1(L, par.beta);
  }
};

std::vector<int> conductors(ExtKind k) {
  if (k == ExtKind::ramified) return {2};
  return {1, 2, 3};
}

// H(x) for x on the given shell, restricted to the square class tau
double class_max(const ShellFunction& f, int v, i64 tau_unit) {
  const FieldModel& F = f.field();
  const UnitGroup& U = F.units(f.level());
  const i64 jt = U.dlog(posmod(tau_unit, F.pk(f.level())));
  double m = 0.0;
  for (i64 j = 0; j < f.shell_size(); ++j)
    if ((j - jt) % 2 == 0) m = std::max(m, std::abs(f.at_index(v, j)));
  return m;
}

double shell_max(const ShellFunction& f, int v) {
  double m = 0.0;
  for (const auto& x : f.shell(v)) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

TEST(Orbital, DefaultStabilityParameter) {
  FieldModel F(5);
  QuadExtModel Ls(F, ExtKind::split), Lr(F, ExtKind::ramified);
  EXPECT_EQ(default_n1(Ls, default_beta(Ls, 3)), 6);
  EXPECT_EQ(default_n1(Lr, default_beta(Lr, 2)), 3);
  EXPECT_EQ(default_n1(Ls, default_beta(Ls, 1), 5), 5);
  EXPECT_TRUE(is_regular(default_beta(Ls, 2)));
}

TEST(Orbital, DeepShellsAreElementary) {
  for (ExtKind k : kKinds)
    for (int n0 : conductors(k)) {
      if (n0 == 3) continue;
      Orb S(5, k, n0);
      const int e = S.L.e();
      const int lo = -2 * S.par.n1 - 2;
      TestFunctionH H = build_H(S.par, lo, 0);
      const int top = -4 * n0 / e - 2 * (e - 1);
      for (int v = lo; v <= top; ++v) {
        SCOPED_TRACE(kind_name(k) + " n0=" + std::to_string(n0) + " v=" + std::to_string(v));
        if (v % 2 != 0) {
          EXPECT_LT(class_max(H.H, v, 1) + class_max(H.H, v, S.F.epsilon()), 1e-9);
          continue;
        }
        ShellFunction E = elementary_E(S.F, -v / 2).refined(H.H.level());
        double d = 0.0;
        for (i64 j = 0; j < E.shell_size(); ++j) d = std::max(d, std::abs(E.at_index(v, j) - H.H.at_index(v, j)));
        EXPECT_LT(d, 1e-9);
      }
    }
}

TEST(Orbital, ShallowShellsVanish) {
  for (ExtKind k : kKinds)
    for (int n0 : conductors(k)) {
      Orb S(5, k, n0);
      const int e = S.L.e();
      TestFunctionH H = build_H(S.par, -2 * S.par.n1, 4);
      for (int v = H.H.vmin(); v <= H.H.vmax(); ++v) {
        SCOPED_TRACE(kind_name(k) + " n0=" + std::to_string(n0) + " v=" + std::to_string(v));
        for (int t = 0; t < 2; ++t) {
          const auto tau = S.L.tau_reps()[static_cast<size_t>(t)];
          if ((v - tau.first) % 2 != 0) continue;
          const int vy2 = v - tau.first;
          // e v(y) >= 2 - n0 - e
          if (e * vy2 >= 2 * (2 - n0 - e)) EXPECT_LT(class_max(H.H, v, tau.second), 1e-9);
        }
      }
    }
}

TEST(Orbital, NonTrivialClassesLiveOnOneShell) {
  for (ExtKind k : kKinds)
    for (int n0 : conductors(k)) {
      Orb S(5, k, n0);
      const int e = S.L.e();
      TestFunctionH H = build_H(S.par, -2 * S.par.n1 - 1, 3);
      const auto tau = S.L.tau_reps()[1];
      // the one shell with v(y) = 1 - e - n0 / e
      const int keep = tau.first + 2 * (e - e * e - n0) / e;
      for (int v = H.H.vmin(); v <= H.H.vmax(); ++v) {
        if ((v - tau.first) % 2 != 0 || v == keep) continue;
        SCOPED_TRACE(kind_name(k) + " n0=" + std::to_string(n0) + " v=" + std::to_string(v));
        if (k == ExtKind::ramified)
          EXPECT_LT(shell_max(H.H, v), 1e-9);
        else
          EXPECT_LT(class_max(H.H, v, tau.second), 1e-9);
      }
      if (n0 >= 2) EXPECT_GT(class_max(H.H, keep, k == ExtKind::ramified ? -1 : tau.second), 1e-3);
    }
}

TEST(Orbital, TraceRestrictionsLeaveHUnchanged) {
  // unramified and split, tau = 1, n0 <= m <= 2 n0 - 1
  for (ExtKind k : {ExtKind::split, ExtKind::unramified})
    for (int n0 : {2, 3}) {
      Orb S(5, k, n0);
      const FieldModel& F = S.F;
      const i64 mod = F.modulus();
      auto dev = [&](i64 tr, int sgn) {
        i64 x = posmod(mulmod(tr, invmod(2 * sgn, mod), mod) - 1, mod);
        if (x == 0) return F.k();
        return F.valuation(x);
      };
      for (int m = n0; m <= 2 * n0 - 1; ++m) {
        SCOPED_TRACE(kind_name(k) + " n0=" + std::to_string(n0) + " m=" + std::to_string(m));
        std::function<bool(i64)> keep;
        if (m == 2 * n0 - 1)
          keep = [&](i64 tr) { return dev(tr, 1) >= 2 * (n0 - 1) || dev(tr, -1) >= 2 * (n0 - 1); };
        else if (m > n0)
          keep = [&, m](i64 tr) { return dev(tr, 1) == 2 * (m - n0) || dev(tr, -1) == 2 * (m - n0); };
        else
          keep = [&](i64 tr) { return dev(tr, 1) == 0 && dev(tr, -1) == 0; };
        ShellFunction a = h_tau_shell(S.par, 0, m, m);
        ShellFunction b = h_tau_shell(S.par, 0, m, m, keep);
        EXPECT_LT(max_difference(a, b), 1e-9);
        EXPECT_GT(a.max_abs(), 1e-3);
      }
    }
  // ramified, tau = 1
  for (int n0 : {2, 4}) {
    Orb S(5, ExtKind::ramified, n0);
    const FieldModel& F = S.F;
    const i64 mod = F.modulus();
    auto dev = [&](i64 tr, int sgn) {
      i64 x = posmod(mulmod(tr, invmod(2 * sgn, mod), mod) - 1, mod);
      if (x == 0) return F.k();
      return F.valuation(x);
    };
    for (int m = n0 / 2 + 1; m <= n0; ++m) {
      SCOPED_TRACE("ramified n0=" + std::to_string(n0) + " m=" + std::to_string(m));
      std::function<bool(i64)> keep;
      if (m == n0)
        keep = [&](i64 tr) { return dev(tr, 1) >= n0 - 1 || dev(tr, -1) >= n0 - 1; };
      else
        keep = [&, m](i64 tr) { return dev(tr, 1) == 2 * m - n0 - 1 || dev(tr, -1) == 2 * m - n0 - 1; };
      ShellFunction a = h_tau_shell(S.par, 0, m, m);
      ShellFunction b = h_tau_shell(S.par, 0, m, m, keep);
      EXPECT_LT(max_difference(a, b), 1e-9);
    }
  }
}

TEST(Orbital, IndependentOfRepresentativeChoice) {
  for (ExtKind k : kKinds)
    for (int n0 : conductors(k)) {
      Orb S(5, k, n0);
      TestFunctionH a = build_H(S.par);
      OrbitalParam alt = S.par;
      alt.x_choice = {1, 1};
      TestFunctionH b = build_H(alt);
      SCOPED_TRACE(kind_name(k) + " n0=" + std::to_string(n0));
      EXPECT_LT(max_difference(a.H, b.H), 1e-9);
    }
}

TEST(Orbital, MellinCoefficientsMatchClosedForm) {
  for (ExtKind k : kKinds)
    for (int n0 : conductors(k)) {
      Orb S(5, k, n0);
      TestFunctionH H = build_H(S.par);
      const int nmax = std::min(2 * S.par.n1, 6);
      double worst = 0.0, biggest = 0.0;
      int nonzero = 0;
      for (int n = 1; n <= nmax; ++n)
        for (int lev = 0; lev <= n / 2 + 1; ++lev)
          for (const auto& chi0 : enumerate_chars(S.F, lev)) {
            if (chi0.conductor != lev) continue;
            for (cplx at : {cplx(1.0, 0.0), std::polar(1.0, 0.7)}) {
              if (n > 4 && at != cplx(1.0, 0.0)) continue;
              MultChar chi = chi0;
              chi.at_pi = at;
              cplx br = eps_n(H, chi, n, EpsRoute::brute);
              cplx cl = eps_n(H, chi, n, EpsRoute::closed);
              worst = std::max(worst, std::abs(br - cl));
              biggest = std::max(biggest, std::abs(br));
              if (std::abs(br) > 1e-6) ++nonzero;
            }
          }
      SCOPED_TRACE(kind_name(k) + " n0=" + std::to_string(n0));
      EXPECT_LT(worst, 1e-9);
      EXPECT_LE(biggest, S.F.zeta1() + 1e-9);
      EXPECT_GT(nonzero, 0);
    }
}

TEST(Orbital, UnramifiedClosedFormVanishesOnOddIndex) {
  FieldModel F(5);
  QuadExtModel L(F, ExtKind::unramified);
  BetaChar b = default_beta(L, 2);
  for (const auto& chi : enumerate_chars(F, 2)) EXPECT_EQ(eps_n_closed(L, b, chi, 3), cplx(0.0, 0.0));
}

TEST(Orbital, SplitLevelTwoCasesFromGaussIntegrals) {
  // chi0 of conductor 1, chi = chi0^{-1}: one Gauss integral is unramified
  FieldModel F(5);
  QuadExtModel L(F, ExtKind::split);
  for (i64 ex : {1, 2}) {
    OrbitalParam par;
    par.L = &L;
    par.beta = make_beta_split(L, make_char(F, 1, ex));
    par.n1 = default_n1(L, par.beta);
    TestFunctionH H = build_H(par);
    MultChar chi = char_inv(par.beta.chi0);
    chi.at_pi = std::polar(1.0, 0.7);
    cplx br = eps_n(H, chi, 2, EpsRoute::brute);
    EXPECT_LT(std::abs(br - eps_n(H, chi, 2, EpsRoute::closed)), 1e-9);
    // the displayed table is off by q^{1/2} (one unramified factor) or q (two)
    const double ratio = std::abs(br) / std::abs(eps_n(H, chi, 2, EpsRoute::closed_literal));
    EXPECT_NEAR(ratio, ex == 1 ? std::sqrt(5.0) : 5.0, 1e-9);
  }
}

TEST(Orbital, DecompositionReassemblesH) {
  for (ExtKind k : kKinds)
    for (int n0 : conductors(k)) {
      Orb S(5, k, n0);
      TestFunctionH H = build_H(S.par);
      HDecomposition D = decompose_H(H);
      ShellFunction ref = H.H.widened(H.H.vmin(), H.H.vmax());
      double d = 0.0;
      for (int v = D.reassembled.vmin(); v <= D.reassembled.vmax(); ++v)
        for (i64 j = 0; j < ref.shell_size(); ++j)
          d = std::max(d, std::abs(D.reassembled.at_index(v, j) - ref.at_index(v, j)));
      SCOPED_TRACE(kind_name(k) + " n0=" + std::to_string(n0));
      EXPECT_LT(d, 1e-9);
      EXPECT_FALSE(D.pieces.empty());
    }
}

TEST(Orbital, ElementaryTailGrowsGeometrically) {
  FieldModel F(5);
  for (int m = 2; m <= 4; ++m) {
    auto ms = [&](int r) {
      ShellFunction E = elementary_E(F, r);
      double s = 0.0;
      for (const auto& x : E.shell(-2 * r)) s += std::norm(x);
      return s / static_cast<double>(E.shell_size());
    };
    EXPECT_NEAR(ms(m + 1) / ms(m), 5.0, 1e-9);
  }
}

TEST(Orbital, L2ProxyMatchesClosedForm) {
  for (ExtKind k : {ExtKind::unramified, ExtKind::ramified})
    for (int n0 : conductors(k)) {
      Orb S(5, k, n0);
      L2Proxy P = l2_weight_proxy(build_H(S.par));
      ASSERT_TRUE(P.closed.has_value());
      SCOPED_TRACE(kind_name(k) + " n0=" + std::to_string(n0));
      EXPECT_NEAR(P.brute, *P.closed, 1e-9);
      const double zL = 1.0 / (1.0 - std::pow(5.0, -S.L.f()));
      EXPECT_NEAR(P.brute / *P.closed_literal, zL, 1e-9);
    }
}

TEST(Orbital, L2ProxyEnvelope) {
  for (i64 p : {5, 7})
    for (ExtKind k : kKinds)
      for (int n0 : conductors(k)) {
        if (p == 7 && n0 == 3) continue;
        Orb S(p, k, n0);
        const int e = S.L.e();
        const int cpi = k == ExtKind::split ? 2 * n0 : 2 * n0 / e + e - 1;
        L2Proxy P = l2_weight_proxy(build_H(S.par));
        SCOPED_TRACE(std::to_string(p) + " " + kind_name(k) + " n0=" + std::to_string(n0));
        EXPECT_GE(P.brute, 0.25 * std::pow(static_cast<double>(p), -(cpi + 1) / 2));
      }
}
