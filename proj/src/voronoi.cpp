#include "lwl/voronoi.hpp"

#include <algorithm>
#include <cmath>

namespace lwl {

namespace {

constexpr int kTailShells = 200;

bool all_unramified(const FieldModel& F, const PiData& pi) {
  for (const auto& m : pi.mu)
    if (char_reduce(F, m).conductor != 0) return false;
  return true;
}

// f_i at valuation a: z^{-a} q^{-a} (1_{a >= 0} - q^{-1} 1_{a >= -1}).
cplx unram_piece(cplx z, double q, int a) {
  if (a < -1) return 0.0;
  double ind = (a >= 0 ? 1.0 : 0.0) - 1.0 / q;
  return std::pow(z, -a) * std::pow(q, -a) * ind;
}

// Sup of |g(v)| over the shells vhi+1 .. vhi+kTailShells.
template <class G>
double tail_sup(int vhi, G g) {
  double m = 0.0;
  for (int v = vhi + 1; v <= vhi + kTailShells; ++v) m = std::max(m, std::abs(g(v)));
  return m;
}

}  // namespace

ShellFunction vh_transform(const ShellFunction& f, const PiData& pi, int vlo, int vhi) {
  const FieldModel& F = f.field();
  if (!f.window_exact()) throw Error("truncation-unsound", "VH of a truncated function");
  const int L = f.level();
  const size_t phi = static_cast<size_t>(f.shell_size());
  const auto coeffs = mellin_all(f);
  double cmax = 0.0;
  for (const auto& row : coeffs)
    for (const auto& c : row) cmax = std::max(cmax, std::abs(c));
  const double floor = 1e-13 * cmax;

  std::vector<RationalLaurent> B(phi);
  std::vector<bool> active(phi, false);
  int lo = vlo;
  bool exact = true;
  for (size_t a = 0; a < phi; ++a) {
    LaurentPoly A;
    for (size_t k = 0; k < coeffs.size(); ++k)
      if (std::abs(coeffs[k][a]) > floor) A.add_term(-(f.vmin() + static_cast<int>(k)), coeffs[k][a]);
    if (A.empty()) continue;
    active[a] = true;
    B[a] = gamma_factor(F, pi, make_char(F, L, static_cast<i64>(a))).times_poly(A);
    lo = std::min(lo, B[a].num().min_exp());
    if (!B[a].poles().empty() || B[a].num().max_exp() > vhi) exact = false;
  }
  const int depth = exact ? vhi : vhi + kTailShells;
  std::vector<std::vector<cplx>> D(static_cast<size_t>(depth - lo + 1), std::vector<cplx>(phi, cplx(0.0, 0.0)));
  for (size_t a = 0; a < phi; ++a) {
    if (!active[a]) continue;
    const LaurentPoly ex = B[a].expand(lo, depth);
    for (const auto& [e, c] : ex.terms()) D[static_cast<size_t>(e - lo)][a] = c;
  }
  ShellFunction out(F, lo, vhi, L);
  for (int w = lo; w <= vhi; ++w) out.shell(w) = dft(D[static_cast<size_t>(w - lo)], +1);
  if (!exact) {
    double tail = 0.0;
    for (int w = vhi + 1; w <= depth; ++w) {
      double s = 0.0;
      for (const auto& c : D[static_cast<size_t>(w - lo)]) s += std::abs(c);
      tail = std::max(tail, s);
    }
    out.set_truncated(tail);
  }
  return out;
}

cplx tau0(const FieldModel& F) { return gauss_integral(F, legendre_char(F), 1); }

cplx unram_convolution(const FieldModel& F, const PiData& pi, int v) {
  if (!all_unramified(F, pi)) throw Error("parameter-out-of-range", "convolution needs unramified Pi");
  const double q = F.qd();
  cplx z[3];
  for (int i = 0; i < 3; ++i) z[i] = char_reduce(F, pi.mu[static_cast<size_t>(i)]).at_pi;
  cplx s = 0.0;
  for (int a = -1; a <= v + 2; ++a)
    for (int b = -1; a + b <= v + 1; ++b)
      s += unram_piece(z[0], q, a) * unram_piece(z[1], q, b) * unram_piece(z[2], q, v - a - b);
  return s;
}

ShellFunction vh_closed_form(const FieldModel& F, VhClosed which, const PiData& pi, const VhClosedParams& prm) {
  const int n = prm.n;
  const double q = F.qd();
  const double zeta = F.zeta1();
  const cplx t0 = tau0(F);
  const int leg_m1 = F.legendre(-1);
  const bool stable_family = which == VhClosed::E_stable || which == VhClosed::E_geq_stable ||
                             which == VhClosed::F_n || which == VhClosed::G_n;
  if (stable_family && n < stability_barrier(F, pi))
    throw Error("parameter-out-of-range", "index below the stability barrier");
  if (!stable_family && !all_unramified(F, pi))
    throw Error("parameter-out-of-range", "small-index forms need unramified Pi");

  switch (which) {
    case VhClosed::E_stable:
      return ShellFunction::from_fn(F, -n, -n, n, [&](int, i64 u) { return psi_frac(F, u, n); });
    case VhClosed::E_geq_stable: {
      const int lo = std::min(prm.vlo, -n);
      const int level = -lo;
      ShellFunction g = ShellFunction::from_fn(F, lo, -n, level,
                                               [&](int v, i64 u) { return psi_frac(F, u, -v); }, false);
      g.set_truncated(1.0);
      return g;
    }
    case VhClosed::F_n:
    case VhClosed::G_n: {
      const int level = std::max(n, 1);
      const bool even = n % 2 == 0;
      const double qpow = std::pow(q, even ? 1.5 * n : std::ceil(1.5 * n));
      const bool isF = which == VhClosed::F_n;
      const double sign = isF ? 1.0 : (n % 2 == 1 ? leg_m1 : 1) * F.legendre(-2);
      return ShellFunction::from_fn(F, -n, -n, level, [&](int, i64 u) {
        cplx ps = psi_frac(F, 4 * u, n);
        bool with_eta = isF ? !even : even;
        cplx v = qpow * ps * (with_eta ? static_cast<double>(F.legendre(u)) : 1.0);
        if (!even) v *= t0;
        return sign * v;
      });
    }
    case VhClosed::F0_unram: {
      ShellFunction g = ShellFunction::from_fn(F, prm.vlo, prm.vhi, 1, [&](int v, i64 u) {
        cplx s = unram_convolution(F, pi, v);
        if (v == -3) s += t0 * q * q * static_cast<double>(F.legendre(-u));
        return s;
      });
      g.set_truncated(tail_sup(prm.vhi, [&](int v) { return unram_convolution(F, pi, v); }));
      return g;
    }
    case VhClosed::F1_unram:
    case VhClosed::F1_unram_literal: {
      const i64 p = F.p();
      const double c0 = which == VhClosed::F1_unram ? zeta / q : 1.0 / q;
      ShellFunction g = ShellFunction::from_fn(F, prm.vlo, prm.vhi, 1, [&](int v, i64 u) {
        cplx s = -c0 * unram_convolution(F, pi, v - 2);
        if (v == -1) {
          i64 r = posmod(u, p);
          i64 inv4r = invmod(4 * r % p, p);
          cplx I = 0.0;
          for (i64 w1 = 1; w1 < p; ++w1)
            for (i64 w2 = 1; w2 < p; ++w2) {
              i64 arg = posmod(w1 + w2 - mulmod(mulmod(w1, w2, p), inv4r, p), p);
              I += psi_frac(F, arg, 1) * static_cast<double>(F.legendre(r * w1 % p * w2 % p));
            }
          s += -zeta + t0 * q * I;
        }
        return s;
      });
      g.set_truncated(c0 * tail_sup(prm.vhi, [&](int v) { return unram_convolution(F, pi, v - 2); }));
      return g;
    }
    case VhClosed::G0_unram: {
      if ((F.p() - 1) % 4 != 0) return ShellFunction(F, prm.vlo, prm.vhi, 1);
      MultChar e1 = make_char(F, 1, (F.p() - 1) / 4);
      MultChar e1i = char_inv(e1);
      cplx g1 = std::pow(gamma_half_ramified(F, e1), 3), g2 = std::pow(gamma_half_ramified(F, e1i), 3);
      return ShellFunction::from_fn(F, prm.vlo, prm.vhi, 1, [&](int v, i64 u) -> cplx {
        if (v != -3) return 0.0;
        return std::pow(q, 1.5) * (g1 * char_unit(F, e1, u) + g2 * char_unit(F, e1i, u));
      });
    }
    case VhClosed::G1_unram: {
      const i64 p = F.p();
      const cplx gL = gauss_integral(F, legendre_char(F, static_cast<double>(leg_m1)), 1);
      ShellFunction g = ShellFunction::from_fn(F, prm.vlo, prm.vhi, 1, [&](int v, i64 u) {
        cplx s = zeta * gL * unram_convolution(F, pi, v - 2);
        if (v == -1) {
          i64 r = posmod(u, p);
          cplx I = 0.0;
          for (i64 w1 = 1; w1 < p; ++w1)
            for (i64 w2 = 1; w2 < p; ++w2) {
              i64 c = mulmod(r, invmod(w1 * w2 % p, p), p);
              for (i64 w3 = 1; w3 < p; ++w3) {
                i64 arg = posmod(w1 + w2 + w3 + mulmod(mulmod(w3, w3, p), c, p), p);
                I += psi_frac(F, arg, 1) * static_cast<double>(F.legendre(w3));
              }
            }
          s += static_cast<double>(leg_m1) * (I + zeta * t0);
        }
        return s;
      });
      g.set_truncated(std::abs(zeta * gL) *
                      tail_sup(prm.vhi, [&](int v) { return unram_convolution(F, pi, v - 2); }));
      return g;
    }
  }
  throw Error("parameter-out-of-range", "unknown closed form");
}

}  // namespace lwl
