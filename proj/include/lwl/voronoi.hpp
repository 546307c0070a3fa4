// The Voronoi-Hankel transform VH of shell functions for Pi = mu1 + mu2 + mu3,
// computed through Mellin coefficients, the GL3 gamma factor and Mellin
// inversion, together with its closed forms on elementary functions.
#pragma once

#include "lwl/residue.hpp"
#include "lwl/schwartz.hpp"
#include "lwl/symbolics.hpp"

namespace lwl {

// VH(f) on shells [min(vlo, lowest nonzero shell), vhi], defined by
//   int VH(f)(t) chi^{-1}(t) |t|^{-s} d^x t = gamma(s, Pi x chi) int f(y) chi(y) |y|^s d^x y.
// The result is window-exact when every twist with nonzero Mellin data gives
// a Laurent polynomial ending at or below vhi. Otherwise the tail bound is a
// bound for |VH(f)| on the shells above vhi.
ShellFunction vh_transform(const ShellFunction& f, const PiData& pi, int vlo, int vhi);

enum class VhClosed {
  E_stable,
  E_geq_stable,
  F_n,
  G_n,
  F0_unram,
  F1_unram,
  F1_unram_literal,
  G0_unram,
  G1_unram
};

struct VhClosedParams {
  int n = 0;     // index m or n for the stable families
  int vlo = -6;  // requested window
  int vhi = 3;
};

// Right-hand sides of the closed forms, sampled on the requested window.
// E_stable: VH(m_{-1} E_n) = psi(t) on shell -n.
// E_geq_stable: VH(m_{-1} E_{>=n}) = psi(t) on the shells <= -n.
// F_n, G_n: the stable quadratic elementary functions, n >= a(Pi).
// F0/F1/G0/G1_unram: the small-index forms for unramified Pi. F1_unram carries
// the factor zeta_F(1) q^{-1} on the convolution term and F1_unram_literal
// carries q^{-1}.
ShellFunction vh_closed_form(const FieldModel& F, VhClosed which, const PiData& pi, const VhClosedParams& prm);

// tau_0 = int_{O^x} psi(u / varpi) eta_0(u) du.
cplx tau0(const FieldModel& F);
// (f1 * f2 * f3) at valuation v for unramified Pi, where
// f_i = (1 - mu_i(varpi) t(varpi)) E_i and E_i(y) = mu_i^{-1}(y) |y| 1_O(y).
cplx unram_convolution(const FieldModel& F, const PiData& pi, int v);

}  // namespace lwl
