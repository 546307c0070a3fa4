// The dual weight h~(chi) of the orbital test function H: the infinite part,
// the pieces h~_n^+ from the non-negative part of the Laurent expansion of
// f_n, the pieces h~_n^- by direct evaluation of the Voronoi-Hankel transform,
// their total, the normalized unramified family H~(|.|^s) with its Taylor
// coefficients, the finite-field kernel K~(delta, chi), and the vanishing and
// consistency verdicts.
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lwl/orbital.hpp"
#include "lwl/quadext.hpp"
#include "lwl/residue.hpp"
#include "lwl/schwartz.hpp"
#include "lwl/symbolics.hpp"

namespace lwl {

struct TruncatedValue {
  cplx value{0.0, 0.0};
  double tail_bound = 0.0;
};

// h~_infty(chi) = chi(varpi)^{n1} q^{-n1/2} / (1 - chi(varpi) q^{-1/2}) for
// unramified chi and 0 otherwise. Throws "pole" at chi(varpi) = q^{1/2}.
cplx dual_weight_infty(const FieldModel& F, const MultChar& chi, int n1);
// The same integral summed shell by shell from VH(m_{-1} E_m), m = n1 .. n1 + W - 1,
// each transform computed by vh_transform. The tail bound is q^{-(n1+W)/2} / (1 - q^{-1/2}).
TruncatedValue dual_weight_infty_direct(const FieldModel& F, const PiData& pi, const MultChar& chi, int n1, int W);

// The same shell function at the smallest level at which it is constant on cosets.
ShellFunction at_minimal_level(const ShellFunction& f);
// H_n: the shell of valuation -n of H, at its minimal level.
ShellFunction shell_part(const TestFunctionH& H, int n);
// The shells n of H_c: (2/e)(n0 - 2) + 3 <= n <= 2 n1 - 1 with e n even.
std::vector<int> finite_part_shells(const TestFunctionH& H);

// VH(m_{-1} f) on [lowest nonzero shell, vhi].
ShellFunction vh_dual(const ShellFunction& f, const PiData& pi, int vhi);

// Unit-part character coefficients of a shell function g:
// c_v(chi) = int_{O^x} g(varpi^v u) w_v(u) chi^{-1}(u) d^x u, with w_v(u) = psi(-varpi^v u)
// on negative shells when with_psi is set and w_v = 1 otherwise. Shells below
// the window of g count as zero.
class ShellCoefficients {
 public:
  ShellCoefficients() = default;
  ShellCoefficients(const ShellFunction& g, int vlo, int vhi, bool with_psi);

  int vlo() const { return vlo_; }
  int vhi() const { return vhi_; }
  // Every c_v(chi) with c(chi) above this level vanishes.
  int level() const;
  cplx coeff(int v, const MultChar& chi) const;
  // sum_v q^{v/2} chi(varpi)^{-v} c_v(chi).
  cplx integral(const MultChar& chi) const;
  // The same sum for chi = |.|^s as a Laurent polynomial in X = q^s.
  LaurentPoly unramified_family() const;
  // max over shells and characters of |c_v(chi)|.
  double max_abs() const;
  double max_abs(const MultChar& chi) const;

 private:
  const FieldModel* F_ = nullptr;
  int vlo_ = 0, vhi_ = -1;
  std::vector<int> levels_;
  std::vector<std::vector<cplx>> c_;
};

// f_n(X; chi, H) = eps_n(chi, H) q^{-n} X^n gamma(s, Pi x chi, psi), X = q^s.
RationalLaurent f_n_laurent(const FieldModel& F, const PiData& pi, const MultChar& chi, int n, cplx eps);
// The part of f with non-negative powers of X.
RationalLaurent plus_part(const RationalLaurent& f);
// sum_{v > V} q^{v/2} |[X^v] f| bounded through |num| and prod (1 - |b| X)^{-m}.
double laurent_tail_majorant(const RationalLaurent& f, int V, double q);

// The dual weight pieces of one H and Pi, with the transforms of the shell
// pieces computed once.
class DualWeight {
 public:
  // Shells above vhi of each VH(m_{-1} H_n) are left to the Laurent tail majorant.
  DualWeight(const TestFunctionH& H, const PiData& pi, int vhi = 40, std::optional<int> depth = std::nullopt);

  const TestFunctionH& test_function() const { return H_; }
  const PiData& pi() const { return pi_; }
  const FieldModel& field() const { return H_.H.field(); }
  int e() const { return H_.param.L->e(); }
  int n0() const { return H_.param.beta.n0; }
  int n1() const { return H_.param.n1; }
  int depth() const { return depth_; }
  int vhi() const { return vhi_; }
  const std::vector<int>& shells() const { return shells_; }
  // Characters of conductor above this level have h~(chi) = 0 identically.
  int max_level() const;

  cplx eps(int n, const MultChar& chi) const;
  RationalLaurent f_n(int n, const MultChar& chi) const;
  cplx infty(const MultChar& chi) const { return dual_weight_infty(field(), chi, n1()); }
  cplx plus(int n, const MultChar& chi) const;
  TruncatedValue minus(int n, const MultChar& chi) const;
  // Direct evaluation: negative shells with psi(-t), shells 0 .. vhi from the
  // transform, and the Laurent majorant for the rest.
  TruncatedValue direct(int n, const MultChar& chi) const;

  // Shell-wise data of VH(m_{-1} H_n).
  const ShellCoefficients& minus_coeffs(int n) const { return minus_.at(n); }
  const ShellCoefficients& plain_coeffs(int n) const { return plain_.at(n); }
  const ShellFunction& transform(int n) const { return vh_.at(n); }
  // h~_n^-(|.|^s) as a Laurent polynomial in X = q^s.
  LaurentPoly minus_family(int n) const { return minus_.at(n).unramified_family(); }

 private:
  TestFunctionH H_;
  PiData pi_;
  int vhi_ = 40;
  int depth_ = 0;
  std::vector<int> shells_;
  std::map<int, ShellCoefficients> hco_;
  std::map<int, ShellFunction> vh_;
  std::map<int, ShellCoefficients> minus_;
  std::map<int, ShellCoefficients> plain_;
};

// The integral of VH(m_{-1} f) psi(-t) chi^{-1}(t) |t|^{-1/2} over F - O, as
// per-shell coefficients (for the pieces of the shell decomposition).
ShellCoefficients negative_coeffs(const ShellFunction& f, const PiData& pi);

struct DualWeightRow {
  MultChar chi;
  std::string id;  // "c<conductor>:e<expo>" at the reduced level
  int conductor = 0;
  cplx h_inf, h_plus, h_minus, total;
  double ratio = 0.0;
  double tail_bound = 0.0;
  std::vector<std::string> flags;
};

struct Verdict {
  std::string name;
  int cases = 0;
  double max_abs = 0.0;
  double tol = 0.0;
  double tail = 0.0;
  bool pass = false;
  bool determined = true;  // false when the tail bound exceeds tol
  std::string detail;
};

// pass requires max_abs <= tol and tail <= tol.
Verdict make_verdict(std::string name, int cases, double max_abs, double tol, double tail, std::string detail = {});

struct DualWeightReport {
  std::string pi_desc;
  std::string kind;
  int n0 = 0, n1 = 0, e = 1;
  int depth = 0;
  double proxy = 0.0;
  double scale = 0.0;
  std::string proxy_definition;
  std::vector<DualWeightRow> rows;
  double max_ratio = 0.0;
  std::vector<Verdict> verdicts;
  std::vector<std::pair<std::string, double>> tail_ledger;
};

// Row for one chi (chi(varpi) taken from chi.at_pi).
DualWeightRow dual_weight_total(const DualWeight& dw, const MultChar& chi, double proxy, double scale);
// Rows for every chi of level <= max_level() with chi(varpi) = 1, sorted by
// (conductor, expo), computed on `jobs` threads.
DualWeightReport bound_report(const DualWeight& dw, int jobs = 1);
std::string to_json(const DualWeightReport& r);
std::string to_csv(const DualWeightReport& r);

// H~(X) for X = q^s: the normalized unramified dual weight.
struct NormalizedDualWeight {
  RationalLaurent infty;
  std::map<int, RationalLaurent> plus;
  std::map<int, LaurentPoly> minus;
  LaurentPoly normalizer;  // zeta(1/2 + s)^{-1} L(1/2 - s, Pi~)^{-1}
  RationalLaurent total;
};
NormalizedDualWeight normalized_dual_weight(const DualWeight& dw);
std::vector<cplx> normalized_taylor(const RationalLaurent& f, double s0, int kmax, double q);
// H~(q^s) by pointwise assembly: closed h~_infty, plus parts from the series
// route evaluated at q^{1/2 + s}, and the negative shells summed directly.
cplx normalized_value_direct(const DualWeight& dw, double s);
// Central differences of normalized_value_direct: (1/k!) d^k/ds^k for k = 0, 1, 2.
std::vector<cplx> normalized_fd(const DualWeight& dw, double s0, double h);

// K~(delta, chi) for a unit delta and chi of conductor <= 1.
enum class KRoute { definition, triple, quadruple, closed, katz };
cplx k_tilde(const FieldModel& F, i64 delta, const MultChar& chi, KRoute route);

// The grid used by the vanishing and consistency suites.
struct DualWeightCase {
  ExtKind kind;
  int n0 = 1;
  int n1 = 0;  // 0 selects default_n1
};
std::vector<DualWeightCase> default_dualweight_grid();
PiData generic_unramified_pi(const FieldModel& F);

std::vector<Verdict> vanishing_suite(const FieldModel& F, const std::vector<DualWeightCase>& grid, double tol,
                                     int jobs = 1);
std::vector<Verdict> consistency_suite(const FieldModel& F, const std::vector<DualWeightCase>& grid, double tol,
                                       int jobs = 1);
std::vector<Verdict> taylor_suite(const FieldModel& F, const std::vector<DualWeightCase>& grid, double tol);

}  // namespace lwl
