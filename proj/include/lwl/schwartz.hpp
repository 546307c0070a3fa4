// Finitely supported smooth functions on F^x stored shell by shell, the
// operators m_s(mu), t(delta), Inv and i, Mellin transforms, and the
// elementary functions E_m, E_{>=n}, F_n, G_n.
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "lwl/residue.hpp"
#include "lwl/symbolics.hpp"

namespace lwl {

// Discrete Fourier transform of length n: out[a] = sum_j in[j] exp(sign 2 pi i a j / n).
std::vector<cplx> dft(const std::vector<cplx>& in, int sign);

class ShellFunction {
 public:
  ShellFunction() = default;
  // Zero function on shells vmin..vmax at level l.
  ShellFunction(const FieldModel& F, int vmin, int vmax, int level, bool window_exact = true);
  // Values from fn(v, u) with u a unit residue modulo p^level.
  static ShellFunction from_fn(const FieldModel& F, int vmin, int vmax, int level,
                               const std::function<cplx(int, i64)>& fn, bool window_exact = true);

  const FieldModel& field() const { return *F_; }
  int vmin() const { return vmin_; }
  int vmax() const { return vmax_; }
  int level() const { return level_; }
  i64 shell_size() const { return F_->phi(level_); }
  bool window_exact() const { return exact_; }
  double tail_bound() const { return tail_; }
  void set_truncated(double tail_bound) {
    exact_ = false;
    tail_ = tail_bound;
  }

  // Table entry for shell v and discrete-log index j at the function's level.
  cplx at_index(int v, i64 j) const;
  cplx& at_index(int v, i64 j);
  const std::vector<cplx>& shell(int v) const;
  std::vector<cplx>& shell(int v);
  bool in_window(int v) const { return v >= vmin_ && v <= vmax_; }
  // f(p^v u) for a unit residue u; zero outside the window when exact.
  cplx value(int v, i64 u) const;
  cplx value(const PAdic& x) const;

  // Same function at a higher level (values repeated over finer cosets).
  ShellFunction refined(int level) const;
  // Same function on a larger window (new shells are zero).
  ShellFunction widened(int vmin, int vmax) const;

  double max_abs() const;

 private:
  const FieldModel* F_ = nullptr;
  int vmin_ = 0, vmax_ = -1, level_ = 0;
  bool exact_ = true;
  double tail_ = 0.0;
  std::vector<std::vector<cplx>> tab_;
};

ShellFunction operator+(const ShellFunction& a, const ShellFunction& b);
ShellFunction operator-(const ShellFunction& a, const ShellFunction& b);
ShellFunction operator*(cplx c, const ShellFunction& a);
// max over the common window of |a - b|, both brought to a common level.
double max_difference(const ShellFunction& a, const ShellFunction& b);

// m_s(mu): f(t) mu(t) |t|^s.
ShellFunction op_m(const ShellFunction& f, const MultChar& mu, double s);
// t(delta): f(y delta) with delta = p^d u.
ShellFunction op_t(const ShellFunction& f, int d, i64 u);
// Inv: f(1/t). On functions of F^x the operator i = e Inv r acts the same way.
ShellFunction op_inv(const ShellFunction& f);
inline ShellFunction op_i(const ShellFunction& f) { return op_inv(f); }

// Mellin transform: coefficient of X^m is the integral of f chi d^x y over
// the shell of valuation -m.
LaurentPoly mellin(const ShellFunction& f, const MultChar& chi);
// Unit-group Mellin coefficients of every shell: result[v - vmin][a] for the
// character chi_a(g^j) = exp(2 pi i a j / phi) at the function's level.
std::vector<std::vector<cplx>> mellin_all(const ShellFunction& f);
// Inverse of mellin_all.
ShellFunction mellin_inverse(const FieldModel& F, int vmin, int level,
                             const std::vector<std::vector<cplx>>& coeffs);

// Elementary and quadratic elementary functions.
ShellFunction elementary_E(const FieldModel& F, int m);
ShellFunction elementary_E_geq(const FieldModel& F, int n, int vmin);
ShellFunction qef_F(const FieldModel& F, int n);
ShellFunction qef_G(const FieldModel& F, int n);

// eta_L for the ramified L = F[sqrt(p)]: eta_L(p^n u) = leg(-1)^n leg(u).
int eta_ramified(const FieldModel& F, int v, i64 u);

std::string to_json(const ShellFunction& f);

}  // namespace lwl
