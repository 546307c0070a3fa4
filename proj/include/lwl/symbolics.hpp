// Laurent polynomials and rational functions in X = q^s, local gamma and
// L-factors of Pi = mu1 + mu2 + mu3 and its twists, the truncation f -> f_+
// to non-negative powers, and Taylor coefficients in s.
#pragma once

#include <array>
#include <map>
#include <vector>

#include "lwl/residue.hpp"

namespace lwl {

class LaurentPoly {
 public:
  LaurentPoly() = default;
  static LaurentPoly constant(cplx a) { return monomial(0, a); }
  static LaurentPoly monomial(int e, cplx a);

  cplx coeff(int e) const;
  void add_term(int e, cplx a);
  bool empty() const { return c_.empty(); }
  int min_exp() const;
  int max_exp() const;
  const std::map<int, cplx>& terms() const { return c_; }

  cplx eval(cplx X) const;
  // Drops coefficients below tol times the largest one.
  LaurentPoly trimmed(double tol) const;
  // Keeps exponents in [lo, hi].
  LaurentPoly slice(int lo, int hi) const;
  LaurentPoly shifted(int k) const;  // multiply by X^k

  LaurentPoly operator+(const LaurentPoly& o) const;
  LaurentPoly operator-(const LaurentPoly& o) const;
  LaurentPoly operator*(const LaurentPoly& o) const;
  LaurentPoly operator*(cplx a) const;

 private:
  std::map<int, cplx> c_;
};

struct Pole {
  cplx b;     // factor (1 - b X)
  int m = 1;  // multiplicity
};

// num(X) / prod_j (1 - b_j X)^{m_j}.
class RationalLaurent {
 public:
  RationalLaurent() = default;
  RationalLaurent(LaurentPoly num, std::vector<Pole> poles);
  static RationalLaurent constant(cplx a) { return RationalLaurent(LaurentPoly::constant(a), {}); }

  const LaurentPoly& num() const { return num_; }
  const std::vector<Pole>& poles() const { return poles_; }
  LaurentPoly denominator() const;  // expanded prod (1 - b X)^m
  bool is_zero() const { return num_.empty(); }

  cplx eval(cplx X) const;
  // Laurent expansion at X = 0, coefficients of X^lo .. X^hi.
  LaurentPoly expand(int lo, int hi) const;

  RationalLaurent operator*(const RationalLaurent& o) const;
  RationalLaurent operator*(cplx a) const;
  RationalLaurent operator+(const RationalLaurent& o) const;
  RationalLaurent times_poly(const LaurentPoly& p) const;

 private:
  LaurentPoly num_;
  std::vector<Pole> poles_;
};

// Power series of 1 / prod (1 - b_j X)^{m_j} up to degree n.
std::vector<cplx> inverse_denominator_series(const std::vector<Pole>& poles, int n);

enum class PlusMode { series, partial_fraction };
RationalLaurent laurent_plus(const RationalLaurent& f, PlusMode mode);

// (1/k!) (d/ds)^k f(q^s) at s = s0, for k = 0..kmax.
std::vector<cplx> taylor_coeffs_in_s(const RationalLaurent& f, int kmax, double s0, double q);
cplx taylor_in_s(const RationalLaurent& f, int k, double s0, double q);

// Pi as an isobaric sum of three characters of F^x with trivial product.
struct PiData {
  std::array<MultChar, 3> mu;
};

PiData make_pi(const FieldModel& F, const std::array<MultChar, 3>& mu);
PiData unramified_pi(const FieldModel& F, cplx z1, cplx z2);
PiData contragredient(const PiData& pi);
bool is_tempered(const PiData& pi, double tol = 1e-12);

// gamma(s, mu, psi) as a rational function of X = q^s.
RationalLaurent gamma_gl1(const FieldModel& F, const MultChar& mu);
RationalLaurent gamma_factor(const FieldModel& F, const PiData& pi, const MultChar& chi);
// 1 / L(s, Pi x chi) as a Laurent polynomial in X.
LaurentPoly inverse_l_factor(const FieldModel& F, const PiData& pi, const MultChar& chi);

int stability_barrier(const FieldModel& F, const PiData& pi);

struct ExponentData {
  int d = 0;
  int conductor = 0;
  int rho = 0;
  bool exponent = false;  // xi lies in E(Pi)
};
ExponentData exponents_and_rho(const FieldModel& F, const PiData& pi, const MultChar& xi);
int pi_conductor(const FieldModel& F, const PiData& pi);

}  // namespace lwl
