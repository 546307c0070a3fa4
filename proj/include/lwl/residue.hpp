// The local field F = Q_p at finite precision: modular arithmetic on residues
// mod p^k, the elements varpi^v * u, the additive character psi of conductor
// exponent 0, and characters of the unit groups (Z/p^n)^x.
#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

namespace lwl {

using cplx = std::complex<double>;
using i64 = std::int64_t;
using i128 = __int128;

inline constexpr double kPi = 3.14159265358979323846264338327950288;

// Every failure raised by the library carries a short machine-readable code
// ("precision-exhausted", "level-mismatch", ...).
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& what)
      : std::runtime_error(code + ": " + what), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

inline i64 posmod(i64 a, i64 m) {
  i64 r = a % m;
  return r < 0 ? r + m : r;
}
inline i64 mulmod(i64 a, i64 b, i64 m) {
  return static_cast<i64>(posmod(static_cast<i64>((i128)a * b % m), m));
}
i64 powmod(i64 a, i64 e, i64 m);
i64 invmod(i64 a, i64 m);
i64 ipow(i64 b, int e);
bool is_prime(i64 n);
// exp(2 pi i num/den), with num reduced mod den first.
cplx root_of_unity(i64 num, i64 den);

// The cyclic group (Z/p^n Z)^x with a fixed generator and its discrete-log
// table. Index j corresponds to the residue g^j.
class UnitGroup {
 public:
  UnitGroup(i64 p, int n, i64 g);
  i64 order() const { return phi_; }
  i64 modulus() const { return mod_; }
  int level() const { return n_; }
  // Discrete log of a unit residue (any integer, reduced mod p^n first).
  i64 dlog(i64 u) const;
  i64 exp(i64 j) const { return exp_[static_cast<size_t>(posmod(j, phi_))]; }

 private:
  i64 p_, mod_, phi_;
  int n_;
  std::vector<std::int32_t> dlog_;
  std::vector<i64> exp_;
};

class FieldModel {
 public:
  // k = 0 selects the largest precision with p^k < 2^62.
  explicit FieldModel(i64 p, int k = 0, double tol = 1e-8);

  i64 p() const { return p_; }
  i64 q() const { return p_; }
  int k() const { return k_; }
  double tol() const { return tol_; }
  i64 epsilon() const { return epsilon_; }
  i64 generator() const { return g_; }
  i64 modulus() const { return pk_[static_cast<size_t>(k_)]; }
  i64 pk(int n) const;
  i64 phi(int n) const { return n == 0 ? 1 : (p_ - 1) * pk(n - 1); }
  double zeta1() const { return 1.0 / (1.0 - 1.0 / static_cast<double>(p_)); }
  double qd() const { return static_cast<double>(p_); }

  // Largest level for which a discrete-log table is built.
  int table_limit() const { return table_limit_; }
  const UnitGroup& units(int n) const;

  int valuation(i64 x) const;  // v_p of a nonzero integer
  int legendre(i64 u) const;   // quadratic residue symbol of u mod p
  // A square root of the unit u modulo p^n (u must be a unit square).
  i64 sqrt_unit(i64 u, int n) const;

 private:
  i64 p_;
  int k_;
  double tol_;
  i64 epsilon_, g_;
  std::vector<i64> pk_;
  int table_limit_;
  struct Tables {
    std::vector<std::unique_ptr<std::once_flag>> once;
    std::vector<std::unique_ptr<UnitGroup>> groups;
  };
  std::shared_ptr<Tables> tables_;
};

// varpi^v * u with u a unit known modulo p^prec. An inexact zero records its
// absolute precision in v; the exact zero has exact_zero = true.
struct PAdic {
  bool zero = true;
  bool exact_zero = true;
  int v = 0;
  i64 u = 0;
  int prec = 0;

  static PAdic make(const FieldModel& F, int v, i64 u, int prec = -1);
  static PAdic from_int(const FieldModel& F, i64 x);
  static PAdic zero_value() { return PAdic{}; }
  // Absolute precision: the element is known modulo p^abs_prec().
  int abs_prec() const;
};

PAdic padd(const FieldModel& F, const PAdic& a, const PAdic& b);
PAdic pneg(const FieldModel& F, const PAdic& a);
PAdic psub(const FieldModel& F, const PAdic& a, const PAdic& b);
PAdic pmul(const FieldModel& F, const PAdic& a, const PAdic& b);
PAdic pinv(const FieldModel& F, const PAdic& a);
// Equality; throws precision-exhausted when the answer is not determined.
bool pequal(const FieldModel& F, const PAdic& a, const PAdic& b);

cplx psi_eval(const FieldModel& F, const PAdic& x);
// psi(u / p^m) for an integer residue u.
cplx psi_frac(const FieldModel& F, i64 u, int m);

// A character of F^x: a character of (Z/p^level)^x given by its exponent
// against the fixed generator, plus the value at varpi.
struct MultChar {
  int level = 0;
  i64 expo = 0;
  cplx at_pi{1.0, 0.0};
  int conductor = 0;
};

MultChar make_char(const FieldModel& F, int level, i64 expo, cplx at_pi = {1.0, 0.0});
MultChar trivial_char();
// The unramified character with value z at varpi.
MultChar unramified_char(cplx z);
// Unit part quadratic (Legendre) character with the given value at varpi.
MultChar legendre_char(const FieldModel& F, cplx at_pi = {1.0, 0.0});
int conductor_of(const FieldModel& F, int level, i64 expo);
MultChar char_lift(const FieldModel& F, const MultChar& a, int level);
// Smallest level representation (level = conductor).
MultChar char_reduce(const FieldModel& F, const MultChar& a);
MultChar char_mul(const FieldModel& F, const MultChar& a, const MultChar& b);
MultChar char_inv(const MultChar& a);
MultChar char_pow(const FieldModel& F, const MultChar& a, i64 e);
bool char_equal(const FieldModel& F, const MultChar& a, const MultChar& b);
// Value on a unit residue (integer, reduced as needed).
cplx char_unit(const FieldModel& F, const MultChar& a, i64 u);
// Value on the unit with discrete-log index j at the given table level
// (level >= a.level).
cplx char_index(const FieldModel& F, const MultChar& a, int level, i64 j);
cplx char_eval(const FieldModel& F, const MultChar& a, const PAdic& x);

std::vector<MultChar> enumerate_chars(const FieldModel& F, int n);

// q^{-m} sum_{u mod p^m} psi(u/p^m) chi(u varpi^{-m}).
cplx gauss_integral(const FieldModel& F, const MultChar& chi, int m);
// epsilon(1/2, chi, psi) in the Tate normalisation (1 when unramified).
cplx eps_half(const FieldModel& F, const MultChar& chi);
// gamma(1/2, chi, psi) for ramified chi (equal to eps_half).
cplx gamma_half_ramified(const FieldModel& F, const MultChar& chi);
// gamma(s, chi, psi) at a real point s for ramified chi: q^{c(1/2-s)} eps.
cplx gamma_ramified_at(const FieldModel& F, const MultChar& chi, double s);

}  // namespace lwl
