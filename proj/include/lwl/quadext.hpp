// The quadratic etale algebras L/F (split, unramified, ramified), their
// norm-one tori, characters beta of L^x restricting to eta_{L/F}, conductors,
// additive parameters and the Jacobi-type integrals built from them.
#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "lwl/residue.hpp"

namespace lwl {

enum class ExtKind { split, unramified, ramified };
std::string kind_name(ExtKind k);
ExtKind kind_from_name(const std::string& s);

// An integral element of L modulo p^K. Split: the pair (t1, t2). Otherwise
// a + b theta with theta = sqrt(eps) (unramified) or sqrt(p) (ramified).
struct LPoint {
  i64 a = 0;
  i64 b = 0;
  bool operator==(const LPoint& o) const { return a == o.a && b == o.b; }
};

class QuadExtModel {
 public:
  QuadExtModel(const FieldModel& F, ExtKind kind);

  const FieldModel& field() const { return *F_; }
  ExtKind kind() const { return kind_; }
  int e() const { return kind_ == ExtKind::ramified ? 2 : 1; }
  // Residue degree: size of O_L / P_L is q^f.
  int f() const { return kind_ == ExtKind::ramified ? 1 : 2; }
  // theta^2 (eps or p); 0 when split.
  i64 d() const { return d_; }
  i64 modulus() const { return mod_; }
  // eta_{L/F} as a character of F^x and its value at varpi.
  MultChar eta() const;
  int eps_L() const;

  // Square-class representatives tau: {1, eps} or {1, -p}, as (valuation, unit).
  std::array<std::pair<int, i64>, 2> tau_reps() const;
  // x_tau with Nr(x_tau) = tau; choice 0 is the standard one, choice 1 another.
  LPoint x_tau(int idx, int choice = 0) const;

  LPoint from_f(i64 a) const;
  LPoint theta() const;
  LPoint add(const LPoint& x, const LPoint& y) const;
  LPoint sub(const LPoint& x, const LPoint& y) const;
  LPoint neg(const LPoint& x) const;
  LPoint mul(const LPoint& x, const LPoint& y) const;
  LPoint scale(const LPoint& x, i64 c) const;
  LPoint pow(LPoint x, i64 e) const;
  LPoint conj(const LPoint& x) const;
  i64 nr(const LPoint& x) const;
  i64 tr(const LPoint& x) const;
  bool is_unit(const LPoint& x) const;
  LPoint inv_unit(const LPoint& x) const;
  // Normalized valuation on L (split: min of the two coordinates).
  int valuation(const LPoint& x) const;
  // x in P_L^n.
  bool in_P(const LPoint& x, int n) const;
  bool congruent(const LPoint& x, const LPoint& y, int n) const { return in_P(sub(x, y), n); }

  // Self-dual volumes for psi o Tr.
  double vol_OL() const;
  double vol_OL_units() const;
  // vol(L^1 cap O_L) from the polar decomposition.
  double vol_torus() const;
  // Closed form vol(L^1 cap (1 + P_L^n)) = q^{-floor(n/e) - (e-1)/2}.
  double torus_w(int n) const;

  // Residue field of L (unramified only): discrete log of a nonzero residue a + b sqrt(eps) mod p.
  i64 residue_dlog(i64 a, i64 b) const;
  i64 residue_order() const { return residue_order_; }

 private:
  const FieldModel* F_;
  ExtKind kind_;
  i64 d_ = 0;
  i64 mod_ = 1;
  i64 residue_order_ = 0;
  std::vector<i64> res_log_;  // index a * p + b
};

struct TorusCosets {
  int n = 0;
  std::vector<LPoint> reps;
  double w = 0.0;  // vol(L^1 cap (1 + P_L^n))
};

// Coset representatives of (L^1 cap O_L) / (L^1 cap (1 + P_L^n)).
TorusCosets enumerate_torus(const QuadExtModel& L, int n);
// Number of residues of O_L / P_L^n that lift to L^1, by exhaustive search.
i64 torus_count_brute(const QuadExtModel& L, int n);
// Number of units of O_L / P_L, by exhaustive search.
i64 residue_units_brute(const QuadExtModel& L);

struct BetaChar {
  ExtKind kind = ExtKind::split;
  MultChar chi0;       // split: beta(t1, t2) = chi0(t1 / t2)
  i64 res_expo = 0;    // unramified: exponent on the residue field generator
  i64 c1 = 0;          // unit part of the additive datum
  int n0 = 0;          // conductor
  cplx at_piL{1.0, 0.0};
  int conductor = 0;
  int conductor1 = 0;  // F-norm-1 conductor
};

BetaChar make_beta_split(const QuadExtModel& L, const MultChar& chi0);
// res_k gives the residue exponent (q - 1) res_k; c1 is the additive unit.
BetaChar make_beta_unramified(const QuadExtModel& L, int n0, i64 c1, i64 res_k = 0);
// sign picks the square root beta(varpi_L) of eta(-1).
BetaChar make_beta_ramified(const QuadExtModel& L, int n0, i64 c1, int sign = 1);
// A regular beta of conductor n0 with a fixed choice of free data.
BetaChar default_beta(const QuadExtModel& L, int n0);

cplx beta_eval(const QuadExtModel& L, const BetaChar& b, const LPoint& x);
// Conductor of a character xi of L^x, given on units, by testing xi on
// generators of the quotients (1 + P_L^m) / (1 + P_L^{m+1}) for m < top.
int l_char_conductor(const QuadExtModel& L, const std::function<cplx(const LPoint&)>& xi, int top);
// (c(beta), c_1(beta)) by direct minimization.
std::pair<int, int> beta_conductors(const QuadExtModel& L, const BetaChar& b);

// c_beta modulo 1 + P_F^{ceil(n0/2e)}, found by search and checked on every
// u in P_L^{floor(n0/2)} modulo P_L^{n0}.
i64 additive_parameter(const QuadExtModel& L, const BetaChar& b);
// c_chi modulo 1 + P_F^{ceil(n/2)} for chi of conductor n >= 2.
i64 char_additive_parameter(const FieldModel& F, const MultChar& chi);
// Modulus of the ambiguity class of additive_parameter.
i64 additive_parameter_modulus(const QuadExtModel& L, const BetaChar& b);

enum class JacMode { inner, boundary };
cplx jac_integral(const QuadExtModel& L, const BetaChar& b, const MultChar& chi, int n, int k, JacMode mode);
// Characters of conductor n0 in the exceptional set E(beta).
std::vector<MultChar> exceptional_set(const QuadExtModel& L, const BetaChar& b);
bool in_exceptional_set(const QuadExtModel& L, const BetaChar& b, const MultChar& chi);

// Weil index lambda(L/F, psi).
cplx weil_index(const QuadExtModel& L);

}  // namespace lwl
