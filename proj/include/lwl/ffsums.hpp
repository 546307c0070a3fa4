// Complete exponential sums over the prime field F_q: Gauss sums, the
// duplication formula, Kl_3, Katz hypergeometric sums and the S/T sums.
// Characters follow the convention rho(0) = 0, including the trivial one.
#pragma once

#include <vector>

#include "lwl/residue.hpp"

namespace lwl {

struct FqChar {
  i64 expo = 0;  // exponent against the fixed generator of F_q^x
};

class FiniteField {
 public:
  explicit FiniteField(i64 p);
  i64 q() const { return q_; }
  i64 generator() const { return g_; }
  i64 dlog(i64 t) const { return dlog_[static_cast<size_t>(posmod(t, q_))]; }
  cplx chi(const FqChar& c, i64 t) const;
  cplx psi(i64 t) const { return psi_[static_cast<size_t>(posmod(t, q_))]; }
  FqChar eta() const { return FqChar{(q_ - 1) / 2}; }
  FqChar trivial() const { return FqChar{0}; }
  FqChar mul(FqChar a, FqChar b) const { return FqChar{posmod(a.expo + b.expo, q_ - 1)}; }
  FqChar inv(FqChar a) const { return FqChar{posmod(-a.expo, q_ - 1)}; }
  FqChar pow(FqChar a, i64 e) const { return FqChar{posmod(a.expo * e, q_ - 1)}; }
  bool is_trivial(FqChar a) const { return posmod(a.expo, q_ - 1) == 0; }
  bool equal(FqChar a, FqChar b) const { return posmod(a.expo - b.expo, q_ - 1) == 0; }
  std::vector<FqChar> all_chars() const;
  i64 inv_elem(i64 t) const { return invmod(t, q_); }

 private:
  i64 q_, g_;
  std::vector<i64> dlog_;
  std::vector<cplx> psi_;
  std::vector<cplx> roots_;
};

cplx tau(const FiniteField& K, FqChar rho);
// |tau(rho^2) tau(eta) - rho(4) tau(rho) tau(rho eta)|
double duplication_residual(const FiniteField& K, FqChar rho);
// sum_{x1 x2 x3 = delta} psi(x1 + x2 + x3), by a double loop.
cplx kl3(const FiniteField& K, i64 delta);
// sum_{u, t != 0} eta(1 - u) psi(delta / (t^2 u) + 2 t).
cplx hyperkl_lhs(const FiniteField& K, i64 delta);

// (-1)^{n+m-1} q^{-(n+m-1)/2} sum_{prod x = t prod y} prod A(x) prod conj(B)(y)
// psi(sum x - sum y), for all t in F_q^x at once (index t).
std::vector<cplx> katz_H_table(const FiniteField& K, const std::vector<FqChar>& A,
                               const std::vector<FqChar>& B);
cplx katz_H(const FiniteField& K, i64 t, const std::vector<FqChar>& A, const std::vector<FqChar>& B);

cplx sum_T(const FiniteField& K, FqChar chi0, FqChar chi);
cplx sum_S(const FiniteField& K, FqChar chi0, FqChar chi);
// q^{-1/2} T + [chi0 = eta] q^{-1/2} (1 - 1/q) conj(tau(eta chi^{-1})).
cplx s_from_t(const FiniteField& K, FqChar chi0, FqChar chi);

}  // namespace lwl
