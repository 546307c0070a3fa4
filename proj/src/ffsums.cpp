#include "lwl/ffsums.hpp"

#include <cmath>

namespace lwl {

FiniteField::FiniteField(i64 p) : q_(p) {
  if (p < 3 || !is_prime(p)) throw Error("invalid-config", "q must be an odd prime");
  for (i64 g = 2;; ++g) {
    bool prim = true;
    for (i64 d = 2; d < p - 1; ++d)
      if ((p - 1) % d == 0 && powmod(g, d, p) == 1) {
        prim = false;
        break;
      }
    if (prim) {
      g_ = g;
      break;
    }
  }
  dlog_.assign(static_cast<size_t>(p), -1);
  i64 x = 1;
  for (i64 j = 0; j < p - 1; ++j) {
    dlog_[static_cast<size_t>(x)] = j;
    x = x * g_ % p;
  }
  psi_.resize(static_cast<size_t>(p));
  for (i64 t = 0; t < p; ++t) psi_[static_cast<size_t>(t)] = root_of_unity(t, p);
  roots_.resize(static_cast<size_t>(p - 1));
  for (i64 j = 0; j < p - 1; ++j) roots_[static_cast<size_t>(j)] = root_of_unity(j, p - 1);
}

cplx FiniteField::chi(const FqChar& c, i64 t) const {
  t = posmod(t, q_);
  if (t == 0) return {0.0, 0.0};
  return roots_[static_cast<size_t>(posmod(c.expo * dlog(t), q_ - 1))];
}

std::vector<FqChar> FiniteField::all_chars() const {
  std::vector<FqChar> out;
  for (i64 e = 0; e < q_ - 1; ++e) out.push_back(FqChar{e});
  return out;
}

cplx tau(const FiniteField& K, FqChar rho) {
  cplx s = 0.0;
  for (i64 t = 1; t < K.q(); ++t) s += K.chi(rho, t) * K.psi(t);
  return s;
}

double duplication_residual(const FiniteField& K, FqChar rho) {
  FqChar eta = K.eta();
  cplx lhs = tau(K, K.pow(rho, 2)) * tau(K, eta);
  cplx rhs = K.chi(rho, 4) * tau(K, rho) * tau(K, K.mul(rho, eta));
  return std::abs(lhs - rhs);
}

cplx kl3(const FiniteField& K, i64 delta) {
  i64 q = K.q();
  delta = posmod(delta, q);
  if (delta == 0) throw Error("zero-argument", "kl3 at zero");
  cplx s = 0.0;
  for (i64 x1 = 1; x1 < q; ++x1)
    for (i64 x2 = 1; x2 < q; ++x2) {
      i64 x3 = delta * K.inv_elem(x1 * x2 % q) % q;
      s += K.psi(x1 + x2 + x3);
    }
  return s;
}

cplx hyperkl_lhs(const FiniteField& K, i64 delta) {
  i64 q = K.q();
  delta = posmod(delta, q);
  if (delta == 0) throw Error("zero-argument", "hyperkl_lhs at zero");
  FqChar eta = K.eta();
  cplx s = 0.0;
  for (i64 u = 1; u < q; ++u) {
    cplx w = K.chi(eta, 1 - u);
    if (w == cplx(0.0, 0.0)) continue;
    for (i64 t = 1; t < q; ++t) {
      i64 den = t * t % q * u % q;
      s += w * K.psi(delta * K.inv_elem(den) + 2 * t);
    }
  }
  return s;
}

namespace {

// Multiplicative convolution on F_q^x, indexed by residues 1..q-1.
std::vector<cplx> mconv(const FiniteField& K, const std::vector<cplx>& a, const std::vector<cplx>& b) {
  i64 q = K.q();
  std::vector<cplx> c(static_cast<size_t>(q), 0.0);
  for (i64 x = 1; x < q; ++x)
    for (i64 y = 1; y < q; ++y) c[static_cast<size_t>(x * y % q)] += a[static_cast<size_t>(x)] * b[static_cast<size_t>(y)];
  return c;
}

}  // namespace

std::vector<cplx> katz_H_table(const FiniteField& K, const std::vector<FqChar>& A,
                               const std::vector<FqChar>& B) {
  i64 q = K.q();
  size_t n = A.size(), m = B.size();
  if (n + m == 0) throw Error("parameter-out-of-range", "katz_H needs at least one character");
  // delta at 1 is the unit of multiplicative convolution.
  std::vector<cplx> acc(static_cast<size_t>(q), 0.0);
  acc[1] = 1.0;
  for (const auto& a : A) {
    std::vector<cplx> f(static_cast<size_t>(q), 0.0);
    for (i64 x = 1; x < q; ++x) f[static_cast<size_t>(x)] = K.chi(a, x) * K.psi(x);
    acc = mconv(K, acc, f);
  }
  // prod x = t prod y  <=>  t = prod x * prod (1/y).
  for (const auto& b : B) {
    std::vector<cplx> f(static_cast<size_t>(q), 0.0);
    for (i64 y = 1; y < q; ++y) {
      i64 yi = K.inv_elem(y);
      f[static_cast<size_t>(yi)] = std::conj(K.chi(b, y)) * K.psi(-y);
    }
    acc = mconv(K, acc, f);
  }
  double sign = ((n + m - 1) % 2 == 0) ? 1.0 : -1.0;
  double scale = sign * std::pow(static_cast<double>(q), -0.5 * static_cast<double>(n + m - 1));
  for (auto& v : acc) v *= scale;
  acc[0] = 0.0;
  return acc;
}

cplx katz_H(const FiniteField& K, i64 t, const std::vector<FqChar>& A, const std::vector<FqChar>& B) {
  t = posmod(t, K.q());
  if (t == 0) throw Error("zero-argument", "katz_H at zero");
  return katz_H_table(K, A, B)[static_cast<size_t>(t)];
}

cplx sum_T(const FiniteField& K, FqChar chi0, FqChar chi) {
  if (K.is_trivial(chi0) || K.is_trivial(chi)) throw Error("trivial-character", "T needs nontrivial characters");
  i64 q = K.q();
  cplx s = 0.0;
  for (i64 u = 0; u < q; ++u) {
    cplx a = K.chi(chi, u * (u + 1));
    if (a == cplx(0.0, 0.0)) continue;
    for (i64 v = 0; v < q; ++v) {
      cplx b = K.chi(chi, v * (v + 1));
      if (b == cplx(0.0, 0.0)) continue;
      s += a * std::conj(b) * K.chi(chi0, u * v - 1);
    }
  }
  return s;
}

cplx sum_S(const FiniteField& K, FqChar chi0, FqChar chi) {
  if (K.is_trivial(chi0) || K.is_trivial(chi)) throw Error("trivial-character", "S needs nontrivial characters");
  i64 q = K.q();
  std::vector<cplx> H = katz_H_table(K, {K.trivial(), K.trivial()}, {K.inv(chi), K.eta()});
  cplx s = 0.0;
  for (i64 a = 0; a < q; ++a) {
    if (a == 1 || a == q - 1) continue;
    i64 ratio = (a + 1) * K.inv_elem(posmod(a - 1, q)) % q;
    s += K.chi(chi0, ratio) * H[static_cast<size_t>(posmod(1 - a * a, q))];
  }
  return s;
}

cplx s_from_t(const FiniteField& K, FqChar chi0, FqChar chi) {
  double q = static_cast<double>(K.q());
  cplx r = sum_T(K, chi0, chi) / std::sqrt(q);
  if (K.equal(chi0, K.eta())) r += (1.0 - 1.0 / q) / std::sqrt(q) * std::conj(tau(K, K.mul(K.eta(), K.inv(chi))));
  return r;
}

}  // namespace lwl
