#include "lwl/residue.hpp"

#include <climits>
#include <cmath>

namespace lwl {

i64 powmod(i64 a, i64 e, i64 m) {
  i64 r = 1 % m;
  a = posmod(a, m);
  while (e > 0) {
    if (e & 1) r = mulmod(r, a, m);
    a = mulmod(a, a, m);
    e >>= 1;
  }
  return r;
}

i64 invmod(i64 a, i64 m) {
  i64 g0 = m, g1 = posmod(a, m), x0 = 0, x1 = 1;
  while (g1 != 0) {
    i64 t = g0 / g1;
    i64 g2 = g0 - t * g1;
    g0 = g1;
    g1 = g2;
    i128 x2 = (i128)x0 - (i128)t * x1;
    x0 = x1;
    x1 = static_cast<i64>(x2 % m);
  }
  if (g0 != 1) throw Error("not-invertible", "element is not a unit");
  return posmod(x0, m);
}

i64 ipow(i64 b, int e) {
  i64 r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

bool is_prime(i64 n) {
  if (n < 2) return false;
  for (i64 d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

cplx root_of_unity(i64 num, i64 den) {
  i64 r = posmod(num, den);
  // Use the symmetric representative for a slightly better angle.
  double ang = 2.0 * kPi * static_cast<double>(2 * r > den ? r - den : r) /
               static_cast<double>(den);
  return {std::cos(ang), std::sin(ang)};
}

UnitGroup::UnitGroup(i64 p, int n, i64 g) : p_(p), n_(n) {
  mod_ = ipow(p, n);
  phi_ = n == 0 ? 1 : (p - 1) * ipow(p, n - 1);
  dlog_.assign(static_cast<size_t>(mod_), -1);
  exp_.resize(static_cast<size_t>(phi_));
  i64 x = 1 % mod_;
  for (i64 j = 0; j < phi_; ++j) {
    exp_[static_cast<size_t>(j)] = x;
    dlog_[static_cast<size_t>(x)] = static_cast<std::int32_t>(j);
    x = mulmod(x, g, mod_);
  }
  if (n == 0) dlog_[0] = 0;
}

i64 UnitGroup::dlog(i64 u) const {
  i64 r = dlog_[static_cast<size_t>(posmod(u, mod_))];
  if (r < 0) throw Error("not-a-unit", "discrete log of a non-unit");
  return r;
}

FieldModel::FieldModel(i64 p, int k, double tol) : p_(p), tol_(tol) {
  if (p < 3 || !is_prime(p)) throw Error("invalid-config", "p must be an odd prime");
  int kmax = 0;
  {
    i128 x = 1;
    while (x * p < ((i128)1 << 62)) {
      x *= p;
      ++kmax;
    }
  }
  if (k == 0) k = kmax;
  if (k < 1 || k > kmax)
    throw Error("invalid-config", "precision must lie in [1, " + std::to_string(kmax) + "]");
  k_ = k;
  pk_.resize(static_cast<size_t>(k_) + 1);
  pk_[0] = 1;
  for (int i = 1; i <= k_; ++i) pk_[static_cast<size_t>(i)] = pk_[static_cast<size_t>(i) - 1] * p;

  epsilon_ = 2;
  while (powmod(epsilon_, (p - 1) / 2, p) != p - 1) ++epsilon_;

  // Smallest primitive root modulo p^2; it generates (Z/p^n)^x for all n.
  for (i64 g = 2;; ++g) {
    if (g % p == 0) continue;
    bool prim = true;
    i64 m = p - 1;
    for (i64 d = 2; d <= m; ++d) {
      if (m % d == 0) {
        if (powmod(g, (p - 1) / d, p) == 1) {
          prim = false;
          break;
        }
        while (m % d == 0) m /= d;
      }
    }
    if (!prim) continue;
    if (powmod(g, p - 1, p * p) == 1) continue;
    g_ = g;
    break;
  }

  table_limit_ = 0;
  while (table_limit_ < k_ && pk_[static_cast<size_t>(table_limit_) + 1] <= 4200000) ++table_limit_;
  tables_ = std::make_shared<Tables>();
  for (int i = 0; i <= table_limit_; ++i) {
    tables_->once.push_back(std::make_unique<std::once_flag>());
    tables_->groups.emplace_back();
  }
}

i64 FieldModel::pk(int n) const {
  if (n < 0 || n > k_) throw Error("precision-exhausted", "p^" + std::to_string(n) + " beyond precision");
  return pk_[static_cast<size_t>(n)];
}

const UnitGroup& FieldModel::units(int n) const {
  if (n < 0 || n > table_limit_)
    throw Error("level-exceeds-precision", "unit group table at level " + std::to_string(n));
  auto& t = *tables_;
  std::call_once(*t.once[static_cast<size_t>(n)], [&] {
    t.groups[static_cast<size_t>(n)] = std::make_unique<UnitGroup>(p_, n, g_);
  });
  return *t.groups[static_cast<size_t>(n)];
}

int FieldModel::valuation(i64 x) const {
  if (x == 0) throw Error("zero-argument", "valuation of zero");
  int v = 0;
  while (x % p_ == 0) {
    x /= p_;
    ++v;
  }
  return v;
}

int FieldModel::legendre(i64 u) const {
  i64 r = powmod(posmod(u, p_), (p_ - 1) / 2, p_);
  if (r == 0) return 0;
  return r == 1 ? 1 : -1;
}

i64 FieldModel::sqrt_unit(i64 u, int n) const {
  if (legendre(u) != 1) throw Error("not-a-square", "unit is not a square");
  i64 u1 = posmod(u, p_);
  i64 r = 1;
  while (mulmod(r, r, p_) != u1) ++r;
  i64 mod = pk(n);
  i64 target = posmod(u, mod);
  // Newton iteration doubles the number of correct digits.
  for (int it = 0; it < 64; ++it) {
    i64 e = posmod(mulmod(r, r, mod) - target, mod);
    if (e == 0) break;
    i64 inv2r = invmod(mulmod(2, r, mod), mod);
    r = posmod(r - mulmod(e, inv2r, mod), mod);
  }
  return r;
}

// ---------------------------------------------------------------- PAdic

PAdic PAdic::make(const FieldModel& F, int v, i64 u, int prec) {
  if (prec < 0) prec = F.k();
  if (prec > F.k()) prec = F.k();
  PAdic x;
  i64 mod = F.pk(prec);
  u = posmod(u, mod);
  if (u == 0) {
    x.zero = true;
    x.exact_zero = false;
    x.v = v + prec;
    return x;
  }
  int w = F.valuation(u);
  x.zero = false;
  x.exact_zero = false;
  x.v = v + w;
  x.prec = prec - w;
  x.u = posmod(u / F.pk(w), F.pk(x.prec));
  return x;
}

PAdic PAdic::from_int(const FieldModel& F, i64 x) {
  if (x == 0) return PAdic{};
  return make(F, 0, x);
}

int PAdic::abs_prec() const {
  if (exact_zero) return INT_MAX / 2;
  if (zero) return v;
  return v + prec;
}

PAdic padd(const FieldModel& F, const PAdic& a, const PAdic& b) {
  if (a.exact_zero) return b;
  if (b.exact_zero) return a;
  int A = std::min(a.abs_prec(), b.abs_prec());
  int va = a.zero ? A : a.v;
  int vb = b.zero ? A : b.v;
  int vmin = std::min(va, vb);
  if (vmin >= A) {
    PAdic z;
    z.zero = true;
    z.exact_zero = false;
    z.v = A;
    return z;
  }
  int span = A - vmin;
  i64 N = F.pk(span);
  i64 s = 0;
  if (!a.zero && a.v < A) s = posmod(s + mulmod(a.u % N, F.pk(a.v - vmin), N), N);
  if (!b.zero && b.v < A) s = posmod(s + mulmod(b.u % N, F.pk(b.v - vmin), N), N);
  return PAdic::make(F, vmin, s, span);
}

PAdic pneg(const FieldModel& F, const PAdic& a) {
  if (a.zero) return a;
  PAdic r = a;
  r.u = posmod(-a.u, F.pk(a.prec));
  return r;
}

PAdic psub(const FieldModel& F, const PAdic& a, const PAdic& b) { return padd(F, a, pneg(F, b)); }

PAdic pmul(const FieldModel& F, const PAdic& a, const PAdic& b) {
  if (a.exact_zero || b.exact_zero) return PAdic{};
  if (a.zero || b.zero) {
    PAdic z;
    z.zero = true;
    z.exact_zero = false;
    int va = a.zero ? a.v : a.v;
    int vb = b.zero ? b.v : b.v;
    z.v = va + vb;
    return z;
  }
  PAdic r;
  r.zero = false;
  r.exact_zero = false;
  r.v = a.v + b.v;
  r.prec = std::min(a.prec, b.prec);
  i64 mod = F.pk(r.prec);
  r.u = mulmod(a.u % mod, b.u % mod, mod);
  return r;
}

PAdic pinv(const FieldModel& F, const PAdic& a) {
  if (a.zero) throw Error("zero-argument", "inverse of zero");
  PAdic r = a;
  r.v = -a.v;
  r.u = invmod(a.u, F.pk(a.prec));
  return r;
}

bool pequal(const FieldModel& F, const PAdic& a, const PAdic& b) {
  PAdic d = psub(F, a, b);
  if (d.exact_zero) return true;
  if (d.zero) throw Error("precision-exhausted", "equality undetermined at available precision");
  return false;
}

cplx psi_frac(const FieldModel& F, i64 u, int m) {
  if (m <= 0) return {1.0, 0.0};
  i64 mod = F.pk(m);
  return root_of_unity(posmod(u, mod), mod);
}

cplx psi_eval(const FieldModel& F, const PAdic& x) {
  if (x.exact_zero) return {1.0, 0.0};
  if (x.zero) {
    if (x.v >= 0) return {1.0, 0.0};
    throw Error("precision-exhausted", "psi of an element with undetermined fractional part");
  }
  if (x.v >= 0) return {1.0, 0.0};
  int m = -x.v;
  if (m > F.k()) throw Error("precision-exhausted", "valuation below -k");
  if (x.prec < m) throw Error("precision-exhausted", "fractional part not determined");
  return psi_frac(F, x.u % F.pk(m), m);
}

// ---------------------------------------------------------------- characters

int conductor_of(const FieldModel& F, int level, i64 expo) {
  if (level == 0) return 0;
  i64 phi = F.phi(level);
  i64 e = posmod(expo, phi);
  if (e == 0) return 0;
  for (int c = 1; c <= level; ++c)
    if (e % F.pk(level - c) == 0) return c;
  return level;
}

MultChar make_char(const FieldModel& F, int level, i64 expo, cplx at_pi) {
  if (level < 0 || level > F.k()) throw Error("level-exceeds-precision", "character level");
  MultChar c;
  c.level = level;
  c.expo = posmod(expo, F.phi(level));
  c.at_pi = at_pi;
  c.conductor = conductor_of(F, level, c.expo);
  return c;
}

MultChar trivial_char() { return MultChar{}; }

MultChar unramified_char(cplx z) {
  MultChar c;
  c.at_pi = z;
  return c;
}

MultChar legendre_char(const FieldModel& F, cplx at_pi) {
  return make_char(F, 1, (F.p() - 1) / 2, at_pi);
}

MultChar char_lift(const FieldModel& F, const MultChar& a, int level) {
  if (level < a.level) throw Error("level-mismatch", "cannot lift a character to a lower level");
  if (level == a.level) return a;
  MultChar r = a;
  r.level = level;
  r.expo = a.level == 0 ? 0 : posmod((i64)((i128)a.expo * F.pk(level - a.level) % F.phi(level)), F.phi(level));
  return r;
}

MultChar char_reduce(const FieldModel& F, const MultChar& a) {
  MultChar r = a;
  r.level = a.conductor;
  r.expo = a.conductor == 0 ? 0 : a.expo / F.pk(a.level - a.conductor);
  return r;
}

MultChar char_mul(const FieldModel& F, const MultChar& a, const MultChar& b) {
  int L = std::max(a.level, b.level);
  MultChar x = char_lift(F, a, L), y = char_lift(F, b, L);
  return make_char(F, L, x.expo + y.expo, a.at_pi * b.at_pi);
}

MultChar char_inv(const MultChar& a) {
  MultChar r = a;
  r.expo = a.expo == 0 ? 0 : -a.expo;
  r.at_pi = 1.0 / a.at_pi;
  return r;
}

MultChar char_pow(const FieldModel& F, const MultChar& a, i64 e) {
  cplx z = 1.0;
  cplx base = e >= 0 ? a.at_pi : 1.0 / a.at_pi;
  for (i64 i = 0; i < (e >= 0 ? e : -e); ++i) z *= base;
  i64 phi = F.phi(a.level);
  return make_char(F, a.level, (i64)((i128)a.expo * posmod(e, phi) % phi), z);
}

bool char_equal(const FieldModel& F, const MultChar& a, const MultChar& b) {
  MultChar x = char_reduce(F, a), y = char_reduce(F, b);
  if (x.level != y.level || x.expo != y.expo) return false;
  return std::abs(a.at_pi - b.at_pi) <= F.tol() * std::max(1.0, std::abs(a.at_pi));
}

cplx char_index(const FieldModel& F, const MultChar& a, int level, i64 j) {
  if (a.level == 0 || a.expo == 0) return {1.0, 0.0};
  if (level < a.level) throw Error("level-mismatch", "unit index below character level");
  i64 phi = F.phi(a.level);
  return root_of_unity((i64)((i128)a.expo * posmod(j, phi) % phi), phi);
}

cplx char_unit(const FieldModel& F, const MultChar& a, i64 u) {
  if (a.level == 0 || a.expo == 0) return {1.0, 0.0};
  MultChar r = char_reduce(F, a);
  i64 j = F.units(r.level).dlog(u);
  return root_of_unity((i64)((i128)r.expo * j % F.phi(r.level)), F.phi(r.level));
}

cplx char_eval(const FieldModel& F, const MultChar& a, const PAdic& x) {
  if (x.zero) throw Error("zero-argument", "character at zero");
  if (x.prec < a.conductor) throw Error("precision-exhausted", "unit part below conductor");
  return std::pow(a.at_pi, x.v) * char_unit(F, a, x.u);
}

std::vector<MultChar> enumerate_chars(const FieldModel& F, int n) {
  if (n < 0 || n > F.k()) throw Error("level-exceeds-precision", "enumerate_chars level");
  std::vector<MultChar> out;
  i64 phi = F.phi(n);
  out.reserve(static_cast<size_t>(phi));
  for (i64 e = 0; e < phi; ++e) out.push_back(make_char(F, n, e));
  return out;
}

cplx gauss_integral(const FieldModel& F, const MultChar& chi, int m) {
  if (m < 1) throw Error("parameter-out-of-range", "gauss_integral needs m >= 1");
  if (m > F.k()) throw Error("precision-exhausted", "gauss_integral level");
  if (chi.conductor > m) return {0.0, 0.0};
  MultChar r = char_reduce(F, chi);
  i64 mod = F.pk(m);
  cplx s = 0.0;
  if (r.level == 0) {
    for (i64 u = 1; u < mod; ++u)
      if (u % F.p() != 0) s += psi_frac(F, u, m);
  } else {
    const UnitGroup& G = F.units(r.level);
    i64 phi = F.phi(r.level);
    for (i64 u = 1; u < mod; ++u) {
      if (u % F.p() == 0) continue;
      i64 j = G.dlog(u);
      s += psi_frac(F, u, m) * root_of_unity((i64)((i128)r.expo * j % phi), phi);
    }
  }
  return s / static_cast<double>(mod) * std::pow(chi.at_pi, -m);
}

cplx eps_half(const FieldModel& F, const MultChar& chi) {
  int c = chi.conductor;
  if (c == 0) return {1.0, 0.0};
  return std::pow(F.qd(), 0.5 * c) * gauss_integral(F, char_inv(chi), c);
}

cplx gamma_half_ramified(const FieldModel& F, const MultChar& chi) {
  if (chi.conductor == 0) throw Error("parameter-out-of-range", "gamma_half_ramified needs a ramified character");
  return eps_half(F, chi);
}

cplx gamma_ramified_at(const FieldModel& F, const MultChar& chi, double s) {
  return std::pow(F.qd(), chi.conductor * (0.5 - s)) * gamma_half_ramified(F, chi);
}

}  // namespace lwl
