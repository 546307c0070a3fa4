#include "lwl/symbolics.hpp"

#include <algorithm>
#include <cmath>

namespace lwl {

// ---------------------------------------------------------------- LaurentPoly

LaurentPoly LaurentPoly::monomial(int e, cplx a) {
  LaurentPoly p;
  p.add_term(e, a);
  return p;
}

cplx LaurentPoly::coeff(int e) const {
  auto it = c_.find(e);
  return it == c_.end() ? cplx(0.0, 0.0) : it->second;
}

void LaurentPoly::add_term(int e, cplx a) {
  if (a == cplx(0.0, 0.0)) return;
  auto [it, fresh] = c_.emplace(e, a);
  if (!fresh) {
    it->second += a;
    if (it->second == cplx(0.0, 0.0)) c_.erase(it);
  }
}

int LaurentPoly::min_exp() const {
  if (c_.empty()) throw Error("empty-polynomial", "min_exp of zero");
  return c_.begin()->first;
}

int LaurentPoly::max_exp() const {
  if (c_.empty()) throw Error("empty-polynomial", "max_exp of zero");
  return c_.rbegin()->first;
}

cplx LaurentPoly::eval(cplx X) const {
  cplx s = 0.0;
  for (const auto& [e, a] : c_) s += a * std::pow(X, e);
  return s;
}

LaurentPoly LaurentPoly::trimmed(double tol) const {
  double mx = 0.0;
  for (const auto& kv : c_) mx = std::max(mx, std::abs(kv.second));
  LaurentPoly out;
  for (const auto& [e, a] : c_)
    if (std::abs(a) > tol * mx) out.c_.emplace(e, a);
  return out;
}

LaurentPoly LaurentPoly::slice(int lo, int hi) const {
  LaurentPoly out;
  for (const auto& [e, a] : c_)
    if (e >= lo && e <= hi) out.c_.emplace(e, a);
  return out;
}

LaurentPoly LaurentPoly::shifted(int k) const {
  LaurentPoly out;
  for (const auto& [e, a] : c_) out.c_.emplace(e + k, a);
  return out;
}

LaurentPoly LaurentPoly::operator+(const LaurentPoly& o) const {
  LaurentPoly out = *this;
  for (const auto& [e, a] : o.c_) out.add_term(e, a);
  return out;
}

LaurentPoly LaurentPoly::operator-(const LaurentPoly& o) const {
  LaurentPoly out = *this;
  for (const auto& [e, a] : o.c_) out.add_term(e, -a);
  return out;
}

LaurentPoly LaurentPoly::operator*(const LaurentPoly& o) const {
  LaurentPoly out;
  for (const auto& [e1, a1] : c_)
    for (const auto& [e2, a2] : o.c_) out.add_term(e1 + e2, a1 * a2);
  return out;
}

LaurentPoly LaurentPoly::operator*(cplx a) const {
  LaurentPoly out;
  for (const auto& [e, v] : c_) out.add_term(e, v * a);
  return out;
}

// ------------------------------------------------------------ RationalLaurent

namespace {

bool same_root(cplx a, cplx b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)); }

LaurentPoly pole_poly(const std::vector<Pole>& poles) {
  LaurentPoly P = LaurentPoly::constant(1.0);
  for (const auto& pl : poles) {
    LaurentPoly f = LaurentPoly::constant(1.0);
    f.add_term(1, -pl.b);
    for (int i = 0; i < pl.m; ++i) P = P * f;
  }
  return P;
}

std::vector<Pole> normalize_poles(const std::vector<Pole>& in) {
  std::vector<Pole> out;
  for (const auto& pl : in) {
    if (pl.m <= 0) continue;
    if (pl.b == cplx(0.0, 0.0)) continue;
    auto it = std::find_if(out.begin(), out.end(), [&](const Pole& o) { return same_root(o.b, pl.b); });
    if (it == out.end())
      out.push_back(pl);
    else
      it->m += pl.m;
  }
  return out;
}

// Power series division a / b, both given as coefficient vectors, to n terms.
std::vector<cplx> series_div(const std::vector<cplx>& a, const std::vector<cplx>& b, int n) {
  if (b.empty() || std::abs(b[0]) == 0.0) throw Error("pole-at-expansion-point", "division by a series vanishing at 0");
  std::vector<cplx> q(static_cast<size_t>(n + 1), 0.0);
  for (int k = 0; k <= n; ++k) {
    cplx s = k < static_cast<int>(a.size()) ? a[static_cast<size_t>(k)] : cplx(0.0);
    for (int j = 1; j <= k && j < static_cast<int>(b.size()); ++j)
      s -= b[static_cast<size_t>(j)] * q[static_cast<size_t>(k - j)];
    q[static_cast<size_t>(k)] = s / b[0];
  }
  return q;
}

// Generalized binomial coefficient binom(e, k) for integer e, k >= 0.
double binom_general(int e, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= static_cast<double>(e - i) / static_cast<double>(i + 1);
  return r;
}

// Taylor coefficients of the Laurent polynomial p at x0, degrees 0..n.
std::vector<cplx> taylor_at(const LaurentPoly& p, cplx x0, int n) {
  std::vector<cplx> out(static_cast<size_t>(n + 1), 0.0);
  for (const auto& [e, a] : p.terms())
    for (int k = 0; k <= n; ++k) {
      if (e >= 0 && k > e) break;
      out[static_cast<size_t>(k)] += a * binom_general(e, k) * std::pow(x0, e - k);
    }
  return out;
}

}  // namespace

RationalLaurent::RationalLaurent(LaurentPoly num, std::vector<Pole> poles)
    : num_(std::move(num)), poles_(normalize_poles(poles)) {}

LaurentPoly RationalLaurent::denominator() const { return pole_poly(poles_); }

cplx RationalLaurent::eval(cplx X) const {
  cplx den = 1.0;
  for (const auto& pl : poles_) den *= std::pow(1.0 - pl.b * X, pl.m);
  if (std::abs(den) < 1e-300) throw Error("pole", "evaluation at a pole");
  return num_.eval(X) / den;
}

std::vector<cplx> inverse_denominator_series(const std::vector<Pole>& poles, int n) {
  std::vector<cplx> s(static_cast<size_t>(std::max(n, 0) + 1), 0.0);
  s[0] = 1.0;
  for (const auto& pl : poles)
    for (int r = 0; r < pl.m; ++r)
      // multiply by 1/(1 - bX): running sum s_k += b s_{k-1}
      for (int k = 1; k <= n; ++k) s[static_cast<size_t>(k)] += pl.b * s[static_cast<size_t>(k - 1)];
  return s;
}

LaurentPoly RationalLaurent::expand(int lo, int hi) const {
  LaurentPoly out;
  if (num_.empty() || hi < lo) return out;
  int base = num_.min_exp();
  int n = hi - base;
  if (n < 0) return out;
  std::vector<cplx> inv = inverse_denominator_series(poles_, n);
  for (int e = lo; e <= hi; ++e) {
    cplx s = 0.0;
    for (const auto& [a, c] : num_.terms()) {
      int k = e - a;
      if (k < 0) break;
      s += c * inv[static_cast<size_t>(k)];
    }
    out.add_term(e, s);
  }
  return out;
}

RationalLaurent RationalLaurent::operator*(const RationalLaurent& o) const {
  std::vector<Pole> ps = poles_;
  ps.insert(ps.end(), o.poles_.begin(), o.poles_.end());
  return RationalLaurent(num_ * o.num_, ps);
}

RationalLaurent RationalLaurent::operator*(cplx a) const { return RationalLaurent(num_ * a, poles_); }

RationalLaurent RationalLaurent::times_poly(const LaurentPoly& p) const { return RationalLaurent(num_ * p, poles_); }

RationalLaurent RationalLaurent::operator+(const RationalLaurent& o) const {
  // least common denominator
  std::vector<Pole> lcm = poles_;
  for (const auto& pl : o.poles_) {
    auto it = std::find_if(lcm.begin(), lcm.end(), [&](const Pole& x) { return same_root(x.b, pl.b); });
    if (it == lcm.end())
      lcm.push_back(pl);
    else
      it->m = std::max(it->m, pl.m);
  }
  auto cofactor = [&](const std::vector<Pole>& own) {
    std::vector<Pole> rest;
    for (const auto& pl : lcm) {
      int m = pl.m;
      for (const auto& x : own)
        if (same_root(x.b, pl.b)) m -= x.m;
      if (m > 0) rest.push_back(Pole{pl.b, m});
    }
    return pole_poly(rest);
  };
  LaurentPoly num = num_ * cofactor(poles_) + o.num_ * cofactor(o.poles_);
  return RationalLaurent(num, lcm);
}

// -------------------------------------------------------------- laurent_plus

RationalLaurent laurent_plus(const RationalLaurent& f, PlusMode mode) {
  if (f.is_zero()) return f;
  const LaurentPoly& Q = f.num();
  if (mode == PlusMode::series) {
    int lo = Q.min_exp();
    if (lo >= 0) return f;
    LaurentPoly fminus = f.expand(lo, -1);
    LaurentPoly num = Q - fminus * f.denominator();
    // Exact arithmetic would cancel every negative power here.
    return RationalLaurent(num.slice(0, num.empty() ? 0 : num.max_exp()), f.poles());
  }
  int degP = 0;
  for (const auto& pl : f.poles()) degP += pl.m;
  if (Q.max_exp() >= degP)
    throw Error("degree-hypothesis-violated", "partial fractions need the top power of Q below deg P");
  LaurentPoly num;
  const auto& poles = f.poles();
  for (size_t j = 0; j < poles.size(); ++j) {
    std::vector<Pole> others;
    for (size_t i = 0; i < poles.size(); ++i)
      if (i != j) others.push_back(poles[i]);
    LaurentPoly Pj = pole_poly(others);
    cplx b = poles[j].b;
    cplx x0 = 1.0 / b;
    int mj = poles[j].m;
    std::vector<cplx> tq = taylor_at(Q, x0, mj - 1);
    std::vector<cplx> tp = taylor_at(Pj, x0, mj - 1);
    std::vector<cplx> g = series_div(tq, tp, mj - 1);  // (Q/P_j)^{(k)}(x0) / k!
    LaurentPoly lin = LaurentPoly::constant(1.0);
    lin.add_term(1, -b);
    LaurentPoly powk = LaurentPoly::constant(1.0);
    for (int k = 0; k < mj; ++k) {
      cplx C = g[static_cast<size_t>(k)] * std::pow(-1.0 / b, k);
      num = num + powk * Pj * C;
      powk = powk * lin;
    }
  }
  return RationalLaurent(num, poles);
}

// ---------------------------------------------------------------- Taylor in s

std::vector<cplx> taylor_coeffs_in_s(const RationalLaurent& f, int kmax, double s0, double q) {
  if (kmax < 0) throw Error("parameter-out-of-range", "negative Taylor order");
  double X0 = std::pow(q, s0);
  auto expand_u = [&](const LaurentPoly& p) {
    // X = X0 e^u, so X^e = X0^e sum_k e^k u^k / k!
    std::vector<cplx> c(static_cast<size_t>(kmax + 1), 0.0);
    for (const auto& [e, a] : p.terms()) {
      cplx base = a * std::pow(X0, e);
      double term = 1.0;
      for (int k = 0; k <= kmax; ++k) {
        c[static_cast<size_t>(k)] += base * term;
        term *= static_cast<double>(e) / static_cast<double>(k + 1);
      }
    }
    return c;
  };
  std::vector<cplx> num = expand_u(f.num());
  std::vector<cplx> den = expand_u(f.denominator());
  if (std::abs(den[0]) < 1e-14) throw Error("pole-at-expansion-point", "denominator vanishes at s0");
  std::vector<cplx> r = series_div(num, den, kmax);
  double lq = std::log(q), scale = 1.0;
  for (int k = 0; k <= kmax; ++k) {
    r[static_cast<size_t>(k)] *= scale;
    scale *= lq;
  }
  return r;
}

cplx taylor_in_s(const RationalLaurent& f, int k, double s0, double q) {
  return taylor_coeffs_in_s(f, k, s0, q)[static_cast<size_t>(k)];
}

// ----------------------------------------------------------------- Pi data

PiData make_pi(const FieldModel& F, const std::array<MultChar, 3>& mu) {
  MultChar prod = char_mul(F, char_mul(F, mu[0], mu[1]), mu[2]);
  prod = char_reduce(F, prod);
  if (prod.conductor != 0 || std::abs(prod.at_pi - cplx(1.0)) > 1e-9)
    throw Error("invalid-config", "the three characters must have trivial product");
  PiData pi;
  for (int i = 0; i < 3; ++i) pi.mu[static_cast<size_t>(i)] = char_reduce(F, mu[static_cast<size_t>(i)]);
  return pi;
}

PiData unramified_pi(const FieldModel& F, cplx z1, cplx z2) {
  return make_pi(F, {unramified_char(z1), unramified_char(z2), unramified_char(1.0 / (z1 * z2))});
}

PiData contragredient(const PiData& pi) {
  PiData out;
  for (size_t i = 0; i < 3; ++i) out.mu[i] = char_inv(pi.mu[i]);
  return out;
}

bool is_tempered(const PiData& pi, double tol) {
  for (const auto& m : pi.mu)
    if (std::abs(std::abs(m.at_pi) - 1.0) > tol) return false;
  return true;
}

RationalLaurent gamma_gl1(const FieldModel& F, const MultChar& mu) {
  MultChar m = char_reduce(F, mu);
  double q = F.qd();
  if (m.conductor == 0) {
    cplx z = m.at_pi;
    // L(1-s, mu^{-1}) / L(s, mu) = (1 - z/X) / (1 - X/(zq))
    LaurentPoly num = LaurentPoly::constant(1.0);
    num.add_term(-1, -z);
    return RationalLaurent(num, {Pole{1.0 / (z * q), 1}});
  }
  int c = m.conductor;
  cplx e = eps_half(F, m) * std::pow(q, 0.5 * c);
  return RationalLaurent(LaurentPoly::monomial(-c, e), {});
}

RationalLaurent gamma_factor(const FieldModel& F, const PiData& pi, const MultChar& chi) {
  RationalLaurent g = RationalLaurent::constant(1.0);
  for (const auto& m : pi.mu) g = g * gamma_gl1(F, char_mul(F, m, chi));
  return g;
}

LaurentPoly inverse_l_factor(const FieldModel& F, const PiData& pi, const MultChar& chi) {
  LaurentPoly p = LaurentPoly::constant(1.0);
  for (const auto& m : pi.mu) {
    MultChar t = char_reduce(F, char_mul(F, m, chi));
    if (t.conductor != 0) continue;
    LaurentPoly f = LaurentPoly::constant(1.0);
    f.add_term(-1, -t.at_pi);
    p = p * f;
  }
  return p;
}

int stability_barrier(const FieldModel& F, const PiData& pi) {
  int a = 2;
  for (const auto& m : pi.mu) a = std::max(a, 2 * char_reduce(F, m).conductor);
  return a;
}

ExponentData exponents_and_rho(const FieldModel& F, const PiData& pi, const MultChar& xi) {
  ExponentData d;
  for (const auto& m : pi.mu) {
    int c = char_reduce(F, char_mul(F, m, xi)).conductor;
    d.conductor += c;
    d.d += c == 0;
  }
  d.rho = d.conductor + d.d;
  d.exponent = d.d > 0;
  return d;
}

int pi_conductor(const FieldModel& F, const PiData& pi) {
  int c = 0;
  for (const auto& m : pi.mu) c += char_reduce(F, m).conductor;
  return c;
}

}  // namespace lwl
