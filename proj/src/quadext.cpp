#include "lwl/quadext.hpp"

#include <algorithm>
#include <cmath>

namespace lwl {

std::string kind_name(ExtKind k) {
  switch (k) {
    case ExtKind::split:
      return "split";
    case ExtKind::unramified:
      return "unramified";
    case ExtKind::ramified:
      return "ramified";
  }
  return "split";
}

ExtKind kind_from_name(const std::string& s) {
  if (s == "split") return ExtKind::split;
  if (s == "unramified") return ExtKind::unramified;
  if (s == "ramified") return ExtKind::ramified;
  throw Error("invalid-config", "unknown extension kind " + s);
}

namespace {

// v_p of a residue modulo p^K (K for zero).
int vres(const FieldModel& F, i64 x) {
  x = posmod(x, F.modulus());
  if (x == 0) return F.k();
  return F.valuation(x);
}

}  // namespace

// ---------------------------------------------------------------- the model

QuadExtModel::QuadExtModel(const FieldModel& F, ExtKind kind) : F_(&F), kind_(kind), mod_(F.modulus()) {
  if (kind == ExtKind::unramified) d_ = F.epsilon();
  if (kind == ExtKind::ramified) d_ = F.p();
  if (kind == ExtKind::unramified) {
    const i64 p = F.p();
    residue_order_ = p * p - 1;
    res_log_.assign(static_cast<size_t>(p * p), -1);
    auto mulr = [&](i64 a1, i64 b1, i64 a2, i64 b2) {
      return std::pair<i64, i64>{posmod(a1 * a2 + d_ * b1 * b2, p), posmod(a1 * b2 + a2 * b1, p)};
    };
    for (i64 a = 0; a < p; ++a)
      for (i64 b = 0; b < p; ++b) {
        if (a == 0 && b == 0) continue;
        std::vector<i64> logs(static_cast<size_t>(p * p), -1);
        i64 x = 1, y = 0;
        i64 j = 0;
        do {
          logs[static_cast<size_t>(x * p + y)] = j;
          auto [nx, ny] = mulr(x, y, a, b);
          x = nx;
          y = ny;
          ++j;
        } while (!(x == 1 && y == 0));
        if (j == residue_order_) {
          res_log_ = logs;
          return;
        }
      }
  }
}

MultChar QuadExtModel::eta() const {
  switch (kind_) {
    case ExtKind::split:
      return trivial_char();
    case ExtKind::unramified:
      return unramified_char(-1.0);
    case ExtKind::ramified:
      return legendre_char(*F_, static_cast<double>(F_->legendre(-1)));
  }
  return trivial_char();
}

int QuadExtModel::eps_L() const {
  switch (kind_) {
    case ExtKind::split:
      return 1;
    case ExtKind::unramified:
      return -1;
    case ExtKind::ramified:
      return F_->legendre(-1);
  }
  return 1;
}

std::array<std::pair<int, i64>, 2> QuadExtModel::tau_reps() const {
  if (kind_ == ExtKind::ramified) return {{{0, 1}, {1, -1}}};
  return {{{0, 1}, {0, F_->epsilon()}}};
}

LPoint QuadExtModel::x_tau(int idx, int choice) const {
  const i64 K = F_->k();
  if (kind_ == ExtKind::split) {
    if (idx == 0) return {1, 1};
    i64 eps = F_->epsilon();
    return choice == 0 ? LPoint{eps, 1} : LPoint{1, eps};
  }
  if (kind_ == ExtKind::unramified) {
    if (idx == 0) {
      if (choice == 0) return from_f(1);
      LPoint x{1, 1};
      return mul(x, inv_unit(conj(x)));
    }
    // a^2 - eps b^2 = eps
    int found = 0;
    for (i64 b = 1;; ++b) {
      i64 w = posmod(mulmod(d_, 1 + b * b, mod_), mod_);
      if (w % F_->p() == 0 || F_->legendre(w) != 1) continue;
      if (found++ < choice) continue;
      return {F_->sqrt_unit(w, static_cast<int>(K)), b};
    }
  }
  LPoint alpha = mul(LPoint{1, 1}, inv_unit(LPoint{1, mod_ - 1}));
  if (idx == 0) return choice == 0 ? from_f(1) : alpha;
  return choice == 0 ? theta() : mul(theta(), alpha);
}

LPoint QuadExtModel::from_f(i64 a) const { return {posmod(a, mod_), kind_ == ExtKind::split ? posmod(a, mod_) : 0}; }

LPoint QuadExtModel::theta() const {
  if (kind_ == ExtKind::split) throw Error("parameter-out-of-range", "split algebra has no theta");
  return {0, 1};
}

LPoint QuadExtModel::add(const LPoint& x, const LPoint& y) const {
  return {posmod(x.a + y.a, mod_), posmod(x.b + y.b, mod_)};
}

LPoint QuadExtModel::sub(const LPoint& x, const LPoint& y) const {
  return {posmod(x.a - y.a, mod_), posmod(x.b - y.b, mod_)};
}

LPoint QuadExtModel::neg(const LPoint& x) const { return {posmod(-x.a, mod_), posmod(-x.b, mod_)}; }

LPoint QuadExtModel::mul(const LPoint& x, const LPoint& y) const {
  if (kind_ == ExtKind::split) return {mulmod(x.a, y.a, mod_), mulmod(x.b, y.b, mod_)};
  i64 a = posmod(mulmod(x.a, y.a, mod_) + mulmod(d_, mulmod(x.b, y.b, mod_), mod_), mod_);
  i64 b = posmod(mulmod(x.a, y.b, mod_) + mulmod(x.b, y.a, mod_), mod_);
  return {a, b};
}

LPoint QuadExtModel::scale(const LPoint& x, i64 c) const {
  c = posmod(c, mod_);
  return {mulmod(x.a, c, mod_), mulmod(x.b, c, mod_)};
}

LPoint QuadExtModel::pow(LPoint x, i64 e) const {
  LPoint r = from_f(1);
  while (e > 0) {
    if (e & 1) r = mul(r, x);
    x = mul(x, x);
    e >>= 1;
  }
  return r;
}

LPoint QuadExtModel::conj(const LPoint& x) const {
  if (kind_ == ExtKind::split) return {x.b, x.a};
  return {x.a, posmod(-x.b, mod_)};
}

i64 QuadExtModel::nr(const LPoint& x) const {
  if (kind_ == ExtKind::split) return mulmod(x.a, x.b, mod_);
  return posmod(mulmod(x.a, x.a, mod_) - mulmod(d_, mulmod(x.b, x.b, mod_), mod_), mod_);
}

i64 QuadExtModel::tr(const LPoint& x) const {
  if (kind_ == ExtKind::split) return posmod(x.a + x.b, mod_);
  return posmod(2 * x.a, mod_);
}

bool QuadExtModel::is_unit(const LPoint& x) const {
  const i64 p = F_->p();
  switch (kind_) {
    case ExtKind::split:
      return x.a % p != 0 && x.b % p != 0;
    case ExtKind::unramified:
      return x.a % p != 0 || x.b % p != 0;
    case ExtKind::ramified:
      return x.a % p != 0;
  }
  return false;
}

LPoint QuadExtModel::inv_unit(const LPoint& x) const {
  if (!is_unit(x)) throw Error("zero-argument", "inverse of a non-unit of O_L");
  if (kind_ == ExtKind::split) return {invmod(x.a, mod_), invmod(x.b, mod_)};
  return scale(conj(x), invmod(nr(x), mod_));
}

int QuadExtModel::valuation(const LPoint& x) const {
  int va = vres(*F_, x.a), vb = vres(*F_, x.b);
  if (kind_ == ExtKind::ramified) return std::min(2 * va, 2 * vb + 1);
  return std::min(va, vb);
}

bool QuadExtModel::in_P(const LPoint& x, int n) const {
  if (n <= 0) return true;
  int va = vres(*F_, x.a), vb = vres(*F_, x.b);
  if (kind_ == ExtKind::ramified) return va >= (n + 1) / 2 && vb >= n / 2;
  return va >= n && vb >= n;
}

double QuadExtModel::vol_OL() const { return kind_ == ExtKind::ramified ? 1.0 / std::sqrt(F_->qd()) : 1.0; }

double QuadExtModel::vol_OL_units() const {
  const double q = F_->qd();
  switch (kind_) {
    case ExtKind::split:
      return (1.0 - 1.0 / q) * (1.0 - 1.0 / q);
    case ExtKind::unramified:
      return 1.0 - 1.0 / (q * q);
    case ExtKind::ramified:
      return vol_OL() * (1.0 - 1.0 / q);
  }
  return 0.0;
}

double QuadExtModel::vol_torus() const {
  return std::pow(2.0, e() - 1) * vol_OL_units() / (1.0 - 1.0 / F_->qd());
}

double QuadExtModel::torus_w(int n) const {
  return std::pow(F_->qd(), -static_cast<double>(n / e()) - 0.5 * (e() - 1));
}

i64 QuadExtModel::residue_dlog(i64 a, i64 b) const {
  const i64 p = F_->p();
  i64 j = res_log_.at(static_cast<size_t>(posmod(a, p) * p + posmod(b, p)));
  if (j < 0) throw Error("zero-argument", "discrete log of zero residue");
  return j;
}

// ------------------------------------------------------------------- torus

TorusCosets enumerate_torus(const QuadExtModel& L, int n) {
  const FieldModel& F = L.field();
  if (n < 1) throw Error("parameter-out-of-range", "torus precision must be >= 1");
  if (n > F.k() / 2) throw Error("precision-exhausted", "torus precision beyond field precision");
  TorusCosets T;
  T.n = n;
  T.w = L.torus_w(n);
  const i64 mod = L.modulus();
  switch (L.kind()) {
    case ExtKind::split: {
      i64 pn = F.pk(n);
      for (i64 t = 1; t < pn; ++t)
        if (t % F.p() != 0) T.reps.push_back({t, invmod(t, mod)});
      break;
    }
    case ExtKind::unramified: {
      // alpha = x / conj(x) over x in P^1(O_F / p^n)
      i64 pn = F.pk(n);
      auto push = [&](LPoint x) { T.reps.push_back(L.mul(x, L.inv_unit(L.conj(x)))); };
      for (i64 a = 0; a < pn; ++a) push({a, 1});
      for (i64 b = 0; b < pn; b += F.p()) push({1, b});
      break;
    }
    case ExtKind::ramified: {
      i64 m = F.pk(n / 2);
      for (int s : {1, -1})
        for (i64 b = 0; b < m; ++b) {
          LPoint x{1, b};
          LPoint al = L.mul(x, L.inv_unit(L.conj(x)));
          T.reps.push_back(s == 1 ? al : L.neg(al));
        }
      break;
    }
  }
  return T;
}

i64 torus_count_brute(const QuadExtModel& L, int n) {
  const FieldModel& F = L.field();
  i64 count = 0;
  if (L.kind() == ExtKind::ramified) {
    i64 ma = F.pk((n + 1) / 2), mb = F.pk(n / 2);
    for (i64 a = 0; a < ma; ++a)
      for (i64 b = 0; b < mb; ++b)
        if (posmod(a * a - F.p() * b % ma * b, ma) == 1 % ma) ++count;
    return count;
  }
  i64 m = F.pk(n);
  for (i64 a = 0; a < m; ++a)
    for (i64 b = 0; b < m; ++b) {
      i64 N = L.kind() == ExtKind::split ? mulmod(a, b, m) : posmod(mulmod(a, a, m) - mulmod(L.d(), mulmod(b, b, m), m), m);
      if (N == 1 % m) ++count;
    }
  return count;
}

i64 residue_units_brute(const QuadExtModel& L) {
  const i64 p = L.field().p();
  i64 c = 0;
  if (L.kind() == ExtKind::ramified) {
    for (i64 a = 0; a < p; ++a) c += a != 0;
    return c;
  }
  for (i64 a = 0; a < p; ++a)
    for (i64 b = 0; b < p; ++b) {
      i64 N = L.kind() == ExtKind::split ? a * b % p : posmod(a * a - L.d() * b * b, p);
      c += N != 0;
    }
  return c;
}

// ------------------------------------------------------------------- beta

namespace {

// log(1 + y) for y in P_L, correct modulo p^{prec}.
LPoint log_one_plus(const QuadExtModel& L, const LPoint& y, int prec) {
  const FieldModel& F = L.field();
  const i64 mod = L.modulus();
  LPoint sum{0, 0};
  LPoint pw = y;
  const int kmax = L.e() * (prec + 2) + 6;
  for (int k = 1; k <= kmax; ++k) {
    if (k > 1) pw = L.mul(pw, y);
    i64 kk = k;
    int v = 0;
    while (kk % F.p() == 0) {
      kk /= F.p();
      ++v;
    }
    i64 pv = F.pk(v);
    LPoint t{pw.a / pv, pw.b / pv};
    t = L.scale(t, invmod(kk, mod));
    if (k % 2 == 0) t = L.neg(t);
    sum = L.add(sum, t);
  }
  return sum;
}

// Teichmuller representative of a unit, correct modulo p^{prec}.
LPoint teichmuller(const QuadExtModel& L, const LPoint& u, int prec) {
  const i64 Q = L.kind() == ExtKind::unramified ? L.field().p() * L.field().p() : L.field().p();
  LPoint x = u;
  for (int i = 0; i < prec; ++i) x = L.pow(x, Q);
  return x;
}

cplx beta_on_unit(const QuadExtModel& L, const BetaChar& b, const LPoint& u) {
  const FieldModel& F = L.field();
  const int prec = std::min(F.k(), b.n0 + 6);
  LPoint w = teichmuller(L, u, prec);
  LPoint one_plus = L.mul(u, L.inv_unit(w));
  LPoint y = L.sub(one_plus, L.from_f(1));
  cplx res;
  if (L.kind() == ExtKind::unramified) {
    i64 j = L.residue_dlog(u.a, u.b);
    res = root_of_unity(static_cast<i64>((i128)b.res_expo * j % L.residue_order()), L.residue_order());
  } else {
    res = static_cast<double>(F.legendre(u.a));
  }
  if (b.c1 == 0) return res;
  LPoint lg = log_one_plus(L, y, prec);
  if (L.kind() == ExtKind::unramified) return res * psi_frac(F, mulmod(2 * b.c1 % L.modulus(), mulmod(L.d(), lg.b, L.modulus()), L.modulus()), b.n0);
  return res * psi_frac(F, mulmod(2 * b.c1 % L.modulus(), lg.b, L.modulus()), b.n0 / 2);
}

BetaChar finish(const QuadExtModel& L, BetaChar b) {
  auto [c, c1] = beta_conductors(L, b);
  b.conductor = c;
  b.conductor1 = c1;
  return b;
}

}  // namespace

cplx beta_eval(const QuadExtModel& L, const BetaChar& b, const LPoint& x) {
  const FieldModel& F = L.field();
  if (L.kind() == ExtKind::split) {
    PAdic t1 = PAdic::from_int(F, x.a), t2 = PAdic::from_int(F, x.b);
    return char_eval(F, b.chi0, t1) / char_eval(F, b.chi0, t2);
  }
  int v = L.valuation(x);
  if (v >= F.k()) throw Error("zero-argument", "beta of zero");
  LPoint u = x;
  if (L.kind() == ExtKind::unramified) {
    i64 pv = F.pk(v);
    u = {x.a / pv, x.b / pv};
  } else if (v > 0) {
    LPoint y = L.mul(x, L.pow(L.theta(), v));
    i64 pv = F.pk(v);
    u = {y.a / pv, y.b / pv};
  }
  return std::pow(b.at_piL, v) * beta_on_unit(L, b, u);
}

BetaChar make_beta_split(const QuadExtModel& L, const MultChar& chi0) {
  if (L.kind() != ExtKind::split) throw Error("parameter-out-of-range", "split beta on a field");
  BetaChar b;
  b.kind = ExtKind::split;
  b.chi0 = char_reduce(L.field(), chi0);
  b.n0 = b.chi0.conductor;
  return finish(L, b);
}

BetaChar make_beta_unramified(const QuadExtModel& L, int n0, i64 c1, i64 res_k) {
  const FieldModel& F = L.field();
  if (L.kind() != ExtKind::unramified) throw Error("parameter-out-of-range", "unramified beta on another kind");
  if (n0 < 1) throw Error("parameter-out-of-range", "beta needs n0 >= 1");
  BetaChar b;
  b.kind = ExtKind::unramified;
  b.n0 = n0;
  b.res_expo = posmod((F.p() - 1) * res_k, L.residue_order());
  b.c1 = n0 >= 2 ? posmod(c1, F.modulus()) : 0;
  if (n0 >= 2 && b.c1 % F.p() == 0) throw Error("parameter-out-of-range", "additive unit must be a unit");
  b.at_piL = -1.0;
  return finish(L, b);
}

BetaChar make_beta_ramified(const QuadExtModel& L, int n0, i64 c1, int sign) {
  const FieldModel& F = L.field();
  if (L.kind() != ExtKind::ramified) throw Error("parameter-out-of-range", "ramified beta on another kind");
  if (n0 < 2 || n0 % 2 != 0) throw Error("parameter-out-of-range", "ramified beta needs even n0 >= 2");
  BetaChar b;
  b.kind = ExtKind::ramified;
  b.n0 = n0;
  b.c1 = posmod(c1, F.modulus());
  if (b.c1 % F.p() == 0) throw Error("parameter-out-of-range", "additive unit must be a unit");
  cplx r = F.legendre(-1) == 1 ? cplx(1.0, 0.0) : cplx(0.0, 1.0);
  b.at_piL = sign >= 0 ? r : -r;
  return finish(L, b);
}

BetaChar default_beta(const QuadExtModel& L, int n0) {
  const FieldModel& F = L.field();
  switch (L.kind()) {
    case ExtKind::split:
      return make_beta_split(L, make_char(F, n0, 1));
    case ExtKind::unramified:
      return n0 >= 2 ? make_beta_unramified(L, n0, 1, 0) : make_beta_unramified(L, 1, 0, 1);
    case ExtKind::ramified:
      return make_beta_ramified(L, n0, 1, 1);
  }
  throw Error("parameter-out-of-range", "unknown kind");
}

int l_char_conductor(const QuadExtModel& L, const std::function<cplx(const LPoint&)>& xi, int top) {
  const FieldModel& F = L.field();
  const double tol = 1e-9;
  // generators of (1 + P_L^m) / (1 + P_L^{m+1})
  auto layer = [&](int m) {
    std::vector<LPoint> g;
    if (L.kind() == ExtKind::split) {
      i64 pm = F.pk(m);
      g.push_back({1 + pm, 1});
      g.push_back({1, 1 + pm});
    } else if (L.kind() == ExtKind::unramified) {
      i64 pm = F.pk(m);
      g.push_back({1 + pm, 0});
      g.push_back({1, pm});
    } else {
      g.push_back(m % 2 == 0 ? LPoint{1 + F.pk(m / 2), 0} : LPoint{1, F.pk(m / 2)});
    }
    return g;
  };
  auto trivial_from = [&](int n) {
    for (int m = std::max(n, 1); m <= top; ++m)
      for (const auto& x : layer(m))
        if (std::abs(xi(x) - 1.0) > tol) return false;
    if (n == 0) {
      std::vector<LPoint> gens;
      i64 g = F.generator();
      if (L.kind() == ExtKind::split) {
        gens = {{g, 1}, {1, g}};
      } else if (L.kind() == ExtKind::unramified) {
        for (i64 a = 0; a < F.p() && gens.empty(); ++a)
          for (i64 c = 0; c < F.p(); ++c)
            if ((a || c) && L.residue_dlog(a, c) == 1) {
              gens.push_back({a, c});
              break;
            }
      } else {
        gens = {{g, 0}};
      }
      for (const auto& x : gens)
        if (std::abs(xi(x) - 1.0) > tol) return false;
    }
    return true;
  };
  int c = 0;
  while (c <= top && !trivial_from(c)) ++c;
  return c;
}

std::pair<int, int> beta_conductors(const QuadExtModel& L, const BetaChar& b) {
  const double tol = 1e-9;
  const int top = std::max(b.n0, b.kind == ExtKind::split ? b.chi0.level : 0) + 1;
  const int c = l_char_conductor(L, [&](const LPoint& x) { return beta_eval(L, b, x); }, top);

  // c_1 by direct minimization over the torus cosets at level c + 1
  TorusCosets T = enumerate_torus(L, std::max(c, 1) + 1);
  int c1 = 0;
  for (int m = 0; m <= c; ++m) {
    bool triv = true;
    for (const auto& a : T.reps) {
      if (!L.congruent(a, L.from_f(1), m)) continue;
      if (std::abs(beta_eval(L, b, a) - 1.0) > tol) {
        triv = false;
        break;
      }
    }
    if (triv) {
      c1 = m;
      break;
    }
    c1 = m + 1;
  }
  return {c, c1};
}

// -------------------------------------------------------- additive parameter

i64 additive_parameter_modulus(const QuadExtModel& L, const BetaChar& b) {
  const int e = L.e();
  return L.field().pk((b.n0 + 2 * e - 1) / (2 * e));
}

i64 additive_parameter(const QuadExtModel& L, const BetaChar& b) {
  const FieldModel& F = L.field();
  const int n0 = b.n0;
  if (n0 < 2) throw Error("parameter-out-of-range", "additive parameter needs n0 >= 2");
  const i64 cm = additive_parameter_modulus(L, b);
  const i64 mod = L.modulus();
  const i64 inv2 = invmod(2, mod);
  // residues u of P_L^{floor(n0/2)} modulo P_L^{n0}
  std::vector<LPoint> us;
  const int h = n0 / 2;
  if (L.kind() == ExtKind::ramified) {
    i64 m = F.pk(n0 / 2);
    for (i64 a = 0; a < m; ++a)
      for (i64 c = 0; c < m; ++c)
        if (L.in_P({a, c}, h)) us.push_back({a, c});
  } else {
    i64 step = F.pk(h), m = F.pk(n0);
    for (i64 a = 0; a < m; a += step)
      for (i64 c = 0; c < m; c += step) us.push_back({a, c});
  }
  std::vector<cplx> lhs;
  for (const auto& u : us) lhs.push_back(beta_eval(L, b, L.add(L.from_f(1), u)));
  auto rhs = [&](i64 c, const LPoint& u) -> cplx {
    switch (L.kind()) {
      case ExtKind::split: {
        i64 x = posmod(u.a - u.b, mod);
        if (n0 % 2 == 1) {
          i64 sq = posmod(mulmod(u.a, u.a, mod) - mulmod(u.b, u.b, mod), mod);
          x = posmod(x - mulmod(inv2, sq, mod), mod);
        }
        return psi_frac(F, mulmod(c, x, mod), n0);
      }
      case ExtKind::unramified: {
        // sqrt(eps)(u - conj u) = 2 eps b, and sqrt(eps)(u^2 - conj u^2)/2 = 2 eps a b
        i64 x = mulmod(2 * L.d() % mod, u.b, mod);
        if (n0 % 2 == 1) x = posmod(x - mulmod(mulmod(2 * L.d() % mod, u.a, mod), u.b, mod), mod);
        return psi_frac(F, mulmod(c, x, mod), n0);
      }
      case ExtKind::ramified:
        return psi_frac(F, mulmod(c, 2 * u.b % mod, mod), n0 / 2);
    }
    return 0.0;
  };
  for (i64 c = 1; c < cm + (cm == 1 ? 1 : 0); ++c) {
    if (c % F.p() == 0) continue;
    bool ok = true;
    for (size_t i = 0; i < us.size() && ok; ++i)
      if (std::abs(lhs[i] - rhs(c, us[i])) > 1e-9) ok = false;
    if (ok) return c;
  }
  throw Error("no-solution", "no additive parameter matches beta");
}

i64 char_additive_parameter(const FieldModel& F, const MultChar& chi) {
  MultChar c = char_reduce(F, chi);
  const int n = c.conductor;
  if (n < 2) throw Error("parameter-out-of-range", "additive parameter needs conductor >= 2");
  const i64 cm = F.pk((n + 1) / 2);
  const i64 mod = F.pk(n);
  const i64 step = F.pk(n / 2);
  const i64 inv2 = invmod(2, mod);
  for (i64 cc = 1; cc < cm; ++cc) {
    if (cc % F.p() == 0) continue;
    bool ok = true;
    for (i64 x = step; x < mod && ok; x += step) {
      i64 arg = posmod(x - mulmod(inv2, mulmod(x, x, mod), mod), mod);
      if (std::abs(char_unit(F, c, 1 + x) - psi_frac(F, mulmod(cc, arg, mod), n)) > 1e-9) ok = false;
    }
    if (ok) return cc;
  }
  throw Error("no-solution", "no additive parameter matches chi");
}

// ---------------------------------------------------------- Jacobi integrals

cplx jac_integral(const QuadExtModel& L, const BetaChar& b, const MultChar& chi, int n, int k, JacMode mode) {
  const FieldModel& F = L.field();
  const int n0 = b.n0;
  const i64 mod = L.modulus();
  MultChar x = char_reduce(F, chi);
  if (k != 0 && k != 1) throw Error("parameter-out-of-range", "k must be 0 or 1");
  auto chi0_ratio = [&](i64 s) {
    // chi0((1 + s) / (1 - s))
    i64 r = mulmod(posmod(1 + s, mod), invmod(posmod(1 - s, mod), mod), mod);
    return char_unit(F, b.chi0, r);
  };
  if (mode == JacMode::inner) {
    const bool ram = L.kind() == ExtKind::ramified;
    if (n < 0 || (!ram && n >= n0) || (ram && 2 * n > n0))
      throw Error("parameter-out-of-range", "inner Jacobi integral outside its range");
    const int M = std::max({n, x.conductor, 1});
    const i64 pm = F.pk(M);
    const i64 shift = F.pk(ram ? n0 / 2 - n : n0 - n);
    cplx s = 0.0;
    for (i64 t = 1; t < pm; ++t) {
      if (t % F.p() == 0) continue;
      i64 st = mulmod(shift, t, mod);
      cplx v = L.kind() == ExtKind::split ? chi0_ratio(st) : beta_eval(L, b, LPoint{1, st});
      s += v * char_unit(F, x, t);
    }
    return s / static_cast<double>(pm);
  }
  if (L.kind() == ExtKind::ramified || n != n0 || n0 < 2)
    throw Error("parameter-out-of-range", "boundary Jacobi integral needs n = n0 >= 2, e = 1");
  const int M = std::max(n0, x.conductor);
  const i64 pm = F.pk(M);
  cplx s = 0.0;
  for (i64 t = 1; t < pm; ++t) {
    if (t % F.p() == 0) continue;
    if (L.kind() == ExtKind::split) {
      i64 r = t % F.p();
      if (r == 1 || r == F.p() - 1) continue;
      cplx v = chi0_ratio(t) * char_unit(F, x, t);
      if (k == 1) v *= static_cast<double>(F.legendre(posmod(1 - t * t, F.p())));
      s += v;
    } else {
      cplx v = beta_eval(L, b, LPoint{1, t}) * char_unit(F, x, t);
      if (k == 1) v *= static_cast<double>(F.legendre(posmod(1 - L.d() * t % F.p() * t, F.p())));
      s += v;
    }
  }
  return s / static_cast<double>(pm);
}

bool in_exceptional_set(const QuadExtModel& L, const BetaChar& b, const MultChar& chi) {
  const FieldModel& F = L.field();
  if (L.kind() == ExtKind::ramified) return false;
  if (b.n0 < 2 || b.n0 % 2 == 0 || F.legendre(-1) != L.eps_L()) return false;
  MultChar x = char_reduce(F, chi);
  if (x.conductor != b.n0) return false;
  const i64 p = F.p();
  i64 cb = L.kind() == ExtKind::split ? char_additive_parameter(F, b.chi0) : additive_parameter(L, b);
  i64 cx = char_additive_parameter(F, x);
  i64 r = mulmod(cx % p, invmod(cb % p, p), p);
  i64 target = L.kind() == ExtKind::split ? p - 1 : posmod(-F.epsilon(), p);
  return mulmod(r, r, p) == target;
}

std::vector<MultChar> exceptional_set(const QuadExtModel& L, const BetaChar& b) {
  std::vector<MultChar> out;
  const FieldModel& F = L.field();
  if (L.kind() == ExtKind::ramified || b.n0 < 2 || b.n0 % 2 == 0 || F.legendre(-1) != L.eps_L()) return out;
  for (const auto& c : enumerate_chars(F, b.n0))
    if (char_reduce(F, c).conductor == b.n0 && in_exceptional_set(L, b, c)) out.push_back(c);
  return out;
}

cplx weil_index(const QuadExtModel& L) {
  if (L.kind() != ExtKind::ramified) return 1.0;
  return eps_half(L.field(), L.eta());
}

}  // namespace lwl
