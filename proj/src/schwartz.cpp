#include "lwl/schwartz.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <mutex>

#include <json.hpp>

namespace lwl {

namespace {
std::mutex& fftw_plan_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

std::vector<cplx> dft(const std::vector<cplx>& in, int sign) {
  const int n = static_cast<int>(in.size());
  if (n == 0) return {};
  if (n == 1) return in;
  fftw_complex* buf = fftw_alloc_complex(static_cast<size_t>(n));
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(fftw_plan_mutex());
    plan = fftw_plan_dft_1d(n, buf, buf, sign > 0 ? FFTW_BACKWARD : FFTW_FORWARD, FFTW_ESTIMATE);
  }
  std::memcpy(buf, in.data(), sizeof(fftw_complex) * static_cast<size_t>(n));
  fftw_execute(plan);
  std::vector<cplx> out(static_cast<size_t>(n));
  std::memcpy(out.data(), buf, sizeof(fftw_complex) * static_cast<size_t>(n));
  {
    std::lock_guard<std::mutex> lock(fftw_plan_mutex());
    fftw_destroy_plan(plan);
  }
  fftw_free(buf);
  return out;
}

// ------------------------------------------------------------ ShellFunction

ShellFunction::ShellFunction(const FieldModel& F, int vmin, int vmax, int level, bool window_exact)
    : F_(&F), vmin_(vmin), vmax_(vmax), level_(level), exact_(window_exact) {
  if (level < 0 || level > F.table_limit()) throw Error("precision-exhausted", "shell function level");
  if (vmax < vmin) vmax_ = vmin - 1;
  tab_.assign(static_cast<size_t>(std::max(0, vmax_ - vmin_ + 1)),
              std::vector<cplx>(static_cast<size_t>(F.phi(level)), cplx(0.0, 0.0)));
}

ShellFunction ShellFunction::from_fn(const FieldModel& F, int vmin, int vmax, int level,
                                     const std::function<cplx(int, i64)>& fn, bool window_exact) {
  ShellFunction f(F, vmin, vmax, level, window_exact);
  for (int v = vmin; v <= vmax; ++v) {
    auto& row = f.shell(v);
    if (level == 0) {
      row[0] = fn(v, 1);
      continue;
    }
    const UnitGroup& G = F.units(level);
    for (i64 j = 0; j < G.order(); ++j) row[static_cast<size_t>(j)] = fn(v, G.exp(j));
  }
  return f;
}

const std::vector<cplx>& ShellFunction::shell(int v) const {
  if (!in_window(v)) throw Error("truncation-unsound", "shell outside the window");
  return tab_[static_cast<size_t>(v - vmin_)];
}

std::vector<cplx>& ShellFunction::shell(int v) {
  if (!in_window(v)) throw Error("truncation-unsound", "shell outside the window");
  return tab_[static_cast<size_t>(v - vmin_)];
}

cplx ShellFunction::at_index(int v, i64 j) const { return shell(v)[static_cast<size_t>(posmod(j, shell_size()))]; }

cplx& ShellFunction::at_index(int v, i64 j) { return shell(v)[static_cast<size_t>(posmod(j, shell_size()))]; }

cplx ShellFunction::value(int v, i64 u) const {
  if (!in_window(v)) {
    if (exact_) return {0.0, 0.0};
    throw Error("truncation-unsound", "value requested outside a truncated window");
  }
  if (level_ == 0) return shell(v)[0];
  return shell(v)[static_cast<size_t>(F_->units(level_).dlog(u))];
}

cplx ShellFunction::value(const PAdic& x) const {
  if (x.zero) throw Error("zero-argument", "shell functions live on F^x");
  if (level_ > x.prec) throw Error("precision-exhausted", "unit part known below the function level");
  return value(x.v, x.u);
}

ShellFunction ShellFunction::refined(int level) const {
  if (level <= level_) return *this;
  ShellFunction g(*F_, vmin_, vmax_, level, exact_);
  g.tail_ = tail_;
  i64 phi = F_->phi(level_);
  for (int v = vmin_; v <= vmax_; ++v) {
    const auto& src = shell(v);
    auto& dst = g.shell(v);
    for (size_t j = 0; j < dst.size(); ++j) dst[j] = src[j % static_cast<size_t>(phi)];
  }
  return g;
}

ShellFunction ShellFunction::widened(int vmin, int vmax) const {
  vmin = std::min(vmin, vmin_);
  vmax = std::max(vmax, vmax_);
  ShellFunction g(*F_, vmin, vmax, level_, exact_);
  g.tail_ = tail_;
  for (int v = vmin_; v <= vmax_; ++v) g.shell(v) = shell(v);
  return g;
}

double ShellFunction::max_abs() const {
  double m = 0.0;
  for (const auto& row : tab_)
    for (const auto& x : row) m = std::max(m, std::abs(x));
  return m;
}

namespace {

std::pair<ShellFunction, ShellFunction> common_frame(const ShellFunction& a, const ShellFunction& b) {
  int level = std::max(a.level(), b.level());
  int lo = std::min(a.vmin(), b.vmin()), hi = std::max(a.vmax(), b.vmax());
  return {a.refined(level).widened(lo, hi), b.refined(level).widened(lo, hi)};
}

ShellFunction combine(const ShellFunction& a, const ShellFunction& b, cplx cb) {
  auto [x, y] = common_frame(a, b);
  for (int v = x.vmin(); v <= x.vmax(); ++v) {
    auto& r = x.shell(v);
    const auto& s = y.shell(v);
    for (size_t j = 0; j < r.size(); ++j) r[j] += cb * s[j];
  }
  if (!a.window_exact() || !b.window_exact()) x.set_truncated(a.tail_bound() + std::abs(cb) * b.tail_bound());
  return x;
}

}  // namespace

ShellFunction operator+(const ShellFunction& a, const ShellFunction& b) { return combine(a, b, 1.0); }
ShellFunction operator-(const ShellFunction& a, const ShellFunction& b) { return combine(a, b, -1.0); }

ShellFunction operator*(cplx c, const ShellFunction& a) {
  ShellFunction g = a;
  for (int v = g.vmin(); v <= g.vmax(); ++v)
    for (auto& x : g.shell(v)) x *= c;
  if (!a.window_exact()) g.set_truncated(std::abs(c) * a.tail_bound());
  return g;
}

double max_difference(const ShellFunction& a, const ShellFunction& b) {
  auto [x, y] = common_frame(a, b);
  double m = 0.0;
  for (int v = x.vmin(); v <= x.vmax(); ++v) {
    const auto& r = x.shell(v);
    const auto& s = y.shell(v);
    for (size_t j = 0; j < r.size(); ++j) m = std::max(m, std::abs(r[j] - s[j]));
  }
  return m;
}

// ---------------------------------------------------------------- operators

ShellFunction op_m(const ShellFunction& f, const MultChar& mu, double s) {
  const FieldModel& F = f.field();
  MultChar m = char_reduce(F, mu);
  ShellFunction g = f.refined(std::max(f.level(), m.level));
  const int L = g.level();
  for (int v = g.vmin(); v <= g.vmax(); ++v) {
    cplx scale = std::pow(m.at_pi, v) * std::pow(F.qd(), -s * v);
    auto& row = g.shell(v);
    for (size_t j = 0; j < row.size(); ++j) row[j] *= scale * char_index(F, m, L, static_cast<i64>(j));
  }
  return g;
}

ShellFunction op_t(const ShellFunction& f, int d, i64 u) {
  const FieldModel& F = f.field();
  ShellFunction g(F, f.vmin() - d, f.vmax() - d, f.level(), f.window_exact());
  if (!f.window_exact()) g.set_truncated(f.tail_bound());
  i64 ju = f.level() == 0 ? 0 : F.units(f.level()).dlog(u);
  for (int v = g.vmin(); v <= g.vmax(); ++v) {
    auto& row = g.shell(v);
    const auto& src = f.shell(v + d);
    for (size_t j = 0; j < row.size(); ++j) row[j] = src[static_cast<size_t>(posmod(static_cast<i64>(j) + ju, f.shell_size()))];
  }
  return g;
}

ShellFunction op_inv(const ShellFunction& f) {
  const FieldModel& F = f.field();
  ShellFunction g(F, -f.vmax(), -f.vmin(), f.level(), f.window_exact());
  if (!f.window_exact()) g.set_truncated(f.tail_bound());
  for (int v = g.vmin(); v <= g.vmax(); ++v) {
    auto& row = g.shell(v);
    const auto& src = f.shell(-v);
    for (size_t j = 0; j < row.size(); ++j) row[j] = src[static_cast<size_t>(posmod(-static_cast<i64>(j), f.shell_size()))];
  }
  return g;
}

// ------------------------------------------------------------------ Mellin

LaurentPoly mellin(const ShellFunction& f, const MultChar& chi) {
  const FieldModel& F = f.field();
  if (!f.window_exact()) throw Error("truncation-unsound", "Mellin transform of a truncated function");
  MultChar c = char_reduce(F, chi);
  if (c.level > F.table_limit()) throw Error("level-mismatch", "character level beyond the tables");
  ShellFunction g = f.refined(std::max(f.level(), c.level));
  const int L = g.level();
  const double phi = static_cast<double>(g.shell_size());
  LaurentPoly out;
  for (int v = g.vmin(); v <= g.vmax(); ++v) {
    const auto& row = g.shell(v);
    cplx s = 0.0;
    for (size_t j = 0; j < row.size(); ++j)
      if (row[j] != cplx(0.0, 0.0)) s += row[j] * char_index(F, c, L, static_cast<i64>(j));
    out.add_term(-v, s / phi * std::pow(c.at_pi, v));
  }
  return out;
}

std::vector<std::vector<cplx>> mellin_all(const ShellFunction& f) {
  std::vector<std::vector<cplx>> out;
  const double phi = static_cast<double>(f.shell_size());
  for (int v = f.vmin(); v <= f.vmax(); ++v) {
    std::vector<cplx> c = dft(f.shell(v), +1);
    for (auto& x : c) x /= phi;
    out.push_back(std::move(c));
  }
  return out;
}

ShellFunction mellin_inverse(const FieldModel& F, int vmin, int level, const std::vector<std::vector<cplx>>& coeffs) {
  ShellFunction g(F, vmin, vmin + static_cast<int>(coeffs.size()) - 1, level);
  for (size_t k = 0; k < coeffs.size(); ++k) g.shell(vmin + static_cast<int>(k)) = dft(coeffs[k], -1);
  return g;
}

// ------------------------------------------------------ elementary functions

namespace {

// Square roots of the unit w modulo p^n, or 0 if w is not a square.
i64 unit_sqrt_or_zero(const FieldModel& F, i64 w, int n) {
  if (F.legendre(w) != 1) return 0;
  return F.sqrt_unit(posmod(w, F.pk(n)), n);
}

}  // namespace

int eta_ramified(const FieldModel& F, int v, i64 u) {
  int s = F.legendre(u);
  if (posmod(v, 2) == 1) s *= F.legendre(-1);
  return s;
}

ShellFunction elementary_E(const FieldModel& F, int m) {
  if (m < 0) throw Error("parameter-out-of-range", "E_m needs m >= 0");
  if (2 * m > F.k() || m > F.table_limit()) throw Error("precision-exhausted", "E_m beyond precision");
  if (m == 0) {
    // Units give 1 - 1/q per sign; the shell pO^x gives -1/q^2; deeper shells cancel.
    const double q = F.qd();
    const double val = 2.0 * (1.0 - 1.0 / q - 1.0 / (q * q));
    return ShellFunction::from_fn(F, 0, 0, 1, [&](int, i64 u) { return cplx(F.legendre(u) == 1 ? val : 0.0); });
  }
  const i64 pm = F.pk(m);
  const int h = m / 2;
  const i64 ph = F.pk(h);
  const double vol = 1.0 / static_cast<double>(pm);
  auto fn = [&](int, i64 w) -> cplx {
    i64 r = unit_sqrt_or_zero(F, w, m);
    if (r == 0) return 0.0;
    cplx s = 0.0;
    for (int sign : {1, -1})
      for (i64 t = 0; t < pm / ph; ++t) {
        i64 u = posmod(sign + t * ph, pm);
        // non-units (only when m = 1) contribute full cancelling shells
        if (u % F.p() == 0) continue;
        i64 arg = mulmod(r, posmod(u + invmod(u, pm), pm), pm);
        s += psi_frac(F, arg, m);
      }
    return s * vol * std::pow(F.qd(), m);
  };
  return ShellFunction::from_fn(F, -2 * m, -2 * m, m, fn);
}

ShellFunction elementary_E_geq(const FieldModel& F, int n, int vmin) {
  int mmax = -vmin / 2;
  int level = std::max(mmax, 1);
  ShellFunction out(F, std::min(vmin, -2 * n), -2 * std::max(n, 0), level, false);
  for (int m = std::max(n, 0); m <= mmax; ++m) {
    ShellFunction e = elementary_E(F, m).refined(level);
    out.shell(-2 * m) = e.shell(-2 * m);
  }
  return out;
}

ShellFunction qef_F(const FieldModel& F, int n) {
  if (n < 0) throw Error("parameter-out-of-range", "F_n needs n >= 0");
  if (n > F.k() || n > F.table_limit()) throw Error("precision-exhausted", "F_n beyond precision");
  int level = std::max(n, 1);
  auto fn = [&](int, i64 w) -> cplx {
    i64 r = unit_sqrt_or_zero(F, w, level);
    if (r == 0) return 0.0;
    if (n == 0) return 2.0;
    return psi_frac(F, r, n) + psi_frac(F, -r, n);
  };
  return ShellFunction::from_fn(F, -2 * n, -2 * n, level, fn);
}

ShellFunction qef_G(const FieldModel& F, int n) {
  if (n < 0) throw Error("parameter-out-of-range", "G_n needs n >= 0");
  if (n > F.k() || n > F.table_limit()) throw Error("precision-exhausted", "G_n beyond precision");
  int level = std::max(n, 1);
  auto fn = [&](int, i64 w) -> cplx {
    i64 r = unit_sqrt_or_zero(F, w, level);
    if (r == 0) return 0.0;
    // y = p^{-n} r and -y
    cplx s = 0.0;
    for (int sign : {1, -1}) {
      i64 u = sign * r;
      cplx ps = n == 0 ? cplx(1.0) : psi_frac(F, u, n);
      s += static_cast<double>(eta_ramified(F, -n, u)) * ps;
    }
    return s;
  };
  return ShellFunction::from_fn(F, -2 * n, -2 * n, level, fn);
}

std::string to_json(const ShellFunction& f) {
  nlohmann::ordered_json j;
  j["p"] = f.field().p();
  j["level"] = f.level();
  j["vmin"] = f.vmin();
  j["vmax"] = f.vmax();
  j["window_exact"] = f.window_exact();
  j["tail_bound"] = f.tail_bound();
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (int v = f.vmin(); v <= f.vmax(); ++v) {
    const auto& row = f.shell(v);
    for (size_t k = 0; k < row.size(); ++k) {
      i64 rep = f.level() == 0 ? 1 : f.field().units(f.level()).exp(static_cast<i64>(k));
      rows.push_back({{"shell", v}, {"coset", rep}, {"re", row[k].real()}, {"im", row[k].imag()}});
    }
  }
  j["table"] = rows;
  return j.dump();
}

}  // namespace lwl
