#include "lwl/orbital.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace lwl {

namespace {

constexpr i64 kBetaCacheLimit = i64{1} << 22;

// v_p and unit part of a nonzero residue modulo the field modulus.
std::pair<int, i64> split_val(const FieldModel& F, i64 x) {
  x = posmod(x, F.modulus());
  if (x == 0) return {F.k(), 0};
  int v = 0;
  while (x % F.p() == 0) {
    x /= F.p();
    ++v;
  }
  return {v, x};
}

int vres(const FieldModel& F, i64 x) { return split_val(F, x).first; }

void add_into(ShellFunction& target, const ShellFunction& src, cplx c) {
  ShellFunction s = src.level() == target.level() ? src : src.refined(target.level());
  for (int v = std::max(s.vmin(), target.vmin()); v <= std::min(s.vmax(), target.vmax()); ++v) {
    auto& t = target.shell(v);
    const auto& w = s.shell(v);
    for (size_t j = 0; j < t.size(); ++j) t[j] += c * w[j];
  }
}

// Shell (x valuation) and precision of the torus needed for H(tau y^2) at v(y) = -m.
int torus_precision(const QuadExtModel& L, const BetaChar& b, int m, const LPoint& xt) {
  return std::max({b.n0, L.e() * m - L.valuation(xt), 1});
}

struct ShellCtx {
  const OrbitalParam& par;
  const QuadExtModel& L;
  const FieldModel& F;
  BetaTable bt;
  cplx lambda;
  explicit ShellCtx(const OrbitalParam& p)
      : par(p), L(*p.L), F(p.L->field()), bt(*p.L, p.beta), lambda(weil_index(*p.L)) {}
};

ShellFunction tau_shell(ShellCtx& C, int tau_idx, int m, int level, const std::function<bool(i64)>& keep) {
  const QuadExtModel& L = C.L;
  const FieldModel& F = C.F;
  const BetaChar& b = C.par.beta;
  const auto tau = L.tau_reps()[static_cast<size_t>(tau_idx)];
  const int vx = tau.first - 2 * m;
  if (level < std::max(m, 1)) throw Error("parameter-out-of-range", "shell level below the shell depth");
  ShellFunction out(F, vx, vx, level);
  if (L.kind() == ExtKind::split && !is_regular(b) && m <= b.n0 - 1) return out;

  const LPoint xt = L.x_tau(tau_idx, C.par.x_choice[static_cast<size_t>(tau_idx)]);
  const cplx bx = beta_eval(L, b, xt);
  const int N = torus_precision(L, b, m, xt);
  TorusCosets T = enumerate_torus(L, N);
  const int M = std::max(m, 0);
  const i64 pm = F.pk(M);
  std::vector<cplx> S(static_cast<size_t>(pm), 0.0);
  for (const auto& a : T.reps) {
    const LPoint z = L.mul(xt, a);
    const i64 tr = L.tr(z);
    if (keep && !keep(tr)) continue;
    S[static_cast<size_t>(posmod(tr, pm))] += T.w * bx * C.bt(a);
  }
  std::vector<cplx> Hh = M == 0 ? S : dft(S, +1);

  const i64 pl = F.pk(level);
  const double scale = std::pow(F.qd(), -0.5 * tau.first) * std::pow(F.qd(), m);
  const MultChar eta = L.eta();
  auto& sh = out.shell(vx);
  const UnitGroup& U = F.units(level);
  const i64 phi = U.order();
  const i64 jt = U.dlog(posmod(tau.second, pl));
  // x = tau y^2 with y = p^{-m} y'; y' and -y' give the same x
  for (i64 j = 0; j < phi; ++j) {
    const i64 yp = U.exp(j);
    const cplx ey = char_eval(F, eta, PAdic::make(F, -m, yp));
    sh[static_cast<size_t>(posmod(jt + 2 * j, phi))] = C.lambda * scale * ey * Hh[static_cast<size_t>(posmod(yp, pm))];
  }
  return out;
}

// The torus integral of w(Tr) beta(x_tau alpha) t(delta(Tr)).base over keep(Tr).
struct TorusPieceSpec {
  int tau_idx = 0;
  int N = 1;
  std::function<bool(i64)> keep;
  std::function<cplx(i64)> weight;
  std::function<std::pair<int, i64>(i64)> delta;
};

ShellFunction torus_piece(ShellCtx& C, const TorusPieceSpec& s, const ShellFunction& base) {
  const QuadExtModel& L = C.L;
  const FieldModel& F = C.F;
  const LPoint xt = L.x_tau(s.tau_idx, C.par.x_choice[static_cast<size_t>(s.tau_idx)]);
  const cplx bx = beta_eval(L, C.par.beta, xt);
  TorusCosets T = enumerate_torus(L, s.N);
  const i64 pl = F.pk(base.level());
  std::map<std::pair<int, i64>, cplx> coef;
  for (const auto& a : T.reps) {
    const i64 tr = L.tr(L.mul(xt, a));
    if (!s.keep(tr)) continue;
    auto d = s.delta(tr);
    d.second = posmod(d.second, pl);
    cplx w = T.w * bx * C.bt(a);
    if (s.weight) w *= s.weight(tr);
    coef[d] += w;
  }
  ShellFunction out;
  bool first = true;
  for (const auto& [d, c] : coef) {
    if (std::abs(c) < 1e-15) continue;
    ShellFunction t = op_t(base, d.first, d.second);
    if (first) {
      out = ShellFunction(F, t.vmin(), t.vmax(), t.level());
      first = false;
    }
    add_into(out, t, c);
  }
  if (first) {
    const int v = base.vmin() - (coef.empty() ? 0 : coef.begin()->first.first);
    out = ShellFunction(F, v, v, base.level());
  }
  return out;
}

}  // namespace

// ------------------------------------------------------------------ BetaTable

BetaTable::BetaTable(const QuadExtModel& L, const BetaChar& b) : L_(&L), b_(b) {
  const FieldModel& F = L.field();
  const int n0 = std::max(b.n0, 1);
  if (L.kind() == ExtKind::ramified) {
    ma_ = F.pk((n0 + 1) / 2);
    mb_ = F.pk(n0 / 2);
  } else {
    ma_ = mb_ = F.pk(n0);
  }
  if (ma_ * mb_ <= kBetaCacheLimit) {
    cache_.assign(static_cast<size_t>(ma_ * mb_), 0.0);
    known_.assign(static_cast<size_t>(ma_ * mb_), 0);
  }
}

cplx BetaTable::operator()(const LPoint& z) const {
  if (cache_.empty() || !L_->is_unit(z)) return beta_eval(*L_, b_, z);
  const size_t idx = static_cast<size_t>(posmod(z.a, ma_) * mb_ + posmod(z.b, mb_));
  if (!known_[idx]) {
    cache_[idx] = beta_eval(*L_, b_, z);
    known_[idx] = 1;
  }
  return cache_[idx];
}

// ------------------------------------------------------------------ build_H

int default_n1(const QuadExtModel& L, const BetaChar& b, int a_pi) {
  const int e = L.e();
  return std::max({2 * b.n0 / e + e - 1, a_pi, 2});
}

bool is_regular(const BetaChar& b) { return b.conductor1 > 0; }

ShellFunction h_tau_shell(const OrbitalParam& par, int tau_idx, int m, int level,
                          const std::function<bool(i64)>& keep) {
  ShellCtx C(par);
  return tau_shell(C, tau_idx, m, level, keep);
}

TestFunctionH build_H(const OrbitalParam& par, std::optional<int> vmin_opt, int vmax) {
  if (par.L == nullptr) throw Error("parameter-out-of-range", "missing quadratic extension");
  const QuadExtModel& L = *par.L;
  const FieldModel& F = L.field();
  const int vmin = vmin_opt.value_or(-2 * par.n1);
  if (vmin > vmax) throw Error("parameter-out-of-range", "empty window");
  const bool ram = L.kind() == ExtKind::ramified;
  const int level = std::max(1, ram ? (1 - vmin) / 2 : -vmin / 2);
  TestFunctionH out;
  out.param = par;
  out.H = ShellFunction(F, vmin, vmax, level, false);
  out.H.set_truncated(std::numeric_limits<double>::infinity());
  ShellCtx C(par);
  for (int v = vmin; v <= vmax; ++v) {
    if (v % 2 == 0) {
      const int m = -v / 2;
      for (int t = 0; t < (ram ? 1 : 2); ++t) add_into(out.H, tau_shell(C, t, m, level, nullptr), 1.0);
    } else if (ram) {
      add_into(out.H, tau_shell(C, 1, (1 - v) / 2, level, nullptr), 1.0);
    }
  }
  return out;
}

// ------------------------------------------------------------------ eps_n

cplx eps_n(const TestFunctionH& H, const MultChar& chi, int n, EpsRoute route) {
  if (route == EpsRoute::closed) return eps_n_closed(*H.param.L, H.param.beta, chi, n);
  if (route == EpsRoute::closed_literal) return eps_n_closed_literal(*H.param.L, H.param.beta, chi, n);
  const ShellFunction& f = H.H;
  if (!f.in_window(-n)) throw Error("parameter-out-of-range", "shell -n outside the window of H");
  const FieldModel& F = f.field();
  const MultChar c = char_reduce(F, chi);
  // H is constant modulo 1 + P^{level} on each shell
  if (c.level > f.level()) return 0.0;
  const auto& sh = f.shell(-n);
  cplx s = 0.0;
  for (i64 j = 0; j < static_cast<i64>(sh.size()); ++j) s += sh[static_cast<size_t>(j)] * char_index(F, c, f.level(), j);
  return s / static_cast<double>(sh.size()) * std::pow(c.at_pi, -n);
}

namespace {

cplx eps_split(const FieldModel& F, const BetaChar& b, const MultChar& chi, int n, bool literal) {
  const double zeta = F.zeta1();
  const double q = F.qd();
  const MultChar& c0 = b.chi0;
  const MultChar ci = char_inv(chi);
  const MultChar a = char_reduce(F, char_mul(F, c0, chi));
  const MultChar bm = char_reduce(F, char_mul(F, char_inv(c0), chi));
  const int ca = a.conductor, cb = bm.conductor;
  const int c0c = char_reduce(F, c0).conductor;
  const int c02 = char_reduce(F, char_pow(F, c0, 2)).conductor;
  const MultChar e1 = char_mul(F, c0, ci);            // chi0 chi^{-1}
  const MultChar e2 = char_mul(F, char_inv(c0), ci);  // chi0^{-1} chi^{-1}
  if (ca >= 1 && cb >= 1) {
    if (n % 2 != 0 || ca != n / 2 || cb != n / 2) return 0.0;
    return zeta * eps_half(F, e1) * eps_half(F, e2);
  }
  const bool n2c1 = n == 2 && c0c == 1;
  if (ca == 0 && cb != 0) {
    if (!n2c1 || c02 == 0) return 0.0;
    if (literal) return -zeta / q * a.at_pi * eps_half(F, e2);
    return -zeta / std::sqrt(q) / a.at_pi * eps_half(F, e1);
  }
  if (cb == 0 && ca != 0) {
    if (!n2c1 || c02 == 0) return 0.0;
    if (literal) return -zeta / q * bm.at_pi * eps_half(F, e1);
    return -zeta / std::sqrt(q) / bm.at_pi * eps_half(F, e2);
  }
  if (!n2c1 || c02 != 0) return 0.0;
  if (literal) return -zeta / (q * q) * chi.at_pi * chi.at_pi;
  return zeta / q / (chi.at_pi * chi.at_pi);
}

cplx eps_nonsplit(const QuadExtModel& L, const BetaChar& b, const MultChar& chi, int n) {
  const FieldModel& F = L.field();
  const int e = L.e();
  if ((e * n) % 2 != 0) return 0.0;
  const int k = e * n / 2;
  auto xi = [&](const LPoint& z) { return beta_eval(L, b, z) * char_unit(F, chi, L.nr(z)); };
  if (l_char_conductor(L, xi, k + 2) != k + 1 - e) return 0.0;

  // G = sum over units w mod P_L^k of xi(w) psi_L(w varpi_L^{-k})
  BetaTable bt(L, b);
  cplx G = 0.0;
  if (L.kind() == ExtKind::unramified) {
    const i64 pk = F.pk(k);
    for (i64 a = 0; a < pk; ++a)
      for (i64 c = 0; c < pk; ++c) {
        if (a % F.p() == 0 && c % F.p() == 0) continue;
        const LPoint w{a, c};
        G += bt(w) * char_unit(F, chi, L.nr(w)) * psi_frac(F, L.tr(w), k);
      }
  } else {
    const i64 pa = F.pk((k + 1) / 2), pb = F.pk(k / 2);
    const LPoint thk = L.pow(L.theta(), k);
    for (i64 a = 1; a < pa; ++a) {
      if (a % F.p() == 0) continue;
      for (i64 c = 0; c < pb; ++c) {
        const LPoint w{a, c};
        G += bt(w) * char_unit(F, chi, L.nr(w)) * psi_frac(F, L.tr(L.mul(w, thk)), k);
      }
    }
  }
  // xi(varpi_L^{-k})
  cplx at = 0.0;
  if (L.kind() == ExtKind::unramified) {
    at = std::pow(cplx(-1.0, 0.0), -k) * std::pow(chi.at_pi, -2 * k);
  } else {
    const cplx chi_nr_theta = char_unit(F, chi, F.modulus() - 1) * chi.at_pi;
    at = std::pow(b.at_piL, -k) * std::pow(chi_nr_theta, -k);
  }
  G *= at;
  const double g = std::abs(G);
  if (g < 1e-12) return 0.0;
  return F.zeta1() * weil_index(L) * G / g;
}

}  // namespace

cplx eps_n_closed(const QuadExtModel& L, const BetaChar& b, const MultChar& chi, int n) {
  if (n < 1) throw Error("parameter-out-of-range", "eps_n needs n >= 1");
  const MultChar c = char_reduce(L.field(), chi);
  if (L.kind() == ExtKind::split) return eps_split(L.field(), b, c, n, false);
  return eps_nonsplit(L, b, c, n);
}

cplx eps_n_closed_literal(const QuadExtModel& L, const BetaChar& b, const MultChar& chi, int n) {
  if (n < 1) throw Error("parameter-out-of-range", "eps_n needs n >= 1");
  const MultChar c = char_reduce(L.field(), chi);
  if (L.kind() == ExtKind::split) return eps_split(L.field(), b, c, n, true);
  return eps_nonsplit(L, b, c, n);
}

// ------------------------------------------------------------------ decomposition

HDecomposition decompose_H(const TestFunctionH& Hf) {
  const OrbitalParam& par = Hf.param;
  const QuadExtModel& L = *par.L;
  const FieldModel& F = L.field();
  const BetaChar& b = par.beta;
  const int n0 = b.n0, n1 = par.n1, e = L.e();
  const double q = F.qd();
  const int lo = -(2 * n1 - 1);
  if (Hf.H.vmin() > lo) throw Error("parameter-out-of-range", "H window does not cover H_c");
  HDecomposition D;
  D.reassembled = ShellFunction(F, lo, Hf.H.vmax(), Hf.H.level());
  ShellCtx C(par);
  const i64 mod = F.modulus();
  const i64 inv2 = invmod(2, mod);
  // v(Tr / 2 - 1)
  auto dev = [&](i64 tr) { return vres(F, posmod(mulmod(tr, inv2, mod) - 1, mod)); };
  auto sq = [&](i64 tr) -> std::pair<int, i64> {
    auto [v, u] = split_val(F, tr);
    return {2 * v, mulmod(u, u, mod)};
  };
  auto push = [&](std::string name, int shell, cplx coeff, ShellFunction f) {
    add_into(D.reassembled, f, coeff);
    D.pieces.push_back({std::move(name), shell, coeff, std::move(f)});
  };

  if (e == 1) {
    const int N = std::max({n0, 2 * n0 - 1, 1});
    const cplx epsq = static_cast<double>(L.eps_L()) * q;
    for (int n = n0; 2 * n <= 2 * n1 - 1; ++n) {
      const std::string tag = "H_" + std::to_string(2 * n);
      if (n >= 2 * n0) {
        push(tag, 2 * n, 1.0, elementary_E(F, n));
      } else if (n > n0) {
        TorusPieceSpec s;
        s.tau_idx = 0;
        s.N = N;
        if (n == 2 * n0 - 1)
          s.keep = [&, n0](i64 tr) { return dev(tr) >= 2 * (n0 - 1); };
        else
          s.keep = [&, n, n0](i64 tr) { return dev(tr) == 2 * (n - n0); };
        s.delta = sq;
        push(tag, 2 * n, std::pow(epsq, n), torus_piece(C, s, qef_F(F, n)));
      } else {
        const cplx pre = std::pow(epsq, n0) / 2.0;
        const int eta0m1 = F.legendre(mod - 1);
        const int ta = eta0m1 == L.eps_L() ? 0 : 1;
        const i64 tau_u = L.tau_reps()[static_cast<size_t>(ta)].second;
        const i64 tinv = invmod(posmod(tau_u, mod), mod);
        const std::string an = ta == 0 ? "a,1" : "a,eps";
        for (int m = 0; m < n0; ++m) {
          TorusPieceSpec s;
          s.tau_idx = ta;
          s.N = N;
          if (m == 0) {
            s.keep = [&, n0](i64 tr) { return vres(F, tr) >= n0; };
            s.delta = [&, n0, tinv](i64) { return std::pair<int, i64>{2 * n0, tinv}; };
          } else {
            s.keep = [&, n0, m](i64 tr) { return vres(F, tr) == n0 - m; };
            s.delta = [&, tinv](i64 tr) {
              auto d = sq(tr);
              return std::pair<int, i64>{d.first, mulmod(d.second, tinv, mod)};
            };
          }
          push(tag + "^" + an + "_" + std::to_string(m), 2 * n, pre, torus_piece(C, s, qef_F(F, m)));
        }
        {
          TorusPieceSpec s;
          s.tau_idx = 1;
          s.N = N;
          const i64 einv = invmod(posmod(L.tau_reps()[1].second, mod), mod);
          s.keep = [&](i64 tr) { return vres(F, tr) == 0; };
          s.delta = [&, einv](i64 tr) {
            auto d = sq(tr);
            return std::pair<int, i64>{d.first, mulmod(d.second, einv, mod)};
          };
          push(tag + "^b,eps", 2 * n, pre, torus_piece(C, s, qef_F(F, n0)));
        }
        {
          TorusPieceSpec s;
          s.tau_idx = 0;
          s.N = N;
          if (n0 == 1)
            s.keep = [&](i64 tr) { return vres(F, tr) == 0; };
          else
            s.keep = [&](i64 tr) {
              const i64 r = posmod(tr, F.p());
              return r != 0 && r != 2 && r != F.p() - 2;
            };
          s.delta = sq;
          push(tag + "^b,1", 2 * n, pre, torus_piece(C, s, qef_F(F, n0)));
        }
      }
    }
    return D;
  }

  // e = 2
  const cplx lam = weil_index(L);
  const cplx lamL = lam * static_cast<double>(F.legendre(2));
  const int N = 2 * n0 + 2;
  for (int n = n0 / 2 + 1; 2 * n <= 2 * n1 - 1; ++n) {
    const std::string tag = "H_" + std::to_string(2 * n);
    if (n >= n0 + 1) {
      push(tag, 2 * n, 1.0, elementary_E(F, n));
      continue;
    }
    TorusPieceSpec s;
    s.tau_idx = 0;
    s.N = N;
    if (n == n0)
      s.keep = [&, n0](i64 tr) { return dev(tr) >= n0 - 1; };
    else
      s.keep = [&, n, n0](i64 tr) { return dev(tr) == 2 * n - n0 - 1; };
    s.delta = sq;
    push(tag, 2 * n, lamL * std::pow(q, n), torus_piece(C, s, qef_G(F, n)));
  }
  const int s_odd = n0 + 1;
  const cplx pre = lam / 2.0 * std::pow(q, 0.5 * (n0 + 1));
  const std::string tag = "H_" + std::to_string(s_odd);
  const MultChar eta = L.eta();
  for (int m = 0; m <= n0 / 2; ++m) {
    TorusPieceSpec s;
    s.tau_idx = 1;
    s.N = N;
    if (m == 0) {
      s.keep = [&, n0](i64 tr) { return vres(F, tr) >= n0 / 2 + 1; };
      const i64 sgn = (n0 + 1) % 2 == 0 ? 1 : mod - 1;
      s.delta = [n0, sgn](i64) { return std::pair<int, i64>{n0 + 1, sgn}; };
    } else {
      s.keep = [&, n0, m](i64 tr) { return vres(F, tr) == n0 / 2 + 1 - m; };
      s.weight = [&](i64 tr) { return char_eval(F, eta, PAdic::from_int(F, tr)); };
      s.delta = [&](i64 tr) {
        auto d = sq(tr);
        return std::pair<int, i64>{d.first - 1, posmod(-d.second, mod)};
      };
    }
    push(tag + "_" + std::to_string(m), s_odd, pre, torus_piece(C, s, qef_G(F, m)));
  }
  return D;
}

// ------------------------------------------------------------------ L^2 proxy

L2Proxy l2_weight_proxy(const TestFunctionH& Hf) {
  const ShellFunction& f = Hf.H;
  const QuadExtModel& L = *Hf.param.L;
  const FieldModel& F = f.field();
  const double q = F.qd();
  L2Proxy out;
  for (int v = f.vmin(); v <= f.vmax(); ++v) {
    double s = 0.0;
    for (const auto& x : f.shell(v)) s += std::norm(x);
    out.brute += std::pow(q, v) * s / static_cast<double>(f.shell_size());
  }
  // E_m on shells -2m below the window; mean |E_m|^2 = q^{m-2} mean |E_2|^2 for m >= 2
  const int mb = std::max(-f.vmin() / 2 + 1, 2);
  const ShellFunction E = elementary_E(F, 2);
  double s = 0.0;
  for (const auto& x : E.shell(-4)) s += std::norm(x);
  s /= static_cast<double>(E.shell_size());
  out.brute += s * std::pow(q, -2 - mb) * q / (q - 1.0);

  if (L.kind() != ExtKind::split) {
    const int e = L.e(), n0 = Hf.param.beta.n0;
    const double qL = std::pow(q, L.f());
    const double zL = 1.0 / (1.0 - 1.0 / qL);
    double w = 0.0;
    if (e == 1)
      w = std::pow(q, -n0) / (1.0 - 1.0 / q);
    else
      w = 2.0 * std::pow(q, -0.5 * n0) * std::pow(q, -0.5) / (1.0 - 1.0 / q);
    out.closed = F.zeta1() / zL * std::pow(qL, -0.5 * (e - 1)) * w;
    out.closed_literal = *out.closed / zL;
  }
  return out;
}

}  // namespace lwl
