#include "lwl/dualweight.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "lwl/ffsums.hpp"
#include "lwl/voronoi.hpp"

namespace lwl {

namespace {

// Fills out[i] = fn(i) for i < n on `jobs` threads; each slot is written once.
template <class T, class Fn>
void parallel_fill(std::vector<T>& out, size_t n, int jobs, const Fn& fn) {
  out.resize(n);
  const size_t J = static_cast<size_t>(std::max(1, jobs));
  if (J == 1 || n < 2) {
    for (size_t i = 0; i < n; ++i) out[i] = fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errs(J);
  for (size_t w = 0; w < J; ++w)
    pool.emplace_back([&, w] {
      try {
        for (size_t i = w; i < n; i += J) out[i] = fn(i);
      } catch (...) {
        errs[w] = std::current_exception();
      }
    });
  for (auto& t : pool) t.join();
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
}

bool is_unramified(const FieldModel& F, const MultChar& chi) { return char_reduce(F, chi).conductor == 0; }

int cond(const FieldModel& F, const MultChar& chi) { return char_reduce(F, chi).conductor; }

// (chi eta0^k) for the Legendre character eta0 with eta0(varpi) = 1.
int cond_twist(const FieldModel& F, const MultChar& chi, int k) {
  return cond(F, char_mul(F, chi, char_pow(F, legendre_char(F), k)));
}

RationalLaurent rescaled(const RationalLaurent& f, double c) {
  LaurentPoly num;
  for (const auto& [e, a] : f.num().terms()) num.add_term(e, a * std::pow(c, e));
  std::vector<Pole> poles = f.poles();
  for (auto& p : poles) p.b *= c;
  return RationalLaurent(num, poles);
}

std::string fmt12(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

double round12(double x) { return std::stod(fmt12(x)); }

std::string chi_id(const FieldModel& F, const MultChar& chi) {
  const MultChar r = char_reduce(F, chi);
  return "c" + std::to_string(r.conductor) + ":e" + std::to_string(r.expo);
}

}  // namespace

// ------------------------------------------------------------------ h~_infty

cplx dual_weight_infty(const FieldModel& F, const MultChar& chi, int n1) {
  if (!is_unramified(F, chi)) return 0.0;
  const double q = F.qd();
  const cplx z = chi.at_pi;
  const cplx den = 1.0 - z / std::sqrt(q);
  if (std::abs(den) < 1e-12) throw Error("pole", "chi(varpi) = q^{1/2}");
  return std::pow(z, n1) * std::pow(q, -0.5 * n1) / den;
}

TruncatedValue dual_weight_infty_direct(const FieldModel& F, const PiData& pi, const MultChar& chi, int n1, int W) {
  if (W < 1) throw Error("parameter-out-of-range", "W >= 1");
  const double q = F.qd();
  TruncatedValue out;
  for (int m = n1; m < n1 + W; ++m) {
    const ShellFunction V = vh_dual(elementary_E(F, m), pi, -1);
    const ShellCoefficients C(V, V.vmin(), -1, true);
    out.value += C.integral(chi);
  }
  // Below the summed shells the stable transform is psi(t) on each shell, whose
  // psi(-t) chi^{-1} average is 0 for ramified chi and chi(varpi)^{-v} otherwise.
  if (is_unramified(F, chi)) {
    const double r = std::abs(chi.at_pi) / std::sqrt(q);
    if (r >= 1.0) throw Error("pole", "non-unitary chi in the direct sum");
    out.tail_bound = std::pow(r, n1 + W) / (1.0 - r);
  }
  return out;
}

// ------------------------------------------------------------------ shells

ShellFunction at_minimal_level(const ShellFunction& f) {
  const FieldModel& F = f.field();
  const double floor = 1e-12 * std::max(1.0, f.max_abs());
  int best = 0;
  for (int v = f.vmin(); v <= f.vmax(); ++v) {
    const auto& sh = f.shell(v);
    int l = best;
    for (; l < f.level(); ++l) {
      const size_t ph = static_cast<size_t>(F.phi(l));
      bool ok = true;
      for (size_t j = 0; j < sh.size() && ok; ++j) ok = std::abs(sh[j] - sh[j % ph]) <= floor;
      if (ok) break;
    }
    best = std::max(best, l);
  }
  if (best >= f.level()) return f;
  ShellFunction g(F, f.vmin(), f.vmax(), best, f.window_exact());
  if (!f.window_exact()) g.set_truncated(f.tail_bound());
  for (int v = f.vmin(); v <= f.vmax(); ++v) {
    auto& dst = g.shell(v);
    const auto& src = f.shell(v);
    for (size_t j = 0; j < dst.size(); ++j) dst[j] = src[j];
  }
  return g;
}

ShellFunction shell_part(const TestFunctionH& H, int n) {
  const ShellFunction& f = H.H;
  if (!f.in_window(-n)) throw Error("parameter-out-of-range", "shell outside the window of H");
  ShellFunction g(f.field(), -n, -n, f.level());
  g.shell(-n) = f.shell(-n);
  return at_minimal_level(g);
}

std::vector<int> finite_part_shells(const TestFunctionH& H) {
  const int e = H.param.L->e();
  const int n0 = H.param.beta.n0;
  const int lo = (2 * (n0 - 2)) / e + 3;
  std::vector<int> out;
  for (int n = std::max(lo, 1); n <= 2 * H.param.n1 - 1; ++n)
    if ((e * n) % 2 == 0) out.push_back(n);
  return out;
}

ShellFunction vh_dual(const ShellFunction& f, const PiData& pi, int vhi) {
  if (f.max_abs() == 0.0) return ShellFunction(f.field(), vhi, vhi, 0);
  return vh_transform(op_m(f, trivial_char(), -1.0), pi, vhi, vhi);
}

// ------------------------------------------------------------------ coefficients

ShellCoefficients::ShellCoefficients(const ShellFunction& g, int vlo, int vhi, bool with_psi)
    : F_(&g.field()), vlo_(vlo), vhi_(vhi) {
  const FieldModel& F = *F_;
  const size_t nsh = vhi >= vlo ? static_cast<size_t>(vhi - vlo + 1) : 0;
  levels_.assign(nsh, 0);
  c_.assign(nsh, {});
  for (int v = vlo; v <= vhi; ++v) {
    const size_t k = static_cast<size_t>(v - vlo);
    if (!g.in_window(v)) {
      if (v > g.vmax() && !g.window_exact()) throw Error("truncation-unsound", "shell outside a truncated window");
      c_[k] = {0.0};
      continue;
    }
    const auto& sh = g.shell(v);
    const bool psi = with_psi && v < 0;
    const int Lv = psi ? std::max(g.level(), -v) : g.level();
    if (Lv > F.table_limit()) throw Error("level-exceeds-precision", "coefficient table level");
    const size_t phi = static_cast<size_t>(F.phi(Lv));
    std::vector<cplx> h(phi);
    const UnitGroup* U = Lv > 0 ? &F.units(Lv) : nullptr;
    for (size_t j = 0; j < phi; ++j) {
      cplx w = sh[j % sh.size()];
      if (psi) w *= psi_frac(F, posmod(-U->exp(static_cast<i64>(j)), F.pk(-v)), -v);
      h[j] = w;
    }
    std::vector<cplx> d = dft(h, -1);
    for (auto& x : d) x /= static_cast<double>(phi);
    levels_[k] = Lv;
    c_[k] = std::move(d);
  }
}

int ShellCoefficients::level() const {
  int l = 0;
  for (size_t k = 0; k < c_.size(); ++k) l = std::max(l, levels_[k]);
  return l;
}

cplx ShellCoefficients::coeff(int v, const MultChar& chi) const {
  if (v < vlo_ || v > vhi_) return 0.0;
  const size_t k = static_cast<size_t>(v - vlo_);
  const MultChar r = char_reduce(*F_, chi);
  if (r.level > levels_[k]) return 0.0;
  const i64 idx = posmod(char_lift(*F_, r, levels_[k]).expo, F_->phi(levels_[k]));
  return c_[k][static_cast<size_t>(idx)];
}

cplx ShellCoefficients::integral(const MultChar& chi) const {
  const double q = F_->qd();
  cplx s = 0.0;
  for (int v = vlo_; v <= vhi_; ++v) {
    const cplx c = coeff(v, chi);
    if (c != cplx(0.0)) s += std::pow(q, 0.5 * v) * std::pow(chi.at_pi, -v) * c;
  }
  return s;
}

LaurentPoly ShellCoefficients::unramified_family() const {
  const double q = F_->qd();
  LaurentPoly p;
  for (int v = vlo_; v <= vhi_; ++v) {
    const cplx c = coeff(v, trivial_char());
    if (c != cplx(0.0)) p.add_term(v, std::pow(q, 0.5 * v) * c);
  }
  return p;
}

double ShellCoefficients::max_abs() const {
  double m = 0.0;
  for (const auto& row : c_)
    for (const auto& x : row) m = std::max(m, std::abs(x));
  return m;
}

double ShellCoefficients::max_abs(const MultChar& chi) const {
  double m = 0.0;
  for (int v = vlo_; v <= vhi_; ++v) m = std::max(m, std::abs(coeff(v, chi)));
  return m;
}

ShellCoefficients negative_coeffs(const ShellFunction& f, const PiData& pi) {
  const ShellFunction V = vh_dual(at_minimal_level(f), pi, -1);
  return ShellCoefficients(V, std::min(V.vmin(), -1), -1, true);
}

// ------------------------------------------------------------------ Laurent side

RationalLaurent f_n_laurent(const FieldModel& F, const PiData& pi, const MultChar& chi, int n, cplx eps) {
  if (eps == cplx(0.0)) return RationalLaurent();
  return gamma_factor(F, pi, chi).times_poly(LaurentPoly::monomial(n, eps * std::pow(F.qd(), -n)));
}

RationalLaurent plus_part(const RationalLaurent& f) {
  if (f.is_zero()) return f;
  const LaurentPoly& Q = f.num();
  if (Q.min_exp() >= 0) return f;
  if (f.poles().empty()) {
    const LaurentPoly s = Q.slice(0, Q.max_exp());
    return s.empty() ? RationalLaurent() : RationalLaurent(s, {});
  }
  int degP = 0;
  for (const auto& p : f.poles()) degP += p.m;
  return laurent_plus(f, Q.max_exp() < degP ? PlusMode::partial_fraction : PlusMode::series);
}

double laurent_tail_majorant(const RationalLaurent& f, int V, double q) {
  if (f.is_zero()) return 0.0;
  std::vector<Pole> mp;
  for (const auto& p : f.poles()) {
    if (std::abs(p.b) * std::sqrt(q) >= 1.0) return std::numeric_limits<double>::infinity();
    mp.push_back({std::abs(p.b), p.m});
  }
  const int lo = f.num().min_exp();
  const int span = 400;
  const std::vector<cplx> S = inverse_denominator_series(mp, V + span - lo + 1);
  double total = 0.0;
  for (int v = V + 1; v <= V + span; ++v) {
    double c = 0.0;
    for (const auto& [k, a] : f.num().terms())
      if (v - k >= 0) c += std::abs(a) * S[static_cast<size_t>(v - k)].real();
    total += std::pow(q, 0.5 * v) * c;
  }
  return total;
}

// ------------------------------------------------------------------ DualWeight

DualWeight::DualWeight(const TestFunctionH& H, const PiData& pi, int vhi, std::optional<int> depth)
    : H_(H), pi_(pi), vhi_(vhi) {
  depth_ = depth.value_or(2 * H.param.n1 + 12);
  shells_ = finite_part_shells(H);
  for (int n : shells_) {
    const ShellFunction Hn = shell_part(H, n);
    hco_.emplace(n, ShellCoefficients(Hn, -n, -n, false));
    ShellFunction V = vh_dual(Hn, pi, vhi);
    minus_.emplace(n, ShellCoefficients(V, std::min(V.vmin(), -1), -1, true));
    plain_.emplace(n, ShellCoefficients(V, 0, vhi, false));
    vh_.emplace(n, std::move(V));
  }
}

int DualWeight::max_level() const {
  int l = 0;
  for (int n : shells_) {
    l = std::max(l, hco_.at(n).level());
    l = std::max(l, minus_.at(n).level());
    l = std::max(l, plain_.at(n).level());
  }
  return l;
}

cplx DualWeight::eps(int n, const MultChar& chi) const {
  return std::pow(chi.at_pi, -n) * hco_.at(n).coeff(-n, char_inv(chi));
}

RationalLaurent DualWeight::f_n(int n, const MultChar& chi) const {
  return f_n_laurent(field(), pi_, chi, n, eps(n, chi));
}

cplx DualWeight::plus(int n, const MultChar& chi) const {
  const RationalLaurent p = plus_part(f_n(n, chi));
  return p.is_zero() ? cplx(0.0) : p.eval(std::sqrt(field().qd()));
}

TruncatedValue DualWeight::minus(int n, const MultChar& chi) const {
  const ShellCoefficients& C = minus_.at(n);
  const double q = field().qd();
  TruncatedValue out;
  for (int v = C.vlo(); v <= -1; ++v) {
    const cplx c = C.coeff(v, chi);
    if (c == cplx(0.0)) continue;
    const cplx term = std::pow(q, 0.5 * v) * std::pow(chi.at_pi, -v) * c;
    if (v < -depth_)
      out.tail_bound += std::abs(term);
    else
      out.value += term;
  }
  return out;
}

TruncatedValue DualWeight::direct(int n, const MultChar& chi) const {
  TruncatedValue out = minus(n, chi);
  out.value += plain_.at(n).integral(chi);
  out.tail_bound += laurent_tail_majorant(f_n(n, chi), vhi_, field().qd());
  return out;
}

// ------------------------------------------------------------------ reports

Verdict make_verdict(std::string name, int cases, double max_abs, double tol, double tail, std::string detail) {
  Verdict v;
  v.name = std::move(name);
  v.cases = cases;
  v.max_abs = max_abs;
  v.tol = tol;
  v.tail = tail;
  v.determined = tail <= tol;
  v.pass = v.determined && max_abs <= tol;
  v.detail = std::move(detail);
  return v;
}

DualWeightRow dual_weight_total(const DualWeight& dw, const MultChar& chi, double proxy, double scale) {
  const FieldModel& F = dw.field();
  DualWeightRow r;
  r.chi = chi;
  r.id = chi_id(F, chi);
  r.conductor = cond(F, chi);
  r.h_inf = dw.infty(chi);
  for (int n : dw.shells()) {
    r.h_plus += dw.plus(n, chi);
    const TruncatedValue m = dw.minus(n, chi);
    r.h_minus += m.value;
    r.tail_bound += m.tail_bound;
  }
  r.total = r.h_inf + r.h_plus + r.h_minus;
  r.ratio = std::abs(r.total) / (proxy * scale);
  const auto& par = dw.test_function().param;
  const QuadExtModel& L = *par.L;
  const int n0 = par.beta.n0;
  if (n0 % 2 == 1 && n0 >= 3 && F.legendre(F.modulus() - 1) == L.eps_L() && r.conductor == n0 &&
      in_exceptional_set(L, par.beta, char_reduce(F, char_pow(F, chi, 2))))
    r.flags.push_back("exceptional");
  const int thr = dw.e() == 1 ? n0 : n0 / 2;
  if (r.conductor > thr) r.flags.push_back("outside-window");
  return r;
}

DualWeightReport bound_report(const DualWeight& dw, int jobs) {
  const FieldModel& F = dw.field();
  const auto& par = dw.test_function().param;
  DualWeightReport rep;
  for (size_t i = 0; i < 3; ++i) {
    const MultChar m = char_reduce(F, dw.pi().mu[i]);
    std::ostringstream os;
    os << (i ? " + " : "") << "mu(c=" << m.conductor << ",e=" << m.expo << ",z=" << fmt12(m.at_pi.real()) << ","
       << fmt12(m.at_pi.imag()) << ")";
    rep.pi_desc += os.str();
  }
  rep.kind = kind_name(par.L->kind());
  rep.n0 = par.beta.n0;
  rep.n1 = par.n1;
  rep.e = par.L->e();
  rep.depth = dw.depth();
  rep.proxy = l2_weight_proxy(dw.test_function()).brute;
  rep.scale = rep.e == 1 ? std::pow(F.qd(), -rep.n0) : std::pow(F.qd(), -0.5 * (rep.n0 + 1));
  rep.proxy_definition = "proxy-normalized: ratio = |h~(chi)| / (P q^-scale), P = int |H(y)|^2 d^x y / |y|";
  const auto chars = enumerate_chars(F, dw.max_level());
  std::vector<MultChar> order(chars.begin(), chars.end());
  std::stable_sort(order.begin(), order.end(), [&](const MultChar& a, const MultChar& b) {
    const MultChar ra = char_reduce(F, a), rb = char_reduce(F, b);
    return std::pair(ra.conductor, ra.expo) < std::pair(rb.conductor, rb.expo);
  });
  parallel_fill(rep.rows, order.size(), jobs,
                [&](size_t i) { return dual_weight_total(dw, order[i], rep.proxy, rep.scale); });
  double tail = 0.0;
  for (const auto& r : rep.rows) {
    rep.max_ratio = std::max(rep.max_ratio, r.ratio);
    tail = std::max(tail, r.tail_bound);
  }
  rep.tail_ledger.push_back({"h_minus depth " + std::to_string(rep.depth), tail});
  return rep;
}

std::string to_json(const DualWeightReport& r) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["pi"] = r.pi_desc;
  j["kind"] = r.kind;
  j["n0"] = r.n0;
  j["n1"] = r.n1;
  j["e"] = r.e;
  j["depth"] = r.depth;
  j["proxy"] = round12(r.proxy);
  j["proxy_definition"] = r.proxy_definition;
  j["scale"] = round12(r.scale);
  j["max_ratio"] = round12(r.max_ratio);
  auto cj = [](cplx z) { return ordered_json::array({round12(z.real()), round12(z.imag())}); };
  ordered_json rows = ordered_json::array();
  for (const auto& x : r.rows) {
    ordered_json o;
    o["chi_id"] = x.id;
    o["conductor"] = x.conductor;
    o["h_inf"] = cj(x.h_inf);
    o["h_plus"] = cj(x.h_plus);
    o["h_minus"] = cj(x.h_minus);
    o["total"] = cj(x.total);
    o["ratio"] = round12(x.ratio);
    o["flags"] = x.flags;
    o["tail_bound"] = round12(x.tail_bound);
    rows.push_back(o);
  }
  j["rows"] = rows;
  ordered_json vs = ordered_json::array();
  for (const auto& v : r.verdicts)
    vs.push_back({{"name", v.name}, {"cases", v.cases}, {"max_abs", round12(v.max_abs)}, {"tol", round12(v.tol)},
                  {"tail", round12(v.tail)}, {"pass", v.pass}, {"determined", v.determined}, {"detail", v.detail}});
  j["verdicts"] = vs;
  ordered_json tl = ordered_json::array();
  for (const auto& [k, t] : r.tail_ledger) tl.push_back({{"item", k}, {"tail_bound", round12(t)}});
  j["tail_ledger"] = tl;
  return j.dump(2);
}

std::string to_csv(const DualWeightReport& r) {
  std::ostringstream os;
  os << "chi-id,conductor,h_inf,h_plus,h_minus,total,ratio,flags,tail_bound\n";
  auto cz = [](cplx z) { return fmt12(z.real()) + (z.imag() < 0 ? "" : "+") + fmt12(z.imag()) + "i"; };
  for (const auto& x : r.rows) {
    std::string flags;
    for (const auto& f : x.flags) flags += (flags.empty() ? "" : ";") + f;
    os << x.id << ',' << x.conductor << ',' << cz(x.h_inf) << ',' << cz(x.h_plus) << ',' << cz(x.h_minus) << ','
       << cz(x.total) << ',' << fmt12(x.ratio) << ',' << flags << ',' << fmt12(x.tail_bound) << '\n';
  }
  return os.str();
}

// ------------------------------------------------------------------ normalized family

namespace {

// P(X) = L(1/2 - s, Pi~)^{-1} = prod over unramified mu_j of (1 - mu_j(varpi)^{-1} q^{-1/2} X).
LaurentPoly dual_l_poly(const FieldModel& F, const PiData& pi) {
  LaurentPoly P = LaurentPoly::constant(1.0);
  for (const auto& m : pi.mu) {
    const MultChar r = char_reduce(F, m);
    if (r.conductor != 0) continue;
    LaurentPoly f = LaurentPoly::constant(1.0);
    f.add_term(1, -1.0 / (r.at_pi * std::sqrt(F.qd())));
    P = P * f;
  }
  return P;
}

}  // namespace

NormalizedDualWeight normalized_dual_weight(const DualWeight& dw) {
  const FieldModel& F = dw.field();
  const double q = F.qd(), rq = std::sqrt(q);
  NormalizedDualWeight N;
  const LaurentPoly P = dual_l_poly(F, dw.pi());
  LaurentPoly zinv = LaurentPoly::constant(1.0);
  zinv.add_term(-1, -1.0 / rq);
  N.normalizer = zinv * P;
  N.infty = RationalLaurent((P * std::pow(q, -0.5 * dw.n1())).shifted(-dw.n1()), {});
  RationalLaurent total = N.infty;
  LaurentPoly minus_sum;
  for (int n : dw.shells()) {
    const RationalLaurent g = plus_part(dw.f_n(n, trivial_char()));
    const RationalLaurent gp = g.is_zero() ? g : rescaled(g, rq).times_poly(N.normalizer);
    N.plus[n] = gp;
    if (!gp.is_zero()) total = total + gp;
    const LaurentPoly m = dw.minus_family(n) * 1.0;
    N.minus[n] = m * N.normalizer;
    minus_sum = minus_sum + N.minus[n];
  }
  if (!minus_sum.empty()) total = total + RationalLaurent(minus_sum, {});
  N.total = total;
  return N;
}

std::vector<cplx> normalized_taylor(const RationalLaurent& f, double s0, int kmax, double q) {
  if (f.is_zero()) return std::vector<cplx>(static_cast<size_t>(kmax + 1), 0.0);
  return taylor_coeffs_in_s(f, kmax, s0, q);
}

cplx normalized_value_direct(const DualWeight& dw, double s) {
  const FieldModel& F = dw.field();
  const double q = F.qd();
  const MultChar chi = unramified_char(std::pow(q, -s));
  cplx P = 1.0;
  for (const auto& m : dw.pi().mu) {
    const MultChar r = char_reduce(F, m);
    if (r.conductor == 0) P *= 1.0 - std::pow(q, s - 0.5) / r.at_pi;
  }
  const cplx norm = (1.0 - std::pow(q, -0.5 - s)) * P;
  cplx v = std::pow(q, -(0.5 + s) * dw.n1()) * P;
  for (int n : dw.shells()) {
    const RationalLaurent f = dw.f_n(n, chi);
    if (!f.is_zero()) v += laurent_plus(f, PlusMode::series).eval(std::sqrt(q)) * norm;
    v += dw.minus(n, chi).value * norm;
  }
  return v;
}

std::vector<cplx> normalized_fd(const DualWeight& dw, double s0, double h) {
  const cplx fm = normalized_value_direct(dw, s0 - h);
  const cplx f0 = normalized_value_direct(dw, s0);
  const cplx fp = normalized_value_direct(dw, s0 + h);
  return {f0, (fp - fm) / (2.0 * h), (fp - 2.0 * f0 + fm) / (2.0 * h * h)};
}

// ------------------------------------------------------------------ K~(delta, chi)

cplx k_tilde(const FieldModel& F, i64 delta, const MultChar& chi_in, KRoute route) {
  const i64 p = F.p();
  const double q = F.qd();
  const double zeta = F.zeta1();
  const MultChar chi = char_reduce(F, chi_in);
  if (chi.conductor > 1) return 0.0;
  const i64 d = posmod(delta, p);
  if (d == 0) throw Error("parameter-out-of-range", "delta must be a unit");
  const cplx t0 = tau0(F);
  const cplx zinv = 1.0 / chi.at_pi;
  auto eta = [&](i64 x) { return static_cast<double>(F.legendre(posmod(x, p))); };
  auto chu = [&](i64 x) { return char_unit(F, chi, posmod(x, p)); };
  auto ps = [&](i64 x) { return psi_frac(F, posmod(x, p), 1); };
  auto inv = [&](i64 x) { return invmod(posmod(x, p), p); };

  switch (route) {
    case KRoute::definition: {
      // K(w / varpi) for units w.
      auto K = [&](i64 w) {
        cplx s = 0.0;
        const i64 i4w = inv(4 * w);
        for (i64 u1 = 1; u1 < p; ++u1)
          for (i64 u2 = 1; u2 < p; ++u2)
            s += ps(u1 + u2 - u1 * u2 % p * i4w) * eta(4 * w % p * inv(u1 * u2));
        return t0 * q * s;
      };
      cplx s = 0.0;
      const i64 dinv = inv(d);
      for (i64 u = 1; u < p; ++u) s += K(u * dinv % p) * ps(-u) * chu(u);
      return std::pow(q, -2.5) * zinv * s / (q - 1.0);
    }
    case KRoute::triple: {
      cplx s = 0.0;
      for (i64 u1 = 1; u1 < p; ++u1)
        for (i64 u2 = 1; u2 < p; ++u2)
          for (i64 u = 1; u < p; ++u) {
            const i64 x = u1 + u2 - u1 * u2 % p * d % p * inv(4 * u) - u;
            s += ps(x) * eta(4 * u % p * inv(d * u1 % p * u2)) * chu(u);
          }
      return t0 * std::sqrt(q) * zeta * zinv * s * std::pow(q, -3.0);
    }
    case KRoute::quadruple: {
      cplx s = 0.0;
      const i64 c = 4 * inv(d) % p;
      for (i64 t1 = 1; t1 < p; ++t1)
        for (i64 t3 = 1; t3 < p; ++t3)
          for (i64 t4 = 1; t4 < p; ++t4) {
            const i64 t2 = c * t3 % p * t4 % p * inv(t1) % p;
            s += ps(t1 + t2 - t3 - t4) * chu(t3) * eta(t4);
          }
      return t0 * std::pow(q, 1.5) * zeta * zinv * s * std::pow(q, -4.0);
    }
    case KRoute::closed: {
      if (chi.conductor != 0) throw Error("parameter-out-of-range", "the closed form needs unramified chi");
      const i64 dm4 = posmod(d - 4, p);
      const double ind = dm4 == 0 ? 0.0 : eta(d * inv(dm4));
      return zinv * zeta * (std::pow(q, -2.5) + std::pow(q, -1.5) * ind);
    }
    case KRoute::katz: {
      if (chi.conductor != 1) throw Error("parameter-out-of-range", "the Katz form needs conductor 1");
      const FiniteField K(p);
      // exponent of chi^{-1} against the generator of F_q^x
      const cplx cg = char_unit(F, chi, K.generator());
      const i64 e = posmod(static_cast<i64>(std::llround(std::arg(cg) / (2.0 * kPi) * (q - 1.0))), p - 1);
      const FqChar ci{posmod(-e, p - 1)};
      const cplx H = katz_H(K, 4 * inv(d) % p, {K.trivial(), K.trivial()}, {ci, K.eta()});
      return -t0 / q * zeta * zinv * H;
    }
  }
  return 0.0;
}

// ------------------------------------------------------------------ suites

std::vector<DualWeightCase> default_dualweight_grid() {
  return {{ExtKind::split, 1, 0},      {ExtKind::split, 2, 0},      {ExtKind::split, 3, 0},
          {ExtKind::unramified, 1, 0}, {ExtKind::unramified, 2, 0}, {ExtKind::unramified, 3, 0},
          {ExtKind::ramified, 2, 0}};
}

PiData generic_unramified_pi(const FieldModel& F) {
  return unramified_pi(F, std::polar(1.0, 0.3), std::polar(1.0, 1.1));
}

namespace {

struct CaseData {
  DualWeightCase c;
  std::unique_ptr<QuadExtModel> L;
  TestFunctionH H;
  std::unique_ptr<DualWeight> dw;
  std::string tag;
};

std::unique_ptr<CaseData> build_case(const FieldModel& F, const DualWeightCase& c, const PiData& pi) {
  auto d = std::make_unique<CaseData>();
  d->c = c;
  d->L = std::make_unique<QuadExtModel>(F, c.kind);
  OrbitalParam par;
  par.L = d->L.get();
  par.beta = default_beta(*d->L, c.n0);
  par.n1 = c.n1 > 0 ? c.n1 : default_n1(*d->L, par.beta, stability_barrier(F, pi));
  d->H = build_H(par);
  d->dw = std::make_unique<DualWeight>(d->H, pi);
  d->tag = kind_name(c.kind) + " n0=" + std::to_string(c.n0);
  return d;
}

std::vector<std::unique_ptr<CaseData>> build_cases(const FieldModel& F, const std::vector<DualWeightCase>& grid,
                                                   const PiData& pi, int jobs) {
  std::vector<std::unique_ptr<CaseData>> out;
  parallel_fill(out, grid.size(), jobs, [&](size_t i) { return build_case(F, grid[i], pi); });
  return out;
}

// Accumulates max |x| against a tolerance relative to a scale.
struct Acc {
  int cases = 0;
  double worst = 0.0;  // max |x| / max(1, scale)
  double tail = 0.0;
  std::string where;
  void add(double x, double scale, const std::string& w) {
    ++cases;
    const double r = x / std::max(1.0, scale);
    if (r > worst || where.empty()) {
      worst = std::max(worst, r);
      where = w;
    }
  }
};

Verdict finish(const std::string& name, const Acc& a, double tol, const std::string& extra = {}) {
  std::string d = a.cases == 0 ? "no admissible cases on the grid" : "worst at " + a.where;
  if (!extra.empty()) d += "; " + extra;
  return make_verdict(name, a.cases, a.worst, tol, a.tail, d);
}

const HPiece* find_piece(const HDecomposition& D, const std::string& name) {
  for (const auto& p : D.pieces)
    if (p.name == name) return &p;
  return nullptr;
}

}  // namespace

std::vector<Verdict> vanishing_suite(const FieldModel& F, const std::vector<DualWeightCase>& grid, double tol,
                                     int jobs) {
  const PiData pi = generic_unramified_pi(F);
  const auto cases = build_cases(F, grid, pi, jobs);
  std::vector<Verdict> out;

  {  // h~_infty for ramified chi, closed and direct
    Acc a;
    for (int l = 1; l <= 2; ++l)
      for (const auto& chi : enumerate_chars(F, l)) {
        if (cond(F, chi) == 0) continue;
        for (int n1 : {2, 3}) {
          a.add(std::abs(dual_weight_infty(F, chi, n1)), 1.0, "closed " + chi_id(F, chi));
          const TruncatedValue t = dual_weight_infty_direct(F, pi, chi, n1, 2);
          a.add(std::abs(t.value), 1.0, "direct " + chi_id(F, chi));
          a.tail = std::max(a.tail, t.tail_bound);
        }
      }
    out.push_back(finish("DWtInfty ramified vanishing", a, tol));
  }
  {  // odd shells of H
    Acc a;
    for (const auto& cd : cases) {
      const int e = cd->L->e(), n0 = cd->c.n0;
      const double sc = cd->H.H.max_abs();
      for (int n = 1; n <= 2 * cd->H.param.n1 - 1; n += 2) {
        if (e == 2 && n == n0 + 1) continue;
        a.add(shell_part(cd->H, n).max_abs(), sc, cd->tag + " shell " + std::to_string(n));
      }
    }
    out.push_back(finish("odd shells of H vanish", a, tol));
  }
  {  // shell selectivity of h~_{2n}^-(|.|^s)
    Acc a1, a2;
    for (const auto& cd : cases) {
      const int e = cd->L->e(), n0 = cd->c.n0;
      const DualWeight& dw = *cd->dw;
      const int nlo = e == 1 ? n0 + 1 : n0 / 2 + 1;
      const int nhi = e == 1 ? 2 * n0 - 1 : n0;
      const int keep = e == 1 ? 2 * n0 - 1 : n0;
      double sc = 0.0;
      for (int n : dw.shells()) sc = std::max(sc, dw.minus_coeffs(n).max_abs());
      for (int n = nlo; n <= nhi; ++n) {
        if (!std::count(dw.shells().begin(), dw.shells().end(), 2 * n)) continue;
        const LaurentPoly fam = dw.minus_family(2 * n);
        for (const auto& [k, c] : fam.terms()) {
          if (n == keep && k == -n) continue;
          (e == 1 ? a1 : a2).add(std::abs(c), sc, cd->tag + " n=" + std::to_string(n) + " X^" + std::to_string(k));
        }
        if (n == keep) (e == 1 ? a1 : a2).add(0.0, sc, cd->tag + " n=" + std::to_string(n));
      }
    }
    out.push_back(finish("e1DNDWt shell selectivity", a1, tol));
    out.push_back(finish("e2DNDWt shell selectivity", a2, tol));
  }
  {  // h~_3^- = 0 for e = 2, n0 = 2
    Acc a;
    for (const auto& cd : cases) {
      if (cd->L->e() != 2 || cd->c.n0 != 2) continue;
      const DualWeight& dw = *cd->dw;
      double sc = 0.0;
      for (int n : dw.shells()) sc = std::max(sc, dw.minus_coeffs(n).max_abs());
      a.add(dw.minus_coeffs(3).max_abs(), sc, cd->tag);
    }
    out.push_back(finish("h2-Bdn0=2 h~_3^- vanishes", a, tol));
  }

  // pieces of the shell decomposition
  Acc b4, b3e2, fb1, fb2, fb3, e2fb1;
  for (const auto& cd : cases) {
    const int e = cd->L->e(), n0 = cd->c.n0;
    const DualWeight& dw = *cd->dw;
    const int a_pi = stability_barrier(F, pi);
    const HDecomposition D = decompose_H(cd->H);
    double sc = 0.0;
    for (int n : dw.shells()) sc = std::max(sc, dw.minus_coeffs(n).max_abs());
    auto piece_coeffs = [&](const HPiece& p) { return negative_coeffs(p.coeff * p.f, pi); };
    auto scan = [&](Acc& acc, const ShellCoefficients& C, const std::function<bool(const MultChar&)>& allowed,
                    const std::string& tag) {
      for (const auto& chi : enumerate_chars(F, std::max(C.level(), 1)))
        if (!allowed(chi)) acc.add(C.max_abs(chi), sc, tag + " " + chi_id(F, chi));
    };
    if (e == 1 && n0 >= 2) {
      const int ta = F.legendre(F.modulus() - 1) == cd->L->eps_L() ? 0 : 1;
      const std::string an = ta == 0 ? "a,1" : "a,eps";
      const std::string tag = "H_" + std::to_string(2 * n0);
      // m <= c(Pi) = 0
      if (const HPiece* p = find_piece(D, tag + "^" + an + "_0"))
        b4.add(piece_coeffs(*p).max_abs(), sc, cd->tag + " " + p->name);
      for (int m = a_pi; m < n0; ++m)
        if (const HPiece* p = find_piece(D, tag + "^" + an + "_" + std::to_string(m))) {
          const bool big = 3 * m > 2 * n0;
          scan(fb2, piece_coeffs(*p), [&](const MultChar& chi) { return big && cond(F, chi) == m; },
               cd->tag + " " + p->name);
        }
      for (const std::string bn : {"^b,1", "^b,eps"})
        if (const HPiece* p = find_piece(D, tag + bn))
          scan(fb3, piece_coeffs(*p), [&](const MultChar& chi) { return cond(F, chi) == n0; },
               cd->tag + " " + p->name);
      for (int n = n0 + 1; n <= 2 * n0 - 1; ++n) {
        if (n < a_pi || !std::count(dw.shells().begin(), dw.shells().end(), 2 * n)) continue;
        scan(fb1, dw.minus_coeffs(2 * n),
             [&](const MultChar& chi) {
               return cond_twist(F, chi, n) == 2 * n0 - n || (n == 2 * n0 - 1 && cond_twist(F, chi, 1) == 0);
             },
             cd->tag + " n=" + std::to_string(n));
      }
    }
    if (e == 2) {
      if (const HPiece* p = find_piece(D, "H_" + std::to_string(n0 + 1) + "_0"))
        b3e2.add(piece_coeffs(*p).max_abs(), sc, cd->tag + " " + p->name);
      for (int n = n0 / 2 + 1; n <= n0; ++n) {
        if (n < a_pi || !std::count(dw.shells().begin(), dw.shells().end(), 2 * n)) continue;
        scan(e2fb1, dw.minus_coeffs(2 * n),
             [&](const MultChar& chi) {
               return cond_twist(F, chi, n + 1) == n0 + 1 - n || (n == n0 && cond_twist(F, chi, 1) == 0);
             },
             cd->tag + " n=" + std::to_string(n));
      }
    }
  }
  out.push_back(finish("e1DWt-FineBd4 a-piece m=0 vanishes", b4, tol));
  out.push_back(finish("e2DWt-FineBd3 piece m=0 vanishes", b3e2, tol));
  out.push_back(finish("e1DWt-FineBd1 conductor indicator", fb1, tol));
  out.push_back(finish("e1DWt-FineBd2 conductor indicator", fb2, tol));
  out.push_back(finish("e1DWt-FineBd3 conductor indicator", fb3, tol));
  out.push_back(finish("e2DWt-FineBd1 conductor indicator", e2fb1, tol));
  {
    Acc a;  // a(Pi) <= m <= n0 / 2 has no solution for n0 <= 3
    for (const auto& cd : cases) {
      if (cd->L->e() != 2) continue;
      const HDecomposition D = decompose_H(cd->H);
      for (int m = stability_barrier(F, pi); 2 * m <= cd->c.n0; ++m)
        if (const HPiece* p = find_piece(D, "H_" + std::to_string(cd->c.n0 + 1) + "_" + std::to_string(m))) {
          const bool big = 3 * m > cd->c.n0 + 1;
          const ShellCoefficients C = negative_coeffs(p->coeff * p->f, pi);
          for (const auto& chi : enumerate_chars(F, std::max(C.level(), 1)))
            if (!(big && cond(F, chi) == m)) a.add(C.max_abs(chi), 1.0, cd->tag + " " + p->name);
        }
    }
    out.push_back(finish("e2DWt-FineBd2 conductor indicator", a, tol));
  }
  return out;
}

std::vector<Verdict> consistency_suite(const FieldModel& F, const std::vector<DualWeightCase>& grid, double tol,
                                       int jobs) {
  const PiData pi = generic_unramified_pi(F);
  const auto cases = build_cases(F, grid, pi, jobs);
  const double q = F.qd();
  std::vector<Verdict> out;

  {  // per shell: transform coefficients against the Laurent expansion, then plus + minus = direct
    Acc shell_acc, total_acc;
    for (const auto& cd : cases) {
      const DualWeight& dw = *cd->dw;
      const auto chars = enumerate_chars(F, dw.max_level());
      struct R {
        double shell = 0.0, total = 0.0, tail = 0.0, scale = 0.0;
      };
      std::vector<R> res;
      parallel_fill(res, chars.size(), jobs, [&](size_t i) {
        R r;
        const MultChar& chi = chars[i];
        for (int n : dw.shells()) {
          const RationalLaurent f = dw.f_n(n, chi);
          const LaurentPoly ex = f.is_zero() ? LaurentPoly() : f.expand(0, dw.vhi());
          for (int v = 0; v <= dw.vhi(); ++v) {
            const cplx c = dw.plain_coeffs(n).coeff(v, chi);
            r.shell = std::max(r.shell, std::abs(c - ex.coeff(v)));
            r.scale = std::max(r.scale, std::abs(c));
          }
          const cplx lp = dw.plus(n, chi);
          const TruncatedValue mn = dw.minus(n, chi);
          const TruncatedValue dr = dw.direct(n, chi);
          r.total = std::max(r.total, std::abs(lp + mn.value - dr.value));
          r.tail = std::max(r.tail, dr.tail_bound);
          r.scale = std::max(r.scale, std::abs(lp));
        }
        return r;
      });
      for (size_t i = 0; i < chars.size(); ++i) {
        shell_acc.add(res[i].shell, res[i].scale, cd->tag + " " + chi_id(F, chars[i]));
        total_acc.add(res[i].total, res[i].scale, cd->tag + " " + chi_id(F, chars[i]));
        total_acc.tail = std::max(total_acc.tail, res[i].tail);
      }
    }
    const std::string top = std::to_string(cases.empty() ? 0 : cases.front()->dw->vhi());
    out.push_back(finish("transform shells 0.." + top + " equal Laurent coefficients of f_n", shell_acc, tol));
    out.push_back(finish("h~_n^+ (Laurent) + h~_n^- (direct) = direct h~_n", total_acc, tol,
                         "direct positive shells beyond " + top + " bounded by the Laurent majorant"));
  }
  {  // K~ closed form against the direct sums
    Acc a, k1;
    for (i64 d = 1; d < F.p(); ++d) {
      for (cplx z : {cplx(1.0), cplx(0.0, 1.0), std::polar(1.0, 0.7)}) {
        const MultChar chi = unramified_char(z);
        const cplx c = k_tilde(F, d, chi, KRoute::closed);
        for (KRoute r : {KRoute::definition, KRoute::triple, KRoute::quadruple})
          a.add(std::abs(k_tilde(F, d, chi, r) - c), std::abs(c), "delta=" + std::to_string(d));
      }
      for (const auto& chi : enumerate_chars(F, 1)) {
        if (cond(F, chi) != 1) continue;
        const cplx ref = k_tilde(F, d, chi, KRoute::definition);
        for (KRoute r : {KRoute::triple, KRoute::quadruple, KRoute::katz})
          k1.add(std::abs(k_tilde(F, d, chi, r) - ref), std::abs(ref),
                 "delta=" + std::to_string(d) + " " + chi_id(F, chi));
      }
    }
    out.push_back(finish("HypGKCond0 closed form equals direct K~", a, tol));
    out.push_back(finish("K~ for conductor 1: definition, triple, quadruple, Katz agree", k1, tol));
  }
  {  // support windows of the total, coefficient-wise in chi(varpi)
    Acc a;
    for (const auto& cd : cases) {
      const DualWeight& dw = *cd->dw;
      const int n0 = cd->c.n0;
      const int thr = cd->L->e() == 1 ? n0 : n0 / 2;
      double sc = 0.0;
      for (int n : dw.shells()) sc = std::max({sc, dw.minus_coeffs(n).max_abs(), dw.plain_coeffs(n).max_abs()});
      for (const auto& chi : enumerate_chars(F, dw.max_level())) {
        if (cond(F, chi) <= thr) continue;
        std::map<int, cplx> C;
        for (int n : dw.shells()) {
          const ShellCoefficients& M = dw.minus_coeffs(n);
          for (int v = M.vlo(); v <= -1; ++v) C[v] += std::pow(q, 0.5 * v) * M.coeff(v, chi);
          const RationalLaurent f = dw.f_n(n, chi);
          if (f.is_zero()) continue;
          if (!f.poles().empty()) throw Error("parameter-out-of-range", "ramified twist with poles");
          for (const auto& [v, c] : plus_part(f).num().terms()) C[v] += std::pow(q, 0.5 * v) * c;
        }
        double m = 0.0;
        for (const auto& [v, c] : C) m = std::max(m, std::abs(c));
        a.add(m, sc, cd->tag + " " + chi_id(F, chi));
      }
    }
    out.push_back(finish("total h~ vanishes above the conductor window", a, tol));
  }
  {  // h~_2^-(|.|^s) lives on X^{-1} for n0 = 1, e = 1
    Acc a;
    for (const auto& cd : cases) {
      if (cd->L->e() != 1 || cd->c.n0 != 1) continue;
      const LaurentPoly fam = cd->dw->minus_family(2);
      const double sc = std::abs(fam.coeff(-1));
      for (const auto& [k, c] : fam.terms())
        if (k != -1) a.add(std::abs(c), sc, cd->tag + " X^" + std::to_string(k));
      if (fam.terms().size() <= 1) a.add(0.0, sc, cd->tag);
    }
    out.push_back(finish("h~_2^-(|.|^s) = q^{-s} h~_2^-(1) for n0 = 1", a, tol,
                         "support on the shell of valuation -1"));
  }
  return out;
}

std::vector<Verdict> taylor_suite(const FieldModel& F, const std::vector<DualWeightCase>& grid, double tol) {
  const PiData pi = generic_unramified_pi(F);
  const double q = F.qd();
  const double h = 1e-4;
  const double fd_tol = 1e-6;
  std::vector<Verdict> out;
  Acc fd, sel, inf;
  for (const auto& c : grid) {
    const auto cd = build_case(F, c, pi);
    const DualWeight& dw = *cd->dw;
    const NormalizedDualWeight N = normalized_dual_weight(dw);
    const int e = cd->L->e();
    const int nstar = 2 * c.n0 / e + e - 1;
    for (double s0 : {0.5, -0.5}) {
      const auto tay = normalized_taylor(N.total, s0, 2, q);
      const auto num = normalized_fd(dw, s0, h);
      for (int k = 0; k <= 2; ++k)
        fd.add(std::abs(tay[static_cast<size_t>(k)] - num[static_cast<size_t>(k)]),
               std::abs(tay[static_cast<size_t>(k)]),
               cd->tag + " s0=" + fmt12(s0) + " k=" + std::to_string(k));
      double sc = 0.0;
      for (const auto& [n, g] : N.plus)
        for (const auto& x : normalized_taylor(g, s0, 2, q)) sc = std::max(sc, std::abs(x));
      for (const auto& [n, g] : N.plus) {
        if (n == nstar) continue;
        for (const auto& x : normalized_taylor(g, s0, 2, q))
          sel.add(std::abs(x), sc, cd->tag + " n=" + std::to_string(n));
      }
    }
    // H~_infty(0; 1/2) = q^{-n1} L(0, Pi~)^{-1}
    cplx Linv = 1.0;
    for (const auto& m : pi.mu) Linv *= 1.0 - 1.0 / m.at_pi;
    const cplx ref = std::pow(q, -dw.n1()) * Linv;
    inf.add(std::abs(normalized_taylor(N.infty, 0.5, 0, q)[0] - ref), std::abs(ref), cd->tag);
  }
  out.push_back(finish("Taylor coefficients k <= 2 at s0 = +-1/2 match central differences", fd, fd_tol,
                       "h = 1e-4"));
  out.push_back(finish("H~_n^+ vanishes unless n = 2 n0 / e + e - 1", sel, tol));
  out.push_back(finish("H~_infty(0; 1/2) = q^{-n1} L(0, Pi~)^{-1}", inf, tol));
  return out;
}

}  // namespace lwl
