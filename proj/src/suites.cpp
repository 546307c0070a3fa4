#include "lwl/suites.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "lwl/ffsums.hpp"
#include "lwl/orbital.hpp"
#include "lwl/quadext.hpp"
#include "lwl/schwartz.hpp"
#include "lwl/symbolics.hpp"
#include "lwl/voronoi.hpp"

namespace lwl {

namespace {

using ojson = nlohmann::ordered_json;

// Floating-point tolerance for properties that hold exactly.
constexpr double kExactTol = 1e-9;
// Relative tolerance for the closed volume formulas.
constexpr double kMeasureTol = 1e-12;

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

std::string fmt(double x, const char* spec = "%.3g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, x);
  return buf;
}

double round12(double x) { return std::stod(fmt(x, "%.12g")); }

// Worst relative residual r / max(1, scale) and where it occurred.
struct Worst {
  double m = 0.0;
  int n = 0;
  std::string at;
  void add(double r, double scale, const std::string& where) {
    const double x = r / std::max(1.0, scale);
    ++n;
    if (x > m) {
      m = x;
      at = where;
    }
  }
};

// One check: its verdict, the largest bound usage, and truncated intermediates.
struct Out {
  Verdict v;
  double ratio = 0.0;
  std::vector<std::pair<std::string, double>> tails;
};

Out finish(const std::string& name, const Worst& w, double tol, double tail = 0.0, std::string extra = {}) {
  std::string d = std::move(extra);
  if (!w.at.empty()) d += (d.empty() ? "" : "; ") + std::string("worst at ") + w.at;
  if (w.n == 0) d += (d.empty() ? "" : "; ") + std::string("no admissible cases");
  Out o;
  o.v = make_verdict(name, w.n, w.m, tol, tail, d);
  return o;
}

using Task = std::function<Out()>;

std::vector<Out> run_tasks(const std::vector<Task>& tasks, int jobs) {
  std::vector<Out> out;
  parallel_fill(out, tasks.size(), jobs, [&](size_t i) { return tasks[i](); });
  return out;
}

std::vector<i64> primes_or(const SuiteConfig& c, std::vector<i64> d) { return c.primes.empty() ? d : c.primes; }

std::string pstr(i64 p) { return "p=" + std::to_string(p); }

// Field models shared by the tasks of one suite.
struct Fields {
  std::map<i64, std::unique_ptr<FieldModel>> m;
  Fields(const std::vector<i64>& ps, int k, double tol) {
    for (i64 p : ps) m.emplace(p, std::make_unique<FieldModel>(p, k, tol));
  }
  const FieldModel& at(i64 p) const { return *m.at(p); }
};

PiData unram_pi(const FieldModel& F) { return unramified_pi(F, std::polar(1.0, 0.7), std::polar(1.0, -2.1)); }

// xi z1 + xi^{-1} z2 + z3 with xi of conductor 1
PiData one_ramified_pi(const FieldModel& F) {
  cplx z1 = std::polar(1.0, 0.4), z2 = std::polar(1.0, 1.3);
  return make_pi(F, {make_char(F, 1, 1, z1), make_char(F, 1, F.p() - 2, z2), unramified_char(1.0 / (z1 * z2))});
}

PiData pi_from_spec(const FieldModel& F, const std::array<CharSpec, 3>& s) {
  std::array<MultChar, 3> mu;
  for (size_t i = 0; i < 3; ++i) mu[i] = make_char(F, s[i].level, s[i].expo, s[i].at_pi);
  return make_pi(F, mu);
}

std::vector<std::pair<std::string, PiData>> pis(const SuiteConfig& c, const FieldModel& F) {
  if (c.pi) return {{"configured Pi", pi_from_spec(F, *c.pi)}};
  return {{"unramified Pi", unram_pi(F)}, {"Pi with one conductor-1 pair", one_ramified_pi(F)}};
}

bool all_unramified(const FieldModel& F, const PiData& pi) {
  for (const auto& m : pi.mu)
    if (char_reduce(F, m).conductor != 0) return false;
  return true;
}

// max |a - b| over shells lo..hi; shells missing from a window read as 0
double window_diff(const ShellFunction& a, const ShellFunction& b, int lo, int hi) {
  const int level = std::max(a.level(), b.level());
  const ShellFunction x = a.refined(level), y = b.refined(level);
  double m = 0.0;
  for (int v = lo; v <= hi; ++v)
    for (i64 j = 0; j < x.shell_size(); ++j) {
      const cplx s = x.in_window(v) ? x.at_index(v, j) : cplx(0.0);
      const cplx t = y.in_window(v) ? y.at_index(v, j) : cplx(0.0);
      m = std::max(m, std::abs(s - t));
    }
  return m;
}

double window_max(const ShellFunction& a, int lo, int hi) {
  double m = 0.0;
  for (int v = std::max(lo, a.vmin()); v <= std::min(hi, a.vmax()); ++v)
    for (const auto& x : a.shell(v)) m = std::max(m, std::abs(x));
  return m;
}

std::vector<MultChar> quasi_chars(const FieldModel& F, int level) {
  std::vector<MultChar> out;
  int k = 0;
  for (auto c : enumerate_chars(F, level)) {
    c.at_pi = std::polar(1.0 + 0.1 * (k % 3), 0.37 * k);
    out.push_back(c);
    ++k;
  }
  return out;
}

// ------------------------------------------------------------------ orbital grid

struct OrbCase {
  ExtKind kind;
  int n0;
};

std::vector<OrbCase> orbital_grid(const SuiteConfig& c) {
  if (c.kind && c.n0) return {{*c.kind, *c.n0}};
  std::vector<OrbCase> out;
  for (const auto& d : default_dualweight_grid())
    if ((!c.kind || *c.kind == d.kind) && (!c.n0 || *c.n0 == d.n0)) out.push_back({d.kind, d.n0});
  return out;
}

std::string case_tag(i64 p, ExtKind k, int n0) {
  return pstr(p) + " " + kind_name(k) + " n0=" + std::to_string(n0);
}

// (L, beta, n1) for one grid case, owning its QuadExtModel.
struct Orb {
  std::unique_ptr<QuadExtModel> L;
  OrbitalParam par;
  Orb(const FieldModel& F, ExtKind k, int n0, const SuiteConfig& c) : L(std::make_unique<QuadExtModel>(F, k)) {
    par.L = L.get();
    par.beta = default_beta(*L, n0);
    par.n1 = c.n1 ? *c.n1 : default_n1(*L, par.beta);
  }
};

// max |H| on shell v over the square class of tau_unit
double class_max(const ShellFunction& f, int v, i64 tau_unit) {
  const FieldModel& F = f.field();
  const UnitGroup& U = F.units(f.level());
  const i64 jt = U.dlog(posmod(tau_unit, F.pk(f.level())));
  double m = 0.0;
  for (i64 j = 0; j < f.shell_size(); ++j)
    if ((j - jt) % 2 == 0) m = std::max(m, std::abs(f.at_index(v, j)));
  return m;
}

double shell_max(const ShellFunction& f, int v) {
  double m = 0.0;
  for (const auto& x : f.shell(v)) m = std::max(m, std::abs(x));
  return m;
}

// ------------------------------------------------------------------ suites

std::vector<Out> suite_appendix(const SuiteConfig& c) {
  const auto ps = primes_or(c, {5, 7, 11});
  std::vector<Task> tasks;
  for (i64 p : ps) {
    tasks.push_back([p, &c] {
      FiniteField K(p);
      Worst w;
      for (auto r : K.all_chars()) w.add(duplication_residual(K, r), static_cast<double>(p), "rho=" + std::to_string(r.expo));
      return finish("duplication formula for all rho, " + pstr(p), w, c.tol);
    });
    tasks.push_back([p, &c] {
      FiniteField K(p);
      Worst w;
      double corrected = 0.0;
      for (i64 d = 1; d < p; ++d) {
        const cplx lhs = hyperkl_lhs(K, d), k = kl3(K, d);
        w.add(std::abs(lhs - k), std::abs(k), "delta=" + std::to_string(d));
        corrected = std::max(corrected, std::abs(lhs - k + K.chi(K.eta(), -d) * tau(K, K.eta())));
      }
      return finish("hyper-Kloosterman variant equals Kl_3 for all delta, " + pstr(p), w, c.tol, 0.0,
                    "with the term -eta(-delta) tau(eta) the residual is " + fmt(corrected));
    });
    tasks.push_back([p, &c] {
      FiniteField K(p);
      Worst w;
      for (auto c0 : K.all_chars())
        for (auto ch : K.all_chars()) {
          if (K.is_trivial(c0) || K.is_trivial(ch)) continue;
          const cplx s = sum_S(K, c0, ch);
          w.add(std::abs(s - s_from_t(K, c0, ch)), std::abs(s),
                "chi0=" + std::to_string(c0.expo) + " chi=" + std::to_string(ch.expo));
        }
      return finish("S = q^{-1/2} T + [chi0 = eta] term for nontrivial (chi0, chi), " + pstr(p), w, c.tol);
    });
  }
  return run_tasks(tasks, c.jobs);
}

std::vector<Out> suite_mellin_ebois(const SuiteConfig& c) {
  const auto ps = primes_or(c, {5, 7});
  auto F = std::make_shared<Fields>(ps, c.precision, c.tol);
  std::vector<Task> tasks;
  for (i64 p : ps)
    for (int m : {2, 3})
      tasks.push_back([p, m, F, &c] {
        const FieldModel& K = F->at(p);
        const ShellFunction e = elementary_E(K, m);
        Worst w;
        for (int level = 1; level <= c.chi_level_max; ++level)
          for (const auto& chi : quasi_chars(K, level)) {
            cplx expect = 0.0;
            if (chi.conductor == m) {
              const cplx g = eps_half(K, char_inv(chi));
              expect = K.zeta1() * g * g;
            }
            const cplx got = mellin(e, chi).eval(1.0);
            w.add(std::abs(got - expect), std::abs(expect),
                  "level " + std::to_string(level) + " expo " + std::to_string(chi.expo));
          }
        return finish("Mellin of E_" + std::to_string(m) + " equals zeta_F(1) gamma(1/2, chi^{-1})^2 [c(chi) = " +
                          std::to_string(m) + "], " + pstr(p),
                      w, c.tol);
      });
  return run_tasks(tasks, c.jobs);
}

std::vector<Out> suite_stability(const SuiteConfig& c) {
  const auto ps = primes_or(c, {5, 7});
  auto F = std::make_shared<Fields>(ps, c.precision, c.tol);
  std::vector<Task> tasks;
  for (i64 p : ps)
    for (const auto& [label, pi0] : pis(c, F->at(p))) {
      const int a = stability_barrier(F->at(p), pi0);
      for (int m : {a, a + 1})
        tasks.push_back([p, m, F, pi = pi0, lab = label, &c] {
          const FieldModel& K = F->at(p);
          const ShellFunction f = op_m(elementary_E(K, m), trivial_char(), -1.0);
          const ShellFunction vh = vh_transform(f, pi, -m - 2, 2);
          const ShellFunction cf = vh_closed_form(K, VhClosed::E_stable, pi, {m, -m - 2, 2});
          Worst w;
          w.add(window_diff(vh, cf, -m - 2, 2), 1.0, "shells " + std::to_string(-m - 2) + "..2");
          const std::string name = "VH(m_{-1} E_" + std::to_string(m) + ") = psi 1_{shell -" + std::to_string(m) +
                                   "}, " + lab + ", " + pstr(p);
          Out o = finish(name, w, c.tol);
          if (!vh.window_exact()) o.tails.push_back({name + ": transform above shell 2", vh.tail_bound()});
          return o;
        });
    }
  return run_tasks(tasks, c.jobs);
}

std::vector<Out> suite_vh_closed_forms(const SuiteConfig& c) {
  const auto ps = primes_or(c, {5, 7});
  const auto bis_ps = primes_or(c, {5});
  std::set<i64> all(ps.begin(), ps.end());
  all.insert(bis_ps.begin(), bis_ps.end());
  auto F = std::make_shared<Fields>(std::vector<i64>(all.begin(), all.end()), c.precision, c.tol);
  std::vector<Task> tasks;
  for (i64 p : ps)
    for (const auto& [label, pi0] : pis(c, F->at(p)))
      for (int n : {2, 3})
        for (bool isF : {true, false})
          tasks.push_back([p, n, isF, F, pi = pi0, lab = label, &c] {
            const FieldModel& K = F->at(p);
            const ShellFunction f = isF ? qef_F(K, n) : qef_G(K, n);
            const ShellFunction vh = vh_transform(f, pi, -n - 2, 2);
            const ShellFunction cf = vh_closed_form(K, isF ? VhClosed::F_n : VhClosed::G_n, pi, {n, -n - 2, 2});
            Worst w;
            w.add(window_diff(vh, cf, -n - 2, 2), window_max(cf, -n - 2, 2), "shells " + std::to_string(-n - 2) + "..2");
            const std::string name = std::string(isF ? "VH(F_" : "VH(G_") + std::to_string(n) + ") closed form, " +
                                     lab + ", " + pstr(p);
            Out o = finish(name, w, c.tol);
            if (!vh.window_exact()) o.tails.push_back({name + ": transform above shell 2", vh.tail_bound()});
            return o;
          });
  struct Small {
    const char* name;
    VhClosed which;
    bool isF;
    int n;
  };
  static const Small smalls[] = {{"VH(F_0)", VhClosed::F0_unram, true, 0},
                                 {"VH(F_1)", VhClosed::F1_unram_literal, true, 1},
                                 {"VH(G_0)", VhClosed::G0_unram, false, 0},
                                 {"VH(G_1)", VhClosed::G1_unram, false, 1}};
  for (i64 p : bis_ps)
    for (const auto& s : smalls)
      tasks.push_back([p, s, F, &c] {
        const FieldModel& K = F->at(p);
        PiData pi = unram_pi(K);
        if (c.pi && all_unramified(K, pi_from_spec(K, *c.pi))) pi = pi_from_spec(K, *c.pi);
        const ShellFunction f = s.isF ? qef_F(K, s.n) : qef_G(K, s.n);
        const ShellFunction vh = vh_transform(f, pi, -6, 3);
        const ShellFunction cf = vh_closed_form(K, s.which, pi, {0, -6, 3});
        Worst w;
        w.add(window_diff(vh, cf, -6, 3), window_max(cf, -6, 3), "shells -6..3");
        std::string extra;
        if (s.which == VhClosed::F1_unram_literal) {
          const ShellFunction fixed = vh_closed_form(K, VhClosed::F1_unram, pi, {0, -6, 3});
          extra = "with zeta_F(1) on the convolution term the residual is " + fmt(window_diff(vh, fixed, -6, 3));
        }
        const std::string name = std::string(s.name) + " small-index closed form on shells -6..3, unramified Pi, " + pstr(p);
        // values inside the window are exact finite sums
        Out o = finish(name, w, c.tol, 0.0, extra);
        if (!vh.window_exact()) o.tails.push_back({name + ": transform above shell 3", vh.tail_bound()});
        return o;
      });
  return run_tasks(tasks, c.jobs);
}

std::vector<Out> suite_measures(const SuiteConfig& c) {
  const auto ps = primes_or(c, {5, 7});
  auto F = std::make_shared<Fields>(ps, c.precision, c.tol);
  std::vector<Task> tasks;
  for (i64 p : ps)
    for (ExtKind k : {ExtKind::split, ExtKind::unramified, ExtKind::ramified}) {
      tasks.push_back([p, k, F] {
        const QuadExtModel L(F->at(p), k);
        Worst w;
        for (int n = 1; n <= 4; ++n) {
          const i64 brute = torus_count_brute(L, n);
          const TorusCosets T = enumerate_torus(L, n);
          const double w_closed = L.torus_w(n);
          const double vol = L.vol_torus() / static_cast<double>(brute);
          w.add(std::abs(vol - w_closed) / w_closed, 0.0, "n=" + std::to_string(n));
          w.add(static_cast<i64>(T.reps.size()) == brute ? 0.0 : 1.0, 0.0, "representatives n=" + std::to_string(n));
        }
        return finish("vol(L^1 cap (1 + P_L^n)) by enumeration = q^{-floor(n/e)-(e-1)/2}, n <= 4, " + kind_name(k) +
                          ", " + pstr(p),
                      w, kMeasureTol);
      });
      tasks.push_back([p, k, F] {
        const QuadExtModel L(F->at(p), k);
        const double q = F->at(p).qd();
        const double size = k == ExtKind::ramified ? q : q * q;
        const double counted = L.vol_OL() * static_cast<double>(residue_units_brute(L)) / size;
        Worst w;
        w.add(std::abs(L.vol_OL_units() - counted) / counted, 0.0, "unit residues");
        return finish("vol(O_L^x) from residue counts, " + kind_name(k) + ", " + pstr(p), w, kMeasureTol);
      });
    }
  return run_tasks(tasks, c.jobs);
}

std::vector<Out> suite_testfmellin(const SuiteConfig& c) {
  const auto ps = primes_or(c, {5});
  auto F = std::make_shared<Fields>(ps, c.precision, c.tol);
  std::vector<Task> tasks;
  for (i64 p : ps)
    for (const auto& oc : orbital_grid(c))
      for (bool literal : {true, false})
        tasks.push_back([p, oc, literal, F, &c] {
          const FieldModel& K = F->at(p);
          Orb S(K, oc.kind, oc.n0, c);
          const TestFunctionH H = build_H(S.par);
          const int nmax = std::min(2 * S.par.n1, 6);
          Worst w;
          double corrected = 0.0, biggest = 0.0;
          for (int n = 1; n <= nmax; ++n)
            for (int lev = 0; lev <= n / 2 + 1; ++lev)
              for (const auto& chi0 : enumerate_chars(K, lev)) {
                if (chi0.conductor != lev) continue;
                for (cplx at : {cplx(1.0, 0.0), std::polar(1.0, 0.7)}) {
                  if (n > 4 && at != cplx(1.0, 0.0)) continue;
                  MultChar chi = chi0;
                  chi.at_pi = at;
                  const cplx br = eps_n(H, chi, n, EpsRoute::brute);
                  const std::string where =
                      "n=" + std::to_string(n) + " c(chi)=" + std::to_string(lev) + " expo=" + std::to_string(chi.expo);
                  biggest = std::max(biggest, std::abs(br));
                  if (literal) {
                    w.add(std::abs(br - eps_n(H, chi, n, EpsRoute::closed_literal)), std::abs(br), where);
                    corrected = std::max(corrected, std::abs(br - eps_n(H, chi, n, EpsRoute::closed)));
                  } else {
                    w.add(std::max(0.0, std::abs(br) - K.zeta1()), 0.0, where);
                  }
                }
              }
          const std::string tag = case_tag(p, oc.kind, oc.n0);
          if (literal) {
            return finish("eps_n brute = eps_n closed, " + tag, w, c.tol, 0.0,
                          "with the split cases taken from the Gauss integrals the residual is " + fmt(corrected));
          }
          Out o = finish("|eps_n| <= zeta_F(1), " + tag, w, c.tol);
          o.ratio = biggest / K.zeta1();
          return o;
        });
  return run_tasks(tasks, c.jobs);
}

std::vector<Out> suite_asymptotics(const SuiteConfig& c) {
  const auto ps = primes_or(c, {5});
  auto F = std::make_shared<Fields>(ps, c.precision, c.tol);
  std::vector<Task> tasks;
  for (i64 p : ps)
    for (const auto& oc : orbital_grid(c)) {
      const std::string tag = case_tag(p, oc.kind, oc.n0);
      // (1) deep shells are elementary
      tasks.push_back([p, oc, tag, F, &c] {
        const FieldModel& K = F->at(p);
        Orb S(K, oc.kind, oc.n0, c);
        const int e = S.L->e();
        const int lo = -2 * S.par.n1 - 2;
        const TestFunctionH H = build_H(S.par, lo, 0);
        const int top = -4 * oc.n0 / e - 2 * (e - 1);
        Worst w;
        for (int v = lo; v <= top; ++v) {
          if (v % 2 != 0) {
            w.add(class_max(H.H, v, 1) + class_max(H.H, v, K.epsilon()), 0.0, "v=" + std::to_string(v));
            continue;
          }
          const ShellFunction E = elementary_E(K, -v / 2).refined(H.H.level());
          double d = 0.0;
          for (i64 j = 0; j < E.shell_size(); ++j) d = std::max(d, std::abs(E.at_index(v, j) - H.H.at_index(v, j)));
          w.add(d, 0.0, "v=" + std::to_string(v));
        }
        return finish("H = E_{>= 2n0/e+e-1} on v(y) <= -4n0/e-2(e-1), " + tag, w, kExactTol);
      });
      // (2) shallow shells vanish
      tasks.push_back([p, oc, tag, F, &c] {
        const FieldModel& K = F->at(p);
        Orb S(K, oc.kind, oc.n0, c);
        const int e = S.L->e();
        const TestFunctionH H = build_H(S.par, -2 * S.par.n1, 4);
        Worst w;
        for (int v = H.H.vmin(); v <= H.H.vmax(); ++v)
          for (size_t t = 0; t < 2; ++t) {
            const auto tau = S.L->tau_reps()[t];
            if ((v - tau.first) % 2 != 0) continue;
            const int vy2 = v - tau.first;
            if (e * vy2 >= 2 * (2 - oc.n0 - e)) w.add(class_max(H.H, v, tau.second), 0.0, "v=" + std::to_string(v));
          }
        return finish("H(tau y^2) = 0 for v(y) >= (2-n0)/e-1, " + tag, w, kExactTol);
      });
      // (3) the non-trivial class lives on one shell
      tasks.push_back([p, oc, tag, F, &c] {
        const FieldModel& K = F->at(p);
        Orb S(K, oc.kind, oc.n0, c);
        const int e = S.L->e();
        const TestFunctionH H = build_H(S.par, -2 * S.par.n1 - 1, 3);
        const auto tau = S.L->tau_reps()[1];
        const int keep = tau.first + 2 * (e - e * e - oc.n0) / e;
        Worst w;
        for (int v = H.H.vmin(); v <= H.H.vmax(); ++v) {
          if ((v - tau.first) % 2 != 0 || v == keep) continue;
          const double x = oc.kind == ExtKind::ramified ? shell_max(H.H, v) : class_max(H.H, v, tau.second);
          w.add(x, 0.0, "v=" + std::to_string(v));
        }
        return finish("H(tau y^2) = 0 for tau != 1 unless v(y) = 1-e-n0/e, " + tag, w, kExactTol);
      });
      // (4), (5) trace restrictions for tau = 1
      if (oc.n0 < 2) continue;
      tasks.push_back([p, oc, tag, F, &c] {
        const FieldModel& K = F->at(p);
        Orb S(K, oc.kind, oc.n0, c);
        const i64 mod = K.modulus();
        const int n0 = oc.n0;
        auto dev = [&](i64 tr, int sgn) {
          const i64 x = posmod(mulmod(tr, invmod(2 * sgn, mod), mod) - 1, mod);
          return x == 0 ? K.k() : K.valuation(x);
        };
        Worst w;
        std::vector<std::pair<int, std::function<bool(i64)>>> ms;
        if (oc.kind != ExtKind::ramified) {
          for (int m = n0; m <= 2 * n0 - 1; ++m) {
            if (m == 2 * n0 - 1)
              ms.push_back({m, [&, n0](i64 tr) { return dev(tr, 1) >= 2 * (n0 - 1) || dev(tr, -1) >= 2 * (n0 - 1); }});
            else if (m > n0)
              ms.push_back({m, [&, m, n0](i64 tr) { return dev(tr, 1) == 2 * (m - n0) || dev(tr, -1) == 2 * (m - n0); }});
            else
              ms.push_back({m, [&](i64 tr) { return dev(tr, 1) == 0 && dev(tr, -1) == 0; }});
          }
        } else {
          for (int m = n0 / 2 + 1; m <= n0; ++m) {
            if (m == n0)
              ms.push_back({m, [&, n0](i64 tr) { return dev(tr, 1) >= n0 - 1 || dev(tr, -1) >= n0 - 1; }});
            else
              ms.push_back(
                  {m, [&, m, n0](i64 tr) { return dev(tr, 1) == 2 * m - n0 + 1 || dev(tr, -1) == 2 * m - n0 + 1; }});
          }
        }
        for (const auto& [m, keep] : ms) {
          const ShellFunction a = h_tau_shell(S.par, 0, m, m);
          const ShellFunction b = h_tau_shell(S.par, 0, m, m, keep);
          w.add(max_difference(a, b), 0.0, "m=" + std::to_string(m));
        }
        return finish("trace restrictions for tau = 1 leave H unchanged, " + tag, w, kExactTol);
      });
    }
  return run_tasks(tasks, c.jobs);
}

std::vector<Out> suite_l2_proxy(const SuiteConfig& c) {
  const auto ps = primes_or(c, {5});
  auto F = std::make_shared<Fields>(ps, c.precision, c.tol);
  std::vector<Task> tasks;
  for (i64 p : ps)
    for (const auto& oc : orbital_grid(c)) {
      if (oc.kind == ExtKind::split) continue;
      const std::string tag = case_tag(p, oc.kind, oc.n0);
      tasks.push_back([p, oc, tag, F, &c] {
        const FieldModel& K = F->at(p);
        Orb S(K, oc.kind, oc.n0, c);
        const L2Proxy P = l2_weight_proxy(build_H(S.par));
        Worst w;
        w.add(std::abs(P.brute - *P.closed_literal), *P.closed_literal, "closed value " + fmt(*P.closed_literal));
        return finish("L^2 sum of H equals the closed value, " + tag, w, c.tol, 0.0,
                      "brute " + fmt(P.brute, "%.10g") + ", with zeta_L(1)^{-1} the residual is " +
                          fmt(std::abs(P.brute - *P.closed) / std::max(1.0, *P.closed)));
      });
      tasks.push_back([p, oc, tag, F, &c] {
        const FieldModel& K = F->at(p);
        Orb S(K, oc.kind, oc.n0, c);
        const int e = S.L->e();
        const int cpi = 2 * oc.n0 / e + e - 1;
        const double env = 0.25 * std::pow(K.qd(), -(cpi + 1) / 2);
        const L2Proxy P = l2_weight_proxy(build_H(S.par));
        Worst w;
        w.add(std::max(0.0, env - P.brute), 0.0, "proxy " + fmt(P.brute));
        Out o = finish("proxy >= q^{-ceil(c(pi0)/2)}/4, " + tag, w, c.tol);
        o.ratio = env / P.brute;
        return o;
      });
    }
  return run_tasks(tasks, c.jobs);
}

std::vector<DualWeightCase> dw_grid(const SuiteConfig& c) {
  std::vector<DualWeightCase> out;
  for (const auto& oc : orbital_grid(c)) out.push_back({oc.kind, oc.n0, c.n1 ? *c.n1 : 0});
  return out;
}

std::vector<Out> wrap(std::vector<Verdict> vs, const std::string& prefix) {
  std::vector<Out> out;
  for (auto& v : vs) {
    Out o;
    v.name = prefix + v.name;
    o.v = std::move(v);
    if (o.v.tail > 0.0) o.tails.push_back({o.v.name, o.v.tail});
    out.push_back(std::move(o));
  }
  return out;
}

std::vector<Out> suite_dualweight(const SuiteConfig& c, int which) {
  std::vector<Out> out;
  for (i64 p : primes_or(c, {5})) {
    const FieldModel F(p, c.precision, c.tol);
    const auto grid = dw_grid(c);
    std::vector<Verdict> vs;
    if (which == 0) vs = vanishing_suite(F, grid, c.tol, c.jobs);
    if (which == 1) vs = consistency_suite(F, grid, c.tol, c.jobs);
    if (which == 2) vs = taylor_suite(F, grid, c.tol);
    for (auto& o : wrap(std::move(vs), pstr(p) + ": ")) out.push_back(std::move(o));
  }
  return out;
}

std::vector<Out> suite_jacsrc(const SuiteConfig& c) {
  const auto ps = primes_or(c, {5});
  auto F = std::make_shared<Fields>(ps, c.precision, c.tol);
  std::vector<Task> tasks;
  for (i64 p : ps) {
    for (ExtKind k : {ExtKind::split, ExtKind::unramified}) {
      tasks.push_back([p, k, F, &c] {
        const FieldModel& K = F->at(p);
        const QuadExtModel L(K, k);
        const BetaChar b = default_beta(L, 3);
        const double q = K.qd();
        Worst w;
        double ratio = 0.0;
        for (int n : {1, 2})
          for (const auto& chi : enumerate_chars(K, n)) {
            if (char_reduce(K, chi).conductor != n) continue;
            const double env = 2.0 * std::pow(q, -n / 2.0);
            const double v = std::abs(jac_integral(L, b, chi, n, 0, JacMode::inner));
            w.add(std::max(0.0, v - env), 0.0, "n=" + std::to_string(n) + " expo=" + std::to_string(chi.expo));
            ratio = std::max(ratio, v / env);
          }
        Out o = finish("inner Jacobi integral <= 2 q^{-n/2}, n0=3, " + kind_name(k) + ", " + pstr(p), w, c.tol);
        o.ratio = ratio;
        return o;
      });
      tasks.push_back([p, k, F, &c] {
        const FieldModel& K = F->at(p);
        const QuadExtModel L(K, k);
        const BetaChar b = default_beta(L, 3);
        const double q = K.qd();
        Worst w;
        double ratio = 0.0, max_exc = 0.0;
        int n_exc = 0;
        for (const auto& chi : enumerate_chars(K, 3))
          for (int kk : {0, 1}) {
            const bool exc = in_exceptional_set(L, b, chi);
            const double env = exc ? 2.0 / q : 2.0 * std::pow(q, -1.5);
            const double v = std::abs(jac_integral(L, b, chi, 3, kk, JacMode::boundary));
            w.add(std::max(0.0, v - env), 0.0, "k=" + std::to_string(kk) + " expo=" + std::to_string(chi.expo));
            ratio = std::max(ratio, v / env);
            if (exc) {
              ++n_exc;
              max_exc = std::max(max_exc, v);
            }
          }
        Out o = finish("boundary Jacobi integral <= 2 q^{-n0/2} (2 q^{-n0/2+1/2} on E(beta)), n0=3, " + kind_name(k) +
                           ", " + pstr(p),
                       w, c.tol, 0.0,
                       std::to_string(n_exc / 2) + " exceptional characters, largest exceptional value " + fmt(max_exc));
        o.ratio = ratio;
        return o;
      });
    }
    tasks.push_back([p, F, &c] {
      const FieldModel& K = F->at(p);
      const QuadExtModel R(K, ExtKind::ramified);
      const BetaChar b = make_beta_ramified(R, 4, 1, 1);
      const double q = K.qd();
      Worst w;
      double ratio = 0.0;
      for (int n : {1, 2})
        for (const auto& chi : enumerate_chars(K, n)) {
          if (char_reduce(K, chi).conductor != n) continue;
          const double env = 2.0 * std::pow(q, -n / 2.0);
          const double v = std::abs(jac_integral(R, b, chi, n, 0, JacMode::inner));
          w.add(std::max(0.0, v - env), 0.0, "n=" + std::to_string(n) + " expo=" + std::to_string(chi.expo));
          ratio = std::max(ratio, v / env);
        }
      Out o = finish("inner Jacobi integral <= 2 q^{-n/2}, ramified n0=4, " + pstr(p), w, c.tol);
      o.ratio = ratio;
      return o;
    });
  }
  return run_tasks(tasks, c.jobs);
}

struct Entry {
  const char* name;
  const char* description;
  std::function<std::vector<Out>(const SuiteConfig&)> run;
};

const std::vector<Entry>& entries() {
  static const std::vector<Entry> e = {
      {"mellin-ebois", "Mellin transforms of the elementary functions E_m, m = 2, 3", suite_mellin_ebois},
      {"stability", "VH(m_{-1} E_m) at and above the stability barrier", suite_stability},
      {"vh-closed-forms", "closed forms of VH on the quadratic elementary functions", suite_vh_closed_forms},
      {"measures", "norm-one torus volumes and unit volumes", suite_measures},
      {"testfmellin", "shell Mellin coefficients eps_n of H, brute against closed", suite_testfmellin},
      {"asymptotics", "support, stability and trace restrictions of H", suite_asymptotics},
      {"l2-proxy", "L^2 weight proxy against its closed value and envelope", suite_l2_proxy},
      {"dualweight-vanishing", "exact vanishing of the dual weight pieces",
       [](const SuiteConfig& c) { return suite_dualweight(c, 0); }},
      {"dualweight-consistency", "Laurent and direct routes of the dual weight, K~ and support windows",
       [](const SuiteConfig& c) { return suite_dualweight(c, 1); }},
      {"unram-taylor", "Taylor coefficients of the normalized unramified dual weight",
       [](const SuiteConfig& c) { return suite_dualweight(c, 2); }},
      {"appendix", "duplication, hyper-Kloosterman variant and S against T", suite_appendix},
      {"jacsrc-envelopes", "Jacobi-type integrals against the envelope constant 2", suite_jacsrc},
  };
  return e;
}

const Entry& find_entry(const std::string& name) {
  for (const auto& e : entries())
    if (name == e.name) return e;
  std::string list;
  for (const auto& e : entries()) list += std::string(list.empty() ? "" : ", ") + e.name;
  throw Error("unknown-suite", "'" + name + "' is not in the catalog {" + list + "}");
}

void config_error(const std::string& what) { throw Error("invalid-config", what); }

}  // namespace

// ------------------------------------------------------------------ config

SuiteConfig config_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    config_error(std::string("not valid JSON: ") + e.what());
  }
  if (!j.is_object()) config_error("the config must be a JSON object");
  SuiteConfig c;
  static const std::set<std::string> keys = {"p",    "precision",      "tol",           "pi",    "kind",
                                             "n0",   "n1",             "allow_small_n1", "chi_level_max",
                                             "suites", "format",       "out",           "jobs"};
  for (const auto& [k, v] : j.items())
    if (!keys.count(k)) config_error("unknown key '" + k + "'");
  try {
    if (j.contains("p")) {
      if (j["p"].is_array())
        c.primes = j["p"].get<std::vector<i64>>();
      else
        c.primes = {j["p"].get<i64>()};
    }
    if (j.contains("precision")) c.precision = j["precision"].get<int>();
    if (j.contains("tol")) c.tol = j["tol"].get<double>();
    if (j.contains("pi")) {
      const auto& a = j["pi"];
      if (!a.is_array() || a.size() != 3) config_error("pi must list three characters");
      std::array<CharSpec, 3> s;
      for (size_t i = 0; i < 3; ++i) {
        s[i].level = a[i].value("level", 0);
        s[i].expo = a[i].value("expo", i64{0});
        const auto z = a[i].value("at_pi", std::vector<double>{1.0, 0.0});
        if (z.size() != 2) config_error("at_pi must be [re, im]");
        s[i].at_pi = cplx(z[0], z[1]);
      }
      c.pi = s;
    }
    if (j.contains("kind")) {
      try {
        c.kind = kind_from_name(j["kind"].get<std::string>());
      } catch (const Error&) {
        config_error("kind must be split, unramified or ramified");
      }
    }
    if (j.contains("n0")) c.n0 = j["n0"].get<int>();
    if (j.contains("n1")) c.n1 = j["n1"].get<int>();
    if (j.contains("allow_small_n1")) c.allow_small_n1 = j["allow_small_n1"].get<bool>();
    if (j.contains("chi_level_max")) c.chi_level_max = j["chi_level_max"].get<int>();
    if (j.contains("suites")) c.suites = j["suites"].get<std::vector<std::string>>();
    if (j.contains("format")) c.format = j["format"].get<std::string>();
    if (j.contains("out")) c.out = j["out"].get<std::string>();
    if (j.contains("jobs")) c.jobs = j["jobs"].get<int>();
  } catch (const nlohmann::json::exception& e) {
    config_error(std::string("ill-typed value: ") + e.what());
  }
  return c;
}

SuiteConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) config_error("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return config_from_json(ss.str());
}

namespace {

// (case, default n1) for the orbital cases a config touches.
std::vector<std::pair<std::string, int>> n1_bounds(const SuiteConfig& c) {
  std::vector<std::pair<std::string, int>> out;
  for (i64 p : c.primes.empty() ? std::vector<i64>{5} : c.primes) {
    const FieldModel F(p, c.precision, c.tol);
    for (const auto& oc : orbital_grid(c)) {
      const QuadExtModel L(F, oc.kind);
      out.push_back({case_tag(p, oc.kind, oc.n0), default_n1(L, default_beta(L, oc.n0))});
    }
  }
  return out;
}

}  // namespace

void validate_config(const SuiteConfig& c) {
  for (i64 p : c.primes)
    if (p < 3 || p > 1000 || !is_prime(p)) config_error("p = " + std::to_string(p) + " is not an odd prime below 1000");
  if (c.precision < 0 || c.precision > 60) config_error("precision must lie in 0..60");
  if (!(c.tol > 0.0) || !std::isfinite(c.tol)) config_error("tol must be positive");
  if (c.jobs < 1 || c.jobs > 256) config_error("jobs must lie in 1..256");
  if (c.chi_level_max < 1 || c.chi_level_max > 4) config_error("chi_level_max must lie in 1..4");
  if (c.format != "json" && c.format != "csv" && c.format != "text") config_error("format must be json, csv or text");
  if (c.n0 && (*c.n0 < 1 || *c.n0 > 4)) config_error("n0 must lie in 1..4");
  if (c.kind && c.n0 && *c.kind == ExtKind::ramified && *c.n0 % 2 != 0) config_error("ramified n0 must be even");
  if (c.pi) {
    for (const auto& s : *c.pi)
      if (s.level < 0 || s.level > 3) config_error("pi character levels must lie in 0..3");
    cplx prod = 1.0;
    for (const auto& s : *c.pi) prod *= s.at_pi;
    if (std::abs(prod - 1.0) > 1e-9) config_error("pi must have trivial central character at varpi");
  }
  for (const auto& s : c.suites) find_entry(s);
  if (orbital_grid(c).empty()) config_error("kind and n0 select no grid case");
  if (c.n1) {
    if (*c.n1 < 1) config_error("n1 must be positive");
    for (const auto& [tag, lo] : n1_bounds(c))
      if (*c.n1 < lo && !c.allow_small_n1)
        config_error("n1 = " + std::to_string(*c.n1) + " is below the stability bound " + std::to_string(lo) + " for " +
                     tag + " (set allow_small_n1 to override)");
  }
}

std::vector<std::string> config_warnings(const SuiteConfig& c) {
  std::vector<std::string> out;
  if (c.n1)
    for (const auto& [tag, lo] : n1_bounds(c))
      if (*c.n1 < lo)
        out.push_back("n1 = " + std::to_string(*c.n1) + " is below the stability bound " + std::to_string(lo) +
                      " for " + tag);
  return out;
}

// ------------------------------------------------------------------ running

const std::vector<std::string>& suite_catalog() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& e : entries()) v.push_back(e.name);
    return v;
  }();
  return names;
}

std::string suite_description(const std::string& name) { return find_entry(name).description; }

SuiteResult run_suite(const SuiteConfig& c, const std::string& name) {
  const Entry& e = find_entry(name);
  SuiteResult r;
  r.name = name;
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<Out> outs;
  try {
    outs = e.run(c);
  } catch (const Error& err) {
    r.failures.push_back(std::string("error: ") + err.what());
  }
  r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  for (auto& o : outs) {
    r.cases += o.v.cases;
    ++r.checks;
    if (o.v.pass) ++r.passes;
    r.max_residual = std::max(r.max_residual, o.v.max_abs);
    r.max_ratio = std::max(r.max_ratio, o.ratio);
    if (!o.v.pass) {
      std::string why = o.v.determined ? "residual " + fmt(o.v.max_abs) + " > tol " + fmt(o.v.tol)
                                       : "tail bound " + fmt(o.v.tail) + " > tol " + fmt(o.v.tol);
      r.failures.push_back(o.v.name + ": " + why + (o.v.detail.empty() ? "" : " (" + o.v.detail + ")"));
    }
    for (auto& t : o.tails) r.tail_ledger.push_back(std::move(t));
    r.results.push_back(std::move(o.v));
  }
  r.pass = r.failures.empty() && r.checks > 0 && r.passes == r.checks;
  return r;
}

std::vector<SuiteResult> run_suites(const SuiteConfig& c) {
  std::set<std::string> want(c.suites.begin(), c.suites.end());
  for (const auto& s : want) find_entry(s);
  std::vector<SuiteResult> out;
  for (const auto& name : suite_catalog())
    if (want.empty() || want.count(name)) out.push_back(run_suite(c, name));
  return out;
}

// ------------------------------------------------------------------ reports

namespace {

ojson config_json(const SuiteConfig& c) {
  ojson j;
  j["p"] = c.primes;
  j["precision"] = c.precision;
  j["tol"] = round12(c.tol);
  if (c.pi) {
    ojson a = ojson::array();
    for (const auto& s : *c.pi)
      a.push_back({{"level", s.level}, {"expo", s.expo}, {"at_pi", {round12(s.at_pi.real()), round12(s.at_pi.imag())}}});
    j["pi"] = a;
  }
  if (c.kind) j["kind"] = kind_name(*c.kind);
  if (c.n0) j["n0"] = *c.n0;
  if (c.n1) j["n1"] = *c.n1;
  j["allow_small_n1"] = c.allow_small_n1;
  j["chi_level_max"] = c.chi_level_max;
  return j;
}

std::string csv_quote(const std::string& s) {
  std::string o = "\"";
  for (char ch : s) {
    if (ch == '"') o += '"';
    o += ch;
  }
  return o + "\"";
}

}  // namespace

std::string report_json(const SuiteConfig& c, const std::vector<SuiteResult>& rs) {
  ojson j;
  j["config"] = config_json(c);
  bool all = !rs.empty();
  ojson suites = ojson::array();
  for (const auto& r : rs) {
    all = all && r.pass;
    ojson s;
    s["name"] = r.name;
    s["pass"] = r.pass;
    s["cases"] = r.cases;
    s["checks"] = r.checks;
    s["passes"] = r.passes;
    s["max_residual"] = round12(r.max_residual);
    s["max_ratio"] = round12(r.max_ratio);
    ojson res = ojson::array();
    for (const auto& v : r.results)
      res.push_back({{"name", v.name},
                     {"cases", v.cases},
                     {"max_residual", round12(v.max_abs)},
                     {"tol", round12(v.tol)},
                     {"tail_bound", round12(v.tail)},
                     {"determined", v.determined},
                     {"pass", v.pass},
                     {"detail", v.detail}});
    s["results"] = res;
    s["failures"] = r.failures;
    ojson led = ojson::array();
    for (const auto& [k, b] : r.tail_ledger) led.push_back({{"item", k}, {"bound", round12(b)}});
    s["tail_ledger"] = led;
    suites.push_back(s);
  }
  j["pass"] = all;
  j["suites"] = suites;
  return j.dump(2) + "\n";
}

std::vector<SuiteResult> results_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  std::vector<SuiteResult> out;
  for (const auto& s : j.at("suites")) {
    SuiteResult r;
    r.name = s.at("name").get<std::string>();
    r.pass = s.at("pass").get<bool>();
    r.cases = s.at("cases").get<int>();
    r.checks = s.at("checks").get<int>();
    r.passes = s.at("passes").get<int>();
    r.max_residual = s.at("max_residual").get<double>();
    r.max_ratio = s.at("max_ratio").get<double>();
    for (const auto& v : s.at("results")) {
      Verdict x;
      x.name = v.at("name").get<std::string>();
      x.cases = v.at("cases").get<int>();
      x.max_abs = v.at("max_residual").get<double>();
      x.tol = v.at("tol").get<double>();
      x.tail = v.at("tail_bound").get<double>();
      x.determined = v.at("determined").get<bool>();
      x.pass = v.at("pass").get<bool>();
      x.detail = v.at("detail").get<std::string>();
      r.results.push_back(std::move(x));
    }
    r.failures = s.at("failures").get<std::vector<std::string>>();
    for (const auto& t : s.at("tail_ledger"))
      r.tail_ledger.push_back({t.at("item").get<std::string>(), t.at("bound").get<double>()});
    out.push_back(std::move(r));
  }
  return out;
}

std::string report_csv(const std::vector<SuiteResult>& rs) {
  std::string o = "suite,check,cases,max_residual,tol,tail_bound,determined,pass,detail\n";
  for (const auto& r : rs)
    for (const auto& v : r.results)
      o += r.name + "," + csv_quote(v.name) + "," + std::to_string(v.cases) + "," + fmt(v.max_abs, "%.12g") + "," +
           fmt(v.tol, "%.12g") + "," + fmt(v.tail, "%.12g") + "," + (v.determined ? "true" : "false") + "," +
           (v.pass ? "true" : "false") + "," + csv_quote(v.detail) + "\n";
  return o;
}

std::string report_text(const std::vector<SuiteResult>& rs) {
  std::ostringstream o;
  std::vector<std::pair<std::string, double>> ledger;
  for (const auto& r : rs) {
    o << (r.pass ? "PASS " : "FAIL ") << r.name << "  checks " << r.passes << "/" << r.checks << "  cases " << r.cases
      << "  max residual " << fmt(r.max_residual) << "  max ratio " << fmt(r.max_ratio) << "  wall "
      << fmt(r.wall_seconds, "%.2f") << " s\n";
    for (const auto& v : r.results) {
      o << "  " << (v.pass ? "pass " : "FAIL ") << v.name << "  [" << v.cases << " cases, residual " << fmt(v.max_abs)
        << ", tol " << fmt(v.tol);
      if (v.tail > 0.0) o << ", tail " << fmt(v.tail);
      o << "]";
      if (!v.detail.empty()) o << "  " << v.detail;
      o << "\n";
    }
    for (const auto& f : r.failures)
      if (f.rfind("error: ", 0) == 0) o << "  " << f << "\n";
    for (const auto& t : r.tail_ledger) ledger.push_back({r.name + ": " + t.first, t.second});
  }
  if (!ledger.empty()) {
    o << "tail-bound ledger (truncated intermediates):\n";
    for (const auto& [k, b] : ledger) o << "  " << fmt(b) << "  " << k << "\n";
  }
  return o.str();
}

void emit_report(const SuiteConfig& c, const std::vector<SuiteResult>& rs, const std::string& format,
                 const std::string& path) {
  std::string body;
  if (format == "json")
    body = report_json(c, rs);
  else if (format == "csv")
    body = report_csv(rs);
  else if (format == "text")
    body = report_text(rs);
  else
    throw Error("invalid-config", "unknown format '" + format + "'");
  if (path.empty()) {
    std::cout << body;
    return;
  }
  std::ofstream out(path);
  if (!out) throw Error("io-error", "cannot write '" + path + "'");
  out << body;
  if (!out) throw Error("io-error", "write to '" + path + "' failed");
}

}  // namespace lwl
