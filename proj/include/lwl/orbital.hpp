// The Bessel orbital test function H attached to (L, beta), its shell Mellin
// coefficients eps_n, the shell decomposition into translated quadratic
// elementary functions, and the L^2 weight proxy.
#pragma once

#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lwl/quadext.hpp"
#include "lwl/schwartz.hpp"

namespace lwl {

// beta on O_L^x with values cached modulo 1 + P_L^{n0}.
class BetaTable {
 public:
  BetaTable(const QuadExtModel& L, const BetaChar& b);
  cplx operator()(const LPoint& z) const;

 private:
  const QuadExtModel* L_;
  BetaChar b_;
  i64 ma_ = 1, mb_ = 1;
  mutable std::vector<cplx> cache_;
  mutable std::vector<char> known_;
};

struct OrbitalParam {
  const QuadExtModel* L = nullptr;
  BetaChar beta;
  int n1 = 2;
  std::array<int, 2> x_choice{0, 0};
};

// Smallest admissible n1: max(2 n0 / e + e - 1, a(Pi), 2).
int default_n1(const QuadExtModel& L, const BetaChar& b, int a_pi = 2);
bool is_regular(const BetaChar& b);

struct TestFunctionH {
  OrbitalParam param;
  // H on [vmin, vmax]; below vmin it continues as E_{>= n1} once vmin <= -2 n1.
  ShellFunction H;
  int shell_lo() const { return -(2 * param.n1 - 1); }
};

// H on [vmin, vmax] (vmin defaults to -2 n1).
TestFunctionH build_H(const OrbitalParam& par, std::optional<int> vmin = std::nullopt, int vmax = 2);

// H(tau y^2) on v(y) = -m with the alpha-domain cut to keep(Tr(x_tau alpha)),
// returned as a one-shell function of x = tau y^2 at the given level.
ShellFunction h_tau_shell(const OrbitalParam& par, int tau_idx, int m, int level,
                          const std::function<bool(i64)>& keep = nullptr);

// closed: the case table with the split cases where one of chi0 chi, chi0^{-1} chi
// is unramified evaluated from the two Gauss integrals; closed_literal: the
// table as displayed, which differs from the shell integral in those cases.
enum class EpsRoute { brute, closed, closed_literal };
cplx eps_n(const TestFunctionH& H, const MultChar& chi, int n, EpsRoute route);
cplx eps_n_closed(const QuadExtModel& L, const BetaChar& b, const MultChar& chi, int n);
cplx eps_n_closed_literal(const QuadExtModel& L, const BetaChar& b, const MultChar& chi, int n);

// One named summand of the shell decomposition of H_c.
struct HPiece {
  std::string name;
  int shell = 0;
  cplx coeff{1.0, 0.0};
  ShellFunction f;
};
struct HDecomposition {
  std::vector<HPiece> pieces;
  // sum of coeff * f over the pieces of each shell, for -(2 n1 - 1) <= v <= vmax
  ShellFunction reassembled;
};
HDecomposition decompose_H(const TestFunctionH& H);

// The L^2 integral of |H|^2 d^x y / |y| by summation (window plus E tail) and
// the closed value available for non-split L.
// closed is zeta_F(1) zeta_L(1)^{-1} q_L^{-(e-1)/2} sum_{n >= n0} vol(L^1 cap (1 + P_L^n));
// closed_literal carries zeta_L(1)^{-2} as displayed.
struct L2Proxy {
  double brute = 0.0;
  std::optional<double> closed;
  std::optional<double> closed_literal;
};
L2Proxy l2_weight_proxy(const TestFunctionH& H);

}  // namespace lwl
