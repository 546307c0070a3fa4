// lwl: run verification suites, list the catalog, evaluate single sums.
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "lwl/ffsums.hpp"
#include "lwl/suites.hpp"

using namespace lwl;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitConfig = 2;

std::string fmt12(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

i64 to_int(const std::string& s) {
  try {
    size_t pos = 0;
    const long long v = std::stoll(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error("invalid-config", "'" + s + "' is not an integer");
  }
}

// Arguments per sum:
//   tau   rho            (exponent against the fixed generator)
//   kl3   delta
//   katzH t a1 .. an / b1 .. bm
//   T, S  chi0 chi
cplx eval_sum(const std::string& sum, i64 p, const std::vector<std::string>& args) {
  if (p < 3 || !is_prime(p)) throw Error("invalid-config", "p must be an odd prime");
  const FiniteField K(p);
  auto need = [&](size_t n) {
    if (args.size() != n)
      throw Error("invalid-config", sum + " takes " + std::to_string(n) + " argument" + (n == 1 ? "" : "s"));
  };
  if (sum == "tau") {
    need(1);
    return tau(K, FqChar{to_int(args[0])});
  }
  if (sum == "kl3") {
    need(1);
    const i64 d = to_int(args[0]);
    if (posmod(d, p) == 0) throw Error("invalid-config", "delta must be nonzero mod p");
    return kl3(K, d);
  }
  if (sum == "T" || sum == "S") {
    need(2);
    const FqChar c0{to_int(args[0])}, c{to_int(args[1])};
    return sum == "T" ? sum_T(K, c0, c) : sum_S(K, c0, c);
  }
  if (sum == "katzH") {
    if (args.empty()) throw Error("invalid-config", "katzH takes t, the A exponents, '/', and the B exponents");
    const i64 t = to_int(args[0]);
    if (posmod(t, p) == 0) throw Error("invalid-config", "t must be nonzero mod p");
    std::vector<FqChar> A, B;
    bool second = false;
    for (size_t i = 1; i < args.size(); ++i) {
      if (args[i] == "/") {
        second = true;
        continue;
      }
      (second ? B : A).push_back(FqChar{to_int(args[i])});
    }
    return katz_H(K, t, A, B);
  }
  throw Error("invalid-config", "unknown sum '" + sum + "' (tau, kl3, katzH, T, S)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lwl: verification suites for the local dual weight computations"};
  app.require_subcommand(1);

  std::string config_path, format, out;
  std::vector<std::string> suites;
  i64 p_flag = 0;
  int precision = -1, jobs = 0;
  double tol = 0.0;
  auto* run = app.add_subcommand("run", "run verification suites");
  run->add_option("--config", config_path, "JSON config file");
  run->add_option("--suite", suites, "suite name (repeatable)")->take_all();
  run->add_option("--p", p_flag, "prime p (replaces the config primes)");
  run->add_option("--precision", precision, "p-adic precision k (0 selects the largest)");
  run->add_option("--tol", tol, "tolerance");
  run->add_option("--format", format, "json, csv or text");
  run->add_option("--out", out, "output path (stdout when omitted)");
  run->add_option("--jobs", jobs, "worker threads");

  auto* list = app.add_subcommand("list-suites", "list the suite catalog");

  std::string sum;
  i64 eval_p = 7;
  std::vector<std::string> eval_args;
  std::string eval_format = "text";
  auto* eval = app.add_subcommand("eval", "evaluate one finite-field sum");
  eval->add_option("--sum", sum, "tau, kl3, katzH, T or S")->required();
  eval->add_option("--p", eval_p, "prime p");
  eval->add_option("--args", eval_args, "arguments of the sum")->allow_extra_args();
  eval->add_option("--format", eval_format, "text or json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitPass : kExitConfig;
  }

  if (*list) {
    for (const auto& name : suite_catalog()) std::cout << name << "  " << suite_description(name) << "\n";
    return kExitPass;
  }

  if (*eval) {
    try {
      const cplx v = eval_sum(sum, eval_p, eval_args);
      if (eval_format == "json") {
        nlohmann::ordered_json j;
        j["sum"] = sum;
        j["p"] = eval_p;
        j["args"] = eval_args;
        j["re"] = std::stod(fmt12(v.real()));
        j["im"] = std::stod(fmt12(v.imag()));
        std::cout << j.dump() << "\n";
      } else {
        std::cout << fmt12(v.real()) << " " << fmt12(v.imag()) << "\n";
      }
      return kExitPass;
    } catch (const Error& e) {
      std::cerr << "lwl: " << e.what() << "\n";
      return kExitConfig;
    }
  }

  SuiteConfig cfg;
  try {
    if (!config_path.empty()) cfg = load_config(config_path);
    if (!suites.empty()) cfg.suites = suites;
    if (p_flag != 0) cfg.primes = {p_flag};
    if (precision >= 0) cfg.precision = precision;
    if (tol != 0.0) cfg.tol = tol;
    if (!format.empty()) cfg.format = format;
    if (!out.empty()) cfg.out = out;
    if (jobs != 0) cfg.jobs = jobs;
    validate_config(cfg);
  } catch (const Error& e) {
    std::cerr << "lwl: " << e.what() << "\n";
    return kExitConfig;
  }
  for (const auto& w : config_warnings(cfg)) std::cerr << "lwl: warning: " << w << "\n";

  try {
    const std::vector<SuiteResult> rs = run_suites(cfg);
    emit_report(cfg, rs, cfg.format, cfg.out);
    for (const auto& r : rs)
      if (!r.pass) return kExitFail;
    return kExitPass;
  } catch (const Error& e) {
    std::cerr << "lwl: " << e.what() << "\n";
    return kExitConfig;
  }
}
