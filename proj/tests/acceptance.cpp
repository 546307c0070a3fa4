// Acceptance run: one PASS/FAIL line per criterion.
#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "CLI11.hpp"
#include "lwl/suites.hpp"

using namespace lwl;

namespace {

// Pinned tolerance for every criterion with a residual.
constexpr double kTol = 1e-8;

struct Criterion {
  int id;
  const char* title;
  const char* suite;
  double budget_seconds;  // CPU seconds
};

const Criterion kCriteria[] = {
    {1, "appendix identities at p in {5, 7, 11}", "appendix", 60},
    {2, "Mellin transforms of E_2, E_3", "mellin-ebois", 30},
    {3, "stability barrier transforms", "stability", 30},
    {4, "closed forms of VH on quadratic elementary functions", "vh-closed-forms", 60},
    {5, "torus volumes", "measures", 5},
    {6, "shell Mellin coefficients of H", "testfmellin", 120},
    {7, "support, stability and trace restrictions of H", "asymptotics", 60},
    {8, "L^2 weight proxy", "l2-proxy", 10},
    {9, "exact vanishing of dual weight pieces", "dualweight-vanishing", 300},
    {10, "dual weight consistency", "dualweight-consistency", 300},
    {11, "unramified Taylor coefficients", "unram-taylor", 60},
};

std::string fmt(double x, const char* spec = "%.3g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, x);
  return buf;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string shell_quote(const std::string& s) {
  std::string o = "'";
  for (char c : s) {
    if (c == '\'')
      o += "'\\''";
    else
      o += c;
  }
  return o + "'";
}

// The distinct tolerances used by the checks of a suite.
std::string tolerances(const SuiteResult& r) {
  std::vector<double> ts;
  for (const auto& v : r.results)
    if (std::find(ts.begin(), ts.end(), v.tol) == ts.end()) ts.push_back(v.tol);
  std::sort(ts.begin(), ts.end());
  std::string o;
  for (double t : ts) o += (o.empty() ? "" : "/") + fmt(t);
  return o.empty() ? fmt(kTol) : o;
}

// Exit status of `lwl run` with the given jobs, writing JSON to out.
int run_cli(const std::string& config, int jobs, const std::string& out) {
  const std::string cmd = shell_quote(LWL_CLI_PATH) + " run --config " + shell_quote(config) + " --tol " +
                          fmt(kTol, "%.17g") + " --format json --jobs " + std::to_string(jobs) + " --out " +
                          shell_quote(out) + " 2>/dev/null";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::string config_path;
  app.add_option("--config", config_path, "JSON config")->required();
  CLI11_PARSE(app, argc, argv);

  SuiteConfig cfg;
  try {
    cfg = load_config(config_path);
    cfg.tol = kTol;
    validate_config(cfg);
  } catch (const Error& e) {
    std::cerr << "acceptance: " << e.what() << "\n";
    return 2;
  }

  int failed = 0;
  for (const auto& c : kCriteria) {
    const std::clock_t t0 = std::clock();
    const SuiteResult r = run_suite(cfg, c.suite);
    const double cpu = static_cast<double>(std::clock() - t0) / CLOCKS_PER_SEC;
    const bool ok = r.pass && cpu <= c.budget_seconds;
    if (!ok) ++failed;
    std::cout << (ok ? "PASS" : "FAIL") << "  criterion " << c.id << ": " << c.title << "  [" << c.suite << ", checks "
              << r.passes << "/" << r.checks << ", cases " << r.cases << ", max residual " << fmt(r.max_residual)
              << ", tol " << tolerances(r) << ", cpu " << fmt(cpu, "%.1f") << " s of " << fmt(c.budget_seconds, "%.0f")
              << " s]" << std::endl;
    for (const auto& f : r.failures) std::cout << "      failed check: " << f << std::endl;
    if (cpu > c.budget_seconds) std::cout << "      over the CPU budget" << std::endl;
  }

  {  // criterion 12: lwl run with --jobs 1 and --jobs 8 gives byte-identical JSON
    const auto dir = std::filesystem::temp_directory_path();
    const std::string tag = std::to_string(static_cast<long long>(std::time(nullptr)));
    const std::string a = (dir / ("lwl_accept_j1_" + tag + ".json")).string();
    const std::string b = (dir / ("lwl_accept_j8_" + tag + ".json")).string();
    const int ra = run_cli(config_path, 1, a);
    const int rb = run_cli(config_path, 8, b);
    const std::string ja = slurp(a), jb = slurp(b);
    const bool ran = (ra == 0 || ra == 1) && (rb == 0 || rb == 1) && !ja.empty();
    const bool ok = ran && ja == jb;
    if (!ok) ++failed;
    std::cout << (ok ? "PASS" : "FAIL") << "  criterion 12: lwl run is deterministic across --jobs 1 and --jobs 8  ["
              << ja.size() << " and " << jb.size() << " bytes, exit codes " << ra << " and " << rb << "]" << std::endl;
    std::filesystem::remove(a);
    std::filesystem::remove(b);
  }

  std::cout << (12 - failed) << " of 12 criteria pass" << std::endl;
  return failed == 0 ? 0 : 1;
}
