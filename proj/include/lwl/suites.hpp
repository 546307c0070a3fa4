// Named verification suites over a configured field, representation and
// orbital parameter, and their text, JSON and CSV reports.
#pragma once

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lwl/dualweight.hpp"

namespace lwl {

// One GL(1) constituent of Pi: a character of level `level` with exponent
// `expo` and value at_pi at varpi.
struct CharSpec {
  int level = 0;
  i64 expo = 0;
  cplx at_pi{1.0, 0.0};
};

struct SuiteConfig {
  // Empty selects the default primes of each suite.
  std::vector<i64> primes;
  int precision = 0;
  double tol = 1e-8;
  std::optional<std::array<CharSpec, 3>> pi;
  // When set, the orbital suites run on this single (L, beta) instead of the grid.
  std::optional<ExtKind> kind;
  std::optional<int> n0;
  std::optional<int> n1;
  bool allow_small_n1 = false;
  int chi_level_max = 3;
  std::vector<std::string> suites;
  std::string format = "json";
  std::string out;
  int jobs = 1;
};

// Reads a JSON config; unknown keys and ill-typed values raise invalid-config.
SuiteConfig config_from_json(const std::string& text);
SuiteConfig load_config(const std::string& path);
// Throws invalid-config when p is not an odd prime, a level or count is out
// of range, or n1 is below the stability bound without allow_small_n1.
void validate_config(const SuiteConfig& c);
// Warnings for accepted but unusual settings (n1 below the bound).
std::vector<std::string> config_warnings(const SuiteConfig& c);

struct SuiteResult {
  std::string name;
  int cases = 0;   // individual comparisons across all checks
  int checks = 0;  // verdicts
  int passes = 0;  // passing verdicts
  double max_residual = 0.0;
  double max_ratio = 0.0;
  double wall_seconds = 0.0;  // text reports only
  bool pass = false;
  std::vector<Verdict> results;
  std::vector<std::string> failures;
  std::vector<std::pair<std::string, double>> tail_ledger;
};

const std::vector<std::string>& suite_catalog();
// A one-line description of each catalog entry.
std::string suite_description(const std::string& name);
// Throws unknown-suite (with the catalog listing) for names outside the catalog.
SuiteResult run_suite(const SuiteConfig& c, const std::string& name);
// The suites of c.suites (all of the catalog when empty) in catalog order.
std::vector<SuiteResult> run_suites(const SuiteConfig& c);

std::string report_json(const SuiteConfig& c, const std::vector<SuiteResult>& rs);
std::string report_csv(const std::vector<SuiteResult>& rs);
std::string report_text(const std::vector<SuiteResult>& rs);
// Parses report_json output back into results (wall times are not stored).
std::vector<SuiteResult> results_from_json(const std::string& text);
// Writes the report in the given format to path, or to stdout when path is empty.
void emit_report(const SuiteConfig& c, const std::vector<SuiteResult>& rs, const std::string& format,
                 const std::string& path);

}  // namespace lwl
