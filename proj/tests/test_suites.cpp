#include <gtest/gtest.h>

#include <algorithm>

#include "lwl/suites.hpp"

using namespace lwl;

namespace {

SuiteConfig small_config(const std::string& suite) {
  SuiteConfig c;
  c.primes = {5};
  c.suites = {suite};
  return c;
}

std::string error_code(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return "";
}

}  // namespace

TEST(Suites, CatalogHasTwelveEntries) {
  const auto& cat = suite_catalog();
  EXPECT_EQ(cat.size(), 12u);
  EXPECT_NE(std::find(cat.begin(), cat.end(), "jacsrc-envelopes"), cat.end());
  for (const auto& n : cat) EXPECT_FALSE(suite_description(n).empty());
}

TEST(Suites, UnknownSuiteListsCatalog) {
  try {
    run_suite(SuiteConfig{}, "no-such-suite");
    FAIL() << "no error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "unknown-suite");
    EXPECT_NE(std::string(e.what()).find("dualweight-consistency"), std::string::npos);
  }
}

TEST(Suites, ConfigParsingAndValidation) {
  const SuiteConfig c = config_from_json(R"({"p": [5, 7], "tol": 1e-9, "kind": "ramified", "n0": 2, "jobs": 3})");
  EXPECT_EQ(c.primes, (std::vector<i64>{5, 7}));
  EXPECT_EQ(c.tol, 1e-9);
  EXPECT_EQ(*c.kind, ExtKind::ramified);
  EXPECT_EQ(c.jobs, 3);
  EXPECT_NO_THROW(validate_config(c));
  EXPECT_EQ(config_from_json(R"({"p": 5})").primes, (std::vector<i64>{5}));

  EXPECT_EQ(error_code([] { config_from_json(R"({"prime": 5})"); }), "invalid-config");
  EXPECT_EQ(error_code([] { config_from_json(R"({"tol": "small"})"); }), "invalid-config");
  EXPECT_EQ(error_code([] { config_from_json("{"); }), "invalid-config");
  EXPECT_EQ(error_code([] { validate_config(config_from_json(R"({"p": 9})")); }), "invalid-config");
  EXPECT_EQ(error_code([] { validate_config(config_from_json(R"({"p": 2})")); }), "invalid-config");
  EXPECT_EQ(error_code([] { validate_config(config_from_json(R"({"format": "xml"})")); }), "invalid-config");
  EXPECT_EQ(error_code([] { validate_config(config_from_json(R"({"suites": ["nope"]})")); }), "unknown-suite");
}

TEST(Suites, SmallN1NeedsOverride) {
  // split n0 = 2 needs n1 >= 4
  SuiteConfig c = config_from_json(R"({"p": 5, "kind": "split", "n0": 2, "n1": 3})");
  EXPECT_EQ(error_code([&] { validate_config(c); }), "invalid-config");
  c.allow_small_n1 = true;
  EXPECT_NO_THROW(validate_config(c));
  EXPECT_EQ(config_warnings(c).size(), 1u);
}

TEST(Suites, MeasuresPassExactly) {
  const SuiteResult r = run_suite(small_config("measures"), "measures");
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(r.checks, 6);
  EXPECT_LE(r.max_residual, 1e-12);
}

TEST(Suites, DuplicationPassesAtSeven) {
  SuiteConfig c = small_config("appendix");
  c.primes = {7};
  const SuiteResult r = run_suite(c, "appendix");
  ASSERT_EQ(r.results.size(), 3u);
  EXPECT_TRUE(r.results[0].pass);
  EXPECT_LE(r.results[0].max_abs, 1e-9);
}

TEST(Suites, JsonRoundTrip) {
  SuiteConfig c = small_config("jacsrc-envelopes");
  const std::vector<SuiteResult> rs = run_suites(c);
  const std::string j = report_json(c, rs);
  const std::vector<SuiteResult> back = results_from_json(j);
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(back[0].name, "jacsrc-envelopes");
  EXPECT_EQ(back[0].checks, rs[0].checks);
  EXPECT_EQ(report_json(c, back), j);
}

TEST(Suites, CsvHeader) {
  const SuiteConfig c = small_config("measures");
  const std::string csv = report_csv(run_suites(c));
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "suite,check,cases,max_residual,tol,tail_bound,determined,pass,detail");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 7);
}

TEST(Suites, TextShowsTailLedger) {
  const SuiteConfig c = small_config("vh-closed-forms");
  const std::string text = report_text(run_suites(c));
  EXPECT_NE(text.find("tail-bound ledger"), std::string::npos);
  const std::string exact = report_text(run_suites(small_config("measures")));
  EXPECT_EQ(exact.find("tail-bound ledger"), std::string::npos);
}

TEST(Suites, DeterministicAcrossJobs) {
  SuiteConfig c = small_config("jacsrc-envelopes");
  c.suites.push_back("stability");
  c.jobs = 1;
  const std::string a = report_json(c, run_suites(c));
  c.jobs = 4;
  EXPECT_EQ(report_json(c, run_suites(c)), a);
}

TEST(Suites, CatalogOrderIndependentOfRequest) {
  SuiteConfig c = small_config("stability");
  c.suites = {"measures", "stability"};
  const auto rs = run_suites(c);
  ASSERT_EQ(rs.size(), 2u);
  EXPECT_EQ(rs[0].name, "stability");
  EXPECT_EQ(rs[1].name, "measures");
}
