// Suite configuration, registry, report serialization and failure semantics.

#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "test_util.hpp"

using namespace chernlab;

namespace {

SuiteConfig small(std::vector<std::string> checks, std::vector<std::string> mans) {
  SuiteConfig cfg;
  cfg.checks = std::move(checks);
  cfg.manifolds = std::move(mans);
  cfg.samples = 4;
  return cfg;
}

CheckReport sample_report() {
  CheckReport r;
  r.check = "fd_gamma";
  r.manifold = "hopf";
  r.seed = 9;
  r.samples = 3;
  r.max_abs_err = 1.0 / 3.0;
  r.max_rel_err = 2e-7;
  r.tol = 1e-6;
  r.params["grid"] = 32;
  r.note = "quoted \"note\"";
  r.seconds = 0.25;
  r.finalize();
  return r;
}

}  // namespace

TEST(SuiteConfig, Validation) {
  SuiteConfig ok;
  EXPECT_NO_THROW(ok.validate());
  auto bad = ok;
  bad.manifolds.clear();
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = ok;
  bad.dts = {};
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = ok;
  bad.dts = {1e-3, 1e-2};
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = ok;
  bad.dts = {1e-2, -1e-3};
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = ok;
  bad.torus_grid = 48;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = ok;
  bad.samples = 0;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
}

TEST(SuiteConfig, GridSelection) {
  const SuiteConfig cfg;
  EXPECT_EQ(cfg.grid_for(make_manifold("flat_torus_1")), 64);
  EXPECT_EQ(cfg.grid_for(make_manifold("flat_torus_2")), 16);
  EXPECT_EQ(cfg.grid_for(make_manifold("cp1xcp1")), 32);
}

TEST(Registry, NamesAreUniqueAndResolvable) {
  const auto names = check_names();
  EXPECT_GE(names.size(), 25u);
  EXPECT_EQ(std::set<std::string>(names.begin(), names.end()).size(), names.size());
  for (const auto& n : names) EXPECT_EQ(find_check(n).name, n);
  try {
    find_check("nope");
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("valid: rho_roundtrip"), std::string::npos);
  }
}

TEST(Registry, EveryCheckHasATargetAndDescription) {
  for (const auto& c : check_registry()) {
    EXPECT_FALSE(c.description.empty()) << c.name;
    bool any = false;
    for (const auto& m : manifold_names()) any = any || c.applies(make_manifold(m));
    EXPECT_TRUE(any) << c.name;
  }
}

TEST(RunSuite, RejectsUnknownNames) {
  EXPECT_THROW(run_suite(small({"fd_gamma"}, {"klein_bottle"})), std::invalid_argument);
  EXPECT_THROW(run_suite(small({"no_such_check"}, {"hopf"})), std::invalid_argument);
  auto cfg = small({"fd_gamma"}, {"hopf"});
  cfg.tolerances["no_such_check"] = 1.0;
  EXPECT_THROW(run_suite(cfg), std::invalid_argument);
  // hopf_lee applies only to the Hopf surface
  EXPECT_THROW(run_suite(small({"hopf_lee"}, {"cp1"})), std::invalid_argument);
}

TEST(RunSuite, CheckMajorOrderingAndAllExpansion) {
  const auto rs = run_suite(small({"golden_scal", "fd_gamma"}, {"cp1", "hopf"}));
  ASSERT_EQ(rs.size(), 4u);
  EXPECT_EQ(rs[0].check + "/" + rs[0].manifold, "golden_scal/cp1");
  EXPECT_EQ(rs[1].check + "/" + rs[1].manifold, "golden_scal/hopf");
  EXPECT_EQ(rs[2].check + "/" + rs[2].manifold, "fd_gamma/cp1");
  EXPECT_EQ(rs[3].check + "/" + rs[3].manifold, "fd_gamma/hopf");
  EXPECT_EQ(run_suite(small({"fd_gamma"}, {"all"})).size(), manifold_names().size());
}

// Everything except the quadrature-heavy global checks, on the full zoo.
TEST(RunSuite, PointwiseRegistryPasses) {
  const std::set<std::string> heavy{"adjointness",       "witness",       "witness_grid_doubling",
                                    "witness_control",   "determinism"};
  SuiteConfig cfg;
  cfg.samples = 5;
  for (const auto& n : check_names())
    if (!heavy.count(n)) cfg.checks.push_back(n);
  for (const auto& r : run_suite(cfg)) {
    EXPECT_TRUE(r.pass) << r.check << "/" << r.manifold << " abs " << r.max_abs_err << " rel " << r.max_rel_err
                        << " tol " << r.tol << " " << r.note;
    EXPECT_TRUE(r.note.rfind("error:", 0) != 0) << r.note;
  }
}

TEST(RunSuite, ToleranceOverrideIsApplied) {
  auto cfg = small({"fd_gamma"}, {"hopf"});
  cfg.tolerances["fd_gamma"] = 1e-30;
  const auto rs = run_suite(cfg);
  ASSERT_EQ(rs.size(), 1u);
  EXPECT_EQ(rs[0].tol, 1e-30);
  EXPECT_FALSE(rs[0].pass);
}

TEST(RunSuite, RoundoffDominatedStepsFail) {
  auto cfg = small({"fd_gamma", "fd_lee"}, {"hopf", "cp1"});
  cfg.dts = {1e-12};
  for (const auto& r : run_suite(cfg)) {
    // theta stays identically zero along Kahler paths, so FD is exact there
    if (r.check == "fd_lee" && r.manifold == "cp1")
      EXPECT_EQ(r.max_abs_err, 0.0);
    else
      EXPECT_FALSE(r.pass) << r.check << "/" << r.manifold;
  }
}

TEST(RunSuite, SameSeedSameBytesDifferentSeedDifferentBytes) {
  auto cfg = small({"fd_gamma", "fd_second_var", "chern_lapl"}, {"flat_torus_2", "hopf", "cp1xcp1"});
  auto render = [&] {
    std::string s;
    for (const auto& r : run_suite(cfg)) s += to_jsonl(r, false) + "\n";
    return s;
  };
  const auto a = render();
  EXPECT_EQ(a, render());
  cfg.seed = 43;
  EXPECT_NE(a, render());
}

TEST(RunSuite, SeedIsRecorded) {
  auto cfg = small({"fd_gamma"}, {"hopf"});
  cfg.seed = 123456789012345ull;
  EXPECT_EQ(run_suite(cfg)[0].seed, 123456789012345ull);
}

TEST(Report, FinalizeModes) {
  CheckReport r;
  r.tol = 1e-6;
  r.max_abs_err = 1.0;
  r.max_rel_err = 1e-7;
  r.mode = CheckMode::Relative;
  r.finalize();
  EXPECT_TRUE(r.pass);
  r.mode = CheckMode::Absolute;
  r.finalize();
  EXPECT_FALSE(r.pass);
  // negative controls pass when the error is large
  r.mode = CheckMode::Negative;
  r.finalize();
  EXPECT_FALSE(r.pass);
  r.max_rel_err = 1e-3;
  r.finalize();
  EXPECT_TRUE(r.pass);
  // boundary is inclusive for positive modes
  r.mode = CheckMode::Relative;
  r.max_rel_err = 1e-6;
  r.finalize();
  EXPECT_TRUE(r.pass);
  r.max_rel_err = std::nan("");
  r.finalize();
  EXPECT_FALSE(r.pass);
}

TEST(Report, JsonlRoundTrip) {
  const auto r = sample_report();
  const std::string line = to_jsonl(r);
  EXPECT_NE(line.find("\"version\":\"chernlab 1.0.0\""), std::string::npos);
  EXPECT_NE(line.find("\"convention\":"), std::string::npos);
  EXPECT_NE(line.find("\"seconds\":"), std::string::npos);
  EXPECT_EQ(to_jsonl(r, false).find("seconds"), std::string::npos);
  std::istringstream in(line + "\n\n" + line + "\n");
  const auto back = parse_jsonl(in);
  ASSERT_EQ(back.size(), 2u);
  const auto& b = back[0];
  EXPECT_EQ(b.check, r.check);
  EXPECT_EQ(b.manifold, r.manifold);
  EXPECT_EQ(b.seed, r.seed);
  EXPECT_EQ(b.samples, r.samples);
  EXPECT_EQ(b.max_abs_err, r.max_abs_err);  // 17 digits round-trip exactly
  EXPECT_EQ(b.max_rel_err, r.max_rel_err);
  EXPECT_EQ(b.tol, r.tol);
  EXPECT_EQ(b.pass, r.pass);
  EXPECT_EQ(b.note, r.note);
  EXPECT_EQ(b.params.at("grid"), 32);
  EXPECT_EQ(to_jsonl(b), line);
}

TEST(Report, NonFiniteErrorsSerializeAsNull) {
  auto r = sample_report();
  r.max_abs_err = r.max_rel_err = std::nan("");
  r.finalize();
  const auto line = to_jsonl(r);
  EXPECT_NE(line.find("\"max_rel_err\":null"), std::string::npos);
  std::istringstream in(line);
  const auto b = parse_jsonl(in).at(0);
  EXPECT_TRUE(std::isnan(b.max_rel_err));
  EXPECT_FALSE(b.pass);
}

TEST(Report, MalformedLineNamesTheLine) {
  std::istringstream in(to_jsonl(sample_report()) + "\n{not json\n");
  try {
    parse_jsonl(in);
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_EQ(std::string(e.what()).rfind("line 2:", 0), 0u);
  }
}

TEST(Report, CsvAndMarkdown) {
  auto fail = sample_report();
  fail.max_rel_err = 1.0;
  fail.finalize();
  const std::vector<CheckReport> rs{sample_report(), fail};
  std::ostringstream csv, md;
  write_csv(csv, rs);
  write_markdown(md, rs);
  int lines = 0;
  for (char ch : csv.str()) lines += ch == '\n';
  EXPECT_EQ(lines, 3);
  EXPECT_EQ(csv.str().rfind("check,manifold,seed,samples,mode", 0), 0u);
  EXPECT_NE(md.str().find("| fd_gamma | hopf | relative |"), std::string::npos);
  EXPECT_NE(md.str().find("PASS"), std::string::npos);
  EXPECT_NE(md.str().find("FAIL"), std::string::npos);
  EXPECT_FALSE(all_pass(rs));
  EXPECT_TRUE(all_pass({sample_report()}));
}

TEST(Adjointness, RuleMustMatch) {
  const auto s = make_manifold("flat_torus_1");
  EXPECT_THROW(adjointness_test(s, make_manifold("cp1").rule(8), 1, 1), std::invalid_argument);
  EXPECT_THROW(adjointness_test(make_manifold("hopf"), s.rule(8), 1, 1), std::invalid_argument);
}

TEST(Adjointness, FlatTorusSmallGrid) {
  const auto s = make_manifold("flat_torus_1");
  const auto r = adjointness_test(s, s.rule(32), 5, 3);
  EXPECT_LE(r.max_rel_err, 1e-10);
  EXPECT_EQ(r.params.at("grid"), 32);
}
