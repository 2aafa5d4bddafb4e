#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "grushin/runner.hpp"

using namespace grushin;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("grushin_reporting_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

const char* kIdentityYaml = R"(schema_version: 1
space: {gamma: 1.0, m: 1, k: 1}
coefficients:
  family: identity
suites: [identities]
identities:
  ladder_points: 20
  identity_points: 20
  rellich:
    grids: [16, 32, 64]
    min_order: 1.5
    max_final: 0.01
)";

const char* kViolatingYaml = R"(schema_version: 1
coefficients: {family: violating}
expect: fail
suites: [bounds]
)";

}  // namespace

TEST(Config, DefaultsAreTheSchema) {
  const auto c = parse_config({{"schema_version", 1}});
  EXPECT_EQ(c.document, config_schema());
  EXPECT_EQ(c.family, "example");
  ASSERT_EQ(c.suites.size(), 1u);
  EXPECT_EQ(c.suites[0].kind, SuiteKind::identities);
  EXPECT_EQ(c.carleman.parameters, (std::vector<double>{20, 40, 80, 160}));
  EXPECT_FALSE(c.expect_fail);
}

TEST(Config, RejectsSchemaViolations) {
  const std::vector<json> bad{
      json::object(),
      {{"schema_version", 2}},
      {{"schema_version", 1}, {"colour", "red"}},
      {{"schema_version", 1}, {"space", {{"gamma", 1.0}, {"n", 2}}}},
      {{"schema_version", 1}, {"seed", "one"}},
      {{"schema_version", 1}, {"threads", 1.5}},
      {{"schema_version", 1}, {"threads", 0}},
      {{"schema_version", 1}, {"suites", {"identities", "everything"}}},
      {{"schema_version", 1}, {"suites", {"ucp:est1"}}},
      {{"schema_version", 1}, {"suites", {"carleman:{est1,est9}"}}},
      {{"schema_version", 1}, {"suites", json::array()}},
      {{"schema_version", 1}, {"expect", "maybe"}},
      {{"schema_version", 1}, {"coefficients", {{"family", "random"}}}},
      {{"schema_version", 1}, {"space", {{"gamma", -1.0}}}},
      {{"schema_version", 1}, {"ucp", {{"spaces", {{{"gamma", 1.0}, {"m", 1}, {"k", 1}}}}}}},
      {{"schema_version", 1}, {"ucp", {{"sweep_grid", 16}}}},
      {{"schema_version", 1}, {"carleman", {{"f10_q", 2.5}}}},
      {{"schema_version", 1}, {"identities", {{"rellich", {{"grids", {32}}}}}}}};
  for (const auto& j : bad) EXPECT_THROW(parse_config(j), ConfigError) << j.dump();
}

TEST(Config, CarlemanKindListAndOverrides) {
  auto c = parse_config({{"schema_version", 1}, {"suites", {"ucp", "carleman:{est1, har1}"}}, {"seed", 7}});
  ASSERT_EQ(c.suites.size(), 2u);
  EXPECT_EQ(c.suites[1].kinds, (std::vector<CarlemanKind>{CarlemanKind::est1, CarlemanKind::har1}));
  EXPECT_EQ(c.hypothesis_samples.seed, 7u);
  c.override_threads(3);
  EXPECT_EQ(c.ucp.threads, 3);
  EXPECT_EQ(c.document["threads"], 3);
  EXPECT_EQ(selected_suites(c, {SuiteKind::carleman}).size(), 1u);
  // A subcommand whose suites are not declared runs them with the section settings.
  EXPECT_EQ(selected_suites(c, {SuiteKind::identities, SuiteKind::bounds}).size(), 2u);
}

TEST(Config, YamlAndJsonEncodingsAgree) {
  const auto dir = scratch("encodings");
  write(dir / "c.yaml", kIdentityYaml);
  const auto y = load_config((dir / "c.yaml").string());
  write(dir / "c.json", json(read_config_document((dir / "c.yaml").string())).dump());
  const auto j = load_config((dir / "c.json").string());
  EXPECT_EQ(y.document, j.document);
  EXPECT_EQ(y.rellich.grids, (std::vector<int>{16, 32, 64}));
  write(dir / "broken.yaml", "schema_version: 1\nspace: {gamma: [\n");
  EXPECT_THROW(load_config((dir / "broken.yaml").string()), ConfigError);
  write(dir / "dup.yaml", "schema_version: 1\nseed: 1\nseed: 2\n");
  EXPECT_THROW(load_config((dir / "dup.yaml").string()), ConfigError);
}

TEST(Runner, MalformedConfigExitsTwoWithoutReport) {
  const auto dir = scratch("malformed");
  write(dir / "c.yaml", "schema_version: 1\nsuites: [identities]\nunknown_key: 3\n");
  RunOptions o;
  o.config_path = (dir / "c.yaml").string();
  o.out_dir = (dir / "out").string();
  o.quiet = true;
  EXPECT_EQ(run(o).exit_code, 2);
  EXPECT_FALSE(fs::exists(dir / "out"));
  o.config_path = (dir / "missing.yaml").string();
  EXPECT_EQ(run(o).exit_code, 2);
}

TEST(Runner, IdentitySuitePassesAndIsDeterministic) {
  const auto dir = scratch("identity");
  write(dir / "c.yaml", kIdentityYaml);
  RunOptions o;
  o.config_path = (dir / "c.yaml").string();
  o.quiet = true;
  o.out_dir = (dir / "a").string();
  const auto a = run(o);
  o.out_dir = (dir / "b").string();
  o.threads = 2;
  const auto b = run(o);
  EXPECT_EQ(a.exit_code, 0);
  EXPECT_EQ(a.report.count(Verdict::fail), 0u);

  const json doc = json::parse(slurp(dir / "a" / "report.json"));
  EXPECT_EQ(doc["schema_version"], kReportSchemaVersion);
  for (const char* k : {"environment", "config", "summary", "records", "regression", "timing"}) EXPECT_TRUE(doc.contains(k)) << k;
  EXPECT_EQ(doc["config"]["coefficients"]["family"], "identity");
  for (const auto& r : doc["records"]) EXPECT_TRUE(anchor_registered(r["anchor"].get<std::string>())) << r["name"];

  EXPECT_EQ(a.report.records_json(), b.report.records_json());
  const std::string csv = slurp(dir / "a" / "rellich.csv");
  EXPECT_EQ(csv, slurp(dir / "b" / "rellich.csv"));
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "family,function,log_factor,n_z,residual,residual_error,scale");
  EXPECT_EQ(csv.back(), '\n');
  EXPECT_EQ(csv.find('\r'), std::string::npos);
  EXPECT_NE(slurp(dir / "a" / "plots.gp").find("rellich.csv"), std::string::npos);
}

TEST(Runner, ViolatingFamilyFollowsTheExpectationFlag) {
  const auto dir = scratch("violating");
  write(dir / "fail.yaml", kViolatingYaml);
  write(dir / "pass.yaml", std::string(kViolatingYaml).replace(std::string(kViolatingYaml).find("fail"), 4, "pass"));
  RunOptions o;
  o.quiet = true;
  o.out_dir = (dir / "out").string();
  o.config_path = (dir / "fail.yaml").string();
  const auto r = run(o);
  EXPECT_EQ(r.exit_code, 0);
  const auto* rec = r.report.find("hypothesis.minimal_Lambda");
  ASSERT_NE(rec, nullptr);
  EXPECT_EQ(rec->verdict, Verdict::fail);
  EXPECT_GT(r.report.find("hypothesis.b_upper_left")->values["worst_ratio"].get<double>(), 5.0);
  o.config_path = (dir / "pass.yaml").string();
  EXPECT_EQ(run(o).exit_code, 1);
}

TEST(Runner, SuiteFailureGivesExitOneWithPartialReport) {
  const auto dir = scratch("runtime");
  write(dir / "c.yaml", R"(schema_version: 1
suites: [bounds, ucp]
bounds: {hypothesis_points: 200, cloud: 200, crosscheck_points: 10}
ucp:
  spaces: [{gamma: 1.0, m: 1, k: 1, grids: [9, 17]}]
  sublinear_grid: 17
  sweep_grid: 17
  max_iter: 1
)");
  RunOptions o;
  o.quiet = true;
  o.config_path = (dir / "c.yaml").string();
  o.out_dir = (dir / "out").string();
  const auto r = run(o);
  EXPECT_EQ(r.exit_code, 1);
  const auto* e = r.report.find("suite.ucp");
  ASSERT_NE(e, nullptr);
  EXPECT_EQ(e->verdict, Verdict::fail);
  EXPECT_NE(r.report.find("hypothesis.minimal_Lambda"), nullptr);
  EXPECT_TRUE(json::parse(slurp(dir / "out" / "report.json"))["summary"]["runtime_error"].get<bool>());
}

TEST(Baselines, WriteCompareAndDrift) {
  VerificationReport rep;
  rep.regression["a"] = {2.0, 0.1};
  rep.regression["b"] = {0.0, 0.1};
  BaselineStore store;
  auto first = emit_baselines(rep, store);
  EXPECT_EQ(store.entries.size(), 2u);
  for (const auto& r : first.records) EXPECT_EQ(r.verdict, Verdict::diagnostic);

  auto again = emit_baselines(rep, store);
  for (const auto& r : again.records) {
    EXPECT_EQ(r.verdict, Verdict::pass);
    EXPECT_EQ(r.values["drift"], 0.0);
  }

  rep.regression["a"].value = 2.1;  // 5%: within tolerance
  EXPECT_TRUE(emit_baselines(rep, store).passed());
  rep.regression["a"].value = 2.5;
  const auto drifted = emit_baselines(rep, store);
  EXPECT_EQ(drifted.find("baseline.a")->verdict, Verdict::fail);
  EXPECT_EQ(store.find("a")->value, 2.0);
  const auto updated = emit_baselines(rep, store, true);
  EXPECT_EQ(updated.find("baseline.a")->verdict, Verdict::diagnostic);
  EXPECT_EQ(store.find("a")->value, 2.5);
}

TEST(Baselines, RoundTripAndCorruption) {
  const auto dir = scratch("store");
  BaselineStore s;
  s.entries["x.y"] = {0.1234567890123456789, 0.05};
  s.save((dir / "s.json").string());
  const auto t = BaselineStore::load((dir / "s.json").string());
  EXPECT_EQ(t.find("x.y")->value, s.find("x.y")->value);
  EXPECT_TRUE(BaselineStore::load((dir / "none.json").string()).entries.empty());
  write(dir / "bad.json", "{\"schema_version\": 1, \"entries\": {\"x\": {\"value\": \"nan\"}}}");
  EXPECT_THROW(BaselineStore::load((dir / "bad.json").string()), BaselineError);
  write(dir / "trunc.json", "{\"schema_version\": 1, \"entr");
  EXPECT_THROW(BaselineStore::load((dir / "trunc.json").string()), BaselineError);
  write(dir / "v2.json", "{\"schema_version\": 2, \"entries\": {}}");
  EXPECT_THROW(BaselineStore::load((dir / "v2.json").string()), BaselineError);
}

TEST(Baselines, RunnerWritesThenComparesTheStore) {
  const auto dir = scratch("runner_store");
  write(dir / "c.yaml", std::string(kIdentityYaml) + "output: {baseline: store.json}\n");
  RunOptions o;
  o.quiet = true;
  o.config_path = (dir / "c.yaml").string();
  o.out_dir = (dir / "out").string();
  EXPECT_EQ(run(o).exit_code, 0);
  ASSERT_TRUE(fs::exists(dir / "store.json"));
  const auto again = run(o);
  EXPECT_EQ(again.exit_code, 0);
  const auto* r = again.report.find("baseline.scaling.gamma1_m1_k1.psi_mass_unit_ball");
  ASSERT_NE(r, nullptr);
  EXPECT_EQ(r->verdict, Verdict::pass);
  EXPECT_EQ(r->values["drift"], 0.0);
}
