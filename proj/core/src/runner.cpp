#include "grushin/runner.hpp"

#include <Eigen/Core>
#include <boost/version.hpp>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>

#include "grushin/bounds.hpp"
#include "grushin/test_functions.hpp"

#ifndef GRUSHIN_VERSION
#define GRUSHIN_VERSION "unknown"
#endif

namespace grushin {

namespace fs = std::filesystem;

namespace {

std::string tag(const GrushinSpace& s) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "gamma%g_m%d_k%d", s.gamma(), s.m(), s.k());
  return buf;
}

std::string resolve(const ExperimentConfig& cfg, const std::string& p) {
  if (p.empty() || fs::path(p).is_absolute()) return p;
  return (fs::path(cfg.base_dir) / p).lexically_normal().string();
}

VerificationReport identities_suite(const ExperimentConfig& cfg) {
  VerificationReport rep;
  for (const auto& s : cfg.ladder_spaces) rep.merge(derivative_ladder(s, cfg.ladder));
  const CoefficientPtr A = cfg.coefficients(cfg.space);
  rep.merge(exact_identities(*A, cfg.identities));
  std::vector<CoefficientPtr> families{std::make_shared<IdentityCoefficients>(cfg.space)};
  if (cfg.family != "identity") families.push_back(A);
  rep.merge(rellich_suite(families, cfg.rellich));
  rep.merge(psi_mass_scaling(cfg.space, cfg.scaling));
  return rep;
}

VerificationReport bounds_suite(const ExperimentConfig& cfg) {
  const CoefficientPtr A = cfg.coefficients(cfg.space);
  VerificationReport rep = hypothesis_check(*A, cfg.space, cfg.hypothesis_samples);
  const std::string prefix = A->name() + "." + tag(cfg.space) + ".";
  if (!rep.passed()) {
    // The structural consequences presuppose the hypothesis.
    CheckRecord r;
    r.name = "bounds.skipped";
    r.anchor = anchors::bound_suite;
    r.verdict = Verdict::diagnostic;
    r.note = "hypothesis check failed for " + A->name();
    rep.add(r);
    return rep;
  }
  VerificationReport b = structural_bound_suite(*A, cfg.bounds);
  for (const auto& r : b.records)
    if (r.values.contains("sup_ratio_full"))
      b.regression["bounds." + prefix + r.name.substr(r.name.find('.') + 1)] = {r.values["sup_ratio_full"].get<double>(),
                                                                                  cfg.bounds.growth_tolerance};
  rep.merge(b);
  return rep;
}

std::string carleman_key(const ExperimentConfig& cfg, const std::string& kind) {
  return "carleman." + cfg.family + "." + tag(cfg.space) + "." + kind + ".constant";
}

VerificationReport carleman_run(const ExperimentConfig& cfg, const SuiteSelection& sel, const BaselineStore& store) {
  CarlemanSuiteOptions opt = cfg.carleman;
  if (!sel.kinds.empty()) opt.kinds = sel.kinds;
  for (CarlemanKind k : opt.kinds)
    if (const RegressionValue* v = store.find(carleman_key(cfg, to_string(k)))) opt.archived[to_string(k)] = v->value;
  const DegenerateOperator op(cfg.coefficients(cfg.space));
  CarlemanSuiteResult res = carleman_suite(op, standard_suite(cfg.space, opt.settings.R), opt);
  for (const auto& [kind, C] : res.constants)
    res.report.regression[carleman_key(cfg, kind)] = {C, opt.reproduce_tolerance};
  return std::move(res.report);
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

nlohmann::json environment() {
  return {{"version", GRUSHIN_VERSION},
          {"compiler", __VERSION__},
          {"cxx_standard", long(__cplusplus)},
          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                        std::to_string(EIGEN_MINOR_VERSION)},
          {"boost", std::to_string(BOOST_VERSION / 100000) + "." + std::to_string(BOOST_VERSION / 100 % 1000)},
          {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." + std::to_string(NLOHMANN_JSON_VERSION_MINOR)}};
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
  if (!out) throw Error("cannot write " + p.string());
}

}  // namespace

std::vector<SuiteSelection> selected_suites(const ExperimentConfig& cfg, const std::vector<SuiteKind>& only) {
  if (only.empty()) return cfg.suites;
  std::vector<SuiteSelection> out;
  for (const auto& s : cfg.suites)
    if (std::find(only.begin(), only.end(), s.kind) != only.end()) out.push_back(s);
  if (out.empty())
    for (SuiteKind k : only) out.push_back({k, {}});
  return out;
}

VerificationReport run_suite(const ExperimentConfig& cfg, const SuiteSelection& sel, const BaselineStore& store) {
  switch (sel.kind) {
    case SuiteKind::identities: return identities_suite(cfg);
    case SuiteKind::bounds: return bounds_suite(cfg);
    case SuiteKind::carleman: return carleman_run(cfg, sel, store);
    case SuiteKind::ucp: return ucp_experiments([&cfg](const GrushinSpace& s) { return cfg.coefficients(s); }, cfg.ucp);
  }
  return {};
}

nlohmann::json report_document(const ExperimentConfig& cfg, const VerificationReport& rep,
                               const std::vector<SuiteSelection>& suites, double wall_seconds,
                               const std::vector<double>& suite_seconds) {
  nlohmann::json j;
  j["schema_version"] = kReportSchemaVersion;
  j["environment"] = environment();
  j["config"] = cfg.document;
  auto names = nlohmann::json::array();
  for (const auto& s : suites) {
    std::string n = to_string(s.kind);
    if (!s.kinds.empty()) {
      n += ":";
      for (std::size_t i = 0; i < s.kinds.size(); ++i) n += (i ? "," : "") + std::string(to_string(s.kinds[i]));
    }
    names.push_back(n);
  }
  j["suites"] = names;
  const bool failed = rep.count(Verdict::fail) > 0;
  j["summary"] = {{"pass", rep.count(Verdict::pass)},
                  {"fail", rep.count(Verdict::fail)},
                  {"diagnostic", rep.count(Verdict::diagnostic)},
                  {"expect", cfg.expect_fail ? "fail" : "pass"},
                  {"as_expected", failed == cfg.expect_fail}};
  j["records"] = rep.records_json();
  auto reg = nlohmann::json::object();
  for (const auto& [k, v] : rep.regression) reg[k] = {{"value", v.value}, {"tolerance", v.tolerance}};
  j["regression"] = reg;
  auto tables = nlohmann::json::array();
  for (const auto& [k, t] : rep.tables) tables.push_back(k + ".csv");
  j["tables"] = tables;
  j["timing"] = {{"generated_at", utc_now()}, {"wall_clock_seconds", wall_seconds}, {"suite_seconds", suite_seconds}};
  return j;
}

std::string gnuplot_script(const VerificationReport& rep) {
  std::string g =
      "# gnuplot -p plots.gp\n"
      "set datafile separator ','\n"
      "set key autotitle columnhead\n"
      "set grid\n";
  auto has = [&](const char* t) { return rep.tables.count(t) > 0; };
  if (has("carleman")) {
    const auto& t = rep.tables.at("carleman");
    std::set<int> kinds;
    for (const auto& r : t.rows) kinds.insert(int(r[0]));
    for (int k : kinds) {
      const std::string name = to_string(CarlemanKind(k));
      g += "\nset title 'LHS/RHS against the weight parameter, " + name + "'\n";
      g += "set logscale xy\nset xlabel 'parameter'\nset ylabel 'ratio'\n";
      g += "plot 'carleman.csv' using 2:($1==" + std::to_string(k) + " ? $8 : 1/0):3 with points palette notitle\n";
      g += "pause -1\n";
    }
  }
  if (has("rellich")) {
    g += "\nset title 'Rellich residual under grid refinement'\n";
    g += "set logscale xy\nset xlabel 'n_z'\nset ylabel 'normalized residual'\n";
    g += "plot 'rellich.csv' using 4:5:($1*6+$2*2+$3) with points palette notitle\npause -1\n";
  }
  if (has("bound_suite")) {
    g += "\nset title 'Structural bounds: sup ratio on the half and full cloud'\n";
    g += "unset logscale\nset logscale y\nset xlabel 'item'\nset ylabel 'sup ratio'\n";
    g += "plot 'bound_suite.csv' using 1:2 with points, '' using 1:3 with points\npause -1\n";
  }
  if (has("ucp_exact")) {
    g += "\nset title 'Discrete errors against the z-spacing'\n";
    g += "set logscale xy\nset xlabel 'h_z'\nset ylabel 'max error'\n";
    g += "plot 'ucp_exact.csv' using 5:7 with linespoints, '' using 5:8 with linespoints, '' using 5:9 with linespoints\n"
         "pause -1\n";
  }
  if (has("ucp_k_sweep")) {
    g += "\nset title 'Vanishing-profile slope against K'\n";
    g += "set logscale x\nunset logscale y\nset xlabel 'K'\nset ylabel 'slope'\n";
    g += "plot 'ucp_k_sweep.csv' using 1:2 with linespoints, '' using 1:3 with linespoints\npause -1\n";
  }
  if (has("ucp_profiles")) {
    g += "\nset title 'sup |u| over gauge balls'\n";
    g += "set logscale xy\nset xlabel 'r'\nset ylabel 'sup |u|'\n";
    g += "plot 'ucp_profiles.csv' using 2:3:1 with points palette notitle\npause -1\n";
  }
  return g;
}

void write_outputs(const std::string& dir, const nlohmann::json& document, const VerificationReport& rep) {
  fs::create_directories(dir);
  write_file(fs::path(dir) / "report.json", document.dump(2) + "\n");
  for (const auto& [name, t] : rep.tables) write_file(fs::path(dir) / (name + ".csv"), t.to_csv());
  write_file(fs::path(dir) / "plots.gp", gnuplot_script(rep));
}

RunResult run(const RunOptions& opt) {
  RunResult res;
  ExperimentConfig cfg;
  try {
    cfg = load_config(opt.config_path);
    if (opt.seed) cfg.override_seed(*opt.seed);
    if (opt.threads) cfg.override_threads(*opt.threads);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    res.exit_code = 2;
    return res;
  }
  const std::string out_dir = opt.out_dir ? *opt.out_dir : resolve(cfg, cfg.out_dir);
  std::string baseline_path = opt.baseline_path ? *opt.baseline_path : resolve(cfg, cfg.baseline_path);
  if (baseline_path.empty() && opt.update_baseline) baseline_path = (fs::path(out_dir) / "baseline.json").string();

  const auto t0 = std::chrono::steady_clock::now();
  const auto suites = selected_suites(cfg, opt.only);
  bool runtime_error = false;
  BaselineStore store;
  try {
    if (!baseline_path.empty()) store = BaselineStore::load(baseline_path);
  } catch (const BaselineError& e) {
    CheckRecord r{"baseline.load", anchors::baseline, {}, 0, Verdict::fail, e.what()};
    res.report.add(r);
    runtime_error = true;
  }
  const BaselineStore archived = opt.update_baseline ? BaselineStore{} : store;
  std::vector<double> seconds;
  for (const auto& s : suites) {
    if (runtime_error) break;
    if (!opt.quiet) std::cerr << "running " << to_string(s.kind) << "\n";
    const auto ts = std::chrono::steady_clock::now();
    try {
      res.report.merge(run_suite(cfg, s, archived));
    } catch (const std::exception& e) {
      CheckRecord r{std::string("suite.") + to_string(s.kind), anchors::suite_error, {}, 0, Verdict::fail, e.what()};
      res.report.add(r);
      runtime_error = true;
    }
    seconds.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - ts).count());
  }
  if (!runtime_error && !baseline_path.empty()) {
    try {
      res.report.merge(emit_baselines(res.report, store, opt.update_baseline));
      store.save(baseline_path);
    } catch (const std::exception& e) {
      CheckRecord r{"baseline.store", anchors::baseline, {}, 0, Verdict::fail, e.what()};
      res.report.add(r);
      runtime_error = true;
    }
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  res.document = report_document(cfg, res.report, suites, wall, seconds);
  if (runtime_error) res.document["summary"]["runtime_error"] = true;
  try {
    write_outputs(out_dir, res.document, res.report);
    res.report_path = (fs::path(out_dir) / "report.json").string();
  } catch (const std::exception& e) {
    std::cerr << "output error: " << e.what() << '\n';
    runtime_error = true;
  }
  const bool failed = res.report.count(Verdict::fail) > 0;
  res.exit_code = runtime_error || failed != cfg.expect_fail ? 1 : 0;
  return res;
}

int run_config(const std::string& path) {
  RunOptions o;
  o.config_path = path;
  return run(o).exit_code;
}

}  // namespace grushin
