// One line per acceptance criterion; exit status 1 if any criterion fails.
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>

#include "grushin/runner.hpp"

using namespace grushin;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool ok = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Every non-diagnostic record passes; the first failures go into the detail.
Outcome judge(const VerificationReport& rep, std::size_t min_records) {
  Outcome o;
  std::size_t checked = 0;
  std::string fails;
  for (const auto& r : rep.records) {
    if (r.verdict == Verdict::diagnostic) continue;
    ++checked;
    if (r.verdict == Verdict::fail) fails += (fails.empty() ? "" : ", ") + r.name;
  }
  o.ok = fails.empty() && checked >= min_records;
  o.detail = std::to_string(checked) + " checks";
  if (!fails.empty()) o.detail += ", failing: " + fails;
  if (checked < min_records) o.detail += ", expected at least " + std::to_string(min_records);
  return o;
}

double worst(const VerificationReport& rep, const std::string& prefix, const char* key) {
  double w = 0;
  for (const auto& r : rep.records)
    if (r.name.rfind(prefix, 0) == 0 && r.values.contains(key)) w = std::max(w, r.values[key].get<double>());
  return w;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

int failures = 0;

void criterion(int id, const char* title, double limit_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("error: ") + e.what()};
  }
  const double t = seconds_since(t0);
  if (limit_s > 0 && t > limit_s) {
    o.ok = false;
    o.detail += ", over the time limit";
  }
  if (!o.ok) ++failures;
  std::printf("[%s] %d %s: %s; %.1f s", o.ok ? "PASS" : "FAIL", id, title, o.detail.c_str(), t);
  if (limit_s > 0) std::printf(" (limit %.0f s)", limit_s);
  std::printf("\n");
  std::fflush(stdout);
}

}  // namespace

int main() {
  const std::string config = std::string(GRUSHIN_CONFIG_DIR) + "/full.yaml";
  const std::string store_path = std::string(GRUSHIN_BASELINE_DIR) + "/full.json";
  const ExperimentConfig cfg = load_config(config);
  const BaselineStore store = BaselineStore::load(store_path);
  const CoefficientPtr A = cfg.coefficients(cfg.space);
  const CoefficientPtr I = std::make_shared<IdentityCoefficients>(cfg.space);
  std::printf("config %s, baselines %s (%zu entries)\n", config.c_str(), store_path.c_str(), store.entries.size());

  criterion(1, "derivative ladder", 60, [&] {
    VerificationReport rep;
    for (const auto& s : cfg.ladder_spaces) rep.merge(derivative_ladder(s, cfg.ladder));
    Outcome o = judge(rep, 4 * 9);
    o.ok = o.ok && cfg.ladder_spaces.size() == 9 && cfg.ladder.points == 200 && cfg.ladder.rel_tol == 1e-6;
    o.detail += ", " + std::to_string(cfg.ladder_spaces.size()) + " spaces x " + std::to_string(cfg.ladder.points) +
                " points, worst error/allowance " + fmt("%.3g", worst(rep, "ladder.", "max_error_over_allowed"));
    return o;
  });

  criterion(2, "exact identities", 0, [&] {
    VerificationReport rep = exact_identities(*I, cfg.identities);
    rep.merge(exact_identities(*A, cfg.identities));
    Outcome o = judge(rep, 10);
    o.ok = o.ok && cfg.identities.points == 100 && cfg.identities.rel_tol == 1e-8;
    o.detail += ", A = I and " + A->name() + ", " + std::to_string(cfg.identities.points) +
                " points, worst error/allowance " + fmt("%.3g", worst(rep, "identity.", "max_error_over_allowed"));
    return o;
  });

  criterion(3, "structural bound suite", 300, [&] {
    VerificationReport rep = hypothesis_check(*A, cfg.space, cfg.hypothesis_samples);
    const auto b = structural_bound_suite(*A, cfg.bounds);
    rep.merge(b);
    Outcome o = judge(rep, 10);
    o.ok = o.ok && cfg.bounds.samples.count == 20000 && A->name() == "example";
    o.detail += ", clouds " + std::to_string(cfg.bounds.samples.count / 2) + " -> " +
                std::to_string(cfg.bounds.samples.count) + ", largest growth " +
                fmt("%.3g", worst(b, "bounds.", "relative_growth"));
    return o;
  });

  criterion(4, "Rellich residual", 300, [&] {
    const auto rep = rellich_suite({I, A}, cfg.rellich);
    Outcome o = judge(rep, 12);
    o.ok = o.ok && cfg.rellich.grids.size() >= 4;
    double min_order = 1e300;
    for (const auto& r : rep.records)
      if (r.values.contains("order")) min_order = std::min(min_order, r.values["order"].get<double>());
    o.detail += ", 2 x 3 pairs with and without the log factor, lowest order " + fmt("%.2f", min_order) +
                ", largest final residual " + fmt("%.2e", worst(rep, "rellich.", "final"));
    return o;
  });

  criterion(5, "Carleman suites", 900, [&] {
    for (CarlemanKind k : cfg.carleman.kinds) {
      const std::string key = "carleman." + cfg.family + ".gamma1_m1_k1." + to_string(k) + ".constant";
      if (!store.find(key)) return Outcome{false, std::string("no archived constant for ") + to_string(k)};
    }
    const auto rep = run_suite(cfg, {SuiteKind::carleman, {}}, store);
    Outcome o = judge(rep, 2 * cfg.carleman.kinds.size() + 1);
    o.ok = o.ok && cfg.carleman.kinds.size() == 4 && cfg.carleman.parameters.size() == 4;
    o.detail += ", 20 functions x {20,40,80,160}, largest growth per doubling";
    for (const auto& r : rep.records)
      if (r.name.find(".parameter_sweep") != std::string::npos)
        o.detail += " " + r.name.substr(9, r.name.find('.', 9) - 9) + " " +
                    fmt("%.3g", r.values["max_growth_per_doubling"].get<double>());
    if (const auto* s = rep.find("carleman.substitution")) o.detail += ", substitution gap " + fmt("%.1e", s->values["max_gap"].get<double>());
    return o;
  });

  criterion(6, "quadrature scaling", 0, [&] {
    auto rep = psi_mass_scaling(cfg.space, cfg.scaling);
    BaselineStore copy = store;
    const auto drift = emit_baselines(rep, copy);
    bool archived = true;
    for (const auto& r : drift.records) archived = archived && r.verdict == Verdict::pass;
    rep.merge(drift);
    Outcome o = judge(rep, 2);
    o.ok = o.ok && archived;
    const auto* r = rep.records.front().values.contains("exponent") ? &rep.records.front() : nullptr;
    if (r) o.detail += ", exponent " + fmt("%.6f", r->values["exponent"].get<double>()) + " for Q = 3";
    o.detail += archived ? ", constant matches the archive" : ", constant not archived or drifted";
    return o;
  });

  criterion(7, "UCP lab", 600, [&] {
    const auto rep = run_suite(cfg, {SuiteKind::ucp, {}}, store);
    Outcome o = judge(rep, 8);
    if (const auto* r = rep.find("ucp.vanishing.k_sweep.gamma1_m1_k1"))
      o.detail += ", K-sweep exponent " + fmt("%.3f", r->values["exponent"].get<double>());
    return o;
  });

  criterion(8, "determinism", 0, [&] {
    const fs::path tmp = fs::temp_directory_path() / "grushin_acceptance";
    fs::remove_all(tmp);
    std::vector<RunResult> runs;
    for (const char* name : {"a", "b"}) {
      fs::create_directories(tmp / name);
      fs::copy_file(store_path, tmp / name / "baseline.json");
      RunOptions o;
      o.config_path = config;
      o.out_dir = (tmp / name).string();
      o.baseline_path = (tmp / name / "baseline.json").string();
      o.quiet = true;
      runs.push_back(run(o));
    }
    auto strip = [](nlohmann::json d) {
      d.erase("timing");
      return d;
    };
    const bool same_report = strip(runs[0].document) == strip(runs[1].document);
    std::size_t csv = 0, csv_same = 0;
    for (const auto& e : fs::directory_iterator(tmp / "a"))
      if (e.path().extension() == ".csv") {
        ++csv;
        csv_same += slurp(e.path()) == slurp(tmp / "b" / e.path().filename());
      }
    Outcome o;
    o.ok = same_report && csv > 0 && csv == csv_same;
    o.detail = std::string("reports ") + (same_report ? "identical" : "differ") + " outside timing, " +
               std::to_string(csv_same) + "/" + std::to_string(csv) + " CSV tables byte-identical, " +
               std::to_string(runs[0].report.records.size()) + " records";
    return o;
  });

  std::printf("%d of 8 criteria failed\n", failures);
  return failures ? 1 : 0;
}
