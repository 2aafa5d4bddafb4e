#include <CLI11.hpp>

#include <iostream>

#include "grushin/runner.hpp"

using namespace grushin;

int main(int argc, char** argv) {
  CLI::App app{"Numerical checks for degenerate Grushin-type operators"};
  app.require_subcommand(1);

  RunOptions opt;
  std::string out;
  int threads = 0;
  std::uint64_t seed = 0;
  app.add_option("--config", opt.config_path, "experiment config (YAML, or JSON by extension)");
  app.add_option("--out", out, "output directory (overrides output.dir)");
  app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "sampling seed");
  app.add_flag("-q,--quiet", opt.quiet, "no progress lines");

  auto* verify = app.add_subcommand("verify", "identities and structural bounds");
  auto* carleman = app.add_subcommand("carleman", "Carleman inequality suites");
  auto* ucp = app.add_subcommand("ucp", "unique-continuation lab");
  auto* baseline = app.add_subcommand("baseline", "run every declared suite and rewrite the baseline store");
  auto* all = app.add_subcommand("run", "run every declared suite in order");
  auto* schema = app.add_subcommand("schema", "print the default config, which is also the schema");
  for (auto* s : {verify, carleman, ucp, baseline, all}) s->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  if (schema->parsed()) {
    std::cout << config_schema().dump(2) << '\n';
    return 0;
  }
  if (opt.config_path.empty()) {
    std::cerr << "--config is required\n";
    return 2;
  }
  if (!out.empty()) opt.out_dir = out;
  if (threads > 0) opt.threads = threads;
  if (app.get_option("--seed")->count()) opt.seed = seed;
  if (verify->parsed()) opt.only = {SuiteKind::identities, SuiteKind::bounds};
  if (carleman->parsed()) opt.only = {SuiteKind::carleman};
  if (ucp->parsed()) opt.only = {SuiteKind::ucp};
  if (baseline->parsed()) opt.update_baseline = true;

  const RunResult res = run(opt);
  if (res.exit_code != 2) {
    const auto& s = res.document["summary"];
    std::cout << "pass " << s["pass"] << ", fail " << s["fail"] << ", diagnostic " << s["diagnostic"]
              << " (expected " << s["expect"].get<std::string>() << ")\n";
    for (const auto& r : res.report.records)
      if (r.verdict == Verdict::fail) std::cout << "  fail: " << r.name << (r.note.empty() ? "" : " (" + r.note + ")") << '\n';
    if (!res.report_path.empty()) std::cout << "report: " << res.report_path << '\n';
  }
  return res.exit_code;
}
