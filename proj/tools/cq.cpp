#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cq/errors.hpp"
#include "cq/report.hpp"
#include "cq/suites.hpp"

namespace {

void print_summary(const cq::VerificationReport& r) {
  std::cout << "suite " << r.suite << " (" << r.runtime_ms << " ms)\n";
  for (const cq::CheckResult& c : r.checks) {
    std::cout << "  " << (c.pass ? "ok  " : "FAIL") << "  " << c.name << "  residual=" << c.residual
              << "  tol=" << c.tolerance;
    if (c.control) std::cout << "  (control, expected to exceed tol)";
    if (!c.error.empty()) std::cout << "  error: " << c.error;
    std::cout << "\n";
  }
  std::cout << (r.pass() ? "PASS" : "FAIL") << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"contact quantization verification harness"};
  app.set_version_flag("--version", std::string(cq::kToolVersion));
  app.require_subcommand(1);

  auto* list = app.add_subcommand("list", "list available suites");
  auto* verify = app.add_subcommand("verify", "run a verification suite");

  std::string suite, hbar, grid, config, format;
  std::vector<std::string> tols, only;
  int dim = 0, samples = 0;
  unsigned seed = 1;
  std::string report;
  verify->add_option("suite", suite, "suite name (or [verify] suite in --config)");
  verify->add_option("--hbar", hbar, "comma separated hbar values");
  verify->add_option("--dim", dim, "representation dimension");
  verify->add_option("--grid", grid, "grid spec N,L");
  verify->add_option("--samples", samples, "number of sample points / random cases");
  verify->add_option("--seed", seed, "RNG seed");
  verify->add_option("--tol", tols, "tolerance override name=value (repeatable)");
  verify->add_option("--report", report, "write the report to this path");
  verify->add_option("--format", format, "report format: json or csv");
  verify->add_option("--only", only, "run only checks whose name starts with this prefix (repeatable)");
  verify->add_option("--config", config, "INI config file; flags override its values");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (list->parsed()) {
    for (const cq::SuiteInfo& s : cq::suite_registry()) std::cout << s.name << "\t" << s.description << "\n";
    return 0;
  }

  try {
    cq::SuiteConfig cfg;
    if (!config.empty()) cfg = cq::load_config(config, cfg);
    if (!suite.empty()) cfg.suite = suite;
    if (cfg.suite.empty()) throw cq::UsageError("no suite given");
    if (!hbar.empty()) cfg.hbar = cq::parse_double_list(hbar);
    if (verify->count("--dim")) cfg.dim = dim;
    if (!grid.empty()) {
      const auto g = cq::parse_double_list(grid);
      if (g.size() != 2 || g[0] < 8 || g[1] <= 0.0) throw cq::UsageError("--grid expects N,L with N >= 8 and L > 0");
      cfg.grid_n = static_cast<int>(g[0]);
      cfg.grid_l = g[1];
    }
    if (verify->count("--samples")) cfg.samples = samples;
    if (verify->count("--seed")) cfg.seed = seed;
    for (const std::string& t : tols) {
      const auto eq = t.rfind('=');
      if (eq == std::string::npos) throw cq::UsageError("--tol expects name=value, got '" + t + "'");
      const auto v = cq::parse_double_list(t.substr(eq + 1));
      if (v.size() != 1) throw cq::UsageError("--tol expects a single value");
      cfg.tol[t.substr(0, eq)] = v[0];
    }
    if (!only.empty()) cfg.only = only;
    if (!report.empty()) cfg.report = report;
    if (!format.empty()) cfg.format = format;
    if (cfg.format != "json" && cfg.format != "csv") throw cq::UsageError("--format must be json or csv");

    const cq::VerificationReport r = cq::run_suite(cfg);
    print_summary(r);
    if (!cfg.report.empty()) cq::emit_report(r, cfg.format, cfg.report);
    return r.pass() ? 0 : 1;
  } catch (const cq::UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
