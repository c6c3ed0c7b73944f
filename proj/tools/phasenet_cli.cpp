#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "phasenet/config.hpp"
#include "phasenet/errors.hpp"
#include "phasenet/field_io.hpp"
#include "phasenet/optimizer.hpp"
#include "phasenet/pipeline.hpp"
#include "phasenet/scenarios.hpp"

using namespace phasenet;

namespace {

// Exit codes: 0 success, 1 failed assertion, 2 config error, 3 other error.
int exit_code(const Error& e) {
  switch (e.code()) {
    case Errc::AssertionFailure: return 1;
    case Errc::ConfigParse: return 2;
    default: return 3;
  }
}

int cmd_run(const std::string& path, const std::string& out) {
  auto cfg = load_scenario_config(path);
  auto r = run_pipeline(cfg, out.empty() ? output_root() : out, [](const std::string& s) { std::cerr << s << "\n"; });
  for (const auto& c : r.checks)
    std::printf("%-6s %-5s %-34s %s\n", c.skipped ? "SKIP" : c.pass ? "PASS" : "FAIL", c.kind.c_str(),
                c.name.c_str(), c.detail.c_str());
  std::printf("output: %s (%zu files)\n", r.out_dir.c_str(), r.files.size());
  if (!r.assertions_pass()) throw Error(Errc::AssertionFailure, "run assertions failed, see manifest.json");
  return 0;
}

int cmd_compare(const std::vector<std::string>& paths) {
  std::cout << compare_reports(paths).table();
  return 0;
}

int cmd_sigma(const std::string& path, const std::string& out) {
  auto spec = parse_potential_config(read_text(path));
  auto p = make_potential(spec);
  auto sa = assemble_sigma(p);
  auto csv = sigma_csv(sa.sigma, &sa.profiles);
  if (out.empty())
    std::cout << csv;
  else
    write_text(out, csv);
  return 0;
}

int cmd_optimize(const std::string& path, const std::string& out) {
  auto nc = parse_network_config(read_text(path));
  if (!nc.scenario.empty()) {
    auto r = run_scenario(nc.scenario, nc.params, false);
    std::cout << scenario_csv(r);
    std::printf("winner %s classification %s\n", r.best().name.c_str(), r.classification.c_str());
    for (const auto& c : r.checks) std::printf("%s %s %s\n", c.pass ? "PASS" : "FAIL", c.claim.c_str(), c.detail.c_str());
    if (!out.empty()) write_text(out, network_to_json(r.best().net));
    if (!r.passed()) throw Error(Errc::AssertionFailure, nc.scenario + ": a scenario check failed");
    return 0;
  }
  const int N = static_cast<int>(nc.end_angles_deg.size());
  SurfaceTensionMatrix sigma = nc.sigma_equal > 0 ? equal_sigma(N, nc.sigma_equal) : set_sigma_manual(N, nc.sigma).sigma;
  std::vector<int> labels(N);
  for (int k = 0; k < N; ++k) labels[k] = k;
  Domain D = Domain::disk({0, 0}, nc.radius);
  auto res = local_minimize(initial_network(D, nc.end_angles_deg, labels, nc.init), sigma);
  std::fprintf(stderr, "F %.12f converged %d collapsed %d degenerate directions %d\n", res.F_value, res.converged ? 1 : 0,
               res.collapsed ? 1 : 0, res.degenerate_directions);
  auto js = network_to_json(res.net);
  if (out.empty())
    std::cout << js << "\n";
  else
    write_text(out, js);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"phasenet: Allen-Cahn phase fields and weighted networks"};
  app.require_subcommand(1);

  std::string run_cfg, run_out;
  auto* run = app.add_subcommand("run", "run a scenario config end to end");
  run->add_option("config", run_cfg, "scenario config (JSON)")->required();
  run->add_option("--out", run_out, "output root (default $PHASENET_OUT or ./out)");

  std::vector<std::string> reports;
  auto* cmp = app.add_subcommand("compare", "cross-epsilon table from report.csv files");
  cmp->add_option("reports", reports, "report.csv paths")->required();

  std::string sig_cfg, sig_out;
  auto* sig = app.add_subcommand("sigma", "surface tension matrix of a potential");
  sig->add_option("config", sig_cfg, "potential config (JSON)")->required();
  sig->add_option("-o,--out", sig_out, "CSV output path (default stdout)");

  std::string opt_cfg, opt_out;
  auto* opt = app.add_subcommand("optimize", "network geometry only");
  opt->add_option("config", opt_cfg, "network config (JSON)")->required();
  opt->add_option("-o,--out", opt_out, "network JSON output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  try {
    if (*run) return cmd_run(run_cfg, run_out);
    if (*cmp) return cmd_compare(reports);
    if (*sig) return cmd_sigma(sig_cfg, sig_out);
    if (*opt) return cmd_optimize(opt_cfg, opt_out);
  } catch (const Error& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return exit_code(e);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 0;
}
