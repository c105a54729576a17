// degenlog: command-line front end.

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "degenlog/cli.hpp"
#include "degenlog/errors.hpp"
#include "degenlog/spectral.hpp"

using namespace degenlog;
namespace fs = std::filesystem;

namespace {

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

std::string stem_of(const Scenario& s) { return s.label.empty() ? "scenario" : s.label; }

int cmd_run(const std::string& ref, const std::vector<std::string>& sets, const std::string& out_dir) {
  const Scenario s = apply_overrides(load_scenario(ref), sets);
  fs::create_directories(out_dir);
  const fs::path stem = fs::path(out_dir) / stem_of(s);
  write_file(stem.string() + ".ini", emit_scenario(s));
  const Trajectory tr = run(s);
  write_trajectory_csv(tr, stem.string() + ".csv");
  const auto snaps = write_snapshots(tr, stem.string());
  const Verdict v = classify(tr);
  std::cout << "scenario " << stem_of(s) << ": " << tr.size() << " records, " << snaps.size()
            << " snapshots\nverdict: " << to_string(v.kind) << (v.decayed ? " (decayed)" : "") << "  "
            << v.evidence << '\n';
  return 0;
}

int cmd_eig(const std::string& domain, const std::string& shape, int n, bool second) {
  const GridPtr grid = build_grid(parse_domain(domain), n);
  const Mask m = shape.empty() ? grid->full_mask() : mask_from_shape(*grid, parse_shape(shape));
  std::cout << "lambda1 " << format_number(lambda1_of_mask(grid, m)) << '\n';
  if (second) std::cout << "lambda2 " << format_number(second_eigenvalue(grid, m)) << '\n';
  return 0;
}

int cmd_lambda0(const std::string& domain, const std::string& shape, int n, double cap) {
  const GridPtr grid = build_grid(parse_domain(domain), n);
  const Lambda0Estimate est = lambda0_of_set(grid, parse_shape(shape), {}, cap);
  for (std::size_t i = 0; i < est.deltas.size(); ++i)
    std::cout << "delta " << format_number(est.deltas[i]) << "  lambda1 " << format_number(est.values[i]) << '\n';
  std::cout << "lambda0 " << format_number(est.value) << "  ("
            << (est.verdict == Lambda0Verdict::infinite ? "infinite" : "finite") << ")\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical lab for the degenerate logistic equation with a moving vanishing set"};
  app.require_subcommand(1);

  std::string ref, out_dir = "out", domain = "rect(0,0;1,1)", shape, suite_name;
  std::vector<std::string> sets;
  int n = 64, jobs = 1;
  double cap = 1e4;
  bool second = false, inject_fault = false;

  auto* run_cmd = app.add_subcommand("run", "Simulate a scenario; write CSV, PGM snapshots and the canonical file");
  run_cmd->add_option("scenario", ref, "Registry label or scenario file")->required();
  run_cmd->add_option("--out", out_dir, "Output directory")->capture_default_str();
  run_cmd->add_option("--set", sets, "Override as section.key=value (repeatable)");

  auto* eig_cmd = app.add_subcommand("eig", "Dirichlet eigenvalues of a shape's node mask");
  eig_cmd->add_option("--domain", domain, "Domain expression")->capture_default_str();
  eig_cmd->add_option("--shape", shape, "Shape expression (default: the whole domain)");
  eig_cmd->add_option("--n", n, "Grid resolution")->capture_default_str();
  eig_cmd->add_flag("--second", second, "Also print the second eigenvalue");

  auto* l0_cmd = app.add_subcommand("lambda0", "lambda_0 of a compact set by shrinking neighbourhoods");
  l0_cmd->add_option("--shape", shape, "Shape expression")->required();
  l0_cmd->add_option("--domain", domain, "Domain expression")->capture_default_str();
  l0_cmd->add_option("--n", n, "Grid resolution")->capture_default_str();
  l0_cmd->add_option("--cap", cap, "Values above the cap count as +inf")->capture_default_str();

  auto* predict_cmd = app.add_subcommand("predict", "Evaluate every theorem's hypotheses on a scenario");
  predict_cmd->add_option("scenario", ref, "Registry label or scenario file")->required();
  predict_cmd->add_option("--set", sets, "Override as section.key=value (repeatable)");

  auto* cross_cmd = app.add_subcommand("crosscheck", "Predict, simulate and compare");
  cross_cmd->add_option("scenario", ref, "Registry label or scenario file")->required();
  cross_cmd->add_option("--set", sets, "Override as section.key=value (repeatable)");

  auto* suite_cmd = app.add_subcommand("suite", "Run paper-examples, properties or all");
  suite_cmd->add_option("name", suite_name, "Suite name")
      ->required()
      ->check(CLI::IsMember({"paper-examples", "properties", "all"}));
  suite_cmd->add_option("--out", out_dir, "Directory for the report files")->capture_default_str();
  suite_cmd->add_option("--jobs", jobs, "Parallel scenarios (DEGENLOG_JOBS overrides)")->capture_default_str();
  suite_cmd->add_flag("--inject-fault", inject_fault, "Seed the sign fault into the property suite");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) return cmd_run(ref, sets, out_dir);
    if (eig_cmd->parsed()) return cmd_eig(domain, shape, n, second);
    if (l0_cmd->parsed()) return cmd_lambda0(domain, shape, n, cap);
    if (predict_cmd->parsed()) {
      const Scenario s = apply_overrides(load_scenario(ref), sets);
      std::cout << "scenario " << stem_of(s) << '\n' << format_checks(predict(s));
      return 0;
    }
    if (cross_cmd->parsed()) {
      CrossCheckReport rep = cross_check(apply_overrides(load_scenario(ref), sets));
      std::cout << format_cross_check(rep);
      return rep.status == CrossStatus::violation ? 1 : 0;
    }
    SuiteOptions opts;
    opts.jobs = resolve_jobs(jobs);
    opts.inject_fault = inject_fault;
    const SuiteReport rep = run_suite(suite_name, opts);
    fs::create_directories(out_dir);
    write_file(fs::path(out_dir) / ("suite-" + suite_name + ".txt"), rep.text);
    write_file(fs::path(out_dir) / ("suite-" + suite_name + ".csv"), rep.csv);
    std::cout << rep.text;
    return rep.exit_code;
  } catch (const ConfigError& e) {
    std::cerr << "degenlog: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "degenlog: " << e.what() << '\n';
    return 3;
  }
}
