#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

#include "nsdarcy/errors.hpp"
#include "nsdarcy/experiment.hpp"

using namespace nsdarcy;

namespace {

int run_command(const std::string& config_path, const std::vector<std::pair<std::string, std::string>>& flags,
                bool dry_run) {
  ExperimentConfig cfg = parse_config_file(config_path);
  for (const auto& [k, v] : flags) apply_setting(cfg, k, v);
  if (dry_run) cfg.dry_run = true;
  const ExperimentResult res = run_experiment(cfg, &std::cerr);
  if (cfg.dry_run) {
    std::cout << res.summary;
    return 0;
  }
  for (const TableArtifact& t : res.tables) std::cout << format_text(t) << '\n';
  for (const auto& f : res.files) std::cerr << "wrote " << f.string() << '\n';
  return 0;
}

int diff_command(const std::string& a, const std::string& b, const std::string& tol) {
  const DiffReport rep = diff_tables(read_csv(std::filesystem::path(a)), read_csv(std::filesystem::path(b)),
                                     parse_tolerance(tol));
  for (const DiffRow& r : rep.rows)
    std::printf("%-4s %-8s %-4s %-3s %10s %10s  rel=%.3e tol=%.3e\n", r.pass ? "ok" : "FAIL", r.h.c_str(),
                r.variable.c_str(), r.norm.c_str(), format_error(r.a).c_str(), format_error(r.b).c_str(), r.rel,
                r.tol);
  std::printf("%s: %zu rows, max relative difference %.3e\n", rep.pass ? "PASS" : "FAIL", rep.rows.size(),
              rep.max_rel);
  return rep.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coupled Navier-Stokes/Darcy solver with multilevel decoupled algorithms"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run an experiment and write error tables");
  std::string config;
  std::string algorithm, schedule, solver, out;
  int order = 0;
  bool dry_run = false;
  run->add_option("--config", config, "key=value configuration file")->required()->check(CLI::ExistingFile);
  run->add_option("--algorithm", algorithm, "coupled, A, B, C or D");
  run->add_option("--order", order, "1 (Mini/P1) or 2 (Taylor-Hood/P2)");
  run->add_option("--schedule", schedule, "e.g. square:n0=2,levels=3 or pairs:2:8,3:27");
  run->add_option("--solver", solver, "direct or iterative");
  run->add_option("--out", out, "output directory");
  run->add_flag("--dry-run", dry_run, "print schedules and dof counts without solving");

  auto* diff = app.add_subcommand("diff", "compare two result tables");
  std::string a, b, tol;
  diff->add_option("a", a, "table to check")->required()->check(CLI::ExistingFile);
  diff->add_option("b", b, "reference table")->required()->check(CLI::ExistingFile);
  diff->add_option("--tol", tol, "relative tolerances, e.g. energy=0.02,l2=0.05")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      std::vector<std::pair<std::string, std::string>> flags;
      if (!algorithm.empty()) flags.emplace_back("algorithm", algorithm);
      if (order != 0) flags.emplace_back("order", std::to_string(order));
      if (!schedule.empty()) flags.emplace_back("schedule", schedule);
      if (!solver.empty()) flags.emplace_back("solver", solver);
      if (!out.empty()) flags.emplace_back("out", out);
      return run_command(config, flags, dry_run);
    }
    return diff_command(a, b, tol);
  } catch (const StepFailure& e) {
    std::cerr << "error: step failed\n  level: " << e.level() << "\n  step: " << e.step() << "\n  cause: " << e.what()
              << '\n';
  } catch (const ParseError& e) {
    std::cerr << "error: configuration\n  line: " << e.line() << "\n  cause: " << e.what() << '\n';
  } catch (const ValidationError& e) {
    std::cerr << "error: invalid setting\n  field: " << e.field() << "\n  cause: " << e.what() << '\n';
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
  }
  return 2;
}
