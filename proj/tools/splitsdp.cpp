#include <splitsdp/cli.hpp>

#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

int main(int argc, char** argv) {
  CLI::App app{"split-algebra SDP bounds for binary codes"};
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path, "JSON config file; flags override it");

  int n = -1, d = -1;
  std::vector<std::string> splits;
  std::string solver_cmd, bounds_table, out_dir;
  double timeout_sec = -1;
  app.add_option("--n", n, "code length");
  app.add_option("--d", d, "minimum distance");
  app.add_option("--split", splits,
                 "part sizes like 2,16 (repeatable; default: no split)");
  app.add_option("--solver-cmd", solver_cmd,
                 "solver command; {in} and {out} expand to the file paths");
  app.add_option("--bounds-table", bounds_table, "table of known bounds");
  app.add_option("--timeout-sec", timeout_sec, "solver time limit");
  app.add_option("--out", out_dir, "artifact directory");

  bool no_shortening = false, no_tail = false, no_weighted_tail = false;
  bool no_tail_family = false, no_weight_caps = false, no_pair_caps = false;
  app.add_flag("--no-shortening", no_shortening, "drop shortening rows");
  app.add_flag("--no-tail", no_tail, "drop tail rows");
  app.add_flag("--no-weighted-tail", no_weighted_tail, "drop weighted tail rows");
  app.add_flag("--no-tail-family", no_tail_family, "drop tail family rows");
  app.add_flag("--no-weight-caps", no_weight_caps, "drop per-weight cap rows");
  app.add_flag("--no-pair-caps", no_pair_caps, "drop pair cap rows");

  auto* sub_build = app.add_subcommand("build", "construct the model and problem file");
  auto* sub_solve = app.add_subcommand("solve", "run the external solver");
  auto* sub_verify = app.add_subcommand("verify", "certify the solver output exactly");
  auto* sub_report = app.add_subcommand("report", "summarize artifacts");
  for (auto* sub : {sub_build, sub_solve, sub_verify, sub_report})
    sub->fallthrough();  // lets the shared flags appear after the subcommand

  CLI11_PARSE(app, argc, argv);

  splitsdp::RunConfig cfg;
  try {
    if (!config_path.empty()) cfg = splitsdp::RunConfig::from_file(config_path);
    if (n >= 0) cfg.n = n;
    if (d >= 0) cfg.d = d;
    if (!splits.empty()) cfg.splits = splits;
    if (!solver_cmd.empty()) cfg.solver_command = solver_cmd;
    if (!bounds_table.empty()) cfg.bounds_table_path = bounds_table;
    if (timeout_sec >= 0) cfg.timeout_sec = timeout_sec;
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    if (no_shortening) cfg.families.shortening = false;
    if (no_tail) cfg.families.tail = false;
    if (no_weighted_tail) cfg.families.weighted_tail = false;
    if (no_tail_family) cfg.families.tail_family = false;
    if (no_weight_caps) cfg.families.weight_caps = false;
    if (no_pair_caps) cfg.families.pair_caps = false;
    if (cfg.n < 0 || cfg.d < 0)
      throw splitsdp::ConfigError("--n and --d are required (flag or config)");
  } catch (const splitsdp::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return splitsdp::kExitUsage;
  }

  if (sub_build->parsed()) return splitsdp::cmd_build(cfg, std::cout, std::cerr);
  if (sub_solve->parsed()) return splitsdp::cmd_solve(cfg, std::cout, std::cerr);
  if (sub_verify->parsed()) return splitsdp::cmd_verify(cfg, std::cout, std::cerr);
  if (sub_report->parsed()) return splitsdp::cmd_report(cfg, std::cout, std::cerr);
  return splitsdp::kExitUsage;
}
