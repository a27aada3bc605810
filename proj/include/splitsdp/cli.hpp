#pragma once

#include <splitsdp/bounds.hpp>
#include <splitsdp/model.hpp>

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace splitsdp {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One run request: instance, shapes to sweep, solver and paths.  Loadable
// from a JSON document; command-line flags override file values.
struct RunConfig {
  int n = 0;
  int d = 0;
  std::vector<std::string> splits;  // e.g. {"2,16", "18"}; empty = unsplit
  std::string solver_command;       // "{in} {out}" template or plain prefix
  std::string bounds_table_path;
  double timeout_sec = 900;
  std::string output_dir = ".";
  ModelOptions families;

  static RunConfig from_json_text(const std::string& text,
                                  const std::string& origin);
  static RunConfig from_file(const std::string& path);
  std::string to_json() const;
};

// Instance after validation and odd-distance propagation.
struct ResolvedRun {
  int n_req = 0, d_req = 0;  // as configured
  int n = 0, d = 0;          // instance actually built
  bool propagated = false;
  std::vector<SplitShape> shapes;
  BoundTable table;
};

ResolvedRun resolve_config(const RunConfig& cfg);

// Artifact base name for one shape, e.g. "A18_4_s2-16".
std::string instance_base(int n, int d, const SplitShape& shape);

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitSolver = 2;
inline constexpr int kExitUncertified = 3;

int cmd_build(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_solve(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_report(const RunConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace splitsdp
