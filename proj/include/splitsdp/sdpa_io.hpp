#pragma once

#include <splitsdp/model.hpp>

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace splitsdp {

// Block layout of the emitted file: every eigenblock in model order, then a
// single diagonal block carrying one slack entry per linear row.
struct SdpaLayout {
  int num_vars = 0;
  std::vector<int> block_sizes;  // SDPA convention: negative = diagonal block
  int lp_rows = 0;
};

SdpaLayout sdpa_layout(const SdpModel& model);

// Structural summary of a .dat-s file (for round-trip checks).
struct SdpaStructure {
  int num_vars = 0;
  std::vector<int> block_sizes;
  std::map<int, long> nnz;  // matrix index (0 = constant term) -> entry count
};

SdpaStructure parse_sdpa_structure(const std::string& text);

// Serialize the model in SDPA sparse format.  The file encodes
//   minimize c~ . y   s.t.   sum_v y_v F~_v - F~_0  psd
// with c~ = -objective, F~_v the model forms and F~_0 = -F_0, so y recovered
// from a solution is the model variable vector and the solution's dual matrix
// is exactly the weak-duality certificate input.  Entries are normalized by
// 1/sqrt(row_denom_r * row_denom_c), printed with 17 significant digits, and
// ordered by (matrix, block, row, column).  Throws for zero-variable models.
std::string sdpa_text(const SdpModel& model);
void write_sdpa(const SdpModel& model, const std::string& path);

// Parsed solver output.
struct SolverSolution {
  std::map<int, double> primal_x;  // variable index -> value
  // One entry per PSD block (dense row-major, size*size), then one entry for
  // the diagonal block holding just its diagonal (size lp_rows).
  std::vector<std::vector<double>> dual_Y;
  double primal_objective = 0;  // obj_const + obj . x, recomputed
  double dual_objective = 0;    // obj_const + <F_0, Y>, recomputed
  std::string solver_status;
};

struct SolverError : std::runtime_error {
  enum class Kind { spawn, timeout, solver, infeasible, parse };
  Kind kind;
  SolverError(Kind k, const std::string& msg) : std::runtime_error(msg), kind(k) {}
};

// Parse a solution in CSDP format: first line the y vector, then entries
// "matno block i j value" with matno 2 holding the dual matrix.  Errors are
// reported with line number and byte offset.
SolverSolution parse_solution(const std::string& text, const SdpModel& model);
SolverSolution read_solution(const std::string& path, const SdpModel& model);

// Low-level subprocess run: `solver_cmd <problem> <solution>` via /bin/sh.
struct ExecResult {
  int exit_code = -1;
  bool timed_out = false;
  std::string out;
  std::string err;
};
ExecResult execute_solver(const std::string& solver_cmd,
                          const std::string& problem_path,
                          const std::string& solution_path, double timeout_sec);

// Full pipeline: write the problem to work_dir (a fresh temp directory when
// empty), run the solver, parse the solution.  Throws SolverError.
struct RunOptions {
  double timeout_sec = 900;
  std::string work_dir;
  bool keep_files = false;
};
SolverSolution run_solver(const SdpModel& model, const std::string& solver_cmd,
                          const RunOptions& opts = {});

}  // namespace splitsdp
