#include <splitsdp/sdpa_io.hpp>

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/stat.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace splitsdp {

SdpaLayout sdpa_layout(const SdpModel& model) {
  SdpaLayout lay;
  lay.num_vars = model.num_vars;
  for (const BlockForm& b : model.blocks) lay.block_sizes.push_back(b.size);
  lay.lp_rows = static_cast<int>(model.linear.size());
  if (lay.lp_rows > 0) lay.block_sizes.push_back(-lay.lp_rows);
  return lay;
}

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Entry {
  int mat, blk, r, c;  // all 1-based except mat (0 = constant matrix)
  double val;
  bool operator<(const Entry& o) const {
    return std::tie(mat, blk, r, c) < std::tie(o.mat, o.blk, o.r, o.c);
  }
};

}  // namespace

std::string sdpa_text(const SdpModel& model) {
  if (model.num_vars == 0)
    throw std::invalid_argument(
        "sdpa_text: the model has no free variables (nothing to solve)");
  const SdpaLayout lay = sdpa_layout(model);
  const int nblocks = static_cast<int>(lay.block_sizes.size());
  const int lp_blk = lay.lp_rows > 0 ? nblocks : -1;  // 1-based position

  std::vector<Entry> entries;
  for (std::size_t b = 0; b < model.blocks.size(); ++b) {
    const BlockForm& bf = model.blocks[b];
    std::vector<double> norm(bf.size);
    for (int r = 0; r < bf.size; ++r) norm[r] = std::sqrt(to_double(bf.row_denom[r]));
    for (const auto& [r, c, v] : bf.consts) {
      // F~_0 = -F_0.
      entries.push_back({0, static_cast<int>(b) + 1, r + 1, c + 1,
                         -to_double(v) / (norm[r] * norm[c])});
    }
    for (const BlockForm::Term& t : bf.terms) {
      entries.push_back({t.var + 1, static_cast<int>(b) + 1, t.r + 1, t.c + 1,
                         to_double(t.coeff) / (norm[t.r] * norm[t.c])});
    }
  }
  for (std::size_t r = 0; r < model.linear.size(); ++r) {
    const LinearConstraint& lc = model.linear[r];
    const int rr = static_cast<int>(r) + 1;
    // Row a.x <= rhs becomes the diagonal slack rhs - a.x >= 0.
    const double rhs = to_double(lc.rhs);
    if (rhs != 0.0) entries.push_back({0, lp_blk, rr, rr, -rhs});
    for (const auto& [v, cf] : lc.terms)
      entries.push_back({v + 1, lp_blk, rr, rr, -to_double(cf)});
  }
  std::sort(entries.begin(), entries.end());

  std::ostringstream out;
  out << "*digest " << model.digest() << "\n";
  out << lay.num_vars << "\n";
  out << nblocks << "\n";
  for (int b = 0; b < nblocks; ++b) out << (b ? " " : "") << lay.block_sizes[b];
  out << "\n";
  for (int v = 0; v < model.num_vars; ++v)
    out << (v ? " " : "") << fmt17(-to_double(model.obj[v]));
  out << "\n";
  for (const Entry& e : entries) {
    if (e.val == 0.0) continue;
    out << e.mat << " " << e.blk << " " << e.r << " " << e.c << " "
        << fmt17(e.val) << "\n";
  }
  return out.str();
}

void write_sdpa(const SdpModel& model, const std::string& path) {
  const std::string text = sdpa_text(model);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("write_sdpa: cannot open " + path);
  f << text;
  f.flush();
  if (!f) throw std::runtime_error("write_sdpa: short write to " + path);
}

SdpaStructure parse_sdpa_structure(const std::string& text) {
  SdpaStructure st;
  std::istringstream in(text);
  std::string line;
  int stage = 0;  // 0: m, 1: nblocks, 2: sizes, 3: c, 4: entries
  int nblocks = 0;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '*' || line[0] == '"') continue;
    std::istringstream ls(line);
    const auto fail = [&](const std::string& why) {
      throw std::runtime_error("sdpa structure: line " + std::to_string(lineno) +
                               ": " + why);
    };
    if (stage == 0) {
      if (!(ls >> st.num_vars)) fail("expected variable count");
      stage = 1;
    } else if (stage == 1) {
      if (!(ls >> nblocks)) fail("expected block count");
      stage = 2;
    } else if (stage == 2) {
      int s;
      // Tolerate brace/paren/comma-decorated block size lines.
      std::string cleaned = line;
      for (char& ch : cleaned)
        if (ch == '{' || ch == '}' || ch == '(' || ch == ')' || ch == ',')
          ch = ' ';
      std::istringstream cs(cleaned);
      while (cs >> s) st.block_sizes.push_back(s);
      if (static_cast<int>(st.block_sizes.size()) != nblocks)
        fail("expected " + std::to_string(nblocks) + " block sizes");
      stage = 3;
    } else if (stage == 3) {
      stage = 4;  // objective row: values not needed for the structure
    } else {
      int mat, blk, r, c;
      double v;
      if (!(ls >> mat >> blk >> r >> c >> v)) fail("expected 5-field entry");
      if (blk < 1 || blk > nblocks) fail("block index out of range");
      st.nnz[mat]++;
    }
  }
  if (stage < 4)
    throw std::runtime_error("sdpa structure: truncated header");
  return st;
}

SolverSolution parse_solution(const std::string& text, const SdpModel& model) {
  const SdpaLayout lay = sdpa_layout(model);
  const int npsd = static_cast<int>(model.blocks.size());
  const int nblocks = npsd + (lay.lp_rows > 0 ? 1 : 0);

  SolverSolution sol;
  sol.dual_Y.resize(nblocks);
  for (int b = 0; b < npsd; ++b)
    sol.dual_Y[b].assign(static_cast<std::size_t>(model.blocks[b].size) *
                             model.blocks[b].size,
                         0.0);
  if (lay.lp_rows > 0) sol.dual_Y[npsd].assign(lay.lp_rows, 0.0);

  std::size_t pos = 0;
  long lineno = 0;
  const auto next_line = [&](std::string& line) {
    if (pos >= text.size()) return false;
    std::size_t e = text.find('\n', pos);
    if (e == std::string::npos) e = text.size();
    line = text.substr(pos, e - pos);
    pos = e + (e < text.size() ? 1 : 0);
    ++lineno;
    return true;
  };
  const auto fail = [&](std::size_t at, const std::string& why) -> void {
    throw SolverError(SolverError::Kind::parse,
                      "solution: line " + std::to_string(lineno) + " (byte " +
                          std::to_string(at) + "): " + why);
  };

  std::string line;
  // First non-comment line: the y vector.
  for (;;) {
    const std::size_t at = pos;
    if (!next_line(line)) {
      fail(at, "missing variable line");
    }
    if (line.empty() || line[0] == '*' || line[0] == '"') continue;
    std::istringstream ls(line);
    double v;
    std::vector<double> y;
    while (ls >> v) y.push_back(v);
    if (static_cast<int>(y.size()) != model.num_vars)
      fail(at, "expected " + std::to_string(model.num_vars) +
                   " variable values, found " + std::to_string(y.size()));
    for (int i = 0; i < model.num_vars; ++i) sol.primal_x[i] = y[i];
    break;
  }

  while (true) {
    const std::size_t at = pos;
    if (!next_line(line)) break;
    if (line.empty() || line[0] == '*' || line[0] == '"') continue;
    std::istringstream ls(line);
    int mat, blk, r, c;
    double v;
    if (!(ls >> mat >> blk >> r >> c >> v))
      fail(at, "expected 'matno block i j value'");
    if (mat != 1 && mat != 2) fail(at, "matrix number must be 1 or 2");
    if (blk < 1 || blk > nblocks)
      fail(at, "block " + std::to_string(blk) + " out of range (file has " +
                   std::to_string(nblocks) + " blocks)");
    const bool lp = (blk == nblocks && lay.lp_rows > 0);
    const int size = lp ? lay.lp_rows : model.blocks[blk - 1].size;
    if (r < 1 || c < 1 || r > size || c > size) {
      const std::string name = lp ? std::string("linear") : model.blocks[blk - 1].name;
      fail(at, "entry (" + std::to_string(r) + "," + std::to_string(c) +
                   ") outside block " + name + " of size " + std::to_string(size));
    }
    if (lp && r != c) fail(at, "off-diagonal entry in the diagonal block");
    if (mat != 2) continue;  // slack matrix: validated, not stored
    if (lp) {
      sol.dual_Y[blk - 1][r - 1] = v;
    } else {
      std::vector<double>& m = sol.dual_Y[blk - 1];
      m[static_cast<std::size_t>(r - 1) * size + (c - 1)] = v;
      m[static_cast<std::size_t>(c - 1) * size + (r - 1)] = v;
    }
  }

  sol.primal_objective = to_double(model.obj_const);
  for (const auto& [v, val] : sol.primal_x)
    sol.primal_objective += to_double(model.obj[v]) * val;

  sol.dual_objective = to_double(model.obj_const);
  for (int b = 0; b < npsd; ++b) {
    const BlockForm& bf = model.blocks[b];
    const std::vector<double>& Y = sol.dual_Y[b];
    for (const auto& [r, c, cv] : bf.consts) {
      const double w =
          to_double(cv) / std::sqrt(to_double(Int(bf.row_denom[r] * bf.row_denom[c])));
      sol.dual_objective += (r == c ? 1.0 : 2.0) * w * Y[static_cast<std::size_t>(r) * bf.size + c];
    }
  }
  if (lay.lp_rows > 0) {
    for (std::size_t r = 0; r < model.linear.size(); ++r)
      sol.dual_objective += to_double(model.linear[r].rhs) * sol.dual_Y[npsd][r];
  }
  sol.solver_status = "parsed";
  return sol;
}

SolverSolution read_solution(const std::string& path, const SdpModel& model) {
  std::ifstream f(path, std::ios::binary);
  if (!f)
    throw SolverError(SolverError::Kind::parse,
                      "read_solution: cannot open " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_solution(ss.str(), model);
}

namespace {

std::string shell_quote(const std::string& s) {
  std::string q = "'";
  for (char ch : s) {
    if (ch == '\'')
      q += "'\\''";
    else
      q += ch;
  }
  q += "'";
  return q;
}

void drain(int fd, std::string& into) {
  char buf[4096];
  for (;;) {
    const ssize_t k = ::read(fd, buf, sizeof buf);
    if (k <= 0) break;
    into.append(buf, static_cast<std::size_t>(k));
  }
}

}  // namespace

ExecResult execute_solver(const std::string& solver_cmd,
                          const std::string& problem_path,
                          const std::string& solution_path, double timeout_sec) {
  // "{in}"/"{out}" placeholders let a command put the paths anywhere in its
  // argument list; without them the two paths are appended in that order.
  std::string full = solver_cmd;
  bool substituted = false;
  for (const auto& [token, value] :
       {std::pair<std::string, const std::string*>{"{in}", &problem_path},
        {"{out}", &solution_path}}) {
    for (std::size_t at = full.find(token); at != std::string::npos;
         at = full.find(token, at)) {
      const std::string q = shell_quote(*value);
      full.replace(at, token.size(), q);
      at += q.size();
      substituted = true;
    }
  }
  if (!substituted)
    full += " " + shell_quote(problem_path) + " " + shell_quote(solution_path);
  int out_pipe[2], err_pipe[2];
  if (pipe(out_pipe) != 0 || pipe(err_pipe) != 0)
    throw SolverError(SolverError::Kind::spawn, "execute_solver: pipe failed");
  const pid_t pid = fork();
  if (pid < 0)
    throw SolverError(SolverError::Kind::spawn, "execute_solver: fork failed");
  if (pid == 0) {
    dup2(out_pipe[1], STDOUT_FILENO);
    dup2(err_pipe[1], STDERR_FILENO);
    close(out_pipe[0]);
    close(out_pipe[1]);
    close(err_pipe[0]);
    close(err_pipe[1]);
    execl("/bin/sh", "sh", "-c", full.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  close(out_pipe[1]);
  close(err_pipe[1]);
  fcntl(out_pipe[0], F_SETFL, O_NONBLOCK);
  fcntl(err_pipe[0], F_SETFL, O_NONBLOCK);

  ExecResult res;
  const auto start = std::chrono::steady_clock::now();
  bool out_open = true, err_open = true;
  int status = 0;
  bool exited = false;
  while (true) {
    if (out_open || err_open) {
      struct pollfd fds[2];
      int nf = 0;
      if (out_open) fds[nf++] = {out_pipe[0], POLLIN, 0};
      if (err_open) fds[nf++] = {err_pipe[0], POLLIN, 0};
      poll(fds, nf, 100);
      char buf[4096];
      if (out_open) {
        ssize_t k;
        while ((k = ::read(out_pipe[0], buf, sizeof buf)) > 0)
          res.out.append(buf, static_cast<std::size_t>(k));
        if (k == 0) out_open = false;
      }
      if (err_open) {
        ssize_t k;
        while ((k = ::read(err_pipe[0], buf, sizeof buf)) > 0)
          res.err.append(buf, static_cast<std::size_t>(k));
        if (k == 0) err_open = false;
      }
    }
    if (!exited) {
      const pid_t w = waitpid(pid, &status, WNOHANG);
      if (w == pid) exited = true;
    }
    if (exited && !out_open && !err_open) break;
    if (exited && res.timed_out) break;
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    if (!exited && elapsed > timeout_sec) {
      res.timed_out = true;
      kill(pid, SIGKILL);
      waitpid(pid, &status, 0);
      exited = true;
    }
    if (!out_open && !err_open && !exited) {
      waitpid(pid, &status, 0);
      exited = true;
    }
  }
  // Late output may remain after exit; pipes are already at EOF by now.
  drain(out_pipe[0], res.out);
  drain(err_pipe[0], res.err);
  close(out_pipe[0]);
  close(err_pipe[0]);
  if (WIFEXITED(status))
    res.exit_code = WEXITSTATUS(status);
  else if (WIFSIGNALED(status))
    res.exit_code = 128 + WTERMSIG(status);
  return res;
}

SolverSolution run_solver(const SdpModel& model, const std::string& solver_cmd,
                          const RunOptions& opts) {
  std::string dir = opts.work_dir;
  bool made_tmp = false;
  if (dir.empty()) {
    char tmpl[] = "/tmp/splitsdp.XXXXXX";
    if (!mkdtemp(tmpl))
      throw SolverError(SolverError::Kind::spawn,
                        "run_solver: cannot create work directory");
    dir = tmpl;
    made_tmp = true;
  }
  const std::string problem = dir + "/problem.dat-s";
  const std::string solution = dir + "/problem.sol";
  const auto cleanup = [&]() {
    if (made_tmp && !opts.keep_files) {
      ::remove(problem.c_str());
      ::remove(solution.c_str());
      ::rmdir(dir.c_str());
    }
  };
  try {
    write_sdpa(model, problem);
    const ExecResult res =
        execute_solver(solver_cmd, problem, solution, opts.timeout_sec);
    if (res.timed_out)
      throw SolverError(SolverError::Kind::timeout,
                        "solver timed out after " +
                            std::to_string(opts.timeout_sec) + " s");
    if (res.exit_code == 127)
      throw SolverError(SolverError::Kind::spawn,
                        "solver command not found: " + solver_cmd);
    if (res.exit_code != 0) {
      const std::string all = res.out + "\n" + res.err;
      const bool infeas = all.find("infeasib") != std::string::npos ||
                          all.find("INFEASIB") != std::string::npos;
      const std::string tail =
          all.size() > 400 ? all.substr(all.size() - 400) : all;
      throw SolverError(infeas ? SolverError::Kind::infeasible
                               : SolverError::Kind::solver,
                        "solver exited with code " +
                            std::to_string(res.exit_code) + ": " + tail);
    }
    SolverSolution sol = read_solution(solution, model);
    sol.solver_status = "optimal";
    cleanup();
    return sol;
  } catch (...) {
    cleanup();
    throw;
  }
}

}  // namespace splitsdp
