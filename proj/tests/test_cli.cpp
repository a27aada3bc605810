#include <doctest.h>

#include <splitsdp/cli.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using namespace splitsdp;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  REQUIRE(f.good());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string fresh_dir(const std::string& tag) {
  const std::string dir = "/tmp/splitsdp_cli_" + tag;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

struct Run {
  int code;
  std::string out;
  std::string err;
};

template <typename Cmd>
Run run(Cmd cmd, const RunConfig& cfg) {
  std::ostringstream out, err;
  const int code = cmd(cfg, out, err);
  return {code, out.str(), err.str()};
}

RunConfig base_config(const std::string& dir, int n = 6, int d = 4) {
  RunConfig cfg;
  cfg.n = n;
  cfg.d = d;
  cfg.output_dir = dir;
  return cfg;
}

}  // namespace

TEST_CASE("config documents parse strictly") {
  const RunConfig cfg = RunConfig::from_json_text(
      R"({"n": 18, "d": 4, "splits": ["2,16"], "solver_command": "solve {in} {out}",
          "timeout_sec": 60.5, "output_dir": "out",
          "families": {"weight_caps": false, "shortening_kmax": 2}})",
      "doc");
  CHECK(cfg.n == 18);
  CHECK(cfg.d == 4);
  CHECK(cfg.splits == std::vector<std::string>{"2,16"});
  CHECK(cfg.solver_command == "solve {in} {out}");
  CHECK(cfg.timeout_sec == 60.5);
  CHECK(cfg.output_dir == "out");
  CHECK(!cfg.families.weight_caps);
  CHECK(cfg.families.shortening_kmax == 2);
  CHECK(cfg.families.tail);  // untouched defaults survive

  const auto rejects = [](const std::string& text, const std::string& needle) {
    try {
      RunConfig::from_json_text(text, "doc");
      return false;
    } catch (const ConfigError& e) {
      const std::string what = e.what();
      return what.find("doc") != std::string::npos &&
             what.find(needle) != std::string::npos;
    }
  };
  CHECK(rejects(R"({"m": 3})", "unknown key 'm'"));
  CHECK(rejects(R"({"families": {"bogus": true}})", "unknown family 'bogus'"));
  CHECK(rejects(R"({"n": "eighteen"})", "doc"));
  CHECK(rejects(R"([1, 2])", "object"));
  CHECK(rejects("not json", "doc"));
}

TEST_CASE("config serialization round-trips") {
  RunConfig cfg;
  cfg.n = 10;
  cfg.d = 4;
  cfg.splits = {"2,8", "10"};
  cfg.solver_command = "mysolver";
  cfg.bounds_table_path = "tbl.txt";
  cfg.timeout_sec = 33;
  cfg.output_dir = "/tmp/x";
  cfg.families.pair_caps = false;
  const RunConfig back = RunConfig::from_json_text(cfg.to_json(), "rt");
  CHECK(back.n == cfg.n);
  CHECK(back.d == cfg.d);
  CHECK(back.splits == cfg.splits);
  CHECK(back.solver_command == cfg.solver_command);
  CHECK(back.bounds_table_path == cfg.bounds_table_path);
  CHECK(back.timeout_sec == cfg.timeout_sec);
  CHECK(back.output_dir == cfg.output_dir);
  CHECK(back.families.pair_caps == cfg.families.pair_caps);
  CHECK(back.families.tail == cfg.families.tail);
}

TEST_CASE("instance resolution propagates odd distances") {
  RunConfig cfg;
  cfg.n = 17;
  cfg.d = 3;
  const ResolvedRun rr = resolve_config(cfg);
  CHECK(rr.n == 18);
  CHECK(rr.d == 4);
  CHECK(rr.propagated);
  CHECK(rr.n_req == 17);
  REQUIRE(rr.shapes.size() == 1);
  CHECK(rr.shapes[0] == SplitShape::single(18));

  cfg.splits = {"17"};  // sums to the requested, not the propagated length
  try {
    resolve_config(cfg);
    CHECK(false);
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("split the propagated length") !=
          std::string::npos);
  }
  cfg.splits = {"2,16", "18"};
  CHECK(resolve_config(cfg).shapes.size() == 2);

  cfg.splits = {"2,x"};
  CHECK_THROWS_AS(resolve_config(cfg), ConfigError);
  cfg.splits.clear();
  cfg.d = 19;
  CHECK_THROWS_AS(resolve_config(cfg), ConfigError);  // d > n + 1
  cfg.d = 0;
  CHECK_THROWS_AS(resolve_config(cfg), ConfigError);
  cfg.d = 4;
  cfg.n = 0;
  CHECK_THROWS_AS(resolve_config(cfg), ConfigError);
  cfg.n = 17;
  cfg.bounds_table_path = "/no/such/table.txt";
  CHECK_THROWS_AS(resolve_config(cfg), ConfigError);
}

TEST_CASE("artifact base names") {
  CHECK(instance_base(18, 4, SplitShape{{2, 16}}) == "A18_4_s2-16");
  CHECK(instance_base(9, 4, SplitShape::single(9)) == "A9_4_s9");
  CHECK(instance_base(6, 6, SplitShape{{1, 2, 3}}) == "A6_6_s1-2-3");
}

TEST_CASE("build writes deterministic problem artifacts") {
  const std::string d1 = fresh_dir("build1");
  const std::string d2 = fresh_dir("build2");
  const Run r1 = run(cmd_build, base_config(d1));
  CHECK(r1.code == kExitOk);
  CHECK(r1.out.find("variables") != std::string::npos);
  CHECK(r1.err.empty());
  REQUIRE(fs::exists(d1 + "/A6_4_s6.dat-s"));
  REQUIRE(fs::exists(d1 + "/A6_4_s6.manifest.json"));

  const Run r2 = run(cmd_build, base_config(d2));
  CHECK(r2.code == kExitOk);
  CHECK(slurp(d1 + "/A6_4_s6.dat-s") == slurp(d2 + "/A6_4_s6.dat-s"));
  CHECK(slurp(d1 + "/A6_4_s6.manifest.json") ==
        slurp(d2 + "/A6_4_s6.manifest.json"));

  RunConfig bad = base_config(d1, 6, 9);
  const Run rb = run(cmd_build, bad);
  CHECK(rb.code == kExitUsage);
  CHECK(rb.err.find("config error") != std::string::npos);
}

TEST_CASE("the trivial instance flows through the whole pipeline") {
  const std::string dir = fresh_dir("trivial");
  const Run b = run(cmd_build, base_config(dir, 7, 8));
  CHECK(b.code == kExitOk);
  CHECK(b.out.find("trivial model") != std::string::npos);
  CHECK(!fs::exists(dir + "/A7_8_s7.dat-s"));

  const Run s = run(cmd_solve, base_config(dir, 7, 8));  // no solver configured
  CHECK(s.code == kExitOk);
  CHECK(s.out.find("no solver run") != std::string::npos);

  const Run v = run(cmd_verify, base_config(dir, 7, 8));
  CHECK(v.code == kExitOk);
  CHECK(v.out.find("integer bound 1") != std::string::npos);
  CHECK(v.out.find("certified") != std::string::npos);
  REQUIRE(fs::exists(dir + "/A7_8_s7.cert.txt"));

  const Run rep = run(cmd_report, base_config(dir, 7, 8));
  CHECK(rep.code == kExitOk);
  CHECK(rep.out.find("claimed bound: A(7,8) <= 1 (certified, shape 7)") !=
        std::string::npos);
}

TEST_CASE("solve failure modes carry their exit codes") {
  const std::string dir = fresh_dir("solvefail");

  RunConfig none = base_config(dir);
  const Run rn = run(cmd_solve, none);
  CHECK(rn.code == kExitUsage);
  CHECK(rn.err.find("no solver command") != std::string::npos);

  RunConfig missing = base_config(dir);
  missing.solver_command = "/no/such/solver";
  const Run rm = run(cmd_solve, missing);
  CHECK(rm.code == kExitSolver);
  CHECK(rm.err.find("not found") != std::string::npos);

  RunConfig failing = base_config(dir);
  failing.solver_command = "echo INFEASIBLE >&2; false";
  const Run rf = run(cmd_solve, failing);
  CHECK(rf.code == kExitSolver);
  CHECK(rf.err.find("infeasib") != std::string::npos);

  // a manifest is still on disk for reporting
  CHECK(fs::exists(dir + "/A6_4_s6.manifest.json"));
  const Run rep = run(cmd_report, base_config(dir));
  CHECK(rep.code == kExitOk);
  CHECK(rep.out.find("no certified bound") != std::string::npos);
}

TEST_CASE("verify demands matching artifacts") {
  const std::string dir = fresh_dir("verify");
  REQUIRE(run(cmd_build, base_config(dir)).code == kExitOk);

  const Run no_sol = run(cmd_verify, base_config(dir));
  CHECK(no_sol.code == kExitUsage);
  CHECK(no_sol.err.find("run solve first") != std::string::npos);

  RunConfig other = base_config(dir);
  other.families.weight_caps = false;  // different model, same artifact paths
  const Run mismatch = run(cmd_verify, other);
  CHECK(mismatch.code == kExitUsage);
  CHECK(mismatch.err.find("different model configuration") != std::string::npos);
}

TEST_CASE("fake solvers drive verify to both verdicts") {
  const std::string dir = fresh_dir("verdicts");

  // A claim at the box-relaxation value: the zero dual reproduces it exactly.
  RunConfig high = base_config(dir);
  high.solver_command = "echo 1 1 1 1 > {out}";
  const Run sh_ = run(cmd_solve, high);
  CHECK(sh_.code == kExitOk);
  CHECK(sh_.out.find("solver claim 23") != std::string::npos);
  const Run vh = run(cmd_verify, base_config(dir));
  CHECK(vh.code == kExitOk);
  CHECK(vh.out.find("integer bound 23, raw 23, certified") != std::string::npos);

  const std::string cert1 = slurp(dir + "/A6_4_s6.cert.txt");
  CHECK(run(cmd_verify, base_config(dir)).code == kExitOk);
  CHECK(slurp(dir + "/A6_4_s6.cert.txt") == cert1);  // byte-stable re-verify

  const Run rep = run(cmd_report, base_config(dir));
  CHECK(rep.code == kExitOk);
  CHECK(rep.out.find("claimed bound: A(6,4) <= 23 (certified, shape 6)") !=
        std::string::npos);

  // An untenable claim: the exact bound cannot keep pace, so no certification.
  RunConfig low = base_config(dir);
  low.solver_command = "echo 0 0 0 0 > {out}";
  CHECK(run(cmd_solve, low).code == kExitOk);
  const Run vl = run(cmd_verify, base_config(dir));
  CHECK(vl.code == kExitUncertified);
  CHECK(vl.out.find("UNCERTIFIED") != std::string::npos);
  CHECK(vl.err.find("no usable bound") != std::string::npos);

  const Run rep2 = run(cmd_report, base_config(dir));
  CHECK(rep2.code == kExitOk);
  CHECK(rep2.out.find("no certified bound") != std::string::npos);
}

TEST_CASE("report copes with missing artifacts and propagation") {
  const std::string dir = fresh_dir("report");
  const Run rep = run(cmd_report, base_config(dir));
  CHECK(rep.code == kExitOk);
  CHECK(rep.out.find("no artifacts found") != std::string::npos);

  RunConfig odd = base_config(dir, 5, 3);
  const Run ro = run(cmd_report, odd);
  CHECK(ro.code == kExitOk);
  CHECK(ro.out.find("instance A(6,4)") != std::string::npos);
  CHECK(ro.out.find("odd distances propagate") != std::string::npos);

  // solved-but-unverified marker
  RunConfig solved = base_config(dir);
  solved.solver_command = "echo 1 1 1 1 > {out}";
  REQUIRE(run(cmd_solve, solved).code == kExitOk);
  const Run rs = run(cmd_report, base_config(dir));
  CHECK(rs.out.find("solved but unverified") != std::string::npos);
}
