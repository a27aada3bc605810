#include <splitsdp/cli.hpp>

#include <splitsdp/sdpa_io.hpp>
#include <splitsdp/verifier.hpp>

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

namespace splitsdp {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << text;
}

}  // namespace

RunConfig RunConfig::from_json_text(const std::string& text,
                                    const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    throw ConfigError(origin + ": " + e.what());
  }
  if (!j.is_object()) throw ConfigError(origin + ": top level must be an object");
  static const std::vector<std::string> known = {
      "n",          "d",           "splits",    "solver_command",
      "bounds_table", "timeout_sec", "output_dir", "families"};
  for (const auto& [key, val] : j.items()) {
    (void)val;
    bool ok = false;
    for (const std::string& k : known) ok = ok || (k == key);
    if (!ok) throw ConfigError(origin + ": unknown key '" + key + "'");
  }
  RunConfig cfg;
  try {
    if (j.contains("n")) cfg.n = j["n"].get<int>();
    if (j.contains("d")) cfg.d = j["d"].get<int>();
    if (j.contains("splits")) {
      for (const auto& s : j["splits"]) cfg.splits.push_back(s.get<std::string>());
    }
    if (j.contains("solver_command"))
      cfg.solver_command = j["solver_command"].get<std::string>();
    if (j.contains("bounds_table"))
      cfg.bounds_table_path = j["bounds_table"].get<std::string>();
    if (j.contains("timeout_sec")) cfg.timeout_sec = j["timeout_sec"].get<double>();
    if (j.contains("output_dir")) cfg.output_dir = j["output_dir"].get<std::string>();
    if (j.contains("families")) {
      const json& f = j["families"];
      static const std::vector<std::string> fams = {
          "shortening", "shortening_kmax", "tail",      "weighted_tail",
          "tail_family", "weight_caps",    "pair_caps"};
      for (const auto& [key, val] : f.items()) {
        (void)val;
        bool ok = false;
        for (const std::string& k : fams) ok = ok || (k == key);
        if (!ok) throw ConfigError(origin + ": unknown family '" + key + "'");
      }
      ModelOptions& o = cfg.families;
      if (f.contains("shortening")) o.shortening = f["shortening"].get<bool>();
      if (f.contains("shortening_kmax"))
        o.shortening_kmax = f["shortening_kmax"].get<int>();
      if (f.contains("tail")) o.tail = f["tail"].get<bool>();
      if (f.contains("weighted_tail")) o.weighted_tail = f["weighted_tail"].get<bool>();
      if (f.contains("tail_family")) o.tail_family = f["tail_family"].get<bool>();
      if (f.contains("weight_caps")) o.weight_caps = f["weight_caps"].get<bool>();
      if (f.contains("pair_caps")) o.pair_caps = f["pair_caps"].get<bool>();
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(origin + ": " + e.what());
  }
  return cfg;
}

RunConfig RunConfig::from_file(const std::string& path) {
  return from_json_text(read_text_file(path), path);
}

std::string RunConfig::to_json() const {
  nlohmann::ordered_json j;
  j["n"] = n;
  j["d"] = d;
  j["splits"] = splits;
  j["solver_command"] = solver_command;
  j["bounds_table"] = bounds_table_path;
  j["timeout_sec"] = timeout_sec;
  j["output_dir"] = output_dir;
  j["families"] = {{"shortening", families.shortening},
                   {"shortening_kmax", families.shortening_kmax},
                   {"tail", families.tail},
                   {"weighted_tail", families.weighted_tail},
                   {"tail_family", families.tail_family},
                   {"weight_caps", families.weight_caps},
                   {"pair_caps", families.pair_caps}};
  return j.dump(2);
}

ResolvedRun resolve_config(const RunConfig& cfg) {
  ResolvedRun rr;
  rr.n_req = cfg.n;
  rr.d_req = cfg.d;
  if (cfg.n < 1) throw ConfigError("n must be >= 1");
  if (cfg.d < 1) throw ConfigError("d must be >= 1");
  if (cfg.d > cfg.n + 1)
    throw ConfigError("d = " + std::to_string(cfg.d) + " exceeds n + 1");
  rr.n = cfg.n;
  rr.d = cfg.d;
  if (cfg.d <= cfg.n) {
    const auto [nn, dd] = propagate(cfg.n, cfg.d);
    rr.propagated = (nn != cfg.n);
    rr.n = nn;
    rr.d = dd;
  }
  if (cfg.splits.empty()) {
    rr.shapes.push_back(SplitShape::single(rr.n));
  } else {
    for (const std::string& s : cfg.splits) {
      SplitShape shape;
      try {
        shape = parse_shape(s);
      } catch (const std::exception& e) {
        throw ConfigError("split '" + s + "': " + e.what());
      }
      if (shape.n() != rr.n) {
        std::string msg = "split '" + s + "' sums to " +
                          std::to_string(shape.n()) + " but the instance is (" +
                          std::to_string(rr.n) + "," + std::to_string(rr.d) + ")";
        if (rr.propagated)
          msg += " after odd-distance propagation; split the propagated length";
        throw ConfigError(msg);
      }
      rr.shapes.push_back(shape);
    }
  }
  if (!cfg.bounds_table_path.empty()) {
    try {
      rr.table = BoundTable::load(cfg.bounds_table_path);
    } catch (const std::exception& e) {
      throw ConfigError(e.what());
    }
  }
  return rr;
}

std::string instance_base(int n, int d, const SplitShape& shape) {
  std::string s = "A" + std::to_string(n) + "_" + std::to_string(d) + "_s";
  for (std::size_t p = 0; p < shape.parts.size(); ++p) {
    if (p) s += '-';
    s += std::to_string(shape.parts[p]);
  }
  return s;
}

namespace {

struct CertSummary {
  bool present = false;
  std::string digest;
  std::string raw_bound;
  std::string integer_bound;
  double solver_claim = 0;
  bool certified = false;
};

CertSummary read_cert_summary(const std::string& path) {
  CertSummary cs;
  std::ifstream f(path);
  if (!f) return cs;
  cs.present = true;
  std::string line;
  while (std::getline(f, line)) {
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "digest")
      ls >> cs.digest;
    else if (key == "raw_bound")
      ls >> cs.raw_bound;
    else if (key == "integer_bound")
      ls >> cs.integer_bound;
    else if (key == "solver_claim")
      ls >> cs.solver_claim;
    else if (key == "certified") {
      std::string v;
      ls >> v;
      cs.certified = (v == "yes");
    }
  }
  return cs;
}

// Leading "*digest <hex>" comment of a problem file, empty if absent.
std::string problem_digest(const std::string& path) {
  std::ifstream f(path);
  if (!f) return "";
  std::string line;
  if (!std::getline(f, line)) return "";
  std::istringstream ls(line);
  std::string tag, hex;
  ls >> tag >> hex;
  return tag == "*digest" ? hex : "";
}

void note_propagation(const ResolvedRun& rr, std::ostream& out) {
  if (!rr.propagated) return;
  out << "note: A(" << rr.n_req << "," << rr.d_req << ") = A(" << rr.n << ","
      << rr.d << ") (odd distances propagate); building the even instance\n";
}

}  // namespace

int cmd_build(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    const ResolvedRun rr = resolve_config(cfg);
    fs::create_directories(cfg.output_dir);
    note_propagation(rr, out);
    for (const SplitShape& shape : rr.shapes) {
      BoundContext ctx(&rr.table);
      const SdpModel model = build_model(shape, rr.d, ctx, cfg.families);
      const std::string base =
          (fs::path(cfg.output_dir) / instance_base(rr.n, rr.d, shape)).string();
      write_text_file(base + ".manifest.json", model.manifest_json());
      out << "shape " << shape.str() << ": " << model.ps.size() << " profiles, "
          << model.cls.classes.size() << " classes, " << model.num_vars
          << " variables, " << model.blocks.size() << " blocks, "
          << model.linear.size() << " linear rows\n";
      if (model.num_vars == 0) {
        out << "  trivial model: optimum 1; no problem file emitted\n";
        continue;
      }
      write_sdpa(model, base + ".dat-s");
      out << "  wrote " << base << ".dat-s (digest " << model.digest() << ")\n";
    }
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

int cmd_solve(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  ResolvedRun rr;
  try {
    rr = resolve_config(cfg);
    fs::create_directories(cfg.output_dir);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitUsage;
  }
  note_propagation(rr, out);
  bool failed = false;
  std::optional<double> best;
  std::string best_shape;
  for (const SplitShape& shape : rr.shapes) {
    const std::string base =
        (fs::path(cfg.output_dir) / instance_base(rr.n, rr.d, shape)).string();
    try {
      BoundContext ctx(&rr.table);
      const SdpModel model = build_model(shape, rr.d, ctx, cfg.families);
      write_text_file(base + ".manifest.json", model.manifest_json());
      if (model.num_vars == 0) {
        out << "shape " << shape.str()
            << ": trivial model, optimum 1 (no solver run)\n";
        if (!best || 1.0 < *best) {
          best = 1.0;
          best_shape = shape.str();
        }
        continue;
      }
      if (cfg.solver_command.empty())
        throw ConfigError("no solver command configured (--solver-cmd)");
      write_sdpa(model, base + ".dat-s");
      const ExecResult res = execute_solver(cfg.solver_command, base + ".dat-s",
                                            base + ".sol", cfg.timeout_sec);
      if (res.timed_out) {
        err << "shape " << shape.str() << ": solver timed out after "
            << cfg.timeout_sec << " s\n";
        failed = true;
        continue;
      }
      if (res.exit_code == 127) {
        err << "shape " << shape.str() << ": solver command not found: '"
            << cfg.solver_command
            << "' (install one or point --solver-cmd at it)\n";
        failed = true;
        continue;
      }
      if (res.exit_code != 0) {
        const std::string all = res.out + res.err;
        err << "shape " << shape.str() << ": solver exited with code "
            << res.exit_code;
        if (all.find("infeasib") != std::string::npos ||
            all.find("INFEASIB") != std::string::npos)
          err << " (reported infeasibility)";
        err << "\n";
        const std::string tail = all.size() > 300 ? all.substr(all.size() - 300) : all;
        if (!tail.empty()) err << "  solver said: " << tail << "\n";
        failed = true;
        continue;
      }
      const SolverSolution sol = read_solution(base + ".sol", model);
      out << "shape " << shape.str() << ": solver claim "
          << fmt17(sol.primal_objective) << " (dual " << fmt17(sol.dual_objective)
          << ")\n";
      if (!best || sol.primal_objective < *best) {
        best = sol.primal_objective;
        best_shape = shape.str();
      }
    } catch (const ConfigError& e) {
      err << "config error: " << e.what() << "\n";
      return kExitUsage;
    } catch (const std::exception& e) {
      err << "shape " << shape.str() << ": " << e.what() << "\n";
      failed = true;
    }
  }
  if (best && rr.shapes.size() > 1)
    out << "best shape: " << best_shape << " (claim " << fmt17(*best) << ")\n";
  return failed ? kExitSolver : kExitOk;
}

int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  ResolvedRun rr;
  try {
    rr = resolve_config(cfg);
    fs::create_directories(cfg.output_dir);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitUsage;
  }
  note_propagation(rr, out);
  bool missing = false, solver_issue = false, uncertified = false;
  for (const SplitShape& shape : rr.shapes) {
    const std::string base =
        (fs::path(cfg.output_dir) / instance_base(rr.n, rr.d, shape)).string();
    try {
      BoundContext ctx(&rr.table);
      const SdpModel model = build_model(shape, rr.d, ctx, cfg.families);
      Certificate cert;
      if (model.num_vars == 0) {
        RationalDual dual;
        dual.blocks.resize(model.blocks.size());
        for (std::size_t b = 0; b < model.blocks.size(); ++b)
          dual.blocks[b].assign(model.blocks[b].size,
                                std::vector<Rat>(model.blocks[b].size, Rat(0)));
        dual.mu.assign(model.linear.size(), Rat(0));
        cert = certified_bound(model, dual, 1.0, 0);
      } else {
        const std::string prob_digest = problem_digest(base + ".dat-s");
        if (!prob_digest.empty() && prob_digest != model.digest()) {
          err << "shape " << shape.str() << ": problem file " << base
              << ".dat-s was built from a different model configuration\n";
          missing = true;
          continue;
        }
        if (!fs::exists(base + ".sol")) {
          err << "shape " << shape.str() << ": no solution file " << base
              << ".sol (run solve first)\n";
          missing = true;
          continue;
        }
        const SolverSolution sol = read_solution(base + ".sol", model);
        cert = certify(model, sol);
      }
      write_text_file(base + ".cert.txt", cert.text());
      out << "shape " << shape.str() << ": integer bound "
          << cert.integer_bound.get_str() << ", raw " << rat_str(cert.raw_bound)
          << ", " << (cert.certified ? "certified" : "UNCERTIFIED") << "\n";
      for (std::size_t b = 0; b < cert.repaired.size(); ++b)
        if (cert.repaired[b])
          out << "  dual block " << model.blocks[b].name << " was not PSD; "
              << cert.repaired[b] << " row(s) zeroed before certification\n";
      if (!cert.certified) {
        uncertified = true;
        err << "shape " << shape.str()
            << ": uncertified: the exact bound exceeds the solver claim ("
            << fmt17(cert.solver_claim) << "); the run provides no usable bound\n";
      }
    } catch (const SolverError& e) {
      err << "shape " << shape.str() << ": " << e.what() << "\n";
      solver_issue = true;
    } catch (const std::exception& e) {
      err << "shape " << shape.str() << ": " << e.what() << "\n";
      solver_issue = true;
    }
  }
  if (missing) return kExitUsage;
  if (solver_issue) return kExitSolver;
  if (uncertified) return kExitUncertified;
  return kExitOk;
}

int cmd_report(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  ResolvedRun rr;
  try {
    rr = resolve_config(cfg);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitUsage;
  }
  out << "instance A(" << rr.n << "," << rr.d << ")\n";
  if (rr.propagated)
    out << "note: requested A(" << rr.n_req << "," << rr.d_req
        << "); odd distances propagate to the even instance\n";
  bool any = false;
  std::optional<std::pair<std::string, CertSummary>> best;
  std::map<std::string, std::vector<std::string>> bounds_by_shape;
  for (const SplitShape& shape : rr.shapes) {
    const std::string base =
        (fs::path(cfg.output_dir) / instance_base(rr.n, rr.d, shape)).string();
    std::string line = "shape " + shape.str() + ": ";
    bool have_manifest = false;
    if (fs::exists(base + ".manifest.json")) {
      have_manifest = true;
      any = true;
      try {
        const json j = json::parse(read_text_file(base + ".manifest.json"));
        line += std::to_string(j.value("profiles", 0)) + " profiles, " +
                std::to_string(j.value("variables", 0)) + " variables";
        if (j.contains("bounds_used"))
          for (const auto& s : j["bounds_used"])
            bounds_by_shape[shape.str()].push_back(s.get<std::string>());
        if (j.contains("linear_families")) {
          std::string fams;
          for (const auto& [k, v] : j["linear_families"].items()) {
            if (!fams.empty()) fams += " ";
            fams += k + "=" + std::to_string(v.get<int>());
          }
          if (!fams.empty()) line += "; rows " + fams;
        }
      } catch (const std::exception&) {
        line += "unreadable manifest";
      }
    } else {
      line += "not built";
    }
    const CertSummary cs = read_cert_summary(base + ".cert.txt");
    if (cs.present) {
      any = true;
      line += "; bound " + cs.integer_bound + " (" +
              (cs.certified ? "certified" : "uncertified") +
              ", raw " + cs.raw_bound + ")";
      if (cs.certified &&
          (!best || Int(cs.integer_bound) < Int(best->second.integer_bound)))
        best = std::make_pair(shape.str(), cs);
    } else if (have_manifest && fs::exists(base + ".sol")) {
      line += "; solved but unverified";
    }
    out << line << "\n";
  }
  if (!any) {
    out << "no artifacts found under " << cfg.output_dir << "\n";
    return kExitOk;
  }
  if (best) {
    out << "claimed bound: A(" << rr.n << "," << rr.d << ") <= "
        << best->second.integer_bound << " (certified, shape " << best->first
        << ")\n";
    const auto it = bounds_by_shape.find(best->first);
    if (it != bounds_by_shape.end() && !it->second.empty()) {
      std::size_t fallbacks = 0;
      std::vector<std::string> table_entries;
      for (const std::string& s : it->second) {
        if (s.find("[table:") != std::string::npos)
          table_entries.push_back(s);
        else
          ++fallbacks;
      }
      if (!table_entries.empty()) {
        out << "table bounds consumed:\n";
        for (const std::string& s : table_entries) out << "  " << s << "\n";
      }
      if (fallbacks)
        out << fallbacks << " further bounds derived from built-in fallbacks"
            << " (full list in the certificate)\n";
    }
  } else {
    out << "no certified bound available\n";
  }
  return kExitOk;
}

}  // namespace splitsdp
