#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <splitsdp/algebra.hpp>
#include <splitsdp/bounds.hpp>
#include <splitsdp/model.hpp>
#include <splitsdp/oracle.hpp>
#include <splitsdp/sdpa_io.hpp>
#include <splitsdp/verifier.hpp>

#include <sstream>

namespace py = pybind11;
using namespace splitsdp;

namespace {

SplitShape shape_of(const std::string& s) { return parse_shape(s); }

// Rationals cross the boundary as "p/q" strings; Python can Fraction() them.
std::string rat_py(const Rat& r) { return rat_str(r); }

py::dict model_summary(const std::string& shape, int d,
                       const std::string& bounds_table) {
  BoundTable table;
  if (!bounds_table.empty()) table = BoundTable::load(bounds_table);
  BoundContext ctx(&table);
  const SdpModel model = build_model(shape_of(shape), d, ctx);
  py::dict out;
  out["shape"] = model.shape.str();
  out["d"] = model.d;
  out["profiles"] = model.ps.size();
  out["classes"] = model.cls.classes.size();
  out["variables"] = model.num_vars;
  out["blocks"] = model.blocks.size();
  out["linear_rows"] = model.linear.size();
  out["digest"] = model.digest();
  return out;
}

std::string problem_text(const std::string& shape, int d,
                         const std::string& bounds_table) {
  BoundTable table;
  if (!bounds_table.empty()) table = BoundTable::load(bounds_table);
  BoundContext ctx(&table);
  const SdpModel model = build_model(shape_of(shape), d, ctx);
  return sdpa_text(model);
}

py::dict code_check(const std::string& shape, int d,
                    const std::vector<std::string>& words) {
  const SplitShape s = shape_of(shape);
  const CodeSample code = CodeSample::from_strings(s, words);
  BoundTable table;
  BoundContext ctx(&table);
  const SdpModel model = build_model(s, d, ctx);
  const LambdaCounts lc = lambda_counts(model.ps, code);
  const std::vector<Rat> x = x_from_lambda(lc, static_cast<long>(code.words.size()));
  const FeasibilityReport rep = check_feasible(model, x, 1e-9);
  py::dict out;
  out["pass"] = rep.pass;
  out["objective"] = rat_py(rep.objective);
  out["min_block_eig"] = rep.min_block_eig;
  out["failures"] = rep.failures;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "split-algebra SDP bounds for binary codes";

  m.def("binomial", [](long n, long k) { return binom(n, k).get_str(); },
        py::arg("n"), py::arg("k"));
  m.def("krawtchouk",
        [](long k, long n, long x) { return krawtchouk(k, n, x).get_str(); },
        py::arg("k"), py::arg("n"), py::arg("x"));
  m.def("beta_coefficient",
        [](long i, long j, long t, long k, long n) {
          return beta(i, j, t, k, n).get_str();
        },
        py::arg("i"), py::arg("j"), py::arg("t"), py::arg("k"), py::arg("n"));

  m.def("profile_count",
        [](const std::string& shape) { return ProfileSet(shape_of(shape)).size(); },
        py::arg("shape"), "number of (i, j, t) orbit profiles of the shape");
  m.def("block_dimensions",
        [](const std::string& shape) {
          const SplitShape s = shape_of(shape);
          std::vector<std::pair<std::string, int>> out;
          for (const BlockIndex& k : block_indices(s)) {
            std::ostringstream name;
            for (std::size_t p = 0; p < k.size(); ++p)
              name << (p ? "," : "") << k[p];
            out.emplace_back(name.str(), block_size(s, k));
          }
          return out;
        },
        py::arg("shape"));

  m.def("exact_code_size", [](int n, int d) { return exact_A(n, d); },
        py::arg("n"), py::arg("d"),
        "exact branch-and-bound optimum, small n only");
  m.def("lp_bound", [](int n, int d) { return rat_py(delsarte_lp_value(n, d)); },
        py::arg("n"), py::arg("d"),
        "classical linear-programming bound as an exact fraction string");

  m.def("model_summary", &model_summary, py::arg("shape"), py::arg("d"),
        py::arg("bounds_table") = std::string());
  m.def("problem_text", &problem_text, py::arg("shape"), py::arg("d"),
        py::arg("bounds_table") = std::string(),
        "solver input in the sparse SDPA encoding");
  m.def("code_check", &code_check, py::arg("shape"), py::arg("d"),
        py::arg("words"),
        "feasibility report for an explicit code against the model");
}
