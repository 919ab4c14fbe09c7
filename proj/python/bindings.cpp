#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>
#include <fstream>
#include <limits>
#include <memory>
#include <sstream>

#include "nesy/circuit.hpp"
#include "nesy/compiler.hpp"
#include "nesy/losses.hpp"
#include "nesy/queries.hpp"

namespace py = pybind11;
using namespace nesy;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

// Immutable; shared between calls and threads.
struct CircuitHandle {
  std::shared_ptr<const Circuit> circuit;
  std::vector<Var> aux;

  std::uint32_t num_vars() const { return circuit->num_vars(); }

  LiteralWeights weights(const Array& p) const {
    if (p.ndim() != 1 || static_cast<std::size_t>(p.shape(0)) != num_vars())
      throw py::value_error("expected a vector of " + std::to_string(num_vars()) + " probabilities");
    std::span<const double> xs(p.data(), static_cast<std::size_t>(p.shape(0)));
    for (double x : xs)
      if (!(x >= 0 && x <= 1)) throw py::value_error("probabilities must lie in [0, 1]");
    auto w = LiteralWeights::from_probabilities(xs);
    for (Var v : aux) w.set_aux(v);
    return w;
  }
};

Array to_array(const std::vector<double>& v) {
  Array out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    PyErr_SetString(PyExc_FileNotFoundError, ("cannot read `" + path + "`").c_str());
    throw py::error_already_set();
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string ids(const std::vector<NodeId>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size() && i < 8; ++i) s += (i ? ", " : "") + std::to_string(v[i]);
  return v.size() > 8 ? s + ", ..." : s;
}

CircuitHandle validated(Circuit c, std::vector<Var> aux) {
  if (auto r = check_decomposable(c); !r.ok) throw computation_error("circuit is not decomposable at node " + ids(r.violations));
  if (auto r = check_smooth(c); !r.ok) throw computation_error("circuit is not smooth at node " + ids(r.violations));
  if (!c.properties().deterministic)
    throw computation_error("no determinism certificate for OR node " + ids(certify_determinism(c).violations));
  for (Var v : aux)
    if (!v.valid() || v.index > c.num_vars()) throw py::value_error("auxiliary variable outside the circuit");
  return {std::make_shared<const Circuit>(std::move(c)), std::move(aux)};
}

std::vector<Var> to_vars(const std::vector<std::uint32_t>& xs) {
  std::vector<Var> out;
  for (auto x : xs) out.push_back(Var{x});
  return out;
}

EntropyKind entropy_kind(const std::string& s) {
  if (s == "nesy") return EntropyKind::nesy;
  if (s == "full") return EntropyKind::full;
  throw py::value_error("entropy_kind must be 'nesy' or 'full'");
}

py::tuple batch_loss(const CircuitHandle& h, const Array& P, double w_semantic, double w_entropy,
                     const std::string& kind) {
  if (P.ndim() != 2 || static_cast<std::size_t>(P.shape(1)) != h.num_vars())
    throw py::value_error("expected a (B, " + std::to_string(h.num_vars()) + ") array");
  const auto rows = static_cast<std::size_t>(P.shape(0));
  const std::size_t n = h.num_vars();
  ObjectiveConfig cfg{w_semantic, w_entropy, entropy_kind(kind)};
  std::span<const double> values(P.data(), rows * n);

  std::vector<RowResult> results;
  {
    py::gil_scoped_release release;
    results = combined_objective(*h.circuit, values, rows, cfg, h.aux);
  }

  Array loss(static_cast<py::ssize_t>(rows));
  Array grad({static_cast<py::ssize_t>(rows), static_cast<py::ssize_t>(n)});
  py::array_t<bool> valid(static_cast<py::ssize_t>(rows));
  auto l = loss.mutable_unchecked<1>();
  auto g = grad.mutable_unchecked<2>();
  auto v = valid.mutable_unchecked<1>();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t r = 0; r < rows; ++r) {
    const auto& res = results[r];
    v(r) = res.valid();
    l(r) = res.valid() ? res.bundle->value : nan;
    for (std::size_t i = 0; i < n; ++i) g(r, i) = res.valid() ? res.bundle->grad[i] : nan;
  }
  return py::make_tuple(loss, grad, valid);
}

}  // namespace

PYBIND11_MODULE(_nesy, m) {
  m.doc() = "d-DNNF compilation, weighted model counting, semantic loss and constrained entropy";

  auto base = py::register_exception<error>(m, "NesyError", PyExc_RuntimeError);
  py::register_exception<parse_error>(m, "ParseError", base.ptr());
  py::register_exception<computation_error>(m, "ComputationError", base.ptr());

  py::class_<CircuitHandle>(m, "CircuitHandle")
      .def_property_readonly("num_vars", &CircuitHandle::num_vars)
      .def_property_readonly("num_nodes", [](const CircuitHandle& h) { return h.circuit->size(); })
      .def_property_readonly("num_edges", [](const CircuitHandle& h) { return h.circuit->num_edges(); })
      .def_property_readonly("aux_vars",
                             [](const CircuitHandle& h) {
                               std::vector<std::uint32_t> out;
                               for (Var v : h.aux) out.push_back(v.index);
                               return out;
                             })
      .def("to_nnf", [](const CircuitHandle& h) { return write_nnf(*h.circuit); })
      .def("wmc", [](const CircuitHandle& h, const Array& p, bool log_space) {
             return wmc(*h.circuit, h.weights(p), log_space ? Space::log : Space::linear).value;
           }, py::arg("p"), py::arg("log_space") = false)
      .def("entropy", [](const CircuitHandle& h, const Array& p) { return entropy(*h.circuit, h.weights(p)).value; },
           py::arg("p"))
      .def("model_count", [](const CircuitHandle& h) { return py::int_(py::str(model_count(*h.circuit).str())); })
      .def("wmc_gradient", [](const CircuitHandle& h, const Array& p) {
             return to_array(wmc_gradient(*h.circuit, h.weights(p)));
           }, py::arg("p"))
      .def("entropy_gradient", [](const CircuitHandle& h, const Array& p) {
             return to_array(entropy_gradient(*h.circuit, h.weights(p)));
           }, py::arg("p"))
      .def("semantic_loss", [](const CircuitHandle& h, const Array& p) {
             auto b = semantic_loss(*h.circuit, h.weights(p));
             return py::make_tuple(b.value, to_array(b.grad));
           }, py::arg("p"))
      .def("nesy_entropy", [](const CircuitHandle& h, const Array& p) {
             auto b = nesy_entropy(*h.circuit, h.weights(p));
             return py::make_tuple(b.value, to_array(b.grad));
           }, py::arg("p"));

  m.def("load_circuit", [](const std::string& path, const std::vector<std::uint32_t>& aux) {
          return validated(read_nnf(read_file(path)), to_vars(aux));
        }, py::arg("path"), py::arg("aux") = std::vector<std::uint32_t>{},
        "Load an NNF file; raises when it is not smooth, decomposable and certifiably deterministic.");

  m.def("parse_circuit", [](const std::string& text, const std::vector<std::uint32_t>& aux) {
          return validated(read_nnf(text), to_vars(aux));
        }, py::arg("text"), py::arg("aux") = std::vector<std::uint32_t>{});

  m.def("compile_dimacs", [](const std::string& text, const std::string& order) {
          CompileOptions o;
          if (order == "dfs_fixed") o.var_order = VarOrder::dfs_fixed;
          else if (order != "most_frequent") throw py::value_error("order must be 'most_frequent' or 'dfs_fixed'");
          CnfFormula cnf = parse_dimacs(text);
          Circuit c = [&] {
            py::gil_scoped_release release;
            return compile(cnf, o);
          }();
          return validated(std::move(c), cnf.aux_vars);
        }, py::arg("text"), py::arg("order") = "most_frequent");

  m.def("compile_dsl", [](const std::string& text) {
          DslParse d = parse_constraint_dsl(text);
          std::vector<Var> aux;
          Circuit c = compile(d.formula, d.names.size(), {}, nullptr, &aux);
          py::dict names;
          for (std::uint32_t v = 1; v <= d.names.size(); ++v) names[py::str(d.names.name(Var{v}))] = v;
          return py::make_tuple(validated(std::move(c), std::move(aux)), names);
        }, py::arg("text"), "Compile a constraint; returns (handle, {name: variable}).");

  m.def("full_entropy", [](const Array& p) {
          auto b = full_entropy(std::span<const double>(p.data(), static_cast<std::size_t>(p.size())));
          return py::make_tuple(b.value, to_array(b.grad));
        }, py::arg("p"));

  m.def("batch_loss", &batch_loss, py::arg("handle"), py::arg("P"), py::arg("w_semantic") = 1.0,
        py::arg("w_entropy") = 0.1, py::arg("entropy_kind") = "nesy",
        "Per-row w_semantic * semantic loss + w_entropy * entropy. Returns (values, grads, valid); "
        "rows whose constraint has probability 0 are NaN and valid=False.");
}
