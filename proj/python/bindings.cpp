#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fockop/carleson.hpp"
#include "fockop/commands.hpp"
#include "fockop/errors.hpp"
#include "fockop/io.hpp"
#include "fockop/oracle.hpp"
#include "fockop/wco.hpp"

namespace py = pybind11;
using namespace fockop;

namespace {

WcoProblem parse(const std::string& text) { return problem_from_json(Json::parse(text)); }

Command command_from(const std::string& name) {
  if (name == "classify") return Command::classify;
  if (name == "bounds") return Command::bounds;
  if (name == "essnorm") return Command::essnorm;
  if (name == "oracle") return Command::oracle;
  throw ParseError("unknown command '" + name + "'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Weighted composition operators between Fock spaces";
  m.attr("__version__") = FOCKOP_VERSION;

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<DimensionError>(m, "DimensionError", base.ptr());
  py::register_exception<NumericalError>(m, "NumericalError", base.ptr());
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<ResourceError>(m, "ResourceError", base.ptr());
  py::register_exception<UnsupportedError>(m, "UnsupportedError", base.ptr());
  py::register_exception<ParseError>(m, "ParseError", base.ptr());

  py::class_<WcoProblem>(m, "Problem")
      .def_static("from_json", &parse, py::arg("text"))
      .def_static("load", [](const std::string& path) { return load_problem(path); }, py::arg("path"))
      .def("to_json", [](const WcoProblem& p) { return problem_to_json(p).dump(); })
      .def_property_readonly("n", &WcoProblem::dim)
      .def_readonly("p", &WcoProblem::p)
      .def_readonly("q", &WcoProblem::q)
      .def("__repr__", [](const WcoProblem& p) {
        return "<Problem n=" + std::to_string(p.dim()) + " p=" + std::to_string(p.p) + " q=" + std::to_string(p.q) + ">";
      });

  py::class_<Classification>(m, "Classification")
      .def_property_readonly("verdict", [](const Classification& c) { return to_string(c.verdict); })
      .def_property_readonly("mode", [](const Classification& c) { return to_string(c.mode); })
      .def_readonly("certificate", &Classification::certificate)
      .def_property_readonly("bounded", &Classification::bounded);

  py::class_<NormBounds>(m, "NormBounds")
      .def_readonly("lower", &NormBounds::lower)
      .def_readonly("upper", &NormBounds::upper)
      .def_property_readonly("mode", [](const NormBounds& b) { return to_string(b.mode); })
      .def_readonly("upper_is_up_to_universal_constant", &NormBounds::upper_is_up_to_universal_constant)
      .def_readonly("essential_lower", &NormBounds::essential_lower)
      .def_readonly("essential_upper", &NormBounds::essential_upper);

  py::class_<EllSup>(m, "EllSup")
      .def_readonly("finite", &EllSup::finite)
      .def_readonly("value", &EllSup::value)
      .def_property_readonly("mode", [](const EllSup& s) { return to_string(s.mode); })
      .def_readonly("argmax", &EllSup::argmax)
      .def_readonly("reason", &EllSup::reason);

  m.def("classify", &classify, py::arg("problem"));
  m.def("composition_criterion",
        [](const WcoProblem& p) { return composition_criterion(p.phi, p.p, p.q); }, py::arg("problem"),
        "Verdict for psi = 1 from the map alone.");
  m.def("norm_bounds", &norm_bounds, py::arg("problem"));
  m.def("essential_norm_bounds", &essential_norm_bounds, py::arg("problem"));
  m.def(
      "ell_sup", [](const WcoProblem& p) { return ell_sup(ell_profile(normalize(p), p.q, p.quad)); },
      py::arg("problem"));
  m.def(
      "carleson_integral",
      [](const WcoProblem& p) {
        const CarlesonReport r = carleson_integral(normalize(p), p.p, p.q, p.quad);
        py::dict d;
        d["r"] = r.r_exponent;
        d["member"] = r.member;
        d["mode"] = to_string(r.mode);
        d["lr_norm"] = r.lr_norm ? py::cast(r.lr_norm->value) : py::none();
        return d;
      },
      py::arg("problem"), "L^r norm of l for q < p.");
  m.def(
      "f2_matrix", [](const WcoProblem& p, int max_degree) { return f2_matrix(p, {max_degree, p.quad}); },
      py::arg("problem"), py::arg("max_degree") = 12);
  m.def(
      "truncated_norm", [](const WcoProblem& p, int max_degree) { return truncated_norm(f2_matrix(p, {max_degree, p.quad})); },
      py::arg("problem"), py::arg("max_degree") = 12);
  m.def(
      "report",
      [](const std::string& command, const WcoProblem& p, const std::string& source) {
        return report_to_json(run_command(command_from(command), p, source)).dump(2);
      },
      py::arg("command"), py::arg("problem"), py::arg("source") = "<python>",
      "JSON report as printed by the command line tool.");
}
