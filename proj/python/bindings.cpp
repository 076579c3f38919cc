#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "opsplit/config.hpp"
#include "opsplit/inclusion.hpp"
#include "opsplit/operators.hpp"
#include "opsplit/oracles.hpp"
#include "opsplit/vector_space.hpp"

namespace py = pybind11;
using namespace opsplit;

namespace {

py::dict summary_to_dict(const RunSummary& s) {
  py::dict out;
  out["status"] = std::string(to_string(s.status));
  out["iterations"] = s.iterations;
  out["final_residual"] = s.final_residual;
  out["final_outer_gap"] = s.final_outer_gap;
  out["final_feasibility"] = s.final_feasibility;
  out["solution"] = s.solution;
  out["trace_path"] = s.trace_path;
  out["trace_rows"] = s.trace_rows;
  if (!s.stop_reason.empty()) out["stop_reason"] = s.stop_reason;
  return out;
}

py::dict report_to_dict(const VerificationReport& report) {
  py::list checks;
  for (const auto& c : report.checks) {
    py::dict item;
    item["check"] = c.check;
    item["subject"] = c.subject;
    item["pass"] = c.pass;
    item["worst_margin"] = c.worst_margin;
    item["samples"] = c.samples;
    item["tolerance"] = c.tolerance;
    checks.append(item);
  }
  py::dict out;
  out["checks"] = checks;
  out["all_pass"] = report.all_pass();
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() =
      "Splitting solvers for constrained fixed-point, monotone inclusion, "
      "and equilibrium problems";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  m.def("inner", &inner, py::arg("a"), py::arg("b"),
        "Euclidean inner product.");

  m.def(
      "project_halfspace",
      [](const Vector& normal, double offset, const Vector& x) {
        return project_halfspace(HalfSpace{normal, offset}, x);
      },
      py::arg("normal"), py::arg("offset"), py::arg("x"),
      "Projection onto {x : <normal, x> <= offset}.");

  m.def(
      "project_box",
      [](const Vector& lower, const Vector& upper, const Vector& x) {
        return project_box(Box{lower, upper}, x);
      },
      py::arg("lower"), py::arg("upper"), py::arg("x"),
      "Componentwise clamp onto [lower, upper].");

  m.def(
      "project_ball",
      [](const Vector& center, double radius, const Vector& x) {
        return project_ball(Ball{center, radius}, x);
      },
      py::arg("center"), py::arg("radius"), py::arg("x"),
      "Projection onto a closed Euclidean ball.");

  m.def("prox_abs", &prox_abs, py::arg("gamma"), py::arg("x"),
        "Soft threshold, the resolvent of the subdifferential of |.|.");

  m.def("resolvent_affine", &resolvent_affine, py::arg("m"), py::arg("u"),
        py::arg("gamma"), py::arg("x"),
        "Resolvent of x -> Mx + u: solves (I + gamma*M) q = x - gamma*u.");

  m.def(
      "resolvent_box",
      [](const Vector& lower, const Vector& upper, double gamma,
         const Vector& x) {
        return resolvent_normal_cone(ConvexSet{Box{lower, upper}}, gamma, x);
      },
      py::arg("lower"), py::arg("upper"), py::arg("gamma"), py::arg("x"),
      "Resolvent of the box normal cone (the projector, gamma-independent).");

  m.def("cyclic_index", &cyclic_index, py::arg("m"), py::arg("n"),
        "1-based cyclic constraint index: 1 + (n mod m).");

  m.def(
      "solve_affine_kkt",
      [](const Matrix& mat, const Vector& u, const Vector& lower,
         const Vector& upper) {
        const OracleSolution sol = solve_affine_kkt(mat, u, Box{lower, upper});
        py::dict out;
        out["point"] = sol.point;
        out["certificate"] = sol.certificate;
        out["method"] = sol.method;
        return out;
      },
      py::arg("m"), py::arg("u"), py::arg("lower"), py::arg("upper"),
      "Active-set enumeration for 0 in Mx + u + N_box(x), d <= 4.");

  m.def(
      "solve_vi_grid",
      [](const Vector& lower, const Vector& upper,
         const std::function<Vector(const Vector&)>& map, int resolution) {
        const OracleSolution sol =
            solve_vi_grid(ConvexSet{Box{lower, upper}}, map, resolution);
        py::dict out;
        out["point"] = sol.point;
        out["certificate"] = sol.certificate;
        out["method"] = sol.method;
        return out;
      },
      py::arg("lower"), py::arg("upper"), py::arg("map"),
      py::arg("resolution") = 401,
      "Brute-force natural-residual minimization over a box grid, d <= 3.");

  m.def(
      "run",
      [](const std::string& config_text, const std::string& output) {
        const LoadedConfig cfg = parse_config_text(config_text, "<config>");
        return summary_to_dict(run_from_config(cfg, output));
      },
      py::arg("config_text"), py::arg("output") = std::string(),
      "Execute a JSON run configuration and write its trace file.");

  m.def(
      "verify",
      [](const std::string& config_text) {
        const LoadedConfig cfg = parse_config_text(config_text, "<config>");
        py::dict out = report_to_dict(verify_from_config(cfg));
        if (const auto audit = audit_index_control_from_config(cfg)) {
          py::dict control;
          control["pass"] = audit->pass;
          control["first_violation_n"] = audit->first_violation_n;
          control["violating_index"] = audit->violating_index;
          control["reason"] = audit->reason;
          out["index_control"] = control;
          out["all_pass"] = out["all_pass"].cast<bool>() && audit->pass;
        }
        return out;
      },
      py::arg("config_text"),
      "Run the certificate suites for a JSON configuration.");

  m.def("trace_format", &trace_format_text,
        "Documentation of the trace file columns.");
}
