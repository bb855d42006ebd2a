#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>

#include "simplicone/cone.hpp"
#include "simplicone/error.hpp"
#include "simplicone/monotone.hpp"
#include "simplicone/oracle.hpp"
#include "simplicone/problem_gen.hpp"
#include "simplicone/solvers.hpp"

namespace py = pybind11;
using namespace simplicone;

namespace {

template <typename T, typename Parse>
T parse_or_throw(const std::string& name, Parse parse, const char* what) {
  const auto v = parse(name);
  if (!v) throw Error(ErrorCode::InvalidArgument, std::string("unknown ") + what + " '" + name + "'");
  return *v;
}

StopRule make_stop(const std::string& stop, double tol, int max_iters) {
  return {parse_or_throw<StopMode>(stop, parse_stop_mode, "stop mode"), tol,
          max_iters};
}

py::dict report_dict(const SolveReport& r) {
  py::dict d;
  d["solver"] = std::string(to_string(r.solver));
  d["status"] = std::string(to_string(r.status));
  d["iterations"] = r.iterations;
  d["final_residual_norm"] = r.final_residual_norm;
  d["contraction_factor"] = r.contraction_factor;
  d["solution"] = r.solution;
  d["projection"] = r.projection;
  d["diverged"] = r.diverged;
  d["stalled"] = r.stalled;
  d["message"] = r.message;
  d["per_iter_errors"] = r.per_iter_errors;
  return d;
}

py::dict certificate_dict(const Certificate& c, double tol) {
  py::dict d;
  d["accepted"] = c.accepted(tol);
  d["projection"] = c.projection;
  d["polar_part"] = c.polar_part;
  d["complementarity_gap"] = c.complementarity_gap;
  d["feasibility_projection"] = c.feasibility_projection;
  d["feasibility_polar"] = c.feasibility_polar;
  d["decomposition_residual"] = c.decomposition_residual;
  return d;
}

}  // namespace

PYBIND11_MODULE(_simplicone, m) {
  m.doc() = "Projection onto simplicial cones";
  py::register_exception<Error>(m, "SimpliconeError", PyExc_RuntimeError);

  py::class_<SimplicialCone, std::shared_ptr<SimplicialCone>>(m, "Cone")
      .def(py::init([](const Matrix& a, double tol) {
             return std::make_shared<SimplicialCone>(make_cone(a, tol));
           }),
           py::arg("generator"), py::arg("singular_tol") = kDefaultSingularTol)
      .def_property_readonly("dim", &SimplicialCone::dim)
      .def_property_readonly("generator", &SimplicialCone::generator)
      .def_property_readonly("gram", &SimplicialCone::gram)
      .def_property_readonly("gram_eigenvalues",
                             &SimplicialCone::gram_eigenvalues)
      .def_property_readonly("gram_norm_dev", &SimplicialCone::gram_norm_dev)
      .def_property_readonly("contraction_c", &SimplicialCone::contraction_c)
      .def("polar_generator",
           [](const SimplicialCone& k) { return polar_generator(k); });

  m.def(
      "solve",
      [](std::shared_ptr<SimplicialCone> cone, const Vector& z,
         const std::string& solver, const std::string& stop, double tol,
         int max_iters, bool override_guards, std::optional<Vector> x0,
         std::optional<Vector> known) {
        const auto prob = make_problem(std::move(cone), z, std::move(x0),
                                       std::move(known));
        SolveOptions opts;
        opts.override_guards = override_guards;
        const auto kind =
            parse_or_throw<SolverKind>(solver, parse_solver, "solver");
        SolveReport r;
        {
          py::gil_scoped_release release;
          r = simplicone::solve(kind, prob, make_stop(stop, tol, max_iters), opts);
        }
        return report_dict(r);
      },
      py::arg("cone"), py::arg("z"), py::arg("solver") = "picard2",
      py::arg("stop") = "residual", py::arg("tol") = 1e-10,
      py::arg("max_iters") = 100000, py::arg("override_guards") = false,
      py::arg("x0") = py::none(), py::arg("known") = py::none(),
      "Run one solver; returns the report as a dict.");

  m.def(
      "certify",
      [](const Vector& z, const Vector& u, const SimplicialCone& cone,
         double tol) { return certificate_dict(certify(z, u, cone), tol); },
      py::arg("z"), py::arg("u"), py::arg("cone"), py::arg("tol") = 1e-8);

  m.def(
      "sign_enumeration_solve",
      [](std::shared_ptr<SimplicialCone> cone, const Vector& z) {
        const auto r = sign_enumeration_solve(make_problem(std::move(cone), z));
        py::dict d;
        d["solution"] = r.solution;
        d["residual_norm"] = r.residual_norm;
        d["accepted_patterns"] = r.accepted_patterns;
        d["winning_pattern"] = r.winning_pattern;
        return d;
      },
      py::arg("cone"), py::arg("z"));

  m.def("positive_part", &positive_part);
  m.def("negative_part", &negative_part);
  m.def("monotone_generator", &monotone_generator, py::arg("m"));
  m.def("monotone_eigenvalues", &monotone_eigenvalues, py::arg("m"));

  m.def(
      "picard2_monotone",
      [](const Vector& z, const std::string& stop, double tol, int max_iters,
         std::optional<Vector> x0, std::optional<Vector> known,
         bool explicit_matrices) {
        const MonotoneConeWorkspace ws(z.size());
        const Vector start = x0 ? *x0 : Vector::Zero(z.size());
        SolveReport r;
        {
          py::gil_scoped_release release;
          r = picard2_monotone(ws, z, start, make_stop(stop, tol, max_iters),
                               known, {}, explicit_matrices);
        }
        return report_dict(r);
      },
      py::arg("z"), py::arg("stop") = "residual", py::arg("tol") = 1e-10,
      py::arg("max_iters") = 100000, py::arg("x0") = py::none(),
      py::arg("known") = py::none(), py::arg("explicit_matrices") = false);

  m.def(
      "project_monotone_nonneg",
      [](const Vector& z, double tol, int max_iters) {
        const MonotoneConeWorkspace ws(z.size());
        return project_monotone_nonneg(
            ws, z, {StopMode::Residual, tol, max_iters});
      },
      py::arg("z"), py::arg("tol") = 1e-12, py::arg("max_iters") = 100000);

  m.def(
      "gen_instance",
      [](const std::string& family, Index dim, std::uint64_t seed,
         std::size_t index) {
        GenConfig cfg;
        cfg.family = parse_or_throw<Family>(family, parse_family, "family");
        cfg.dim = dim;
        cfg.seed = seed;
        const Instance inst = gen_instance(cfg, index);
        py::dict d;
        d["id"] = inst.id;
        d["cone"] = std::const_pointer_cast<SimplicialCone>(inst.problem.cone);
        d["z"] = inst.problem.target;
        d["x0"] = inst.problem.start;
        d["u"] = *inst.problem.known_solution;
        d["b_bar"] = inst.b_bar;
        return d;
      },
      py::arg("family"), py::arg("dim"), py::arg("seed"),
      py::arg("index") = 0);
}
