// SPDX-License-Identifier: Apache-2.0

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fano/asymptotics.hpp"
#include "fano/config.hpp"
#include "fano/error.hpp"
#include "fano/mode_matching.hpp"
#include "fano/spectral.hpp"
#include "fano/sweep.hpp"

namespace py = pybind11;
using namespace fano;

namespace
{

py::dict defects_dict(const Defects &d)
{
  py::dict r;
  r["unitarity"] = d.unitarity;
  r["energy_plus"] = d.energy_plus;
  r["energy_minus"] = d.energy_minus;
  r["reciprocity"] = d.reciprocity;
  r["cross"] = d.cross;
  return r;
}

py::dict sweep_dict(const SweepResult &r)
{
  const auto n = static_cast<py::ssize_t>(r.rows.size());
  py::array_t<double> x(n), unit(n), recip(n);
  py::array_t<cplx> T(n), Rp(n), Rm(n);
  py::array_t<bool> ok(n);
  for (py::ssize_t i = 0; i < n; ++i)
  {
    const SweepRow &row = r.rows[static_cast<std::size_t>(i)];
    x.mutable_at(i) = row.sqrt_lambda;
    ok.mutable_at(i) = row.ok;
    T.mutable_at(i) = row.S.T;
    Rp.mutable_at(i) = row.S.R_plus;
    Rm.mutable_at(i) = row.S.R_minus;
    unit.mutable_at(i) = row.S.defects.unitarity;
    recip.mutable_at(i) = row.S.defects.reciprocity;
  }
  py::dict d;
  d["sqrt_lambda"] = x;
  d["ok"] = ok;
  d["T"] = T;
  d["R_plus"] = Rp;
  d["R_minus"] = Rm;
  d["unitarity_defect"] = unit;
  d["reciprocity_defect"] = recip;
  d["epsilon"] = r.epsilon;
  d["oracle"] = r.oracle;
  return d;
}

}  // namespace

PYBIND11_MODULE(_fanowg, m)
{
  m.doc() = "Waveguide scattering, trapped modes and Fano resonances";

  static py::exception<Error> fano_error(m, "FanoError");
  py::register_exception_translator([](std::exception_ptr p) {
    try
    {
      if (p)
      {
        std::rethrow_exception(p);
      }
    }
    catch (const Error &e)
    {
      const py::tuple args = py::make_tuple(std::string(to_string(e.kind())), e.what());
      PyErr_SetObject(fano_error.ptr(), args.ptr());
    }
  });

  py::class_<SolverSettings>(m, "SolverSettings")
      .def(py::init<>())
      .def_readwrite("h", &SolverSettings::h)
      .def_readwrite("order", &SolverSettings::order)
      .def_readwrite("dtn_terms", &SolverSettings::dtn_terms)
      .def_readwrite("grading_levels", &SolverSettings::grading_levels)
      .def_readwrite("threads", &SolverSettings::threads);

  py::class_<WaveguideGeometry>(m, "Geometry")
      .def_readonly("L", &WaveguideGeometry::L)
      .def_readonly("d", &WaveguideGeometry::d)
      .def_readonly("epsilon", &WaveguideGeometry::epsilon)
      .def_property_readonly("obstacles",
                             [](const WaveguideGeometry &g) {
                               std::vector<std::array<double, 4>> v;
                               for (const Rect &r : g.obstacles)
                               {
                                 v.push_back({r.x0, r.x1, r.y0, r.y1});
                               }
                               return v;
                             })
      .def_property_readonly("has_bump", [](const WaveguideGeometry &g) { return g.bump.has_value(); })
      .def("area", &WaveguideGeometry::area)
      .def("perturbed", &apply_perturbation, py::arg("epsilon"));

  m.def(
      "strip", [](double L) {
        GeometryDescription d;
        d.L = L;
        return build_geometry(d);
      },
      py::arg("L") = 1.5);

  m.def(
      "load_config",
      [](const std::string &path) {
        const GeometryDescription d = load_geometry_description(path);
        return py::make_tuple(build_geometry(d), d.epsilon, solver_settings(d));
      },
      py::arg("path"), "Returns (unperturbed geometry, epsilon, solver settings).");

  py::class_<ScatteringMatrix>(m, "ScatteringMatrix")
      .def_readonly("lam", &ScatteringMatrix::lambda)
      .def_readonly("R_plus", &ScatteringMatrix::R_plus)
      .def_readonly("R_minus", &ScatteringMatrix::R_minus)
      .def_readonly("T", &ScatteringMatrix::T)
      .def_readonly("T_from_plus", &ScatteringMatrix::T_from_plus)
      .def_readonly("T_from_minus", &ScatteringMatrix::T_from_minus)
      .def_property_readonly("defects", [](const ScatteringMatrix &s) { return defects_dict(s.defects); })
      .def("matrix", &ScatteringMatrix::matrix);

  py::class_<ScatteringProblem>(m, "ScatteringProblem")
      .def(py::init<const WaveguideGeometry &, const SolverSettings &>(), py::arg("geometry"),
           py::arg("settings") = SolverSettings{})
      .def_property_readonly("num_dofs", [](const ScatteringProblem &p) { return p.mesh().num_dofs(); })
      .def(
          "scattering_matrix", [](const ScatteringProblem &p, double lam) { return p.scattering_matrix(lam); },
          py::arg("lam"), py::call_guard<py::gil_scoped_release>());

  m.def(
      "sweep",
      [](const WaveguideGeometry &g, double epsilon, double from, double to, int steps, const SolverSettings &s) {
        SweepResult r;
        {
          py::gil_scoped_release release;
          r = run_sweep(g, epsilon, from, to, steps, s);
        }
        return sweep_dict(r);
      },
      py::arg("geometry"), py::arg("epsilon"), py::arg("sqrt_from"), py::arg("sqrt_to"), py::arg("steps"),
      py::arg("settings") = SolverSettings{});

  m.def(
      "sweep_mm",
      [](const WaveguideGeometry &g, double epsilon, double from, double to, int steps, int modes) {
        return sweep_dict(run_sweep_mm(g, epsilon, from, to, steps, modes));
      },
      py::arg("geometry"), py::arg("epsilon"), py::arg("sqrt_from"), py::arg("sqrt_to"), py::arg("steps"),
      py::arg("modes_per_unit") = 320);

  m.def("mm_smatrix", &mm_smatrix, py::arg("geometry"), py::arg("lam"), py::arg("modes_per_unit") = 30);

  m.def(
      "zero_transmission",
      [](const WaveguideGeometry &g, double epsilon, double a, double b, const SolverSettings &s, double tol) {
        const ZeroTransmissionResult z = find_zero_transmission(g, epsilon, a, b, s, tol);
        py::dict d;
        d["sqrt_lambda_star"] = z.sqrt_lambda_star;
        d["min_abs_T"] = z.min_abs_T;
        d["bracket"] = py::make_tuple(z.bracket_lo, z.bracket_hi);
        d["iterations"] = z.iterations;
        return d;
      },
      py::arg("geometry"), py::arg("epsilon"), py::arg("sqrt_a"), py::arg("sqrt_b"),
      py::arg("settings") = SolverSettings{}, py::arg("tol") = 2e-2);

  m.def(
      "trapped_mode",
      [](const ScatteringProblem &p, double from, double to) {
        const TrappedMode tm = find_trapped_mode(p, from * from, to * to);
        py::dict d;
        d["lambda0"] = tm.lambda0;
        d["sqrt_lambda0"] = tm.sqrt_lambda0();
        d["K"] = tm.K;
        d["residual"] = tm.residual;
        d["imag_ratio"] = tm.imag_ratio;
        return d;
      },
      py::arg("problem"), py::arg("sqrt_from"), py::arg("sqrt_to"));

  m.def(
      "resonance",
      [](const WaveguideGeometry &g, const SolverSettings &s, cplx guess) {
        const ComplexResonance r = find_resonance(g, s, guess);
        py::dict d;
        d["lambda_c"] = r.lambda_c;
        d["sqrt_lambda_c"] = r.sqrt_lambda_c;
        d["residual"] = r.residual;
        d["stability_shift"] = r.stability_shift;
        return d;
      },
      py::arg("geometry"), py::arg("settings"), py::arg("lambda_guess"));

  m.def(
      "fit_circle",
      [](const std::vector<cplx> &pts) {
        const Circle c = fit_circle(pts);
        return py::make_tuple(c.center, c.radius, c.max_deviation);
      },
      py::arg("points"), "Returns (center, radius, max deviation).");

  m.def(
      "asy_smatrix",
      [](double mu, const Eigen::Matrix2cd &s0, std::array<cplx, 2> tau) { return asy_smatrix(mu, s0, {tau[0], tau[1]}); },
      py::arg("mu"), py::arg("s0"), py::arg("tau"));

  m.def("fano_width", py::overload_cast<const std::vector<double> &, const std::vector<double> &>(&fano_width),
        py::arg("x"), py::arg("abs_T2"));
}
