#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "musurf/forms.hpp"
#include "musurf/pipeline.hpp"
#include "musurf/potential.hpp"
#include "musurf/reparam.hpp"

namespace py = pybind11;
using namespace musurf;

namespace {

py::array_t<double> field_to_numpy(const ScalarField& f) {
    const GridSpec& s = f.spec();
    py::array_t<double> out({s.ny, s.nx});
    auto r = out.mutable_unchecked<2>();
    for (int j = 0; j < s.ny; ++j)
        for (int i = 0; i < s.nx; ++i) r(j, i) = f.at(i, j);
    return out;
}

GridSpec make_spec(double x0, double y0, double x1, double y1, int nx, int ny) {
    GridSpec s{x0, y0, x1, y1, nx, ny};
    s.check();
    return s;
}

}  // namespace

PYBIND11_MODULE(_musurf, m) {
    m.doc() = "nonparametric mu-surface pipeline";

    py::register_exception<ValidationError>(m, "ValidationError");
    py::register_exception<SolveError>(m, "SolveError");

    py::class_<GridSpec>(m, "GridSpec")
        .def(py::init(&make_spec), py::arg("x0"), py::arg("y0"), py::arg("x1"), py::arg("y1"),
             py::arg("nx"), py::arg("ny"))
        .def_static("square", &GridSpec::square, py::arg("lo"), py::arg("hi"), py::arg("n"))
        .def_readonly("nx", &GridSpec::nx)
        .def_readonly("ny", &GridSpec::ny)
        .def("h", &GridSpec::h);

    py::class_<EnergyDensity>(m, "EnergyDensity")
        .def("g", &EnergyDensity::g)
        .def("g1", &EnergyDensity::g1)
        .def("g2", &EnergyDensity::g2)
        .def("xi", &EnergyDensity::xi)
        .def("bracket", &EnergyDensity::bracket)
        .def("theta", &EnergyDensity::theta)
        .def_property_readonly("mu", &EnergyDensity::mu_exponent)
        .def_property_readonly("name", &EnergyDensity::name);

    py::class_<DensityDiagnostics>(m, "DensityDiagnostics")
        .def_readonly("t", &DensityDiagnostics::t)
        .def_readonly("g", &DensityDiagnostics::g)
        .def_readonly("g1", &DensityDiagnostics::g1)
        .def_readonly("g2", &DensityDiagnostics::g2)
        .def_readonly("xi", &DensityDiagnostics::xi)
        .def_readonly("vartheta", &DensityDiagnostics::vartheta)
        .def_readonly("h", &DensityDiagnostics::h)
        .def_readonly("remainder", &DensityDiagnostics::remainder)
        .def_readonly("bracket", &DensityDiagnostics::bracket)
        .def_readonly("theta", &DensityDiagnostics::theta);

    m.def("make_builtin", &make_builtin, py::arg("kind"),
          py::arg("mu") = std::optional<double>{});
    m.def("diagnostics", &diagnostics, py::arg("density"), py::arg("t"));
    m.def(
        "validate",
        [](const EnergyDensity& d) {
            ValidationReport r = validate(d, default_sample_grid());
            py::list checks;
            for (const auto& c : r.checks)
                checks.append(py::dict(py::arg("check") = c.name, py::arg("passed") = c.passed,
                                       py::arg("detail") = c.detail));
            return py::make_tuple(r.passed(), checks);
        },
        py::arg("density"));
    m.def("normalize", &normalize, py::arg("density"), py::arg("t_max") = 1e4);

    py::class_<SurfaceSolution>(m, "SurfaceSolution")
        .def_readonly("energy", &SurfaceSolution::energy)
        .def_readonly("residual_norm", &SurfaceSolution::residual_norm)
        .def_readonly("converged", &SurfaceSolution::converged)
        .def_readonly("iterations", &SurfaceSolution::iterations)
        .def_readonly("energy_history", &SurfaceSolution::energy_history)
        .def_property_readonly("u", [](const SurfaceSolution& s) { return field_to_numpy(s.u); })
        .def_property_readonly("ux", [](const SurfaceSolution& s) { return field_to_numpy(s.ux); })
        .def_property_readonly("uy", [](const SurfaceSolution& s) { return field_to_numpy(s.uy); });

    m.def(
        "solve_dirichlet",
        [](const EnergyDensity& d, const GridSpec& g, const std::string& boundary, double slope) {
            return solve_dirichlet(d, g, make_boundary(boundary, 0.0, 0.0, 0.0, slope),
                                   SolveConfig{});
        },
        py::arg("density"), py::arg("grid"), py::arg("boundary") = "scherk",
        py::arg("slope") = 1.0);
    m.def(
        "oracle_solution",
        [](const EnergyDensity& d, const GridSpec& g, const std::string& kind, double a, double b,
           double c) { return attach_fields(d, oracle_solution(kind, g, a, b, c)); },
        py::arg("density"), py::arg("grid"), py::arg("kind"), py::arg("a") = 0.0,
        py::arg("b") = 0.0, py::arg("c") = 0.0);

    m.def(
        "closedness",
        [](const SurfaceSolution& sol) {
            FormAssembly fa = assemble_forms(sol);
            ClosednessReport cr = closedness_residuals(fa, sol);
            return py::dict(py::arg("h") = cr.grid_h, py::arg("max_d_alpha") = cr.max_d_alpha,
                            py::arg("max_d_beta") = cr.max_d_beta,
                            py::arg("max_d_gamma") = cr.max_d_gamma);
        },
        py::arg("solution"));

    m.def(
        "recover_potentials",
        [](const SurfaceSolution& sol) {
            FormAssembly fa = assemble_forms(sol);
            PotentialSet ps = recover_xstar(sol, fa);
            HessReport hr = check_hessE(ps, sol);
            return py::dict(py::arg("a") = field_to_numpy(ps.a), py::arg("b") = field_to_numpy(ps.b),
                            py::arg("c") = field_to_numpy(ps.c), py::arg("E") = field_to_numpy(ps.E),
                            py::arg("path_discrepancy") = ps.path_discrepancy,
                            py::arg("min_eig_min") = hr.min_eig_min,
                            py::arg("bound_violations") = hr.bound_violations);
        },
        py::arg("solution"));

    m.def(
        "reparam_summary",
        [](const SurfaceSolution& sol) {
            FormAssembly fa = assemble_forms(sol);
            PotentialSet ps = recover_xstar(sol, fa);
            ReparamResult rr = build_reparam(sol, ps);
            return py::dict(py::arg("det_dl") = field_to_numpy(rr.det_dl),
                            py::arg("det_fd_mismatch") = rr.det_fd_mismatch,
                            py::arg("margin_prop_min") = rr.margin_prop_min,
                            py::arg("max_defect_dot") = rr.defect_dot.max_abs(),
                            py::arg("max_defect_diff") = rr.defect_diff.max_abs());
        },
        py::arg("solution"));

    py::class_<DecayFit>(m, "DecayFit")
        .def_readonly("d1", &DecayFit::d1)
        .def_readonly("d2", &DecayFit::d2)
        .def_readonly("slope", &DecayFit::slope)
        .def_readonly("theta_identically_zero", &DecayFit::theta_identically_zero);
    m.def("decay_fit", &decay_fit, py::arg("density"), py::arg("t_min") = 1e2,
          py::arg("t_max") = 1e4, py::arg("n_samples") = 200);

    m.def(
        "run_pipeline",
        [](const std::string& config_json) {
            RunConfig cfg = RunConfig::from_json(nlohmann::json::parse(config_json));
            RunReport rep = run_pipeline(cfg);
            return py::make_tuple(rep.exit_code, rep.json.dump());
        },
        py::arg("config_json"));
}
