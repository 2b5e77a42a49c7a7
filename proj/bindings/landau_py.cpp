#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "landau/commands.hpp"
#include "landau/config.hpp"
#include "landau/diagnostics.hpp"
#include "landau/snapshot_io.hpp"
#include "landau/solver.hpp"
#include "landau/verification.hpp"

namespace py = pybind11;
using namespace landau;

namespace {

py::array_t<double> to_array(const std::vector<double>& v) {
    return py::array_t<double>(static_cast<py::ssize_t>(v.size()), v.data());
}

std::vector<double> from_array(const py::array_t<double, py::array::c_style>& a,
                               std::size_t expected) {
    if (static_cast<std::size_t>(a.size()) != expected)
        throw std::invalid_argument("array size does not match the grid");
    return {a.data(), a.data() + a.size()};
}

}  // namespace

PYBIND11_MODULE(_landau, m) {
    m.doc() = "deterministic Landau equation solver and estimate verifier";

    py::class_<VelocityGrid>(m, "VelocityGrid")
        .def(py::init<int, double>(), py::arg("n"), py::arg("half_width"))
        .def_readonly("n", &VelocityGrid::n)
        .def_readonly("half_width", &VelocityGrid::half_width)
        .def_property_readonly("spacing", &VelocityGrid::spacing)
        .def_property_readonly("size", &VelocityGrid::size);

    py::class_<SpatialGrid>(m, "SpatialGrid")
        .def(py::init<int, int, double>(), py::arg("dim"), py::arg("n"), py::arg("period"))
        .def_readonly("dim", &SpatialGrid::dim)
        .def_readonly("n", &SpatialGrid::n)
        .def_readonly("period", &SpatialGrid::period)
        .def_property_readonly("cells", &SpatialGrid::cells);

    py::class_<PhaseGrid>(m, "PhaseGrid")
        .def(py::init([](const SpatialGrid& s, const VelocityGrid& v) {
                 return PhaseGrid{s, v};
             }),
             py::arg("space"), py::arg("velocity"))
        .def_readonly("space", &PhaseGrid::space)
        .def_readonly("velocity", &PhaseGrid::velocity)
        .def_property_readonly("cells", &PhaseGrid::cells);

    py::class_<DistributionField>(m, "DistributionField")
        .def(py::init<const PhaseGrid&, double>(), py::arg("grid"), py::arg("time") = 0.0)
        .def_readonly("grid", &DistributionField::grid)
        .def_readwrite("time", &DistributionField::time)
        .def_property(
            "values", [](const DistributionField& f) { return to_array(f.values); },
            [](DistributionField& f, const py::array_t<double, py::array::c_style>& a) {
                f.values = from_array(a, f.grid.cells());
            })
        .def("max_abs", &DistributionField::max_abs)
        .def("validate", &DistributionField::validate, py::arg("tol") = 0.0);

    m.def("make_maxwellian", &make_maxwellian, py::arg("grid"), py::arg("c1"), py::arg("c2"));
    m.def("weighted_sup_norm", &weighted_sup_norm, py::arg("f"), py::arg("k"));
    m.def("weighted_lp_norm", &weighted_lp_norm, py::arg("f"), py::arg("p"), py::arg("k"));
    m.def("write_snapshot", &write_snapshot, py::arg("path"), py::arg("field"));
    m.def("read_snapshot", &read_snapshot, py::arg("path"));

    py::class_<CollisionKernel>(m, "CollisionKernel")
        .def_static("standard", &CollisionKernel::standard, py::arg("gamma"))
        .def_readonly("gamma", &CollisionKernel::gamma)
        .def_readonly("a_const", &CollisionKernel::a_const)
        .def_readonly("b_const", &CollisionKernel::b_const)
        .def_readonly("c_const", &CollisionKernel::c_const);

    py::class_<CoefficientField>(m, "CoefficientField")
        .def_readonly("gamma", &CoefficientField::gamma)
        .def_property_readonly("a",
                               [](const CoefficientField& c) {
                                   py::list out;
                                   for (const auto& comp : c.a) out.append(to_array(comp));
                                   return out;
                               })
        .def_property_readonly("b",
                               [](const CoefficientField& c) {
                                   py::list out;
                                   for (const auto& comp : c.b) out.append(to_array(comp));
                                   return out;
                               })
        .def_property_readonly("c", [](const CoefficientField& c) { return to_array(c.c); });

    m.def(
        "compute_coefficients_direct",
        [](const py::array_t<double, py::array::c_style>& f, const VelocityGrid& g,
           const CollisionKernel& k) {
            auto slice = from_array(f, g.size());
            return compute_coefficients_direct(slice, g, k);
        },
        py::arg("f_slice"), py::arg("grid"), py::arg("kernel"));
    m.def(
        "compute_coefficients_fast",
        [](const py::array_t<double, py::array::c_style>& f, const VelocityGrid& g,
           const CollisionKernel& k) {
            auto slice = from_array(f, g.size());
            return compute_coefficients_fast(slice, g, k);
        },
        py::arg("f_slice"), py::arg("grid"), py::arg("kernel"));

    py::class_<DivergenceResiduals>(m, "DivergenceResiduals")
        .def_readonly("res_b", &DivergenceResiduals::res_b)
        .def_readonly("res_c", &DivergenceResiduals::res_c);
    m.def("divergence_identity_residuals", &divergence_identity_residuals, py::arg("coeff"));

    py::class_<EllipticitySpectrum>(m, "EllipticitySpectrum")
        .def_property_readonly(
            "lambda_min", [](const EllipticitySpectrum& s) { return to_array(s.lambda_min); })
        .def_property_readonly(
            "lambda_max", [](const EllipticitySpectrum& s) { return to_array(s.lambda_max); })
        .def_readonly("psd_violations", &EllipticitySpectrum::psd_violations)
        .def_readonly("worst_lambda_min", &EllipticitySpectrum::worst_lambda_min);
    m.def("ellipticity_spectrum", &ellipticity_spectrum, py::arg("coeff"),
          py::arg("psd_tol") = 1e-12);

    py::enum_<SplittingScheme>(m, "SplittingScheme")
        .value("lie", SplittingScheme::lie)
        .value("strang", SplittingScheme::strang);
    py::enum_<CollisionForm>(m, "CollisionForm")
        .value("divergence", CollisionForm::divergence)
        .value("nondivergence", CollisionForm::nondivergence);
    py::enum_<CollisionIntegrator>(m, "CollisionIntegrator")
        .value("explicit_euler", CollisionIntegrator::explicit_euler)
        .value("semi_implicit_diffusion", CollisionIntegrator::semi_implicit_diffusion)
        .value("heun", CollisionIntegrator::heun);
    py::enum_<PositivityMode>(m, "PositivityMode")
        .value("clamp", PositivityMode::clamp)
        .value("off", PositivityMode::off);
    py::enum_<RunStatus>(m, "RunStatus")
        .value("completed", RunStatus::completed)
        .value("continuation_abort", RunStatus::continuation_abort)
        .value("instability", RunStatus::instability);

    py::class_<SolverConfig>(m, "SolverConfig")
        .def(py::init<>())
        .def_readwrite("gamma", &SolverConfig::gamma)
        .def_readwrite("dt", &SolverConfig::dt)
        .def_readwrite("t_end", &SolverConfig::t_end)
        .def_readwrite("splitting", &SolverConfig::splitting)
        .def_readwrite("collision_form", &SolverConfig::collision_form)
        .def_readwrite("collision_integrator", &SolverConfig::collision_integrator)
        .def_readwrite("k_decay", &SolverConfig::k_decay)
        .def_readwrite("psi_threshold", &SolverConfig::psi_threshold)
        .def_readwrite("mollify_eps", &SolverConfig::mollify_eps)
        .def_readwrite("positivity", &SolverConfig::positivity)
        .def_readwrite("diag_every", &SolverConfig::diag_every)
        .def_readwrite("auto_halve_dt", &SolverConfig::auto_halve_dt)
        .def_readwrite("diag_ellipticity", &SolverConfig::diag_ellipticity)
        .def_readwrite("diag_holder", &SolverConfig::diag_holder)
        .def_readwrite("holder_alpha", &SolverConfig::holder_alpha)
        .def_readwrite("holder_m", &SolverConfig::holder_m)
        .def_readwrite("holder_pairs", &SolverConfig::holder_pairs)
        .def_readwrite("seed", &SolverConfig::seed)
        .def("validate", &SolverConfig::validate);

    py::class_<DiagnosticsRow>(m, "DiagnosticsRow")
        .def_readonly("t", &DiagnosticsRow::t)
        .def_readonly("mass_min_x", &DiagnosticsRow::mass_min_x)
        .def_readonly("mass_max_x", &DiagnosticsRow::mass_max_x)
        .def_readonly("energy_max_x", &DiagnosticsRow::energy_max_x)
        .def_readonly("entropy_max_x", &DiagnosticsRow::entropy_max_x)
        .def_readonly("psi", &DiagnosticsRow::psi)
        .def_readonly("psi_tilde", &DiagnosticsRow::psi_tilde)
        .def_readonly("linfty_k", &DiagnosticsRow::linfty_k)
        .def_readonly("holder_g_sup", &DiagnosticsRow::holder_g_sup)
        .def_readonly("d2v_weighted_sup", &DiagnosticsRow::d2v_weighted_sup)
        .def_readonly("clamped_mass", &DiagnosticsRow::clamped_mass);

    py::class_<TrajectoryRecord>(m, "TrajectoryRecord")
        .def_readonly("snapshot_times", &TrajectoryRecord::snapshot_times)
        .def_readonly("rows", &TrajectoryRecord::rows)
        .def_readonly("status", &TrajectoryRecord::status)
        .def_readonly("final_time", &TrajectoryRecord::final_time)
        .def_readonly("clamped_mass_total", &TrajectoryRecord::clamped_mass_total)
        .def("field_at", &TrajectoryRecord::field_at, py::arg("index"))
        .def("__len__", [](const TrajectoryRecord& t) { return t.snapshot_times.size(); });

    m.def("mollify_initial_data", &mollify_initial_data, py::arg("f_in"), py::arg("eps"));
    m.def("transport_step", &transport_step, py::arg("f"), py::arg("dt"));
    m.def("strang_step", &strang_step, py::arg("f"), py::arg("dt"), py::arg("config"));
    m.def("run_simulation", &run_simulation, py::arg("f_in"), py::arg("config"),
          py::call_guard<py::gil_scoped_release>());

    py::class_<HydroFields>(m, "HydroFields")
        .def_property_readonly("mass", [](const HydroFields& h) { return to_array(h.mass); })
        .def_property_readonly("energy", [](const HydroFields& h) { return to_array(h.energy); })
        .def_property_readonly("entropy",
                               [](const HydroFields& h) { return to_array(h.entropy); });
    m.def("hydrodynamic_fields", &hydrodynamic_fields, py::arg("f"));
    m.def("psi_instant", &psi_instant, py::arg("f"), py::arg("gamma"), py::arg("p_choice") = 0.0);
    m.def("psi_tilde_instant", &psi_tilde_instant, py::arg("f"), py::arg("gamma"),
          py::arg("ell_choice") = 2.0);

    py::class_<SchauderExponents>(m, "SchauderExponents")
        .def_readonly("alpha", &SchauderExponents::alpha)
        .def_readonly("p_alpha", &SchauderExponents::p_alpha)
        .def_readonly("q", &SchauderExponents::q)
        .def_readonly("q_prime", &SchauderExponents::q_prime)
        .def_readonly("time_exponent", &SchauderExponents::time_exponent);
    m.def("schauder_exponents", &schauder_exponents, py::arg("alpha"), py::arg("gamma"),
          py::arg("k"), py::arg("m"));

    py::class_<EnvelopeFit>(m, "EnvelopeFit")
        .def_readonly("c1", &EnvelopeFit::c1)
        .def_readonly("residual", &EnvelopeFit::residual);
    m.def(
        "lower_bound_envelope_fit",
        [](const DistributionField& f, double gamma) { return lower_bound_envelope_fit(f, gamma); },
        py::arg("f"), py::arg("gamma"));
    m.def(
        "d2v_weighted_sup",
        [](const DistributionField& f, double weight) { return d2v_weighted_sup(f, weight); },
        py::arg("f"), py::arg("weight"));

    py::class_<GronwallResult>(m, "GronwallResult")
        .def_readonly("precondition_ok", &GronwallResult::precondition_ok)
        .def_readonly("passed", &GronwallResult::pass)
        .def_readonly("t_star", &GronwallResult::t_star)
        .def_readonly("max_violation", &GronwallResult::max_violation);
    m.def("gronwall_threshold", &gronwall_threshold, py::arg("A"), py::arg("B"), py::arg("times"),
          py::arg("H"), py::arg("tol") = 1e-9);

    py::class_<SupersolutionCurve>(m, "SupersolutionCurve")
        .def_readonly("blow_up_time", &SupersolutionCurve::blow_up_time)
        .def_readonly("log_blow_up_time", &SupersolutionCurve::log_blow_up_time)
        .def_readonly("times", &SupersolutionCurve::times)
        .def_readonly("values", &SupersolutionCurve::values);
    m.def("integrate_supersolution", &integrate_supersolution, py::arg("N"), py::arg("alpha"),
          py::arg("G0"), py::arg("sample_times"), py::arg("rel_tol") = 1e-12);

    py::class_<ParseResult>(m, "ParseResult")
        .def_readonly("ok", &ParseResult::ok)
        .def_readonly("errors", &ParseResult::errors);
    m.def("parse_config", &parse_config, py::arg("text"));
}
