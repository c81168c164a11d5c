#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "shinf/io.hpp"
#include "shinf/oracle.hpp"
#include "shinf/synthesis.hpp"

namespace py = pybind11;
using namespace shinf;

namespace {

py::object to_py(const json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

json from_py(const py::object& o) {
    if (py::isinstance<py::str>(o)) return read_json_file(o.cast<std::string>());
    return json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

// An interconnection: plant + controller structure, affine in the parameters.
struct Loop {
    InterconnectionSpec spec;
    AffineDdae tmpl;

    explicit Loop(InterconnectionSpec s) : spec(std::move(s)), tmpl(interconnect(spec.plant, spec.controller)) {}
};

NormOptions make_options(int N, double tol, bool auto_N) {
    NormOptions o;
    o.N = N;
    o.tol = tol;
    o.auto_N = auto_N;
    return o;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Strong H-infinity norms of delay differential-algebraic systems";

    py::register_exception<NumericalFailure>(m, "NumericalFailure", PyExc_ArithmeticError);
    py::register_exception<TransmissionPole>(m, "TransmissionPole", PyExc_ArithmeticError);
    py::register_exception<CausalityViolation>(m, "CausalityViolation", PyExc_ValueError);
    py::register_exception<StrongStabilityViolation>(m, "StrongStabilityViolation", PyExc_ValueError);
    py::register_exception<NoStabilizingStart>(m, "NoStabilizingStart", PyExc_RuntimeError);
    py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);
    py::register_exception<InputError>(m, "InputError", PyExc_ValueError);

    py::class_<DdaeSystem>(m, "System")
        .def(py::init<Matrix, std::vector<Matrix>, Matrix, Matrix, std::vector<double>>(), py::arg("E"),
             py::arg("A"), py::arg("B"), py::arg("C"), py::arg("delays"),
             "E x' = A[0] x + sum A[i] x(t - delays[i-1]) + B w,  z = C x")
        .def_property_readonly("E", py::overload_cast<>(&DdaeSystem::E, py::const_))
        .def_property_readonly("A", py::overload_cast<>(&DdaeSystem::A, py::const_))
        .def_property_readonly("B", &DdaeSystem::B)
        .def_property_readonly("C", &DdaeSystem::C)
        .def_property_readonly("delays", [](const DdaeSystem& s) { return s.delays().values(); })
        .def_property_readonly("n", &DdaeSystem::n)
        .def("with_delays", &DdaeSystem::with_delays)
        .def("to_dict", [](const DdaeSystem& s) { return to_py(system_to_json(s)); })
        .def_static("load", [](const py::object& o) { return system_from_json(from_py(o)); },
                    "from a JSON file path or a dict")
        .def("__repr__", [](const DdaeSystem& s) {
            return "<System n=" + std::to_string(s.n()) + " delays=" + std::to_string(s.num_delays()) + ">";
        });

    py::class_<NormCertificate>(m, "Certificate")
        .def_readonly("value", &NormCertificate::value)
        .def_property_readonly("branch", [](const NormCertificate& c) { return std::string(to_string(c.kind)); })
        .def_readonly("omega_hat", &NormCertificate::omega_hat)
        .def_property_readonly("theta_hat", [](const NormCertificate& c) { return c.theta_hat.theta; })
        .def_readonly("ta_norm", &NormCertificate::ta_norm)
        .def_readonly("predicted", &NormCertificate::predicted)
        .def_readonly("corrected", &NormCertificate::corrected)
        .def_readonly("simple", &NormCertificate::simple)
        .def_readonly("iterations", &NormCertificate::iterations)
        .def_readonly("N", &NormCertificate::N)
        .def_readonly("tol", &NormCertificate::tol)
        .def_readonly("u", &NormCertificate::u)
        .def_readonly("v", &NormCertificate::v)
        .def_readonly("warnings", &NormCertificate::warnings)
        .def("to_dict", [](const NormCertificate& c) { return to_py(certificate_to_json(c)); })
        .def("__repr__", [](const NormCertificate& c) {
            return "<Certificate value=" + std::to_string(c.value) + " branch=" + to_string(c.kind) + ">";
        });

    m.def(
        "strong_hinf",
        [](const DdaeSystem& s, int N, double tol, bool auto_N) {
            py::gil_scoped_release nogil;
            return strong_hinf(s, make_options(N, tol, auto_N));
        },
        py::arg("system"), py::arg("N") = 20, py::arg("tol") = 1e-6, py::arg("auto_N") = false,
        "Strong H-infinity norm with its certificate.");

    m.def(
        "strong_norm_Ta",
        [](const DdaeSystem& s, int points_per_dim) {
            const NullspaceBases b = compute_nullspaces(s);
            if (!check_causality(s, b)) throw CausalityViolation("U^T A0 V is singular");
            AsymNormOptions o;
            o.points_per_dim = points_per_dim;
            const AsymNormResult r = strong_norm_Ta(s, b, o);
            return py::make_tuple(r.value, r.theta_hat.theta);
        },
        py::arg("system"), py::arg("points_per_dim") = 40,
        "Strong norm of the asymptotic transfer function: (value, theta_hat).");

    m.def(
        "sweep",
        [](const DdaeSystem& s, const std::vector<double>& omegas, int sigmas) {
            const auto rows = sweep(s, omegas, sigmas);
            Matrix out = Matrix::Constant(static_cast<Eigen::Index>(rows.size()), sigmas,
                                          std::numeric_limits<double>::quiet_NaN());
            for (std::size_t i = 0; i < rows.size(); ++i) {
                out.row(static_cast<Eigen::Index>(i)).head(rows[i].sigma.size()) = rows[i].sigma.transpose();
            }
            return out;
        },
        py::arg("system"), py::arg("omegas"), py::arg("sigmas") = 1,
        "Largest singular values of T(j omega), one row per frequency.");

    m.def(
        "transfer",
        [](const DdaeSystem& s, Complex lambda) { return eval_T(s, lambda).matrix; }, py::arg("system"),
        py::arg("s"), "T(s) = C (s E - A0 - sum A_i e^{-s tau_i})^{-1} B");

    m.def(
        "check",
        [](const DdaeSystem& s, int N) {
            const NullspaceBases b = compute_nullspaces(s);
            return to_py(stability_to_json(strong_stability_check(s, b, N), causality_margin(s, b)));
        },
        py::arg("system"), py::arg("N") = 20, "Causality and strong stability report.");

    m.def(
        "dense_hinf", [](const DdaeSystem& s, int points) {
            DenseSweepSpec spec;
            spec.points = points;
            const DenseResult r = dense_hinf(s, spec);
            return py::make_tuple(r.value, r.omega);
        },
        py::arg("system"), py::arg("points") = 4000, "Dense-sweep lower bound: (value, omega).");

    py::class_<Loop>(m, "Interconnection")
        .def_static("load", [](const py::object& o) { return Loop(interconnection_from_json(from_py(o))); },
                    "from a JSON interconnection file path or a dict")
        .def_property_readonly("num_params", [](const Loop& l) { return l.tmpl.num_params(); })
        .def_property_readonly("initial", [](const Loop& l) { return l.spec.initial; })
        .def("closed_loop", [](const Loop& l, const Vector& p) { return substitute_parameters(l.tmpl, p); })
        .def(
            "gradient",
            [](const Loop& l, const Vector& p, int N) {
                py::gil_scoped_release nogil;
                const NormOptions o = make_options(N, 1e-6, false);
                const NormCertificate c = strong_hinf(substitute_parameters(l.tmpl, p), o);
                const GradientResult g = grad_strong_hinf(l.tmpl, p, c);
                return std::make_tuple(c.value, g.grad, g.smooth);
            },
            py::arg("p"), py::arg("N") = 20, "(value, gradient, smooth) of the closed-loop strong norm")
        .def(
            "grad_check",
            [](const Loop& l, const Vector& p, double step) {
                return to_py(finite_diff_to_json(finite_diff_check(l.tmpl, p, step), p, step));
            },
            py::arg("p"), py::arg("step") = 1e-5)
        .def(
            "optimize",
            [](const Loop& l, int starts, std::uint64_t seed, double box, int max_iter, unsigned threads,
               std::vector<Vector> initial) {
                SynthesisProblem pr;
                pr.plant = l.spec.plant;
                pr.structure = l.spec.controller;
                pr.initial = std::move(initial);
                pr.options.starts = starts;
                pr.options.seed = seed;
                pr.options.box = box;
                pr.options.max_iter = max_iter;
                pr.options.threads = threads;
                SynthesisResult r;
                {
                    py::gil_scoped_release nogil;
                    r = optimize(pr);
                }
                return to_py(synthesis_to_json(r));
            },
            py::arg("starts") = 5, py::arg("seed") = 0, py::arg("box") = 10.0, py::arg("max_iter") = 200,
            py::arg("threads") = 0, py::arg("initial") = std::vector<Vector>{},
            "Multistart BFGS + gradient sampling; returns the result document.");
}
