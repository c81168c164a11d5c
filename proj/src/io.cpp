#include "shinf/io.hpp"

#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>

namespace shinf {

namespace {

const char* kBlocks[] = {"A", "H", "Bw", "Bu", "Cz", "Dzw", "Dzu", "Cy", "Dyw", "Dyu"};

std::vector<DelayedTerm>& block_ref(PlantModel& p, const std::string& name) {
    if (name == "A") return p.A;
    if (name == "H") return p.H;
    if (name == "Bw") return p.Bw;
    if (name == "Bu") return p.Bu;
    if (name == "Cz") return p.Cz;
    if (name == "Dzw") return p.Dzw;
    if (name == "Dzu") return p.Dzu;
    if (name == "Cy") return p.Cy;
    if (name == "Dyw") return p.Dyw;
    return p.Dyu;
}

Eigen::Index index_field(const json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_number_integer() || j.at(key).get<long long>() < 0) {
        throw InputError(std::string("field '") + key + "' must be a nonnegative integer");
    }
    return static_cast<Eigen::Index>(j.at(key).get<long long>());
}

Mask mask_from_json(const json& j, const std::string& what) {
    if (!j.is_array()) throw InputError(what + " must be a nested array of booleans");
    const Eigen::Index r = static_cast<Eigen::Index>(j.size());
    const Eigen::Index c = r ? static_cast<Eigen::Index>(j.at(0).size()) : 0;
    Mask m(r, c);
    for (Eigen::Index i = 0; i < r; ++i) {
        const json& row = j.at(static_cast<std::size_t>(i));
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != c) {
            throw InputError(what + " has ragged rows");
        }
        for (Eigen::Index k = 0; k < c; ++k) {
            const json& e = row.at(static_cast<std::size_t>(k));
            if (e.is_boolean()) {
                m(i, k) = e.get<bool>();
            } else if (e.is_number()) {
                m(i, k) = e.get<double>() != 0.0;
            } else {
                throw InputError(what + " entries must be booleans");
            }
        }
    }
    return m;
}

json number(double v) {
    if (std::isfinite(v)) return v;
    return nullptr;
}

json vector_to_json(const Vector& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(number(v(i)));
    return a;
}

json complex_vector_to_json(const CVector& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back({v(i).real(), v(i).imag()});
    return a;
}

}  // namespace

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw InputError("'" + path + "' is not valid JSON: " + e.what());
    }
}

Matrix matrix_from_json(const json& j, const std::string& what) {
    if (!j.is_array()) throw InputError(what + " must be a row-major nested array");
    const Eigen::Index r = static_cast<Eigen::Index>(j.size());
    if (r == 0) return Matrix(0, 0);
    if (!j.at(0).is_array()) throw InputError(what + " must be a row-major nested array");
    const Eigen::Index c = static_cast<Eigen::Index>(j.at(0).size());
    Matrix m(r, c);
    for (Eigen::Index i = 0; i < r; ++i) {
        const json& row = j.at(static_cast<std::size_t>(i));
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != c) {
            throw InputError(what + " has ragged rows");
        }
        for (Eigen::Index k = 0; k < c; ++k) {
            const json& e = row.at(static_cast<std::size_t>(k));
            if (!e.is_number()) throw InputError(what + " entries must be numbers");
            m(i, k) = e.get<double>();
        }
    }
    return m;
}

json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
        rows.push_back(std::move(row));
    }
    return rows;
}

DdaeSystem system_from_json(const json& j) {
    if (!j.is_object()) throw InputError("system document must be an object");
    for (const char* key : {"E", "A", "B", "C"}) {
        if (!j.contains(key)) throw InputError(std::string("system document lacks '") + key + "'");
    }
    const Matrix E = matrix_from_json(j.at("E"), "E");
    if (j.contains("n") && index_field(j, "n") != E.rows()) {
        throw InputError("field 'n' does not match the size of E");
    }
    if (!j.at("A").is_array()) throw InputError("'A' must be a list of matrices");
    std::vector<Matrix> A;
    for (std::size_t i = 0; i < j.at("A").size(); ++i) {
        A.push_back(matrix_from_json(j.at("A").at(i), "A[" + std::to_string(i) + "]"));
    }
    std::vector<double> taus;
    if (j.contains("delays")) {
        if (!j.at("delays").is_array()) throw InputError("'delays' must be a list of numbers");
        for (const json& t : j.at("delays")) {
            if (!t.is_number()) throw InputError("'delays' must be a list of numbers");
            taus.push_back(t.get<double>());
        }
    }
    Matrix B = matrix_from_json(j.at("B"), "B");
    Matrix C = matrix_from_json(j.at("C"), "C");
    return DdaeSystem(E, std::move(A), std::move(B), std::move(C), std::move(taus));
}

json system_to_json(const DdaeSystem& sys) {
    json j;
    j["n"] = sys.n();
    j["E"] = matrix_to_json(sys.E());
    j["delays"] = sys.delays().values();
    json A = json::array();
    for (const Matrix& a : sys.A()) A.push_back(matrix_to_json(a));
    j["A"] = std::move(A);
    j["B"] = matrix_to_json(sys.B());
    j["C"] = matrix_to_json(sys.C());
    return j;
}

InterconnectionSpec interconnection_from_json(const json& j) {
    if (!j.is_object() || !j.contains("plant")) throw InputError("interconnection document lacks 'plant'");
    const json& jp = j.at("plant");
    InterconnectionSpec spec;
    PlantModel& p = spec.plant;
    p.nx = index_field(jp, "nx");
    p.nw = index_field(jp, "nw");
    p.nu = index_field(jp, "nu");
    p.nz = index_field(jp, "nz");
    p.ny = index_field(jp, "ny");
    for (const char* name : kBlocks) {
        if (!jp.contains(name)) continue;
        const json& b = jp.at(name);
        auto& terms = block_ref(p, name);
        const bool is_term_list = b.is_array() && !b.empty() && b.at(0).is_object();
        if (is_term_list) {
            for (const json& t : b) {
                if (!t.contains("matrix")) throw InputError(std::string("plant block ") + name + " term lacks 'matrix'");
                const double d = t.value("delay", 0.0);
                terms.push_back({d, matrix_from_json(t.at("matrix"), name)});
            }
        } else if (!b.empty()) {
            terms.push_back({0.0, matrix_from_json(b, name)});
        }
    }
    p.validate();

    const json jc = j.value("controller", json::object());
    const Eigen::Index order = jc.contains("order") ? index_field(jc, "order") : 0;
    ControllerStructure c(order, p.nu, p.ny);
    if (jc.contains("fixed_values")) {
        const json& f = jc.at("fixed_values");
        ControllerStructure::Matrices m = c.fixed_values();
        if (f.contains("Ac")) m.Ac = matrix_from_json(f.at("Ac"), "fixed_values.Ac");
        if (f.contains("Bc")) m.Bc = matrix_from_json(f.at("Bc"), "fixed_values.Bc");
        if (f.contains("Cc")) m.Cc = matrix_from_json(f.at("Cc"), "fixed_values.Cc");
        if (f.contains("Dc")) m.Dc = matrix_from_json(f.at("Dc"), "fixed_values.Dc");
        c.set_fixed(m);
    }
    if (jc.contains("mask")) {
        const json& mk = jc.at("mask");
        Mask ms[4] = {c.mask(0), c.mask(1), c.mask(2), c.mask(3)};
        const char* names[] = {"Ac", "Bc", "Cc", "Dc"};
        for (int k = 0; k < 4; ++k) {
            if (mk.contains(names[k])) ms[k] = mask_from_json(mk.at(names[k]), std::string("mask.") + names[k]);
        }
        c.set_masks(ms[0], ms[1], ms[2], ms[3]);
    }
    if (jc.contains("controller_delays")) {
        const json& d = jc.at("controller_delays");
        if (!d.is_array() || d.size() > 1) {
            throw InputError("'controller_delays' must hold at most one delay (on the measured output)");
        }
        if (!d.empty()) c.set_input_delay(d.at(0).get<double>());
    }
    spec.controller = std::move(c);

    if (j.contains("initial")) {
        for (const json& v : j.at("initial")) {
            Vector x(static_cast<Eigen::Index>(v.size()));
            for (std::size_t i = 0; i < v.size(); ++i) x(static_cast<Eigen::Index>(i)) = v.at(i).get<double>();
            if (static_cast<std::size_t>(x.size()) != spec.controller.num_params()) {
                throw InputError("initial point has " + std::to_string(x.size()) + " entries, controller has " +
                                 std::to_string(spec.controller.num_params()) + " free parameters");
            }
            spec.initial.push_back(std::move(x));
        }
    }
    return spec;
}

json certificate_to_json(const NormCertificate& cert) {
    json j;
    j["value"] = number(cert.value);
    j["branch"] = to_string(cert.kind);
    if (cert.kind == Branch::Frequency) {
        j["omega_hat"] = cert.omega_hat;
        j["theta_hat"] = nullptr;
    } else {
        j["omega_hat"] = nullptr;
        j["theta_hat"] = cert.theta_hat.theta;
    }
    j["iterations"] = cert.iterations;
    j["N"] = cert.N;
    j["tol"] = cert.tol;
    j["ta_norm"] = number(cert.ta_norm);
    j["predicted"] = number(cert.predicted);
    j["corrected"] = cert.corrected;
    j["simple"] = cert.simple;
    j["crossing_bound"] = cert.crossing_bound;
    j["history"] = cert.history;
    j["active_omegas"] = cert.active_omegas;
    j["u"] = complex_vector_to_json(cert.u);
    j["v"] = complex_vector_to_json(cert.v);
    j["warnings"] = cert.warnings;
    return j;
}

json asym_to_json(const AsymNormResult& r) {
    json j;
    j["value"] = number(r.value);
    j["branch"] = "asymptotic";
    j["theta_hat"] = r.theta_hat.theta;
    j["grid_value"] = number(r.grid_value);
    j["iterations"] = r.iterations;
    j["converged"] = r.converged;
    j["multiple_singular"] = r.multiple_singular;
    j["residual"] = r.residual;
    j["effective_delays"] = r.effective;
    return j;
}

json stability_to_json(const StabilityReport& rep, double causality_margin) {
    json j;
    j["causal"] = rep.causal;
    j["causality_margin"] = number(causality_margin);
    j["strongly_stable"] = rep.stable;
    j["abscissa"] = number(rep.abscissa);
    j["difference_radius"] = number(rep.delta_radius);
    return j;
}

json finite_diff_to_json(const FiniteDiffReport& rep, const Vector& p, double step) {
    json j;
    j["value"] = number(rep.value);
    j["branch"] = to_string(rep.branch);
    j["p"] = vector_to_json(p);
    j["step"] = step;
    j["gradient"] = vector_to_json(rep.analytic);
    j["finite_difference"] = vector_to_json(rep.numeric);
    j["max_abs_error"] = number(rep.max_abs_error);
    j["max_rel_error"] = number(rep.max_rel_error);
    j["smooth"] = rep.smooth;
    return j;
}

json synthesis_to_json(const SynthesisResult& res) {
    json j;
    j["value"] = number(res.best_value);
    j["p"] = vector_to_json(res.best_p);
    j["best_start"] = res.best_start;
    if (res.cert) {
        const json c = certificate_to_json(*res.cert);
        for (const char* k : {"branch", "omega_hat", "theta_hat", "iterations", "N", "tol"}) j[k] = c.at(k);
    }
    json starts = json::array();
    for (const StartTrace& t : res.traces) {
        json s;
        s["index"] = t.index;
        s["p0"] = vector_to_json(t.p0);
        s["p"] = vector_to_json(t.p);
        s["value"] = number(t.value);
        s["grad_norm"] = number(t.grad_norm);
        s["stationarity"] = number(t.stationarity);
        s["phase"] = to_string(t.phase);
        s["bfgs_iterations"] = t.bfgs_iterations;
        s["gs_iterations"] = t.gs_iterations;
        s["evaluations"] = t.evaluations;
        s["draws"] = t.draws;
        s["branch"] = t.branch ? json(to_string(*t.branch)) : json(nullptr);
        starts.push_back(std::move(s));
    }
    j["starts"] = std::move(starts);
    return j;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
    std::size_t k = 1;
    for (const auto& r : rows) k = std::max<std::size_t>(k, static_cast<std::size_t>(r.sigma.size()));
    os << "omega";
    for (std::size_t i = 1; i <= k; ++i) os << ",sigma" << i;
    os << "\n" << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (const auto& r : rows) {
        os << r.omega;
        for (std::size_t i = 0; i < k; ++i) {
            os << ",";
            if (static_cast<Eigen::Index>(i) < r.sigma.size()) os << r.sigma(static_cast<Eigen::Index>(i));
        }
        os << "\n";
    }
}

}  // namespace shinf
