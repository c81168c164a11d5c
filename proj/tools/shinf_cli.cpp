// shinf: strong H-infinity norms and fixed-structure synthesis for DDAEs.
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "shinf/io.hpp"
#include "shinf/oracle.hpp"

using namespace shinf;

namespace {

enum Exit { kOk = 0, kInput = 1, kCausality = 2, kUnstable = 3, kNumerical = 4 };

struct Common {
    std::string input;
    std::string output;
    std::vector<double> params;
    int N = 20;
    bool auto_N = false;
    double tol = 1e-6;
    int max_iter = 200;
    unsigned threads = 0;
};

// A system file, or an interconnection file closed with --params (or its
// first "initial" point).
DdaeSystem load_closed_system(const Common& c, std::optional<AffineDdae>* tmpl = nullptr,
                              Vector* p_out = nullptr) {
    const json doc = read_json_file(c.input);
    if (!doc.contains("plant")) {
        if (!c.params.empty()) throw InputError("--params needs an interconnection file");
        return system_from_json(doc);
    }
    const InterconnectionSpec spec = interconnection_from_json(doc);
    Vector p;
    if (!c.params.empty()) {
        p = Eigen::Map<const Vector>(c.params.data(), static_cast<Eigen::Index>(c.params.size()));
    } else if (!spec.initial.empty()) {
        p = spec.initial.front();
    } else if (spec.controller.num_params() == 0) {
        p = Vector(0);
    } else {
        throw InputError("interconnection file has free controller parameters: pass --params");
    }
    AffineDdae t = interconnect(spec.plant, spec.controller);
    DdaeSystem sys = substitute_parameters(t, p);
    if (tmpl) *tmpl = std::move(t);
    if (p_out) *p_out = p;
    return sys;
}

void emit(const Common& c, const json& doc) {
    const std::string text = doc.dump(2);
    if (c.output.empty()) {
        std::cout << text << "\n";
    } else {
        std::ofstream out(c.output);
        if (!out) throw InputError("cannot write '" + c.output + "'");
        out << text << "\n";
    }
}

NormOptions norm_options(const Common& c) {
    NormOptions o;
    o.N = c.N;
    o.auto_N = c.auto_N;
    o.tol = c.tol;
    o.max_level_iter = c.max_iter;
    return o;
}

int guarded(const Common& c, const std::string& command, const std::function<int()>& body) {
    auto fail = [&](int code, const std::string& kind, const std::string& what) {
        std::cerr << "shinf " << command << ": " << what << "\n";
        json doc;
        doc["command"] = command;
        doc["error"] = kind;
        doc["message"] = what;
        doc["exit_code"] = code;
        try {
            emit(c, doc);
        } catch (const std::exception&) {
        }
        return code;
    };
    try {
        return body();
    } catch (const CausalityViolation& e) {
        return fail(kCausality, "causality", std::string("U^T A0 V is singular: ") + e.what());
    } catch (const StrongStabilityViolation& e) {
        return fail(kUnstable, "instability", e.what());
    } catch (const NoStabilizingStart& e) {
        return fail(kUnstable, "instability", e.what());
    } catch (const NumericalFailure& e) {
        return fail(kNumerical, "numerical", e.what());
    } catch (const TransmissionPole& e) {
        return fail(kNumerical, "numerical", e.what());
    } catch (const InputError& e) {
        return fail(kInput, "input", e.what());
    } catch (const DimensionError& e) {
        return fail(kInput, "input", e.what());
    } catch (const json::exception& e) {
        return fail(kInput, "input", e.what());
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Strong H-infinity norms of delay differential-algebraic systems"};
    app.require_subcommand(1);
    Common c;

    auto add_input = [&](CLI::App* sub) {
        sub->add_option("file", c.input, "system or interconnection file (JSON)")->required()->check(CLI::ExistingFile);
        sub->add_option("-o,--output", c.output, "write the result here instead of stdout");
        sub->add_option("--params", c.params, "controller parameters (comma separated)")->delimiter(',');
    };
    auto add_norm = [&](CLI::App* sub) {
        sub->add_option("-N", c.N, "discretization order")->check(CLI::Range(2, 1000));
        sub->add_flag("--auto-N", c.auto_N, "double N until the predicted level settles");
        sub->add_option("--tol", c.tol, "relative level tolerance")->check(CLI::PositiveNumber);
        sub->add_option("--max-iter", c.max_iter, "level-set iteration cap")->check(CLI::PositiveNumber);
    };

    auto* norm = app.add_subcommand("norm", "strong H-infinity norm with certificate");
    add_input(norm);
    add_norm(norm);

    auto* ta = app.add_subcommand("ta-norm", "strong norm of the asymptotic transfer function");
    add_input(ta);
    int points_per_dim = 40;
    ta->add_option("--points", points_per_dim, "angle grid points per delay")->check(CLI::Range(2, 100000));

    auto* sw = app.add_subcommand("sweep", "singular values of T(j omega) as CSV");
    add_input(sw);
    double w_from = 1e-2, w_to = 1e2;
    int w_points = 400, sigmas = 1;
    bool linear = false;
    sw->add_option("--from", w_from, "lowest frequency")->check(CLI::NonNegativeNumber);
    sw->add_option("--to", w_to, "highest frequency")->check(CLI::PositiveNumber);
    sw->add_option("--points", w_points, "number of frequencies")->check(CLI::Range(2, 10000000));
    sw->add_option("--sigmas", sigmas, "singular values per row")->check(CLI::Range(1, 1000));
    sw->add_flag("--linear", linear, "linear instead of logarithmic spacing");

    auto* synth = app.add_subcommand("synth", "fixed-structure controller synthesis");
    synth->add_option("file", c.input, "interconnection file (JSON)")->required()->check(CLI::ExistingFile);
    synth->add_option("-o,--output", c.output, "write the result here instead of stdout");
    OptimizerOptions oo;
    synth->add_option("--starts", oo.starts, "number of starts")->check(CLI::Range(1, 100000));
    synth->add_option("--seed", oo.seed, "seed of the random starts");
    synth->add_option("--box", oo.box, "random starts uniform in [-box, box]")->check(CLI::PositiveNumber);
    synth->add_option("--max-iter", oo.max_iter, "BFGS iterations per start")->check(CLI::PositiveNumber);
    synth->add_option("--tol", oo.stationarity_tol, "stationarity tolerance")->check(CLI::PositiveNumber);
    synth->add_option("-N", c.N, "discretization order")->check(CLI::Range(2, 1000));
    synth->add_option("--threads", c.threads, "worker threads (0: all cores)");
    bool quiet = false;
    synth->add_flag("-q,--quiet", quiet, "do not print the per-start table");

    auto* gc = app.add_subcommand("grad-check", "gradient versus central finite differences");
    add_input(gc);
    add_norm(gc);
    double step = 1e-5;
    gc->add_option("--step", step, "relative finite-difference step")->check(CLI::PositiveNumber);

    auto* check = app.add_subcommand("check", "causality and strong stability");
    add_input(check);
    check->add_option("-N", c.N, "discretization order")->check(CLI::Range(2, 1000));

    CLI11_PARSE(app, argc, argv);

    if (norm->parsed()) {
        return guarded(c, "norm", [&]() -> int {
            const DdaeSystem sys = load_closed_system(c);
            json doc = certificate_to_json(strong_hinf(sys, norm_options(c)));
            doc["command"] = "norm";
            emit(c, doc);
            return kOk;
        });
    }
    if (ta->parsed()) {
        return guarded(c, "ta-norm", [&]() -> int {
            const DdaeSystem sys = load_closed_system(c);
            const NullspaceBases b = compute_nullspaces(sys);
            if (!check_causality(sys, b)) throw CausalityViolation("asymptotic transfer function undefined");
            AsymNormOptions ao;
            ao.points_per_dim = points_per_dim;
            json doc = asym_to_json(strong_norm_Ta(sys, b, ao));
            doc["command"] = "ta-norm";
            emit(c, doc);
            return kOk;
        });
    }
    if (sw->parsed()) {
        return guarded(c, "sweep", [&]() -> int {
            if (!(w_to > w_from)) throw InputError("--to must exceed --from");
            const DdaeSystem sys = load_closed_system(c);
            std::vector<double> grid;
            if (linear || w_from == 0.0) {
                for (int i = 0; i < w_points; ++i) grid.push_back(w_from + (w_to - w_from) * i / (w_points - 1));
            } else {
                grid = logspace(w_from, w_to, w_points);
            }
            const auto rows = sweep(sys, grid, sigmas);
            if (c.output.empty()) {
                write_sweep_csv(std::cout, rows);
            } else {
                std::ofstream out(c.output);
                if (!out) throw InputError("cannot write '" + c.output + "'");
                write_sweep_csv(out, rows);
            }
            return kOk;
        });
    }
    if (synth->parsed()) {
        return guarded(c, "synth", [&]() -> int {
            const InterconnectionSpec spec = interconnection_from_json(read_json_file(c.input));
            SynthesisProblem pr;
            pr.plant = spec.plant;
            pr.structure = spec.controller;
            pr.initial = spec.initial;
            pr.options = oo;
            pr.options.threads = c.threads;
            pr.options.norm.N = c.N;
            const SynthesisResult res = optimize(pr);
            if (!quiet) std::cerr << multistart_report(res);
            json doc = synthesis_to_json(res);
            doc["command"] = "synth";
            emit(c, doc);
            return kOk;
        });
    }
    if (gc->parsed()) {
        return guarded(c, "grad-check", [&]() -> int {
            std::optional<AffineDdae> tmpl;
            Vector p;
            load_closed_system(c, &tmpl, &p);
            if (!tmpl) throw InputError("grad-check needs an interconnection file");
            json doc = finite_diff_to_json(finite_diff_check(*tmpl, p, step, norm_options(c)), p, step);
            doc["command"] = "grad-check";
            emit(c, doc);
            return kOk;
        });
    }
    if (check->parsed()) {
        return guarded(c, "check", [&]() -> int {
            const DdaeSystem sys = load_closed_system(c);
            const NullspaceBases b = compute_nullspaces(sys);
            const double margin = causality_margin(sys, b);
            const StabilityReport rep = strong_stability_check(sys, b, c.N);
            json doc = stability_to_json(rep, margin);
            doc["command"] = "check";
            doc["nullity"] = b.v;
            const int code = !rep.causal ? kCausality : (!rep.stable ? kUnstable : kOk);
            doc["exit_code"] = code;
            if (code == kCausality) {
                std::cerr << "shinf check: U^T A0 V is singular (smallest singular value " << margin << ")\n";
            } else if (code == kUnstable) {
                std::cerr << "shinf check: not strongly exponentially stable\n";
            }
            emit(c, doc);
            return code;
        });
    }
    return kOk;
}
