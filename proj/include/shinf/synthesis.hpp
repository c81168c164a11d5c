#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>

#include "shinf/gradients.hpp"
#include "shinf/interconnect.hpp"

namespace shinf {

struct OptimizerOptions {
    int starts = 5;
    std::uint64_t seed = 0;
    double box = 10.0;            // random starts uniform in [-box, box]^dim
    int max_draws = 200;          // redraws per random start until it is stabilizing
    int max_iter = 200;           // BFGS iterations per start
    int max_gs_iter = 40;         // gradient-sampling iterations per start
    int stall_iter = 10;          // BFGS iterations without decrease before switching
    double grad_tol = 1e-6;       // BFGS stop on |g|
    double stationarity_tol = 1e-6;
    std::vector<double> radii = {1e-1, 1e-2, 1e-3, 1e-4};
    unsigned threads = 0;         // 0: hardware concurrency
    NormOptions norm;             // fixed N: the corrected value does not depend on it
};

struct ObjectiveValue {
    double value = std::numeric_limits<double>::infinity();
    Vector grad;
    bool smooth = false;
    std::optional<NormCertificate> cert;
    bool finite() const { return std::isfinite(value); }
};

struct SynthesisProblem {
    PlantModel plant;
    ControllerStructure structure;
    std::vector<Vector> initial;  // explicit starts; random starts fill up to options.starts
    OptimizerOptions options;
    // replaces the closed-loop objective (used to exercise the optimizer)
    std::function<ObjectiveValue(const Vector&)> test_objective;
};

enum class Phase { Unstable, Bfgs, GradientSampling };
const char* to_string(Phase p);

struct StartTrace {
    int index = 0;
    Vector p0;
    Vector p;
    double value = std::numeric_limits<double>::infinity();
    double grad_norm = std::numeric_limits<double>::infinity();
    double stationarity = std::numeric_limits<double>::infinity();
    Phase phase = Phase::Unstable;
    int bfgs_iterations = 0;
    int gs_iterations = 0;
    int evaluations = 0;
    int draws = 0;
    std::optional<Branch> branch;
    std::vector<double> values;  // accepted iterates
};

struct SynthesisResult {
    Vector best_p;
    double best_value = std::numeric_limits<double>::infinity();
    int best_start = -1;
    std::vector<StartTrace> traces;
    std::optional<NormCertificate> cert;
};

class NoStabilizingStart : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Value and gradient of the closed-loop strong H-infinity norm at p;
/// +infinity (no gradient) when the loop is not strongly stable.
ObjectiveValue objective(const SynthesisProblem& problem, const AffineDdae& tmpl, const Vector& p);
ObjectiveValue objective(const SynthesisProblem& problem, const Vector& p);

/// BFGS with weak Wolfe line search, then gradient sampling, from every
/// start; starts run on worker threads and are aggregated by index.
SynthesisResult optimize(const SynthesisProblem& problem);

/// Smallest-norm point of the convex hull of the columns of G (Wolfe's
/// algorithm). Returns the point; `weights` receives the combination.
Vector min_norm_convex(const Matrix& G, Vector* weights = nullptr);

std::string multistart_report(const SynthesisResult& result);

}  // namespace shinf
