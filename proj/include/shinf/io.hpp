#pragma once

#include <iosfwd>
#include <string>

#include <nlohmann/json.hpp>
#include "shinf/gradients.hpp"
#include "shinf/synthesis.hpp"

namespace shinf {

using json = nlohmann::json;

/// Malformed input document.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

json read_json_file(const std::string& path);

Matrix matrix_from_json(const json& j, const std::string& what);
json matrix_to_json(const Matrix& m);

/// {"n", "E", "delays", "A": [A0, A1, ...], "B", "C"}
DdaeSystem system_from_json(const json& j);
json system_to_json(const DdaeSystem& sys);

struct InterconnectionSpec {
    PlantModel plant;
    ControllerStructure controller;
    std::vector<Vector> initial;  // optional starting parameter vectors
};

/// {"plant": {"nx", "nw", "nu", "nz", "ny", "A": ..., "Bw": ..., ...},
///  "controller": {"order", "mask", "fixed_values", "controller_delays"},
///  "initial": [[...], ...]}
/// A plant block is either a matrix (undelayed) or a list of
/// {"delay", "matrix"} terms.
InterconnectionSpec interconnection_from_json(const json& j);

json certificate_to_json(const NormCertificate& cert);
json asym_to_json(const AsymNormResult& r);
json stability_to_json(const StabilityReport& rep, double causality_margin);
json finite_diff_to_json(const FiniteDiffReport& rep, const Vector& p, double step);
json synthesis_to_json(const SynthesisResult& res);

/// "omega,sigma1[,sigma2...]" header plus one row per frequency.
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);

}  // namespace shinf
