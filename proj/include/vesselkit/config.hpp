#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vesselkit/pdecheck.hpp"
#include "vesselkit/solitons.hpp"

// vendored nlohmann/json single header
#include "json.hpp"

namespace vesselkit {

using Json = nlohmann::ordered_json;

/// Complex scalars are [re, im]; matrices are row-major nested arrays of them.
Complex complex_from_json(const Json& j);
ComplexMatrix matrix_from_json(const Json& j);
ComplexVector vector_from_json(const Json& j);
Json to_json(Complex z);
Json to_json(const ComplexMatrix& m);

struct CheckSpec {
    std::string name;
    double tolerance = 1e-6;
};

struct TransformConfig {
    std::string kind;  // "first" | "second" | "internal"
    ComplexMatrix u, v;
    Complex k2{}, k{};
};

/// Parsed experiment configuration with all defaults materialized.
struct ExperimentConfig {
    VesselParameters parameters;

    bool has_realization = false;
    bool is_soliton = false;
    ComplexMatrix a, a_zeta, b0, c0;
    double x0 = 0.0, t0 = 0.0;
    SolitonSpec soliton;

    bool has_grid = false;
    Grid grid;

    std::vector<std::string> observables;
    std::vector<CheckSpec> checks;
    std::vector<Complex> lambdas;
    std::optional<ComplexVector> u0;
    std::optional<TransformConfig> transform;
    ComplexMatrix trace_k;  // defaults to identity
    int trace_n = 0;
    int moment_n = 3;
    std::string y_entry = "h12";  // enls source entry

    std::string out_dir = ".";
    std::string stem;
    double tau_min = 1e-10;
    double mask_rel = 0.0;
    bool halving = false;
    FdAccuracy accuracy;
};

ExperimentConfig parse_config(const Json& j);
ExperimentConfig load_config(const std::string& path);

/// Full round-trippable form: parse_config(resolved_config(c)) reproduces c.
Json resolved_config(const ExperimentConfig& c);

/// Build the configured realization (explicit matrices or soliton preset).
/// For soliton presets also reports the recorded closed-form sign.
struct BuiltRealization {
    Realization realization;
    std::optional<int> soliton_sign;
};
BuiltRealization build_realization(const ExperimentConfig& c);

}  // namespace vesselkit
