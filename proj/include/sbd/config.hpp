#pragma once

#include "sbd/advisor.hpp"
#include "sbd/elliptic.hpp"
#include "sbd/noise.hpp"
#include "sbd/stepper.hpp"

#include <json.hpp>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sbd {

inline constexpr const char* kCodeVersion = "sbd 1.0.0";

/// Every violation found while parsing, path-addressed.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<std::string> violations);
    const std::vector<std::string>& violations() const { return violations_; }

private:
    std::vector<std::string> violations_;
};

/// Scalar grid field: zero | constant | indicator | cosine | table.
struct FieldSpec {
    std::string kind = "zero";
    double value = 0.0;                // constant, and the value inside an indicator box
    std::vector<double> lower, upper;  // indicator box
    double amplitude = 0.0;            // cosine: offset + amplitude * prod cos(k_a pi x_a / L_a)
    double offset = 0.0;
    std::vector<int> modes;
    std::vector<double> values;  // table, one per cell

    GridFunction sample(const Grid& grid) const;
};

/// Conductivity field: scalar | diagonal | full | table | preset ("ramp").
struct TensorSpec {
    std::string kind = "scalar";
    double scalar = 1.0;
    std::vector<double> diagonal;
    std::vector<double> full;                // d*d, row major
    std::vector<std::vector<double>> table;  // per cell, d*d row major
    std::string preset;
    double base = 1.0;   // ramp: base * (1 + slope * x_0 / L_0) * I
    double slope = 0.0;

    TensorField build(const Grid& grid, Medium label) const;
};

struct OutputConfig {
    std::string directory = "out";
    bool frames = true;
    bool ledger = true;
    bool modal = false;
    bool potentials = false;
    bool monitors = true;
    double monitor_delta = 0.0;  // start of the window for the strong-norm bound
};

struct RunConfig {
    int d = 2;
    std::vector<int> extents{16, 16};
    std::vector<double> lengths{1.0, 1.0};

    TensorSpec a_i;
    TensorSpec a_e;
    double lambda0 = 1e-12;
    double bd_tolerance = 1e-8;

    FHNParams fhn;
    bool reaction = true;

    FieldSpec h;
    std::uint64_t seed = 0;
    NoiseClass regularity = NoiseClass::half_power;
    Index modes = 0;
    std::vector<ScheduleSegment> schedule;
    double dz = 0.0;  // z-grid spacing; 0 selects stepper.dt

    FieldSpec v0;
    FieldSpec w0;
    std::optional<FieldSpec> I_i;
    std::optional<FieldSpec> I_e;

    StepperConfig stepper;

    double s = 2.0;
    double r = 2.0;
    std::optional<double> mu_request;
    Setting setting = Setting::strong;

    OutputConfig outputs;
};

/// Built-in defaults: 2D 16x16 unit square, anisotropic diagonal tensors.
RunConfig default_config();

/// Parses JSON text. Unknown and duplicate keys, type errors and range
/// violations are collected and thrown together as ConfigError.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// Canonical JSON of a fully resolved configuration.
nlohmann::json to_json(const RunConfig& cfg);

/// SHA-256 (hex) of the canonical JSON.
std::string config_hash(const RunConfig& cfg);

std::string sha256_hex(const std::string& data);

SettingInputs advisor_inputs(const RunConfig& cfg);

}  // namespace sbd
