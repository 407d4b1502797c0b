#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "lakevort/domain.hpp"
#include "lakevort/dynamics.hpp"
#include "lakevort/vorticity.hpp"

namespace lakevort {

enum class ExperimentKind { steady, sweep, greens_check, profile_check, stability };
enum class Regime { interior, boundary };

const char* experiment_name(ExperimentKind k);

// Declarative description of the profile nonlinearity, kept separate from
// VorticityFunction so configs echo and compare exactly.
struct ProfileSpec {
    ProfileKind kind = ProfileKind::power;
    double exponent = 1.0;
    double shift = 0.0;      // shifted_power only
    std::string table_path;  // tabulated only (two-column CSV)

    bool operator==(const ProfileSpec&) const = default;
};

VorticityFunction make_profile(const ProfileSpec& spec);

struct StabilitySpec {
    PerturbationKind perturbation = PerturbationKind::none;
    int shift_x = 0, shift_y = 0; // cells, shift perturbation
    double delta = 0.0;           // amplitude perturbation factor - 1
    double noise_level = 0.0;     // multiplicative noise half-width
    double turnovers = 20.0;      // horizon in eddy-turnover units
    double cfl = 0.5;             // advective CFL number for the time step
    int record_every = 10;
    std::vector<double> p_list = {1.0, 2.0};

    bool operator==(const StabilitySpec&) const = default;
};

// One experiment, fully specified.  parse_config materializes every default so
// an echoed config is complete and re-parses to an equal value.
struct RunConfig {
    ExperimentKind experiment = ExperimentKind::steady;
    bool experiment_declared = false; // whether the file set [experiment] kind

    Shape shape = Shape::make_disc({0.0, 0.0}, 1.0);
    DepthSpec depth = DepthSpec::constant(1.0);
    int nx = 256;
    double depth_floor = -1.0; // negative selects the automatic floor

    ProfileSpec profile;

    std::vector<double> eps_schedule = {0.1}; // strictly decreasing, size 1 = single
    double kappa = 1.0;
    double lambda = 0.0; // <= 0 selects the automatic cap ("auto")
    double tol_fix = 1e-8;
    double tol_circ = 1e-10;
    double tol_pcg = 1e-10;
    int max_iter = 3000;
    double damping = 1.0;
    Regime regime = Regime::interior;

    std::string out_dir = "out";
    std::uint64_t seed = 1u;

    StabilitySpec stability;
};

bool operator==(const RunConfig& a, const RunConfig& b);
inline bool operator!=(const RunConfig& a, const RunConfig& b) { return !(a == b); }

// Parse failure with "source:line: message" formatting and, for unknown keys,
// a nearest-known-key hint.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

RunConfig parse_config(const std::string& path);
RunConfig parse_config_text(const std::string& text, const std::string& source_name);

// Canonical serialization: every field, fixed section and key order, "%.17g"
// numbers.  parse_config_text(config_echo(c)) == c for any valid c.
std::string config_echo(const RunConfig& c);

// Extracts the config block a manifest embeds between its marker lines.
// Throws std::runtime_error when the markers are missing.
std::string extract_config_echo(const std::string& manifest_text);

} // namespace lakevort
