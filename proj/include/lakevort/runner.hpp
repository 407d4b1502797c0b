#pragma once

#include <string>
#include <vector>

#include "lakevort/asymptotics.hpp"
#include "lakevort/config.hpp"
#include "lakevort/dynamics.hpp"
#include "lakevort/steady.hpp"

namespace lakevort {

const char* lakevort_version();

struct RunOptions {
    std::string out_dir; // overrides the config's output directory when set
    int threads = 1;     // parallel worker slots for sweep solves
    bool deterministic = true;
    bool quiet = false; // suppress progress lines on stdout
};

// Outcome of one experiment run.  Artifacts land in the output directory; the
// fields below hand the computed results to in-process callers (tests, the
// acceptance suite) without a CSV round-trip.
struct RunResult {
    int exit_code = 0;
    std::string failed_stage; // empty on success
    std::string error;        // failure description
    std::string out_dir;      // resolved output directory
    std::vector<std::string> files; // artifact names in write order (manifest last)

    std::vector<SteadyState> states;       // steady, sweep, stability
    std::vector<SweepRecord> records;      // steady, sweep
    ScalingFit mu_fit, energy_fit;         // sweep with >= 4 entries
    DiameterReport diameter;               // sweep with >= 3 entries
    ConcentrationReport concentration;     // sweep
    bool fits_available = false;
    StabilityReport stability;             // stability
};

// Dispatches on config.experiment, writes all artifacts plus manifest.txt into
// the output directory, and never throws: failures are reported through
// exit_code / failed_stage / error with partial artifacts retained.
RunResult run_experiment(const RunConfig& config, const RunOptions& options = {});

} // namespace lakevort
