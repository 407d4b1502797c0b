// Command-line driver: parses a config file, dispatches the requested
// experiment through the runner, and reports the failing stage on errors.
#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "lakevort/config.hpp"
#include "lakevort/runner.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir;
    int threads = 1;
    bool deterministic = true;
    bool quiet = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "experiment config file")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--out", args.out_dir, "output directory (overrides the config)");
    cmd->add_option("--threads", args.threads, "parallel solve slots for sweeps")
        ->check(CLI::PositiveNumber);
    cmd->add_flag("--deterministic,!--no-deterministic", args.deterministic,
                  "fixed-order summation and assembly (default on)");
    cmd->add_flag("--quiet", args.quiet, "suppress progress output");
}

int run_kind(lakevort::ExperimentKind kind, const CommonArgs& args) {
    lakevort::RunConfig config;
    try {
        config = lakevort::parse_config(args.config_path);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    }
    if (config.experiment_declared && config.experiment != kind) {
        std::fprintf(stderr,
                     "config error: %s declares experiment '%s' but the subcommand is '%s'\n",
                     args.config_path.c_str(), lakevort::experiment_name(config.experiment),
                     lakevort::experiment_name(kind));
        return 2;
    }
    config.experiment = kind;

    lakevort::RunOptions options;
    options.out_dir = args.out_dir;
    options.threads = args.threads;
    options.deterministic = args.deterministic;
    options.quiet = args.quiet;
    lakevort::RunResult result = lakevort::run_experiment(config, options);
    if (result.exit_code != 0)
        std::fprintf(stderr, "stage '%s' failed: %s\n", result.failed_stage.c_str(),
                     result.error.c_str());
    return result.exit_code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"lakevort: steady lake-model vortices by constrained energy maximization"};
    app.require_subcommand(1);
    app.set_version_flag("--version", lakevort::lakevort_version());

    using lakevort::ExperimentKind;
    const std::pair<const char*, ExperimentKind> kinds[] = {
        {"steady", ExperimentKind::steady},
        {"sweep", ExperimentKind::sweep},
        {"greens-check", ExperimentKind::greens_check},
        {"profile-check", ExperimentKind::profile_check},
        {"stability", ExperimentKind::stability},
    };
    const char* briefs[] = {
        "solve one steady state and write its diagnostics",
        "solve an eps schedule and fit the scaling laws",
        "compare the zero-boundary kernel against the disc image oracle",
        "sample the profile nonlinearity hypotheses",
        "transport a perturbed steady state and record drift series",
    };

    CommonArgs args[5];
    int selected = -1;
    for (int k = 0; k < 5; ++k) {
        CLI::App* cmd = app.add_subcommand(kinds[k].first, briefs[k]);
        add_common(cmd, args[k]);
        cmd->callback([&selected, k] { selected = k; });
    }

    CLI11_PARSE(app, argc, argv);
    return run_kind(kinds[selected].second, args[selected]);
}
