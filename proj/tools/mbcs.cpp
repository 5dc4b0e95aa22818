#include <CLI11.hpp>
#include <iostream>
#include <string>

#include "mbcs/experiment.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Multi-boson correlation sampling simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "out";
    bool quiet = false;
    std::uint64_t seed = 0;
    bool seed_given = false;

    auto* run = app.add_subcommand("run", "Run an experiment and write its artifacts");
    run->add_option("config", config_path, "Experiment config (JSON)")->required();
    run->add_option("--out", out_dir, "Output directory (default: out)");
    run->add_option("--seed", seed, "Override the config seed")->each([&](const std::string&) {
        seed_given = true;
    });
    run->add_flag("--quiet", quiet, "Suppress progress output and warnings");

    auto* validate = app.add_subcommand("validate", "Check an experiment config without running");
    validate->add_option("config", config_path, "Experiment config (JSON)")->required();
    validate->add_flag("--quiet", quiet, "Suppress the ok line");

    CLI11_PARSE(app, argc, argv);

    mbcs::ExperimentConfig cfg;
    try {
        cfg = mbcs::load_experiment_config(config_path);
    } catch (const mbcs::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return mbcs::exit_io;
    } catch (const mbcs::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return mbcs::exit_validation;
    }

    if (app.got_subcommand(validate)) {
        const auto issues = mbcs::validate_experiment(cfg);
        bool failed = false;
        for (const auto& issue : issues) {
            if (!issue.warning) failed = true;
            std::cerr << (issue.warning ? "warning: " : "error: ") << issue.path << ": "
                      << issue.message << "\n";
        }
        if (failed) return mbcs::exit_validation;
        if (!quiet) std::cout << "config ok (" << issues.size() << " warning(s))\n";
        return mbcs::exit_ok;
    }

    mbcs::RunOptions opts;
    opts.out_dir = out_dir;
    opts.quiet = quiet;
    if (seed_given) opts.seed_override = seed;
    return mbcs::run_experiment(cfg, opts);
}
