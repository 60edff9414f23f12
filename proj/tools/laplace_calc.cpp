#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "experiments.hpp"
#include "laplace/errors.hpp"

int main(int argc, char** argv) {
    CLI::App app{"batch front-end for the generalized-derivative calculus toolkit"};
    app.require_subcommand(0, 1);

    bool list = false;
    app.add_flag("--list-experiments", list, "list available experiments and exit");

    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_given = false;
    auto* run = app.add_subcommand("run", "run one experiment from a JSON config");
    run->add_option("config", config_path, "path to the experiment config (JSON)")->required();
    run->add_option("--out", out_dir, "output directory (overrides the config)");
    run->add_option("--seed", seed, "seed for randomized suites (overrides the config)")
        ->each([&](const std::string&) { seed_given = true; });

    CLI11_PARSE(app, argc, argv);

    if (list) {
        for (const auto& info : laplace::cli::experiment_catalog())
            std::printf("%-24s %s\n", info.name.c_str(), info.description.c_str());
        return 0;
    }
    if (!run->parsed()) {
        std::fprintf(stderr, "%s\n", app.help().c_str());
        return 2;
    }

    try {
        laplace::cli::ExperimentConfig cfg = laplace::cli::parse_config_file(config_path);
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        if (seed_given) cfg.seed = seed;
        laplace::cli::ExperimentResult result = laplace::cli::run_experiment(cfg);
        for (const auto& a : result.assertions)
            std::printf("[%s] %s%s%s\n", a.pass ? "PASS" : "FAIL", a.name.c_str(),
                        a.detail.empty() ? "" : ": ", a.detail.c_str());
        std::printf("%s: %s (%.0f ms)\n", result.experiment.c_str(),
                    result.ok() ? "all assertions passed" : "ASSERTION FAILURES", result.elapsed_ms);
        return result.ok() ? 0 : 1;
    } catch (const laplace::ConfigError& e) {
        std::fprintf(stderr, "ConfigError: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
}
