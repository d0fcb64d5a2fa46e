#include <iostream>
#include <string>
#include <thread>
#include <utility>

#include <CLI11.hpp>

#include "naxon/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"naxon: finite-difference simulator for stochastic nerve-axon equations"};
    app.require_subcommand(1);

    std::string config_path;
    long long seed = -1;
    unsigned threads = std::max(1u, std::thread::hardware_concurrency());
    std::string out_dir = ".";

    const std::pair<const char*, const char*> commands[] = {
        {"simulate", "integrate one trajectory per seed"},
        {"converge", "refinement hierarchy against a reference level"},
        {"audit", "sample the declared constants of the model"},
        {"ou-stats", "sup-norm statistics of the discrete OU process"},
    };
    for (const auto& [name, help] : commands) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--config", config_path, "run config (JSON)")->required();
        sub->add_option("--seed", seed, "single seed; overrides the config seed list")->check(CLI::NonNegativeNumber);
        sub->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
        sub->add_option("--out-dir", out_dir, "output directory");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : naxon::kExitValidation;
    }

    const std::string sub = app.get_subcommands().front()->get_name();
    naxon::RunConfig cfg;
    try {
        cfg = naxon::load_config(config_path);
        if (seed >= 0) {
            cfg.seeds = {static_cast<std::uint64_t>(seed)};
            cfg.converge.seeds = cfg.seeds;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return naxon::kExitValidation;
    }
    naxon::CliContext ctx;
    ctx.out_dir = out_dir;
    ctx.threads = threads;
    return naxon::run_command(sub, cfg, ctx);
}
