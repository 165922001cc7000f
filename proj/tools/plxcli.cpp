// Scenario runner: parses a JSON config, executes the selected pipeline
// (scalar solve, half-bound comparison, cooperative/competitive system,
// refinement study) and writes report.json plus CSV artifacts.
#include <CLI11.hpp>
#include <cstdio>

#include "plx/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"variable-exponent p-Laplacian system solver and verifier"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out";
    unsigned seed = 0;
    bool quiet = false;
    int levels = 0;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("config", config_path, "scenario config (JSON)")->required();
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--seed", seed, "seed for randomized property checks");
        sub->add_flag("--quiet", quiet, "suppress the summary line");
    };
    CLI::App* run = app.add_subcommand("run", "run one scenario");
    add_common(run);
    CLI::App* refine = app.add_subcommand("refine", "run a refinement study");
    add_common(refine);
    refine->add_option("--levels", levels, "number of grid-doubling levels")
        ->check(CLI::Range(2, 12));

    CLI11_PARSE(app, argc, argv);

    plx::RunConfig cfg;
    try {
        cfg = plx::RunConfig::load(config_path);
    } catch (const plx::ConfigError& e) {
        std::fprintf(stderr, "invalid configuration: %s\n", e.what());
        return 2;
    }
    if (run->count("--seed") || refine->count("--seed")) cfg.solver.seed = seed;

    plx::RunResult res = refine->parsed()
                             ? plx::refine_scenario(cfg, levels > 0 ? levels : cfg.levels)
                             : plx::run_scenario(cfg);
    plx::write_outputs(res, out_dir);
    if (!quiet) std::fprintf(res.exit_code == 0 ? stdout : stderr, "%s\n", res.summary.c_str());
    return res.exit_code;
}
