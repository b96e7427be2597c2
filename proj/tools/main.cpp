// ida_sim: deterministic scenario simulator for the IDA tactical asset &
// liability management policy.
#include "ida/cli.hpp"

#include <CLI11.hpp>

#include <string>
#include <vector>

int main(int argc, char** argv) {
    CLI::App app{"IDA protocol simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "out";
    std::vector<std::string> sets;
    std::vector<std::string> grids;
    std::string seed;
    std::string mode;
    int jobs = 1;

    auto add_common = [&](CLI::App* cmd, bool with_out) {
        cmd->add_option("--config", config_path, "scenario config file (JSON)")->required();
        cmd->add_option("--set", sets, "override, dotted.key=value (repeatable)");
        cmd->add_option("--seed", seed, "seed override");
        cmd->add_option("--mode", mode, "lever interpretation: verbatim|distance");
        if (with_out) cmd->add_option("--out", out_dir, "output directory");
    };

    CLI::App* run = app.add_subcommand("run", "run one scenario");
    add_common(run, true);
    CLI::App* sweep = app.add_subcommand("sweep", "run a parameter grid");
    add_common(sweep, true);
    sweep->add_option("--grid", grids, "grid axis, dotted.key=v1,v2 (repeatable)")->required();
    sweep->add_option("--jobs", jobs, "parallel grid points");
    CLI::App* validate = app.add_subcommand("validate", "run the invariant suite");
    add_common(validate, false);
    CLI::App* describe = app.add_subcommand("describe", "print the resolved parameter set");
    add_common(describe, false);

    CLI11_PARSE(app, argc, argv);

    std::vector<std::string> overrides = sets;
    if (!seed.empty()) overrides.push_back("seed=" + seed);
    if (!mode.empty()) overrides.push_back("policy.lever.mode=" + mode);

    if (run->parsed()) return ida::cli::cmd_run(config_path, out_dir, overrides);
    if (sweep->parsed()) return ida::cli::cmd_sweep(config_path, out_dir, grids, overrides, jobs);
    if (validate->parsed()) return ida::cli::cmd_validate(config_path, overrides);
    if (describe->parsed()) return ida::cli::cmd_describe(config_path, overrides);
    return 1;
}
