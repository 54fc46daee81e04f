#include <CLI11.hpp>

#include "mse/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"two-stage maximum score estimation toolkit"};
    app.require_subcommand(1);

    mse::CliOptions opt;
    std::string dataset_path;

    const auto add_common = [&](CLI::App* cmd, bool needs_config) {
        auto* c = cmd->add_option("--config", opt.config_path, "configuration file");
        if (needs_config) c->required();
        cmd->add_option("--out", opt.out_dir, "output directory (default .)");
        cmd->add_option("--seed", [&opt](const CLI::results_t& res) {
            opt.seed = std::stoull(res[0]);
            return true;
        }, "seed override");
        cmd->add_option("--threads", opt.threads, "worker threads (0 = auto)");
    };

    auto* simulate = app.add_subcommand("simulate", "run a Monte Carlo study");
    add_common(simulate, true);

    auto* estimate = app.add_subcommand("estimate", "estimate on a dataset CSV");
    estimate->add_option("dataset", dataset_path, "dataset CSV path")->required();
    add_common(estimate, true);

    auto* kernelcheck =
        app.add_subcommand("kernelcheck", "verify the eighth-order kernel construction");

    auto* export_dgp =
        app.add_subcommand("export-dgp", "draw a dataset and write it as CSV");
    add_common(export_dgp, true);

    CLI11_PARSE(app, argc, argv);

    if (simulate->parsed()) return mse::cmd_simulate(opt);
    if (estimate->parsed()) return mse::cmd_estimate(dataset_path, opt);
    if (kernelcheck->parsed()) return mse::cmd_kernelcheck();
    if (export_dgp->parsed()) return mse::cmd_export_dgp(opt);
    return mse::exit_config_error;
}
