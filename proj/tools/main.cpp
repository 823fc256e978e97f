#include <iostream>

#include "CLI11.hpp"
#include "vesselkit/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"vesselkit: construct, propagate and verify finite-dimensional vessels"};
    app.require_subcommand(1);

    vesselkit::RunOptions opts;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("config", opts.config_path, "experiment configuration (JSON)")->required();
        sub->add_option("--out", opts.out_dir, "output directory (overrides config)");
        sub->add_flag("--halving", opts.halving, "rerun checks at (dx/2, dt/2) and report ratios");
    };

    CLI::App* classify = app.add_subcommand("classify", "canonical classification of the parameters");
    CLI::App* simulate = app.add_subcommand("simulate", "evaluate observables over the grid, emit CSV");
    CLI::App* verify = app.add_subcommand("verify", "run residual checks, emit a JSON report");
    add_common(classify);
    add_common(simulate);
    add_common(verify);

    CLI11_PARSE(app, argc, argv);

    if (classify->parsed()) return vesselkit::cmd_classify(opts, std::cout, std::cerr);
    if (simulate->parsed()) return vesselkit::cmd_simulate(opts, std::cout, std::cerr);
    return vesselkit::cmd_verify(opts, std::cout, std::cerr);
}
