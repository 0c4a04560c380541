// SPDX-License-Identifier: Apache-2.0
#include "addgap/cli.hpp"

#include "CLI11.hpp"

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"addgap: L1 distance bounds and estimates for additive processes"};
    app.require_subcommand(1);

    addgap::cli::Options o;
    auto common = [&o](CLI::App* sub) {
        sub->add_option("--config", o.config_path, "experiment config (JSON)")->required();
        sub->add_flag("--json", o.json, "machine-readable output");
        sub->add_option("--out", o.out, "write output to this file instead of stdout");
    };
    auto estimator = [&o](CLI::App* sub) {
        sub->add_option("--paths", o.paths, "number of Monte Carlo paths");
        sub->add_option("--seed", o.seed, "root seed");
        sub->add_option("--epsilon", o.epsilon, "jump truncation level (infinite activity)");
    };

    auto* bound = app.add_subcommand("bound", "closed-form bounds and their ingredients");
    common(bound);

    auto* estimate = app.add_subcommand("estimate", "Monte Carlo estimate of the distance");
    common(estimate);
    estimator(estimate);
    estimate->add_option("--check", o.check, "tv, martingale or sinh")
        ->check(CLI::IsMember({"tv", "martingale", "sinh"}));
    estimate->add_option("--dump-paths", o.dump_paths, "write the first jump records as CSV");
    estimate->add_option("--dump-count", o.dump_count, "records to dump (default 100)");

    auto* compare = app.add_subcommand("compare", "bounds next to the estimated distance");
    common(compare);
    estimator(compare);

    auto* sweep = app.add_subcommand("sweep", "sweep one config parameter to CSV");
    common(sweep);
    estimator(sweep);
    sweep->add_option("--param", o.param, "dotted parameter path, e.g. process2.levy.lambda");
    sweep->add_option("--from", o.from, "first value (default: config sweep block)");
    sweep->add_option("--to", o.to, "last value");
    sweep->add_option("--steps", o.steps, "number of points, endpoints included");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : addgap::cli::kConfigError;
    }
    o.command = app.get_subcommands().front()->get_name();
    return addgap::cli::run(o, std::cout, std::cerr);
}
