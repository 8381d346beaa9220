#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fcsv/cli.hpp"

namespace {

struct Flags {
    std::string config_path;
    std::vector<std::pair<std::string, std::string>> overrides;
    bool prices = false;
    bool returns = false;
};

// Every flag is stored as text and pushed through apply_setting, so the config file and the
// command line share one parser.
void add_flag(CLI::App& app, Flags& flags, const std::string& name, const std::string& key,
              const std::string& help)
{
    app.add_option_function<std::string>(
        name, [&flags, key](const std::string& v) { flags.overrides.emplace_back(key, v); }, help);
}

void add_switch(CLI::App& app, Flags& flags, const std::string& name, const std::string& key,
                const std::string& help)
{
    app.add_flag_callback(
        name, [&flags, key] { flags.overrides.emplace_back(key, "true"); }, help);
}

void common_flags(CLI::App& app, Flags& flags)
{
    app.add_option("--config", flags.config_path, "flat key = value configuration file");
    add_flag(app, flags, "--seed", "seed", "master RNG seed");
    add_flag(app, flags, "--scenario", "scenario",
             "low-tau | high-tau | mixed-tau | scenario1 | scenario2 | backtest6");
    add_flag(app, flags, "--iters", "iters", "total sampler iterations");
    add_flag(app, flags, "--burn", "burn", "burn-in iterations");
    add_flag(app, flags, "--families", "families", "base | survival | comma list of families");
    add_flag(app, flags, "--levels", "levels", "comma list of VaR levels");
    add_flag(app, flags, "--window", "window", "rolling refresh window length");
    add_flag(app, flags, "--refresh-iters", "refresh_iters", "refresh sweeps per forecast day");
    add_flag(app, flags, "--refresh-burn", "refresh_burn", "discarded refresh sweeps");
    add_flag(app, flags, "--per-draw", "per_draw", "predictive vectors per retained draw");
    add_flag(app, flags, "--train-len", "train_len", "training rows before the first forecast");
    add_flag(app, flags, "--out-dir", "out_dir", "output directory");
    add_flag(app, flags, "--threads", "threads", "worker threads");
    add_flag(app, flags, "--input", "input", "input CSV");
    add_flag(app, flags, "--draws", "draws", "posterior draw CSV (forecast)");
    add_flag(app, flags, "--model", "model", "joint | copula");
    add_flag(app, flags, "--n-obs", "n_obs", "simulated rows");
    add_flag(app, flags, "--replicates", "replicates", "replicate count");
    add_flag(app, flags, "--points", "checkgrad_points", "gradient check points per case");
    add_switch(app, flags, "--full-scale", "full_scale", "replicate counts of 100");
    add_switch(app, flags, "--two-step", "two_step", "also run the two-step baseline");
    app.add_flag("--prices", flags.prices, "input holds prices");
    app.add_flag("--returns", flags.returns, "input holds log returns");
}

}  // namespace

int main(int argc, char** argv)
{
    using namespace fcsv::cli;
    CLI::App app{"Factor copula stochastic volatility toolkit"};
    app.require_subcommand(1);
    app.fallthrough();
    Flags flags;
    common_flags(app, flags);

    const std::vector<std::pair<std::string, std::vector<std::string>>> commands{
        {"simulate", {}},
        {"fit", {}},
        {"forecast", {}},
        {"backtest", {}},
        {"replicate", {}},
        {"checkgrad", {"check-gradients"}}};
    for (const auto& [name, aliases] : commands) {
        auto* sub = app.add_subcommand(name);
        for (const auto& a : aliases) {
            sub->alias(a);
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kValidation;
    }

    RunConfig cfg;
    try {
        if (!flags.config_path.empty()) {
            std::ifstream in(flags.config_path);
            if (!in) {
                std::cerr << "I/O error: cannot open " << flags.config_path << '\n';
                return kIo;
            }
            apply_config_text(cfg, in);
        }
        for (const auto& [k, v] : flags.overrides) {
            apply_setting(cfg, k, v);
        }
        if (flags.prices && flags.returns) {
            throw ValidationError("--prices and --returns are exclusive");
        }
        if (flags.prices) {
            cfg.input_kind = "prices";
        } else if (flags.returns) {
            cfg.input_kind = "returns";
        }
    } catch (const std::exception& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return kValidation;
    }
    cfg.command = app.get_subcommands().front()->get_name();
    return run(cfg, std::cout, std::cerr);
}
