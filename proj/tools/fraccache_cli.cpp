// Command-line front end: solve the sweep experiments defined by a JSON
// config and emit CSV/JSON tables, or run the built-in validation suite.
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure. The
// reason is printed as a single machine-parsable line on stderr.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fraccache/config.hpp"
#include "fraccache/experiment.hpp"
#include "fraccache/validate.hpp"

namespace {

struct CliOptions {
    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> trials;
    std::string format;
};

fraccache::ExperimentConfig load_config(const CliOptions& opt) {
    fraccache::ExperimentConfig cfg;
    if (!opt.config_path.empty()) cfg = fraccache::parse_config(opt.config_path);
    if (!opt.out_dir.empty()) cfg.out_dir = opt.out_dir;
    if (opt.seed) cfg.seed = *opt.seed;
    if (opt.trials) {
        if (*opt.trials == 0) throw fraccache::config_error("--trials must be >= 1");
        cfg.n_trials = *opt.trials;
    }
    if (!opt.format.empty()) {
        if (opt.format != "csv" && opt.format != "json")
            throw fraccache::config_error("--format must be csv or json");
        cfg.formats = {opt.format};
    }
    return cfg;
}

void add_common_flags(CLI::App* cmd, CliOptions& opt) {
    cmd->add_option("--config", opt.config_path, "JSON config file (omit for defaults)");
    cmd->add_option("--out", opt.out_dir, "output directory");
    cmd->add_option("--seed", opt.seed, "Monte Carlo base seed");
    cmd->add_option("--trials", opt.trials, "Monte Carlo trials per estimate");
    cmd->add_option("--format", opt.format, "output format: csv or json");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"fractional content caching policy experiments"};
    app.require_subcommand(1);

    CliOptions opt;
    CLI::App* alpha = app.add_subcommand(
        "alpha-profile", "cached fraction per content across the sweep");
    CLI::App* quality = app.add_subcommand(
        "quality-sweep", "expected quality of waterfill vs whole-content caching");
    CLI::App* validate =
        app.add_subcommand("validate", "run the analytic-vs-oracle check suite");
    for (CLI::App* cmd : {alpha, quality, validate}) add_common_flags(cmd, opt);

    CLI11_PARSE(app, argc, argv);

    try {
        const fraccache::ExperimentConfig cfg = load_config(opt);
        if (alpha->parsed()) {
            const auto table = fraccache::run_alpha_profile(cfg);
            for (const auto& path : fraccache::emit(table, cfg))
                std::cout << "wrote " << path << "\n";
        } else if (quality->parsed()) {
            const auto table = fraccache::run_quality_sweep(cfg);
            for (const auto& path : fraccache::emit(table, cfg))
                std::cout << "wrote " << path << "\n";
        } else {
            const int failures = fraccache::run_validation(cfg, std::cout);
            if (failures > 0) {
                std::cerr << "fraccache: numerical-error: " << failures
                          << " validation check(s) failed\n";
                return 3;
            }
        }
    } catch (const fraccache::config_error& e) {
        std::cerr << "fraccache: config-error: " << e.what() << "\n";
        return 2;
    } catch (const fraccache::numerical_error& e) {
        std::cerr << "fraccache: numerical-error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "fraccache: error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
