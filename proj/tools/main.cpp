#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lowrank/experiment.hpp"

namespace {

struct CommonOptions {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> steps;
    std::optional<double> eps_rank;
    std::optional<std::string> out;
    int jobs = 1;
    bool verbose = false;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
    cmd->add_option("--config", opts.config_path, "experiment config (JSON)")->required();
    cmd->add_option("--seed", opts.seed, "override the config seed");
    cmd->add_option("--steps", opts.steps, "override n_steps");
    cmd->add_option("--eps-rank", opts.eps_rank, "override the numerical rank threshold");
    cmd->add_option("--out", opts.out, "override the output directory");
    cmd->add_option("--jobs", opts.jobs, "worker pool size for independent cells")
        ->check(CLI::PositiveNumber);
    cmd->add_flag("-v,--verbose", opts.verbose, "progress notes on stderr");
}

lowrank::ExperimentConfig load_config(const CommonOptions& opts,
                                      std::optional<lowrank::ExperimentMode> mode) {
    auto cfg = lowrank::ExperimentConfig::from_file(opts.config_path, mode);
    if (opts.seed) {
        cfg.seed = *opts.seed;
        cfg.has_seed = true;
    }
    if (opts.steps) cfg.n_steps = *opts.steps;
    if (opts.eps_rank) cfg.eps_rank = *opts.eps_rank;
    if (const char* env = std::getenv("LOWRANK_LAB_OUT"); env && *env) cfg.out_dir = env;
    if (opts.out) cfg.out_dir = *opts.out;
    return cfg;
}

struct Subcommand {
    const char* name;
    const char* description;
    std::optional<lowrank::ExperimentMode> mode;
    bool validate_only = false;
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"lowrank_lab: certified singular-value decay experiments for "
                 "Kronecker-structured linear systems and eigenvalue problems"};
    app.set_version_flag("--version", LOWRANK_LAB_VERSION);
    app.require_subcommand(1);

    const std::vector<Subcommand> table = {
        {"spectrum", "measure singular spectra, tails, entropy and overlap of a tensor",
         lowrank::ExperimentMode::spectrum},
        {"solve", "Richardson run on A u = b with rank bookkeeping and decay bounds",
         lowrank::ExperimentMode::linear},
        {"eigen", "shifted Richardson run toward the smallest eigenvector",
         lowrank::ExperimentMode::eigen},
        {"commuting", "pure Kronecker-sum run with the additive rank law and slope fit",
         lowrank::ExperimentMode::commuting},
        {"sweep", "condition number and decay exponent across orders d",
         lowrank::ExperimentMode::d_sweep},
        {"two-step", "measured one/two-step rank growth on three-term d=2 operators",
         lowrank::ExperimentMode::two_step},
        {"validate-config", "parse and validate a config, reporting the first problem",
         std::nullopt, true},
    };

    std::vector<CommonOptions> options(table.size());
    std::vector<CLI::App*> commands;
    for (std::size_t i = 0; i < table.size(); ++i) {
        CLI::App* cmd = app.add_subcommand(table[i].name, table[i].description);
        add_common(cmd, options[i]);
        commands.push_back(cmd);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help and friends
        std::cerr << "error: usage: " << e.what() << "\n";
        return 1;
    }

    std::size_t picked = table.size();
    for (std::size_t i = 0; i < table.size(); ++i)
        if (commands[i]->parsed()) picked = i;
    if (picked == table.size()) {
        std::cerr << "error: usage: missing subcommand\n";
        return 1;
    }

    const CommonOptions& opts = options[picked];
    try {
        lowrank::ExperimentConfig cfg = load_config(opts, table[picked].mode);
        cfg.validate();
        if (table[picked].validate_only) {
            std::cout << "ok: " << cfg.name << " (" << lowrank::to_string(cfg.mode) << ")\n";
            return 0;
        }
        if (opts.verbose)
            std::cerr << "running " << cfg.name << " [" << lowrank::to_string(cfg.mode)
                      << "] seed=" << cfg.seed << " -> " << cfg.out_dir << "\n";
        const bool pass = lowrank::run_and_write(cfg, opts.jobs);
        std::cout << cfg.name << ": " << (pass ? "PASS" : "FAIL") << " (reports in " << cfg.out_dir
                  << ")\n";
        return pass ? 0 : 2;
    } catch (const lowrank::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: internal: " << e.what() << "\n";
        return 1;
    }
}
