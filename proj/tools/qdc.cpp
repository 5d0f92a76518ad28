// qdc: reproduction driver for the dissipative quantum classifier.
//
//   qdc fig1     [--config FILE] --out CSV
//   qdc train    --config FILE --out CSV [--param g|theta|phi] [--eta LIST]
//   qdc surface  --config FILE --out CSV [--eta LIST]
//   qdc simulate --config FILE --out CSV [--seed N] [--require-converged]

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "qdc/commands.hpp"
#include "qdc/experiment_config.hpp"
#include "qdc/io.hpp"

namespace {

struct Cli {
    std::string config_path;
    std::string out;
    std::string param;
    std::string eta;
    std::optional<std::uint64_t> seed;
    bool require_converged = false;
};

void add_common(CLI::App* cmd, Cli& cli, bool config_required) {
    auto* config = cmd->add_option("--config", cli.config_path, "experiment configuration file");
    if (config_required) config->required();
    cmd->add_option("--out", cli.out, "output CSV path; sibling files share its stem")->required();
    cmd->add_option("--param", cli.param, "parameter family: g | theta | phi");
    cmd->add_option("--eta", cli.eta, "comma-separated learning rates (overrides train.eta)");
    cmd->add_option("--seed", cli.seed, "seed for the stochastic mixture mode");
    cmd->add_flag("--require-converged", cli.require_converged,
                  "exit with code 3 when a run does not converge");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dissipative quantum classifier: collision-model simulation and training"};
    app.require_subcommand(1);
    Cli cli;
    auto* fig1 = app.add_subcommand("fig1", "steady magnetization versus coupling imbalance");
    auto* train = app.add_subcommand("train", "gradient-descent training runs");
    auto* surface = app.add_subcommand("surface", "cost surface and descent trajectory");
    auto* simulate = app.add_subcommand("simulate", "collision-model trajectory to the steady state");
    add_common(fig1, cli, false);
    add_common(train, cli, true);
    add_common(surface, cli, true);
    add_common(simulate, cli, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : qdc::kExitConfigError;
    }

    qdc::ExperimentConfig cfg;
    qdc::RunOptions opts;
    try {
        if (!cli.config_path.empty()) {
            cfg = qdc::parse_experiment_config(qdc::read_text_file(cli.config_path));
        } else {
            cfg = qdc::fig1_defaults();
        }
        if (!cli.param.empty()) opts.param = qdc::parse_param_kind(cli.param);
        if (!cli.eta.empty()) opts.eta = qdc::parse_double_list(cli.eta, "--eta");
    } catch (const qdc::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return qdc::kExitConfigError;
    } catch (const qdc::IoError& e) {
        std::cerr << "I/O error: " << e.what() << '\n';
        return qdc::kExitIoError;
    }
    opts.out = cli.out;
    opts.seed = cli.seed;
    opts.require_converged = cli.require_converged;

    if (fig1->parsed()) return qdc::cmd_fig1(cfg, opts);
    if (train->parsed()) return qdc::cmd_train(cfg, opts);
    if (surface->parsed()) return qdc::cmd_surface(cfg, opts);
    return qdc::cmd_simulate(cfg, opts);
}
