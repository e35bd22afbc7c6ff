// gcm: growth curve model estimation, testing and Monte Carlo checks.

#include "commands.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

namespace fs = std::filesystem;
using namespace gcm;

int main(int argc, char** argv) {
    CLI::App app{"Two-stage GLS estimation for the growth curve model Y = X Theta Z' + E"};
    app.require_subcommand(1);

    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out = ".";
    std::optional<std::string> out_mc;
    bool header = false;
    double alpha = 0.05;
    bool dump = false;
    cli::EstimateInputs inputs;
    std::string sigma0, truth;

    auto* simulate = app.add_subcommand("simulate", "simulate a dataset from a config scenario");
    simulate->add_option("--config", config, "experiment config (JSON)")->required();
    simulate->add_option("--seed", seed, "override the config seed");
    simulate->add_option("--out", out, "output directory");

    auto add_estimation = [&](CLI::App* cmd) {
        cmd->add_option("Y", inputs.Y, "observations (n x p CSV)")->required();
        cmd->add_option("X", inputs.X, "between-individual design (n x m CSV)")->required();
        cmd->add_option("Z", inputs.Z, "within-individual design (p x q CSV)")->required();
        cmd->add_option("C", inputs.C, "left contrast (s x m CSV)")->required();
        cmd->add_option("D", inputs.D, "right contrast (t x q CSV)")->required();
        cmd->add_option("--sigma0", sigma0, "known row covariance (p x p CSV)");
        cmd->add_option("--truth", truth, "truth.json written by simulate");
        cmd->add_flag("--header", header, "skip one header row in every CSV");
        cmd->add_option("--out", out, "output directory");
    };
    auto* estimate = app.add_subcommand("estimate", "two-stage GLS estimate of C Theta D'");
    add_estimation(estimate);
    auto* test = app.add_subcommand("test", "asymptotic chi-square test of C Theta D' = 0");
    add_estimation(test);
    test->add_option("--alpha", alpha, "test level in (0, 1]");

    struct McCommand {
        const char* name;
        mc::McKind kind;
        const char* help;
    };
    const McCommand mc_commands[] = {
        {"mc-consistency", mc::McKind::Consistency, "consistency of Sigma-hat, gamma-hat and H(Y)"},
        {"mc-unbiasedness", mc::McKind::Unbiasedness, "unbiasedness under symmetric errors"},
        {"mc-normality", mc::McKind::Normality, "asymptotic covariance and coordinate normality"},
        {"mc-level", mc::McKind::Level, "empirical level and power of the chi-square test"},
    };
    std::vector<std::pair<CLI::App*, mc::McKind>> mc_apps;
    for (const auto& c : mc_commands) {
        auto* cmd = app.add_subcommand(c.name, c.help);
        cmd->add_option("--config", config, "experiment config (JSON)")->required();
        cmd->add_option("--seed", seed, "override the config seed");
        cmd->add_option("--out", out_mc, "output directory (default: config output_dir or .)");
        cmd->add_flag("--dump-replicates", dump, "write replicates.csv");
        mc_apps.emplace_back(cmd, c.kind);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? cli::kOk : cli::kValidation;
    }

    if (!sigma0.empty()) inputs.sigma0 = sigma0;
    if (!truth.empty()) inputs.truth = truth;
    inputs.header = header;

    if (simulate->parsed()) {
        return cli::cmd_simulate(config, seed, out);
    }
    if (estimate->parsed()) {
        return cli::cmd_estimate(inputs, out);
    }
    if (test->parsed()) {
        return cli::cmd_test(inputs, alpha, out);
    }
    for (const auto& [cmd, kind] : mc_apps) {
        if (cmd->parsed()) {
            std::optional<fs::path> dir;
            if (out_mc) dir = *out_mc;
            return cli::cmd_mc(kind, config, seed, dir, dump, cli::threads_from_env());
        }
    }
    return cli::kValidation;
}
