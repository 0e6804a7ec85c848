#include "becsq/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace {

struct Flags {
    std::optional<std::string> config;
    std::map<std::string, std::string> overrides;
};

void add_common(CLI::App* cmd, Flags& flags) {
    cmd->add_option("--config", flags.config, "key = value config file");
    const std::vector<std::pair<std::string, std::string>> keys{
        {"--r", "squeeze magnitude r >= 0"},
        {"--phi", "squeeze angle (rad)"},
        {"--m-re", "coherent amplitude, real part"},
        {"--m-im", "coherent amplitude, imaginary part"},
        {"--theta", "condensate phase (rad)"},
        {"--omega0", "atomic level splitting (rad/time)"},
        {"--omega-a", "optical frequency (rad/time)"},
        {"--omega-r", "effective Rabi coupling (rad/time)"},
        {"--t-max", "end of the time grid"},
        {"--steps", "number of grid points (>= 2)"},
        {"--n-max", "Fock cutoff per mode, or 'auto'"},
        {"--sources", "comma list of literal-paper, moment-map, oracle"},
        {"--out", "output path ('-' for stdout)"},
        {"--tol-algebraic", "moment-map vs oracle tolerance"},
        {"--tol-oracle", "closed form vs oracle tolerance"},
        {"--tail-threshold", "max probability in the top 10% of Fock levels"},
        {"--axis", "sweep parameter"},
        {"--values", "comma list of sweep values (or n_max list for converge)"},
    };
    for (const auto& [flag, help] : keys) {
        const std::string key = flag.substr(2);
        cmd->add_option_function<std::string>(
            flag, [&flags, key](const std::string& v) { flags.overrides[key] = v; }, help);
    }
}

becsq::cli::RunConfig build_config(const Flags& flags) {
    becsq::cli::RunConfig cfg;
    if (flags.config) becsq::cli::apply_config_file(cfg, *flags.config);
    for (const auto& [key, value] : flags.overrides) becsq::cli::set_key(cfg, key, value);
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Squeezing transfer between an optical mode and an outcoupled atomic mode"};
    app.require_subcommand(1);

    Flags flags;
    auto* simulate = app.add_subcommand("simulate", "time series CSV for the selected sources");
    auto* verify = app.add_subcommand("verify", "adjudicate the closed forms against the oracle");
    auto* sweep = app.add_subcommand("sweep", "simulate over a list of parameter values");
    auto* converge = app.add_subcommand("converge", "oracle convergence in the Fock cutoff");
    for (auto* cmd : {simulate, verify, sweep, converge}) add_common(cmd, flags);

    CLI11_PARSE(app, argc, argv);

    becsq::cli::RunConfig cfg;
    try {
        cfg = build_config(flags);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return becsq::cli::kConfigError;
    }

    if (*simulate) return becsq::cli::cmd_simulate(cfg, std::cout, std::cerr);
    if (*verify) return becsq::cli::cmd_verify(cfg, std::cout, std::cerr);
    if (*sweep) return becsq::cli::cmd_sweep(cfg, std::cout, std::cerr);

    std::vector<int> n_max_list;
    for (double v : cfg.values) {
        if (v != std::floor(v)) {
            std::cerr << "error: n_max values must be integers\n";
            return becsq::cli::kConfigError;
        }
        n_max_list.push_back(static_cast<int>(v));
    }
    if (n_max_list.empty()) {
        std::cerr << "error: converge needs --values with the n_max list\n";
        return becsq::cli::kConfigError;
    }
    return becsq::cli::cmd_converge(cfg, n_max_list, std::cout, std::cerr);
}
