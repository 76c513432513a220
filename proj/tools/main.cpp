#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "config.hpp"

int main(int argc, char** argv) {
    CLI::App app{"prf - partial Ricci flow laboratory"};
    app.require_subcommand(1);

    prfcli::Options opt;
    std::string theta_list;

    const auto add_common = [&](CLI::App* sub, bool needs_config) {
        auto* config = sub->add_option("--config", opt.config_path, "run configuration file");
        if (needs_config) config->required();
        sub->add_option("--out", opt.out_dir, "output directory (default: out)");
        sub->add_option("--run-id", opt.run_id, "run identifier (default: run)");
        sub->add_flag("--force", opt.force, "overwrite an existing run id");
        sub->add_option("--theta", theta_list, "comma-separated split parameters in (0,1)");
        sub->add_option("--backend", opt.backend, "fd | spectral | both")
            ->check(CLI::IsMember({"fd", "spectral", "both"}));
        sub->add_option("--seed", [&opt](const std::vector<std::string>& v) {
            opt.seed = std::stoull(v.front());
            return true;
        }, "seed for randomized suites");
    };

    CLI::App* stationary = app.add_subcommand("stationary", "solve the stationary profile");
    add_common(stationary, true);
    CLI::App* evolve = app.add_subcommand("evolve", "run the warping-function flow");
    add_common(evolve, true);
    CLI::App* eigenflow = app.add_subcommand("eigenflow", "run the eigenvalue ODE flow");
    add_common(eigenflow, true);
    CLI::App* sweep = app.add_subcommand("sweep", "run a parameter sweep");
    add_common(sweep, true);
    CLI::App* verify = app.add_subcommand("verify", "run the identity suite");
    add_common(verify, false);

    CLI::App* ferus = app.add_subcommand("ferus", "check p <= rho(n) - 1");
    std::uint64_t ferus_p = 0, ferus_n = 0;
    ferus->add_option("p", ferus_p, "leaf dimension")->required();
    ferus->add_option("n", ferus_n, "codimension")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (!theta_list.empty()) {
            opt.thetas = prfcli::parse_double_list(theta_list);
            for (double theta : opt.thetas)
                if (!(theta > 0.0) || !(theta < 1.0))
                    throw prfcli::ConfigError("--theta values must lie in (0,1)");
        }
        if (stationary->parsed()) return prfcli::cmd_stationary(opt);
        if (evolve->parsed()) return prfcli::cmd_evolve(opt);
        if (eigenflow->parsed()) return prfcli::cmd_eigenflow(opt);
        if (sweep->parsed()) return prfcli::cmd_sweep(opt);
        if (verify->parsed()) return prfcli::cmd_verify(opt);
        if (ferus->parsed()) return prfcli::cmd_ferus(ferus_p, ferus_n);
    } catch (const prfcli::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const prfcli::ComputationError& e) {
        std::cerr << "computation error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
