#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "modelh/app/commands.hpp"

using namespace modelh::app;

namespace {

std::vector<double> parse_amplitudes(const std::string& list)
{
    std::vector<double> out;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(std::stod(item));
    return out;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Navier-Stokes / Cahn-Hilliard simulator with a logarithmic potential"};
    app.require_subcommand(1);

    std::string sim_cfg;
    auto* sim = app.add_subcommand("simulate", "run a configuration, writing CSVs, snapshots and a manifest");
    sim->add_option("config", sim_cfg, "config file (key = value) or run manifest (JSON)")->required();

    bool strict = false;
    auto* ver = app.add_subcommand("verify", "run the built-in oracle and invariant checks");
    ver->add_flag("--strict", strict, "tighten tolerances tenfold and halve ratio windows");

    std::string cmp_cfg, amps;
    auto* cmp = app.add_subcommand("compare", "paired runs for the continuous-dependence functional");
    cmp->add_option("config", cmp_cfg, "config file or manifest")->required();
    cmp->add_option("--amps", amps, "comma-separated perturbation amplitudes")->required();

    std::string conv_cfg;
    bool ns_only = false;
    int levels = 0;
    auto* conv = app.add_subcommand("convergence", "manufactured-solution orders on a periodic grid");
    conv->add_option("config", conv_cfg, "config file or manifest")->required();
    conv->add_flag("--ns-only", ns_only, "skip the Cahn-Hilliard ladders");
    conv->add_option("--levels", levels, "number of resolutions (at least 3)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_config_error;
    }

    if (*sim)
        return cmd_simulate(sim_cfg, std::cout, std::cerr);
    if (*ver)
        return cmd_verify(VerifyOptions{strict, {}}, std::cout, std::cerr);
    if (*cmp) {
        std::vector<double> a;
        try {
            a = parse_amplitudes(amps);
        } catch (const std::exception&) {
            std::cerr << "config error: --amps expects comma-separated reals, got '" << amps << "'\n";
            return exit_config_error;
        }
        return cmd_compare(cmp_cfg, a, std::cout, std::cerr);
    }
    return cmd_convergence(conv_cfg, ns_only, levels, std::cout, std::cerr);
}
