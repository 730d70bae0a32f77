#include <CLI11.hpp>

#include "odo/config.hpp"

int main(int argc, char** argv) {
    CLI::App app{"odosim — ordered-density-operator hierarchy solver"};
    app.require_subcommand(1);

    std::string run_config, dec_config;
    auto* run = app.add_subcommand("run", "propagate a configured simulation");
    run->add_option("config", run_config, "JSON configuration file")->required();
    auto* dec = app.add_subcommand("decompose",
                                   "build and certify the bath decomposition only");
    dec->add_option("config", dec_config, "JSON configuration file")->required();

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) return odo::run_simulation(run_config);
    return odo::run_decompose(dec_config);
}
