#include "multikink_tools/commands.hpp"

#include <multikink/errors.hpp>

#include "CLI11.hpp"

#include <functional>
#include <iostream>
#include <map>

int main(int argc, char** argv) {
    CLI::App app{"Kinks, multikinks and pure multi-solitons for 1+1-dimensional scalar fields"};
    app.set_version_flag("--version", std::string(MULTIKINK_VERSION));
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;

    const std::map<std::string, std::pair<std::string, std::function<std::vector<std::string>(const mkt::ExperimentConfig&)>>>
        commands{
            {"kink", {"Kink profiles, tail fits and energies", mkt::cmd_kink}},
            {"multikink", {"Multikink ansatz on a grid", mkt::cmd_multikink}},
            {"evolve", {"Nonlinear evolution from the multikink ansatz", mkt::cmd_evolve}},
            {"construct", {"Fixed-point construction of the pure multi-soliton", mkt::cmd_construct}},
            {"boost", {"Lorentz boost of parameters and fields", mkt::cmd_boost}},
            {"verify", {"Covariance, energy, zero-mode and coercivity checks", mkt::cmd_verify}},
            {"spectrum", {"Low spectrum of the linearized operator", mkt::cmd_spectrum}},
        };
    for (const auto& [name, entry] : commands) {
        CLI::App* sub = app.add_subcommand(name, entry.first);
        sub->add_option("--config", config_path, "Experiment file (INI)")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out_dir, "Output directory (overrides [output] directory)");
        sub->add_option("--seed", seed, "Random seed (overrides the seed key)");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        mkt::ExperimentConfig config = mkt::load_config(config_path);
        if (!out_dir.empty()) config.output.directory = out_dir;
        if (seed) config.seed = *seed;
        for (const auto& [name, entry] : commands) {
            if (!app.got_subcommand(name)) continue;
            for (const auto& file : entry.second(config)) std::cout << file << '\n';
        }
    } catch (const mk::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return mk::exit_code(e.category());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
