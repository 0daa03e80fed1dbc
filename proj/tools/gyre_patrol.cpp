// Command-line front end: simulate, verify-theorem, compare, fit, boundary.

#include <CLI11.hpp>

#include <exception>
#include <iostream>
#include <optional>

#include "gyre/config.hpp"
#include "gyre/errors.hpp"
#include "gyre/experiment.hpp"

int main(int argc, char** argv)
{
    CLI::App app{"Energy-aware patrol of a bounded region inside a gyre flow"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed;
    std::string samples;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("-c,--config", config_path, "experiment config file")->required()->check(CLI::ExistingFile);
        sub->add_option("-o,--out", out_dir, "output directory")->capture_default_str();
        sub->add_option("-s,--seed", seed, "base random seed (overrides [run] seed)");
    };

    auto* simulate = app.add_subcommand("simulate", "run one simulation and write trajectory and cycle tables");
    auto* verify = app.add_subcommand("verify-theorem", "check cycle periods against the boundary-orbit periods");
    auto* compare = app.add_subcommand("compare", "run the [compare] controllers side by side");
    auto* fit = app.add_subcommand("fit", "fit potential-field gains to velocity samples");
    auto* boundary = app.add_subcommand("boundary", "fit the enclosure and dump gamma on a grid");
    for (auto* sub : {simulate, verify, compare, fit, boundary}) add_common(sub);
    fit->add_option("--samples", samples, "CSV with header x1,x2,v1,v2")->required()->check(CLI::ExistingFile);

    CLI11_PARSE(app, argc, argv);

    try {
        gyre::ExperimentConfig cfg = gyre::load_config(config_path);
        if (seed) cfg.run.seed = *seed;
        if (simulate->parsed()) return gyre::cmd_simulate(cfg, out_dir, std::cout);
        if (verify->parsed()) return gyre::cmd_verify_theorem(cfg, out_dir, std::cout);
        if (compare->parsed()) return gyre::cmd_compare(cfg, out_dir, std::cout);
        if (fit->parsed()) return gyre::cmd_fit(cfg, samples, out_dir, std::cout);
        if (boundary->parsed()) return gyre::cmd_boundary(cfg, out_dir, std::cout);
    } catch (const gyre::ParseError& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return 2;
    } catch (const gyre::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}
