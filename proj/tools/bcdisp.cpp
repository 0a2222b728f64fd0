#include <optional>
#include <string>

#include "CLI11.hpp"

#include "bcdisp/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"broadcast-channel dispersion toolkit: rate regions, ensemble "
                 "simulation, rcu bounds and fading outage"};
    app.require_subcommand(1);

    struct Common {
        std::string config;
        std::string out = ".";
        int workers = 0;
        std::optional<std::uint64_t> seed;
    };
    auto add_common = [](CLI::App* sub, Common& c) {
        sub->add_option("--config", c.config, "experiment config (JSON)")
            ->required()
            ->check(CLI::ExistingFile);
        sub->add_option("--out", c.out, "output directory");
        sub->add_option("--workers", c.workers,
                        "worker threads (results are identical for any count)");
        sub->add_option("--seed", c.seed, "override run.seed");
    };

    Common c_region, c_sim, c_rcu, c_fading;
    CLI::App* s_region = app.add_subcommand("region", "emit a rate-region boundary CSV");
    CLI::App* s_sim = app.add_subcommand("simulate", "ensemble error simulation");
    CLI::App* s_rcu = app.add_subcommand("rcu", "numerical random-coding-union bound");
    CLI::App* s_fading = app.add_subcommand("fading", "outage region and fading bounds");
    add_common(s_region, c_region);
    add_common(s_sim, c_sim);
    add_common(s_rcu, c_rcu);
    add_common(s_fading, c_fading);

    CLI11_PARSE(app, argc, argv);

    auto to_opts = [](const Common& c) {
        bcdisp::CliOptions o;
        o.config_path = c.config;
        o.out_dir = c.out;
        o.workers = c.workers;
        o.seed_override = c.seed;
        return o;
    };
    if (s_region->parsed()) return bcdisp::cmd_region(to_opts(c_region));
    if (s_sim->parsed()) return bcdisp::cmd_simulate(to_opts(c_sim));
    if (s_rcu->parsed()) return bcdisp::cmd_rcu(to_opts(c_rcu));
    if (s_fading->parsed()) return bcdisp::cmd_fading(to_opts(c_fading));
    return 1;
}
