#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "srde/commands.hpp"

namespace {

struct Overrides {
    std::string scenario;
    std::string preset;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int threads = -1;
    int ensemble_size = 0;
};

srde::Scenario resolve(const Overrides& o) {
    srde::Scenario s;
    if (!o.preset.empty()) {
        s = srde::preset_scenario(o.preset);
    } else if (!o.scenario.empty()) {
        s = srde::parse_scenario(o.scenario);
    }
    if (o.seed_set) {
        s.ensemble.base_seed = o.seed;
        s.sim.seed = o.seed;
    }
    if (!o.out_dir.empty()) s.out_dir = o.out_dir;
    if (o.threads >= 0) s.ensemble.threads = o.threads;
    if (o.ensemble_size > 0) s.ensemble.size = o.ensemble_size;
    return s;
}

void add_common(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--scenario", o.scenario, "scenario JSON file (or preset name)");
    cmd->add_option("--preset", o.preset, "named preset: default, fig1, fig2, fig3, fig4");
    cmd->add_option("--seed", o.seed, "override the base random seed")
        ->each([&o](const std::string&) { o.seed_set = true; });
    cmd->add_option("--out-dir", o.out_dir, "output directory");
    cmd->add_option("--threads", o.threads,
                    "worker threads (0 = SRDE_THREADS env or hardware count)");
    cmd->add_option("--ensemble-size", o.ensemble_size, "override the ensemble size");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"stochastic reaction-diffusion simulation and model reduction"};
    app.require_subcommand(1);

    Overrides o;
    CLI::App* simulate = app.add_subcommand("simulate", "run one trajectory and export CSV");
    CLI::App* reduce =
        app.add_subcommand("reduce", "emit averaged, deviation, reconstructed and manifold paths");
    CLI::App* sweep_cmd = app.add_subcommand("sweep", "parameter sweep with ensemble statistics");
    CLI::App* compare =
        app.add_subcommand("compare", "compare full and reduced models across epsilons");
    CLI::App* verify = app.add_subcommand("verify", "run the analytic-oracle invariant suite");
    for (CLI::App* cmd : {simulate, reduce, sweep_cmd, compare, verify}) add_common(cmd, o);

    CLI11_PARSE(app, argc, argv);

    try {
        const srde::Scenario s = resolve(o);
        if (simulate->parsed()) return srde::cmd_simulate(s, std::cout);
        if (reduce->parsed()) return srde::cmd_reduce(s, std::cout);
        if (sweep_cmd->parsed()) return srde::cmd_sweep(s, std::cout);
        if (compare->parsed()) return srde::cmd_compare(s, std::cout);
        if (verify->parsed()) return srde::cmd_verify(s, std::cout);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
