#include "gpps/run.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <exception>

namespace {

struct Cli {
    std::string config;
    std::string out;
    long long seed = -1; // -1: keep the config value
};

void add_common(CLI::App* sub, Cli& cli)
{
    sub->add_option("--config", cli.config, "config file (ini)")->required();
    sub->add_option("--out", cli.out, "output directory (overrides the config)");
    sub->add_option("--seed", cli.seed, "rng seed (overrides the config)");
}

int dispatch(gpps::Task task, const Cli& cli)
{
    gpps::RunConfig cfg;
    try {
        cfg = gpps::parse_config_file(cli.config);
        // the subcommand owns the task; a [run] task line must not disagree
        if (cfg.task != task)
            throw std::invalid_argument("config task '" + gpps::task_name(cfg.task) +
                                        "' does not match the subcommand");
    } catch (const std::exception& e) {
        std::fprintf(stderr, "gpps: %s\n", e.what());
        return 2;
    }
    if (!cli.out.empty())
        cfg.out_dir = cli.out;
    if (cli.seed >= 0)
        cfg.seed = static_cast<std::uint64_t>(cli.seed);

    gpps::RunResult res;
    try {
        res = gpps::run(cfg);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "gpps: %s\n", e.what());
        return 4;
    }
    if (res.exit_code == 0)
        std::printf("ok: %s\n", res.manifest_path.c_str());
    else
        std::fprintf(stderr, "gpps: %s (manifest: %s)\n", res.message.c_str(),
                     res.manifest_path.c_str());
    return res.exit_code;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"dipolar condensate toolbox: ground states, dynamics, regime "
                 "classification, dimension-reduction studies, kernel checks"};
    app.require_subcommand(1);

    struct Entry {
        const char* name;
        const char* help;
        gpps::Task task;
        Cli cli;
        CLI::App* sub = nullptr;
    };
    Entry entries[] = {
        {"groundstate", "minimize the energy by normalized gradient flow", gpps::Task::GroundState,
         {}, nullptr},
        {"evolve", "propagate in time and record observables", gpps::Task::Evolve, {}, nullptr},
        {"regime", "classify existence/collapse and optionally probe scaling families",
         gpps::Task::Regime, {}, nullptr},
        {"reduce", "rescaled 3d runs against the limit model with rate fits", gpps::Task::Reduce,
         {}, nullptr},
        {"kernel-check", "closed-form kernel symbols against quadrature", gpps::Task::KernelCheck,
         {}, nullptr},
    };
    for (Entry& e : entries) {
        e.sub = app.add_subcommand(e.name, e.help);
        add_common(e.sub, e.cli);
    }

    CLI11_PARSE(app, argc, argv);

    for (Entry& e : entries)
        if (e.sub->parsed())
            return dispatch(e.task, e.cli);
    return 2; // unreachable: a subcommand is required
}
