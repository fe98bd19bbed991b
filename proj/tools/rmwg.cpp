#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>

#include "rmwg/rmwg.h"

namespace {

struct Options {
    std::string config;
    std::string preset;
    std::string out = ".";
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    bool quiet = false;
};

int report(rmwg_status status) {
    std::fprintf(stderr, "rmwg: %s: %s\n", rmwg_status_name(status), rmwg_last_error());
    return rmwg_exit_code(status);
}

int run(const std::string& command, const Options& opt) {
    rmwg_run_config* cfg = nullptr;
    rmwg_status status = rmwg_run_config_create(command.c_str(), opt.preset.c_str(), opt.config.c_str(),
                                                opt.out.c_str(), &cfg);
    if (status != RMWG_OK) return report(status);
    if (opt.seed) status = rmwg_run_config_set_seed(cfg, *opt.seed);
    if (status == RMWG_OK && opt.threads) status = rmwg_run_config_set_threads(cfg, *opt.threads);
    std::size_t n = 0;
    if (status == RMWG_OK) status = rmwg_run(cfg, &n);
    if (status == RMWG_OK && !opt.quiet)
        for (std::size_t i = 0; i < n; ++i) std::printf("%s\n", rmwg_run_output(cfg, i));
    rmwg_run_config_destroy(cfg);
    return status == RMWG_OK ? 0 : report(status);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Rice-Mele waveguide and qubit toolkit"};
    app.set_version_flag("--version", rmwg_version());
    app.require_subcommand(1);

    Options opt;
    const char* descriptions[][2] = {
        {"spectrum", "eigenmode sweep, band gap, edge states and directionality"},
        {"scatter", "scattering maps and transmission peaks"},
        {"emit", "emission dynamics, Bloch traces and Ramsey fringes"},
        {"fit", "Hamiltonian fit to observed peaks with bootstrap intervals"},
        {"chi", "directionality from measured or simulated port signals"},
    };
    std::string chosen;
    for (const auto& d : descriptions) {
        auto* sub = app.add_subcommand(d[0], d[1]);
        sub->add_option("--config", opt.config, "key = value configuration file")->check(CLI::ExistingFile);
        sub->add_option("--preset", opt.preset, "named parameter set (fig1, fig3, fig4, fig5, appc)");
        sub->add_option("--out", opt.out, "output directory");
        sub->add_option("--seed", opt.seed, "random seed");
        sub->add_option("--threads", opt.threads, "worker threads")->check(CLI::PositiveNumber);
        sub->add_flag("--quiet", opt.quiet, "do not list written files");
        sub->callback([&chosen, name = std::string(d[0])] { chosen = name; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    return run(chosen, opt);
}
