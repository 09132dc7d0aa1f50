#include "sqdati/runner.hpp"
#include "sqdati/errors.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

struct CliOpts {
    std::string config_path;
    std::string out_dir;
    int threads = 0;
    int cutoff = 0;
};

void add_common(CLI::App* sub, CliOpts& o) {
    sub->add_option("config", o.config_path, "INI config file")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--out", o.out_dir, "output directory (overrides config)");
    sub->add_option("--threads", o.threads, "worker threads (overrides config)");
    sub->add_option("--cutoff", o.cutoff, "Fock cutoff (overrides config)");
}

sqdati::ExperimentConfig load(const CliOpts& o) {
    sqdati::ExperimentConfig cfg = sqdati::parse_config_file(o.config_path);
    if (!o.out_dir.empty()) cfg.out_dir = o.out_dir;
    if (o.threads > 0) cfg.threads = o.threads;
    if (o.cutoff > 0) cfg.cutoff = o.cutoff;
    sqdati::validate_config(cfg);
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"squeezed-light dATI simulator"};
    app.require_subcommand(1);

    CliOpts run_opts, check_opts;
    CLI::App* run = app.add_subcommand("run", "run the configured experiment");
    add_common(run, run_opts);
    CLI::App* check = app.add_subcommand("check", "write a convergence report");
    add_common(check, check_opts);

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed())
            sqdati::run_experiment(load(run_opts));
        else
            sqdati::convergence_report(load(check_opts));
    } catch (const sqdati::ConfigError& ex) {
        std::cerr << "config error: " << ex.what() << "\n";
        return 2;
    } catch (const std::exception& ex) {
        std::cerr << "compute error: " << ex.what() << "\n";
        return 3;
    }
    return 0;
}
