// Command-line runner for the spectral verification experiments.
//
// Subcommands:
//   run <config>         execute an experiment from a config file
//   run --experiment E   execute experiment E with its defaults (plus --set)
//   validate <config>    static checks only, prints a report
//   defaults [E]         print the default config for E (or all experiments)
//   list-experiments     print the experiment names
//
// Exit codes: 0 all checks pass, 2 some check failed, 3 invalid config,
// 4 runtime/numerical abort. SDWAVE_WORKERS sets the worker-pool size.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

#include "sdwave/experiments.hpp"

namespace {

int do_run(const std::string& config_path, const std::string& experiment,
           const std::vector<std::string>& sets, const std::string& out_dir) {
    sdwave::ExperimentConfig cfg;
    if (!config_path.empty()) {
        cfg = sdwave::load_config(config_path);
    } else if (!experiment.empty()) {
        cfg = sdwave::default_config(experiment);
    } else {
        std::cerr << "run: need a config file or --experiment\n";
        return 3;
    }
    for (const std::string& s : sets) {
        const auto eq = s.find('=');
        const auto dot = s.find('.');
        if (eq == std::string::npos || dot == std::string::npos || dot > eq) {
            std::cerr << "run: --set expects section.key=value, got '" << s << "'\n";
            return 3;
        }
        sdwave::apply_setting(cfg, s.substr(0, dot), s.substr(dot + 1, eq - dot - 1),
                              s.substr(eq + 1));
    }
    if (!out_dir.empty()) cfg.output_dir = out_dir;

    const sdwave::ValidationReport rep = sdwave::validate(cfg);
    for (const auto& w : rep.warnings) std::cerr << "warning: " << w << '\n';
    if (!rep.ok()) {
        for (const auto& e : rep.errors) std::cerr << "error: " << e << '\n';
        return 3;
    }
    const sdwave::ExperimentResult result = sdwave::run_experiment(cfg);
    for (const auto& c : result.checks)
        std::printf("[%s] %-40s measured=%.6g tolerance=%.6g\n", c.pass ? "PASS" : "FAIL",
                    c.name.c_str(), c.measured, c.tolerance);
    std::printf("%s: %s (%zu checks), outputs in %s\n", cfg.experiment.c_str(),
                result.all_pass() ? "all checks passed" : "CHECKS FAILED",
                result.checks.size(), cfg.output_dir.c_str());
    return result.all_pass() ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectral verification harness for the strongly damped wave semigroup"};
    app.require_subcommand(1);

    std::string config_path, experiment, out_dir;
    std::vector<std::string> sets;
    auto* run = app.add_subcommand("run", "execute an experiment");
    run->add_option("config", config_path, "config file (key = value with sections)");
    run->add_option("--experiment", experiment, "run a named experiment with its defaults");
    run->add_option("--set", sets, "override a setting, e.g. --set grid.N=512");
    run->add_option("--out", out_dir, "output directory override");

    std::string vconfig;
    auto* val = app.add_subcommand("validate", "static config checks");
    val->add_option("config", vconfig, "config file")->required();

    std::string dname;
    auto* def = app.add_subcommand("defaults", "print default config(s)");
    def->add_option("experiment", dname, "experiment name (omit for all)");

    app.add_subcommand("list-experiments", "print the experiment names");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return do_run(config_path, experiment, sets, out_dir);
        if (val->parsed()) {
            const auto cfg = sdwave::load_config(vconfig);
            const auto rep = sdwave::validate(cfg);
            for (const auto& e : rep.errors) std::printf("error: %s\n", e.c_str());
            for (const auto& w : rep.warnings) std::printf("warning: %s\n", w.c_str());
            std::printf("%s\n", rep.ok() ? "config OK" : "config INVALID");
            return rep.ok() ? 0 : 3;
        }
        if (def->parsed()) {
            if (!dname.empty()) {
                std::cout << sdwave::to_ini(sdwave::default_config(dname));
            } else {
                for (const auto& name : sdwave::experiment_names())
                    std::cout << "# ---- " << name << " ----\n"
                              << sdwave::to_ini(sdwave::default_config(name)) << '\n';
            }
            return 0;
        }
        for (const auto& name : sdwave::experiment_names()) std::cout << name << '\n';
        return 0;
    } catch (const sdwave::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << '\n';
        return 4;
    }
}
