// SPDX-License-Identifier: Apache-2.0
//
// mumimo: closed-form and simulated uplink metrics of multicell ZF MU-MIMO.
//
// Exit status: 0 success, 2 configuration error, 3 a result was produced
// with degraded numerical quality, 1 any other failure.

#include <CLI11.hpp>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "mumimo/experiment.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitDegraded = 3;

struct CommonOptions {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<std::int64_t> trials;
    std::optional<int> threads;
    std::vector<std::string> sets;
    bool print_config = false;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
    cmd->add_option("--config", o.config_path, "configuration file (key = value lines)");
    cmd->add_option("--seed", o.seed, "base seed for all random streams");
    cmd->add_option("--out", o.out, "output directory for CSV files");
    cmd->add_option("--trials", o.trials, "Monte Carlo trials per point");
    cmd->add_option("--threads", o.threads, "worker threads");
    cmd->add_option("--set", o.sets, "override a configuration key, key=value (repeatable)");
    cmd->add_flag("--print-config", o.print_config, "print the resolved configuration and exit");
}

std::vector<mumimo::Setting> collect(const CommonOptions& o) {
    std::vector<mumimo::Setting> s;
    if (!o.config_path.empty()) {
        s = mumimo::parse_settings_file(o.config_path);
    }
    for (const auto& text : o.sets) {
        s.push_back(mumimo::parse_override(text));
    }
    if (o.seed) {
        s.push_back({"seed", std::to_string(*o.seed), "--seed"});
    }
    if (o.out) {
        s.push_back({"output", *o.out, "--out"});
    }
    if (o.trials) {
        s.push_back({"trials", std::to_string(*o.trials), "--trials"});
    }
    if (o.threads) {
        s.push_back({"threads", std::to_string(*o.threads), "--threads"});
    }
    return s;
}

int finish(const mumimo::RunReport& report) {
    for (const auto& line : report.summary) {
        std::cout << line << '\n';
    }
    for (const auto& f : report.files) {
        std::cout << "wrote " << f << '\n';
    }
    std::cout << "quality: " << mumimo::to_string(report.worst) << '\n';
    return report.worst == mumimo::Quality::degraded ? kExitDegraded : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Uplink rate, SER and outage of multicell ZF MU-MIMO"};
    app.require_subcommand(1);

    CommonOptions options;
    std::string figure_id;
    std::vector<std::pair<CLI::App*, mumimo::Mode>> modes;
    const std::vector<std::pair<const char*, mumimo::Mode>> names{
        {"rate", mumimo::Mode::rate},
        {"ser", mumimo::Mode::ser},
        {"outage", mumimo::Mode::outage},
        {"asymptotic", mumimo::Mode::asymptotic},
        {"dof", mumimo::Mode::dof},
        {"montecarlo", mumimo::Mode::montecarlo},
        {"scenario2", mumimo::Mode::scenario2},
        {"figure", mumimo::Mode::figure}};
    for (const auto& [name, mode] : names) {
        CLI::App* cmd = app.add_subcommand(name, std::string("run the ") + name + " experiment");
        add_common(cmd, options);
        if (mode == mumimo::Mode::figure) {
            cmd->add_option("id", figure_id, "figure 1..7 or table1")->required();
        }
        modes.emplace_back(cmd, mode);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        mumimo::Mode mode = mumimo::Mode::rate;
        for (const auto& [cmd, m] : modes) {
            if (cmd->parsed()) {
                mode = m;
            }
        }
        std::vector<mumimo::Setting> settings = collect(options);
        if (mode == mumimo::Mode::figure) {
            std::vector<mumimo::Setting> all = mumimo::figure_settings(figure_id);
            all.insert(all.end(), settings.begin(), settings.end());
            all.push_back({"mode", "figure", "command line"});
            all.push_back({"figure", figure_id, "command line"});
            const mumimo::ExperimentConfig config = mumimo::resolve_config(all);
            if (options.print_config) {
                std::cout << mumimo::serialize(config);
                return 0;
            }
            return finish(mumimo::run_experiment(config));
        }
        settings.push_back({"mode", mumimo::to_string(mode), "command line"});
        const mumimo::ExperimentConfig config = mumimo::resolve_config(settings);
        if (options.print_config) {
            std::cout << mumimo::serialize(config);
            return 0;
        }
        return finish(mumimo::run_experiment(config));
    } catch (const mumimo::ConfigError& e) {
        std::cerr << "mumimo: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "mumimo: " << e.what() << '\n';
        return 1;
    }
}
