// SPDX-License-Identifier: Apache-2.0
//
// Experiment configuration and orchestration behind the mumimo tool.
//
// A configuration is a flat text file of `key = value` lines; `#` starts a
// comment. List values are comma separated and numeric lists also accept
// `start:step:stop`. The SNR is given in dB and converted to linear p_u once,
// when the configuration is resolved.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "mumimo/closedform.hpp"
#include "mumimo/quality.hpp"

namespace mumimo {

enum class Mode { rate, ser, outage, asymptotic, dof, montecarlo, scenario2, figure };

const char* to_string(Mode m);

// Every problem found while parsing or validating, one message per entry.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<std::string> problems);
    const std::vector<std::string>& problems() const { return problems_; }

private:
    std::vector<std::string> problems_;
};

struct Setting {
    std::string key;
    std::string value;
    std::string origin;  // "file:line" or "--set"
};

struct ExperimentConfig {
    Mode mode = Mode::rate;
    std::string figure = "1";
    int cells = 4;
    int users = 10;
    std::vector<int> antennas{10, 50, 500};
    std::vector<double> snr_db{10.0};
    std::vector<double> cross_gain{0.1};
    double direct_gain = 1.0;
    std::vector<double> gamma_th{1.0};
    int modulation_order = 4;
    std::vector<int> reuse{1};
    std::vector<double> kappa{10.0};
    std::vector<double> energy{10.0};
    std::vector<double> eta{0.8, 0.9};
    std::vector<double> rate_limit{1, 2, 3, 4, 5, 6};
    bool power_scaling = false;  // p_u = 10^(snr_db / 10) / N
    FormulaPath formula = FormulaPath::automatic;
    int user = 0;
    std::int64_t trials = 10000;
    std::uint64_t seed = 1;
    std::int64_t batch_size = 256;
    int threads = 1;
    int drops = 200;
    int samples_per_drop = 100;
    std::string output = "out";
    std::string fading_file;

    // Linear p_u for each entry of snr_db, filled by resolve_config.
    std::vector<double> transmit_snr;

    bool operator==(const ExperimentConfig&) const = default;
};

std::vector<Setting> parse_settings(std::istream& in, const std::string& source);
std::vector<Setting> parse_settings_file(const std::string& path);

// Parses a single `key=value` override.
Setting parse_override(const std::string& text);

// Applies settings in order over the defaults and validates the result.
// Throws ConfigError listing every problem.
ExperimentConfig resolve_config(const std::vector<Setting>& settings);

// Canonical text form; resolving it reproduces the configuration.
std::string serialize(const ExperimentConfig& config);

double db_to_linear(double db);

// Caption defaults for figure "1".."7" or "table1".
std::vector<Setting> figure_settings(const std::string& figure);

struct RunReport {
    std::vector<std::string> files;
    std::vector<std::string> summary;
    Quality worst = Quality::clean;
};

RunReport run_experiment(const ExperimentConfig& config);

// figure_settings(id) followed by overrides, resolved, then run.
RunReport run_figure(const std::string& figure, const std::vector<Setting>& overrides);

}  // namespace mumimo
