// SPDX-License-Identifier: Apache-2.0

#include "mumimo/fading.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace mumimo {

void SystemConfig::validate() const {
    std::vector<std::string> problems;
    if (num_cells < 1) {
        problems.emplace_back("num_cells must be >= 1");
    }
    if (users_per_cell < 1) {
        problems.emplace_back("users_per_cell must be >= 1");
    }
    if (antennas < users_per_cell) {
        problems.emplace_back("antennas must be >= users_per_cell");
    }
    if (!(transmit_snr > 0.0) || !std::isfinite(transmit_snr)) {
        problems.emplace_back("transmit_snr must be positive and finite");
    }
    if (!problems.empty()) {
        std::string msg = "SystemConfig:";
        for (const auto& p : problems) {
            msg += " " + p + ";";
        }
        throw std::invalid_argument(msg);
    }
}

LargeScaleFading::LargeScaleFading(int num_cells, int users_per_cell, double fill)
    : cells_(num_cells), users_(users_per_cell) {
    if (num_cells < 1 || users_per_cell < 1) {
        throw std::invalid_argument("LargeScaleFading: dimensions must be >= 1");
    }
    if (!(fill > 0.0) || !std::isfinite(fill)) {
        throw std::invalid_argument("LargeScaleFading: gains must be positive and finite");
    }
    data_.assign(static_cast<std::size_t>(num_cells) * num_cells * users_per_cell, fill);
}

LargeScaleFading LargeScaleFading::symmetric(int num_cells, int users_per_cell, double direct, double cross) {
    LargeScaleFading f(num_cells, users_per_cell, direct);
    for (int l = 0; l < num_cells; ++l) {
        for (int i = 0; i < num_cells; ++i) {
            if (i == l) {
                continue;
            }
            for (int k = 0; k < users_per_cell; ++k) {
                f.set(l, i, k, cross);
            }
        }
    }
    return f;
}

std::size_t LargeScaleFading::index(int l, int i, int k) const {
    if (l < 0 || l >= cells_ || i < 0 || i >= cells_ || k < 0 || k >= users_) {
        throw std::out_of_range("LargeScaleFading: index out of range");
    }
    return (static_cast<std::size_t>(l) * cells_ + i) * users_ + k;
}

void LargeScaleFading::set(int l, int i, int k, double value) {
    if (!(value > 0.0) || !std::isfinite(value)) {
        throw std::invalid_argument("LargeScaleFading: gains must be positive and finite");
    }
    data_[index(l, i, k)] = value;
}

void LargeScaleFading::check_compatible(const SystemConfig& config) const {
    if (config.num_cells != cells_ || config.users_per_cell != users_) {
        throw std::invalid_argument("LargeScaleFading: dimensions do not match SystemConfig");
    }
}

LargeScaleFading LargeScaleFading::read(std::istream& in) {
    int cells = -1;
    int users = -1;
    std::vector<std::vector<double>> rows;
    std::vector<std::pair<int, int>> keys;
    std::vector<int> key_lines;
    std::string line;
    int line_no = 0;
    auto fail = [&](const std::string& what) {
        throw std::invalid_argument("fading file line " + std::to_string(line_no) + ": " + what);
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        std::istringstream ss(line);
        std::string head;
        if (!(ss >> head)) {
            continue;
        }
        if (head == "cells" || head == "users") {
            int v = 0;
            if (!(ss >> v) || v < 1) {
                fail("expected a positive integer after '" + head + "'");
            }
            (head == "cells" ? cells : users) = v;
            continue;
        }
        if (cells < 0 || users < 0) {
            fail("'cells' and 'users' must precede gain rows");
        }
        int l = 0;
        int i = 0;
        try {
            std::size_t used = 0;
            l = std::stoi(head, &used);
            if (used != head.size()) {
                fail("unrecognised keyword '" + head + "'");
            }
        } catch (const std::logic_error&) {
            fail("unrecognised keyword '" + head + "'");
        }
        if (!(ss >> i)) {
            fail("expected interfering cell index");
        }
        if (l < 0 || l >= cells || i < 0 || i >= cells) {
            fail("cell index out of range");
        }
        std::vector<double> v;
        double x = 0.0;
        while (ss >> x) {
            v.push_back(x);
        }
        if (!ss.eof()) {
            fail("malformed number");
        }
        if (static_cast<int>(v.size()) != users) {
            fail("expected " + std::to_string(users) + " gains, found " + std::to_string(v.size()));
        }
        for (double g : v) {
            if (!(g > 0.0) || !std::isfinite(g)) {
                fail("gains must be positive and finite");
            }
        }
        keys.emplace_back(l, i);
        key_lines.push_back(line_no);
        rows.push_back(std::move(v));
    }
    if (cells < 0 || users < 0) {
        throw std::invalid_argument("fading file: missing 'cells' or 'users' header");
    }
    LargeScaleFading f(cells, users);
    std::vector<char> seen(static_cast<std::size_t>(cells) * cells, 0);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        auto [l, i] = keys[r];
        auto& flag = seen[static_cast<std::size_t>(l) * cells + i];
        if (flag) {
            line_no = key_lines[r];
            fail("duplicate row for cells (" + std::to_string(l) + ", " + std::to_string(i) + ")");
        }
        flag = 1;
        for (int k = 0; k < users; ++k) {
            f.set(l, i, k, rows[r][k]);
        }
    }
    if (std::find(seen.begin(), seen.end(), 0) != seen.end()) {
        throw std::invalid_argument("fading file: every (l, i) pair needs a row");
    }
    return f;
}

LargeScaleFading LargeScaleFading::read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::invalid_argument("cannot open fading file '" + path + "'");
    }
    return read(in);
}

void LargeScaleFading::write(std::ostream& out) const {
    out << "cells " << cells_ << "\nusers " << users_ << "\n";
    char buf[32];
    for (int l = 0; l < cells_; ++l) {
        for (int i = 0; i < cells_; ++i) {
            out << l << ' ' << i;
            for (int k = 0; k < users_; ++k) {
                std::snprintf(buf, sizeof buf, "%.17g", (*this)(l, i, k));
                out << ' ' << buf;
            }
            out << '\n';
        }
    }
}

bool InterferenceProfile::all_distinct() const {
    return std::all_of(tau.begin(), tau.end(), [](int t) { return t == 1; });
}

double InterferenceProfile::trace() const {
    double s = 0.0;
    for (double d : diagonal) {
        s += d;
    }
    return s;
}

InterferenceProfile profile_from_gains(std::vector<double> gains, const ProfileOptions& options) {
    InterferenceProfile p;
    p.diagonal = gains;
    std::sort(gains.begin(), gains.end(), std::greater<>());
    const double tol = options.merge_near_degenerate ? options.near_degenerate_tolerance
                                                     : options.cluster_tolerance;
    std::size_t start = 0;
    while (start < gains.size()) {
        std::size_t end = start + 1;
        while (end < gains.size() && (gains[start] - gains[end]) <= tol * gains[start]) {
            ++end;
        }
        double sum = 0.0;
        for (std::size_t j = start; j < end; ++j) {
            sum += gains[j];
        }
        p.mu.push_back(sum / static_cast<double>(end - start));
        p.tau.push_back(static_cast<int>(end - start));
        start = end;
    }
    for (std::size_t m = 1; m < p.mu.size(); ++m) {
        const double gap = (p.mu[m - 1] - p.mu[m]) / p.mu[m - 1];
        if (gap < options.near_degenerate_tolerance) {
            char buf[160];
            std::snprintf(buf, sizeof buf,
                          "near-degenerate interference gains %.17g and %.17g (relative gap %.3g); "
                          "consider merging",
                          p.mu[m - 1], p.mu[m], gap);
            p.warnings.emplace_back(buf);
        }
    }
    return p;
}

InterferenceProfile build_profile(const SystemConfig& config, const LargeScaleFading& fading, int home_cell,
                                  const ProfileOptions& options) {
    config.validate();
    fading.check_compatible(config);
    if (home_cell < 0 || home_cell >= config.num_cells) {
        throw std::out_of_range("build_profile: home cell out of range");
    }
    std::vector<double> gains;
    gains.reserve(static_cast<std::size_t>(config.users_per_cell) * (config.num_cells - 1));
    for (int i = 0; i < config.num_cells; ++i) {
        if (i == home_cell) {
            continue;
        }
        for (int k = 0; k < config.users_per_cell; ++k) {
            gains.push_back(fading(home_cell, i, k));
        }
    }
    InterferenceProfile p = profile_from_gains(std::move(gains), options);
    p.home_cell = home_cell;
    return p;
}

double CharacteristicExpansion::mgf(double s) const {
    long double sum = 0.0L;
    for (const auto& t : terms) {
        sum += t.chi * std::pow(1.0L - static_cast<long double>(t.mu) * s, -static_cast<long double>(t.order));
    }
    return static_cast<double>(sum);
}

double CharacteristicExpansion::magnitude() const {
    long double s = 0.0L;
    for (const auto& t : terms) {
        s += std::fabs(t.chi);
    }
    return static_cast<double>(s);
}

CharacteristicExpansion characteristic_coefficients(const InterferenceProfile& profile) {
    if (profile.empty()) {
        throw std::invalid_argument("characteristic_coefficients: empty profile");
    }
    const std::size_t count = profile.mu.size();
    for (std::size_t m = 1; m < count; ++m) {
        if (!(profile.mu[m] < profile.mu[m - 1] * (1.0 - 1e-12))) {
            throw std::invalid_argument(
                "characteristic_coefficients: eigenvalues must be strictly decreasing and separated");
        }
    }
    CharacteristicExpansion out;
    for (std::size_t m = 0; m < count; ++m) {
        const long double mu_m = profile.mu[m];
        const int tau_m = profile.tau[m];
        // With u = 1 - mu_m s the remaining factors are (c_j + d_j u)^(-tau_j);
        // their Taylor coefficients in u follow from the power sums of -r_j.
        long double g0_log = 0.0L;
        long double g0_sign = 1.0L;
        std::vector<long double> r;
        std::vector<int> t;
        for (std::size_t j = 0; j < count; ++j) {
            if (j == m) {
                continue;
            }
            const long double mu_j = profile.mu[j];
            const long double c = (mu_m - mu_j) / mu_m;
            g0_log -= profile.tau[j] * std::log(std::fabs(c));
            if (c < 0.0L && profile.tau[j] % 2 == 1) {
                g0_sign = -g0_sign;
            }
            r.push_back(mu_j / (mu_m - mu_j));
            t.push_back(profile.tau[j]);
        }
        const int depth = tau_m - 1;
        std::vector<long double> power_sum(static_cast<std::size_t>(depth) + 1, 0.0L);
        for (std::size_t j = 0; j < r.size(); ++j) {
            long double x = 1.0L;
            for (int i = 1; i <= depth; ++i) {
                x *= -r[j];
                power_sum[static_cast<std::size_t>(i)] += t[j] * x;
            }
        }
        std::vector<long double> g(static_cast<std::size_t>(depth) + 1, 0.0L);
        g[0] = g0_sign * std::exp(g0_log);
        for (int k = 1; k <= depth; ++k) {
            long double acc = 0.0L;
            for (int i = 1; i <= k; ++i) {
                acc += power_sum[static_cast<std::size_t>(i)] * g[static_cast<std::size_t>(k - i)];
            }
            g[static_cast<std::size_t>(k)] = acc / k;
        }
        for (int n = 1; n <= tau_m; ++n) {
            out.terms.push_back({profile.mu[m], n, g[static_cast<std::size_t>(tau_m - n)]});
        }
    }
    return out;
}

double profile_mgf(const InterferenceProfile& profile, double s) {
    long double log_sum = 0.0L;
    for (std::size_t m = 0; m < profile.mu.size(); ++m) {
        log_sum -= profile.tau[m] * std::log1p(-static_cast<long double>(profile.mu[m]) * s);
    }
    return static_cast<double>(std::exp(log_sum));
}

}  // namespace mumimo
