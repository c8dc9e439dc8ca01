// SPDX-License-Identifier: Apache-2.0
//
// Matrix-level Monte Carlo of the multicell ZF uplink. Draws every channel
// G_li = H_li D_li^(1/2), applies the pseudo-inverse of G_ll, and measures
// per-user SINR directly. Serves as the reference for the closed forms.

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <atomic>
#include <cstdint>
#include <stdexcept>
#include <thread>
#include <vector>

#include "mumimo/closedform.hpp"
#include "mumimo/fading.hpp"
#include "mumimo/rng.hpp"

namespace mumimo {

struct ChannelRealization {
    int home_cell = 0;
    std::vector<Eigen::MatrixXcd> g;  // g[i] is N x K: users of cell i seen at BS home_cell
};

ChannelRealization sample_channels(const SystemConfig& config, const LargeScaleFading& fading, int home_cell,
                                   RngStream& rng);

// Zero-forcing receive filter rows [G_ll^+]_k, K x N.
Eigen::MatrixXcd zf_filter(const Eigen::MatrixXcd& g_home);

// Per-user SINR after ZF. Throws std::runtime_error when G_ll is numerically rank deficient.
std::vector<double> zf_sinr(const ChannelRealization& realization, double p_u);

struct TrialPlan {
    std::int64_t num_trials = 10000;
    std::uint64_t base_seed = 1;
    std::int64_t batch_size = 256;
    int threads = 1;

    void validate() const;
};

struct Estimate {
    double mean = 0.0;
    double standard_error = 0.0;
    std::int64_t trials = 0;
};

// Sum and sum of squares of `width` per-trial statistics.
struct Moments {
    std::vector<double> sum;
    std::vector<double> sum_sq;
    std::int64_t count = 0;

    explicit Moments(std::size_t width = 0) : sum(width, 0.0), sum_sq(width, 0.0) {}
    void add(const std::vector<double>& x);
    void merge(const Moments& other);
    Estimate estimate(std::size_t column) const;
};

// Trials are reduced in fixed chunks of this many, in index order.
inline constexpr std::int64_t kReduceChunk = 64;

// Runs trial(t, rng, out) for t in [0, num_trials) with rng = RngStream(base_seed, t).
// Each worker claims plan.batch_size trials rounded up to whole chunks; chunk
// sums merge in index order, so the result depends on neither plan.threads
// nor plan.batch_size.
template <class Trial>
Moments run_trials(const TrialPlan& plan, std::size_t width, const Trial& trial) {
    plan.validate();
    const std::int64_t chunks = (plan.num_trials + kReduceChunk - 1) / kReduceChunk;
    const std::int64_t per_batch = (plan.batch_size + kReduceChunk - 1) / kReduceChunk;
    const std::int64_t batches = (chunks + per_batch - 1) / per_batch;
    std::vector<Moments> partial(static_cast<std::size_t>(chunks), Moments(width));
    std::atomic<std::int64_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    auto worker = [&] {
        std::vector<double> out(width);
        for (std::int64_t b = next++; b < batches && !failed; b = next++) {
            try {
                const std::int64_t begin = b * per_batch * kReduceChunk;
                const std::int64_t end = std::min(plan.num_trials, begin + per_batch * kReduceChunk);
                for (std::int64_t t = begin; t < end; ++t) {
                    RngStream rng(plan.base_seed, static_cast<std::uint64_t>(t));
                    trial(t, rng, out);
                    partial[static_cast<std::size_t>(t / kReduceChunk)].add(out);
                }
            } catch (...) {
                if (!failed.exchange(true)) {
                    failure = std::current_exception();
                }
            }
        }
    };
    const int n_threads = static_cast<int>(std::min<std::int64_t>(plan.threads, batches));
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < n_threads; ++i) {
            pool.emplace_back(worker);
        }
        for (auto& th : pool) {
            th.join();
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
    Moments total(width);
    for (const auto& p : partial) {
        total.merge(p);
    }
    return total;
}

// Runs trial(t, rng) -> double and returns the values in trial order.
template <class Trial>
std::vector<double> collect_trials(const TrialPlan& plan, const Trial& trial) {
    plan.validate();
    std::vector<double> values(static_cast<std::size_t>(plan.num_trials));
    TrialPlan p = plan;
    run_trials(p, 0, [&](std::int64_t t, RngStream& rng, std::vector<double>&) {
        values[static_cast<std::size_t>(t)] = trial(t, rng);
    });
    return values;
}

// Mean over trials and users of log2(1 + gamma_k). The standard error uses
// per-trial user averages as the i.i.d. samples.
Estimate estimate_rate(const SystemConfig& config, const LargeScaleFading& fading, const TrialPlan& plan,
                       int cell = 0);

// Per-user variant: mean of log2(1 + gamma_user).
Estimate estimate_user_rate(const SystemConfig& config, const LargeScaleFading& fading, const TrialPlan& plan,
                            int user, int cell = 0);

enum class SerMode { semi_analytic, symbol_level };

// (1/pi) int_0^Theta exp(-g gamma / sin^2 theta) d theta.
double conditional_ser(const ModulationScheme& modulation, double gamma);

Estimate estimate_ser(const SystemConfig& config, const LargeScaleFading& fading, const ModulationScheme& modulation,
                      const TrialPlan& plan, SerMode mode = SerMode::semi_analytic, int cell = 0, int user = -1);

// Fraction of draws with gamma_user <= gamma_th; user = -1 pools all users.
Estimate estimate_outage(const SystemConfig& config, const LargeScaleFading& fading, const TrialPlan& plan,
                         double gamma_th, int cell = 0, int user = -1);

// gamma_user from each matrix trial, in trial order.
std::vector<double> zf_sinr_samples(const SystemConfig& config, const LargeScaleFading& fading,
                                    const TrialPlan& plan, int user, int cell = 0);

// Two-variable samples p_u X / (p_u Z + 1) from the same plan layout.
std::vector<double> model_sinr_samples(const SinrModel& model, const TrialPlan& plan);

}  // namespace mumimo
