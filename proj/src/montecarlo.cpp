// SPDX-License-Identifier: Apache-2.0

#include "mumimo/montecarlo.hpp"

#include <cmath>
#include <numbers>

#include "mumimo/quadrature.hpp"

namespace mumimo {
namespace {

// Gram systems above this condition estimate are solved through QR of G_ll.
constexpr double kGramGate = 1e8;
// Beyond this the Gram matrix counts as singular.
constexpr double kSingularGram = 1e14;

void check_cell_user(const SystemConfig& config, int cell, int user) {
    if (cell < 0 || cell >= config.num_cells) {
        throw std::out_of_range("montecarlo: cell index out of range");
    }
    if (user < -1 || user >= config.users_per_cell) {
        throw std::out_of_range("montecarlo: user index out of range");
    }
}

int nearest_phase(std::complex<double> r, int order) {
    const double angle = std::arg(r);
    const long idx = std::lround(angle * order / (2.0 * std::numbers::pi));
    return static_cast<int>(((idx % order) + order) % order);
}

}  // namespace

ChannelRealization sample_channels(const SystemConfig& config, const LargeScaleFading& fading, int home_cell,
                                   RngStream& rng) {
    config.validate();
    fading.check_compatible(config);
    check_cell_user(config, home_cell, 0);
    const int n = config.antennas;
    const int k = config.users_per_cell;
    ChannelRealization r;
    r.home_cell = home_cell;
    r.g.reserve(static_cast<std::size_t>(config.num_cells));
    for (int i = 0; i < config.num_cells; ++i) {
        Eigen::MatrixXcd g(n, k);
        for (int col = 0; col < k; ++col) {
            const double amp = std::sqrt(fading(home_cell, i, col));
            for (int row = 0; row < n; ++row) {
                g(row, col) = amp * rng.complex_normal();
            }
        }
        r.g.push_back(std::move(g));
    }
    return r;
}

Eigen::MatrixXcd zf_filter(const Eigen::MatrixXcd& g_home) {
    const Eigen::MatrixXcd gram = g_home.adjoint() * g_home;
    Eigen::LLT<Eigen::MatrixXcd> llt(gram);
    if (llt.info() == Eigen::Success) {
        const double rcond = llt.rcond();
        if (rcond > 0.0 && 1.0 / rcond <= kGramGate) {
            return llt.solve(g_home.adjoint());
        }
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(g_home);
    const auto diag = qr.matrixQR().diagonal().cwiseAbs();
    const double ratio = diag.size() == 0 ? 1.0 : diag.maxCoeff() / diag.minCoeff();
    if (!(ratio * ratio <= kSingularGram) || qr.rank() < g_home.cols()) {
        throw std::runtime_error("zf_sinr: G_ll is numerically rank deficient");
    }
    // G^+ = P R^-1 Q^H restricted to the first K columns of Q.
    const Eigen::Index k = g_home.cols();
    const Eigen::MatrixXcd q_thin = qr.householderQ() * Eigen::MatrixXcd::Identity(g_home.rows(), k);
    const Eigen::MatrixXcd r = qr.matrixQR().topLeftCorner(k, k).triangularView<Eigen::Upper>();
    const Eigen::MatrixXcd rinv_qh = r.triangularView<Eigen::Upper>().solve(q_thin.adjoint());
    return qr.colsPermutation() * rinv_qh;
}

std::vector<double> zf_sinr(const ChannelRealization& realization, double p_u) {
    if (!(p_u > 0.0)) {
        throw std::domain_error("zf_sinr: p_u must be positive");
    }
    const auto& home = realization.g.at(static_cast<std::size_t>(realization.home_cell));
    const Eigen::MatrixXcd w = zf_filter(home);
    const Eigen::Index k = home.cols();
    Eigen::VectorXd interference = Eigen::VectorXd::Zero(k);
    for (std::size_t i = 0; i < realization.g.size(); ++i) {
        if (static_cast<int>(i) == realization.home_cell) {
            continue;
        }
        interference += (w * realization.g[i]).rowwise().squaredNorm();
    }
    const Eigen::VectorXd noise = w.rowwise().squaredNorm();
    std::vector<double> sinr(static_cast<std::size_t>(k));
    for (Eigen::Index j = 0; j < k; ++j) {
        sinr[static_cast<std::size_t>(j)] = p_u / (p_u * interference(j) + noise(j));
    }
    return sinr;
}

void TrialPlan::validate() const {
    if (num_trials < 1) {
        throw std::invalid_argument("TrialPlan: num_trials must be >= 1");
    }
    if (batch_size < 1) {
        throw std::invalid_argument("TrialPlan: batch_size must be >= 1");
    }
    if (threads < 1) {
        throw std::invalid_argument("TrialPlan: threads must be >= 1");
    }
}

void Moments::add(const std::vector<double>& x) {
    for (std::size_t j = 0; j < sum.size(); ++j) {
        sum[j] += x[j];
        sum_sq[j] += x[j] * x[j];
    }
    ++count;
}

void Moments::merge(const Moments& other) {
    for (std::size_t j = 0; j < sum.size(); ++j) {
        sum[j] += other.sum[j];
        sum_sq[j] += other.sum_sq[j];
    }
    count += other.count;
}

Estimate Moments::estimate(std::size_t column) const {
    Estimate e;
    e.trials = count;
    if (count == 0) {
        return e;
    }
    const double n = static_cast<double>(count);
    e.mean = sum[column] / n;
    if (count > 1) {
        const double var = std::max(0.0, (sum_sq[column] - n * e.mean * e.mean) / (n - 1.0));
        e.standard_error = std::sqrt(var / n);
    }
    return e;
}

Estimate estimate_rate(const SystemConfig& config, const LargeScaleFading& fading, const TrialPlan& plan,
                       int cell) {
    check_cell_user(config, cell, 0);
    const Moments m = run_trials(plan, 1, [&](std::int64_t, RngStream& rng, std::vector<double>& out) {
        const auto sinr = zf_sinr(sample_channels(config, fading, cell, rng), config.transmit_snr);
        double s = 0.0;
        for (double g : sinr) {
            s += std::log2(1.0 + g);
        }
        out[0] = s / static_cast<double>(sinr.size());
    });
    return m.estimate(0);
}

Estimate estimate_user_rate(const SystemConfig& config, const LargeScaleFading& fading, const TrialPlan& plan,
                            int user, int cell) {
    check_cell_user(config, cell, user);
    if (user < 0) {
        return estimate_rate(config, fading, plan, cell);
    }
    const Moments m = run_trials(plan, 1, [&](std::int64_t, RngStream& rng, std::vector<double>& out) {
        const auto sinr = zf_sinr(sample_channels(config, fading, cell, rng), config.transmit_snr);
        out[0] = std::log2(1.0 + sinr[static_cast<std::size_t>(user)]);
    });
    return m.estimate(0);
}

double conditional_ser(const ModulationScheme& modulation, double gamma) {
    if (gamma < 0.0) {
        throw std::domain_error("conditional_ser: gamma must be non-negative");
    }
    if (gamma == 0.0) {
        return modulation.theta_max / std::numbers::pi;
    }
    const double a = modulation.g_mpsk * gamma;
    auto f = [a](double theta) {
        const double s = std::sin(theta);
        return s == 0.0 ? 0.0 : std::exp(-a / (s * s));
    };
    specfun::QuadratureSpec spec;
    spec.relative_tolerance = 1e-10;
    const auto q = specfun::integrate(f, 0.0, modulation.theta_max, spec);
    return q.value / std::numbers::pi;
}

Estimate estimate_ser(const SystemConfig& config, const LargeScaleFading& fading, const ModulationScheme& modulation,
                      const TrialPlan& plan, SerMode mode, int cell, int user) {
    check_cell_user(config, cell, user);
    const double pu = config.transmit_snr;
    const int k = config.users_per_cell;
    const Moments m = run_trials(plan, 1, [&](std::int64_t, RngStream& rng, std::vector<double>& out) {
        const ChannelRealization ch = sample_channels(config, fading, cell, rng);
        if (mode == SerMode::semi_analytic) {
            const auto sinr = zf_sinr(ch, pu);
            if (user >= 0) {
                out[0] = conditional_ser(modulation, sinr[static_cast<std::size_t>(user)]);
                return;
            }
            double s = 0.0;
            for (double g : sinr) {
                s += conditional_ser(modulation, g);
            }
            out[0] = s / k;
            return;
        }
        const int order = modulation.order;
        const double step = 2.0 * std::numbers::pi / order;
        Eigen::VectorXcd y = Eigen::VectorXcd::Zero(config.antennas);
        std::vector<int> sent(static_cast<std::size_t>(k));
        for (int i = 0; i < config.num_cells; ++i) {
            for (int j = 0; j < k; ++j) {
                const int sym = static_cast<int>(rng.uniform() * order) % order;
                if (i == cell) {
                    sent[static_cast<std::size_t>(j)] = sym;
                }
                y += std::sqrt(pu) * std::polar(1.0, step * sym) * ch.g[static_cast<std::size_t>(i)].col(j);
            }
        }
        for (int row = 0; row < config.antennas; ++row) {
            y(row) += rng.complex_normal();
        }
        const Eigen::VectorXcd r = zf_filter(ch.g[static_cast<std::size_t>(cell)]) * y;
        int errors = 0;
        for (int j = 0; j < k; ++j) {
            if (user >= 0 && j != user) {
                continue;
            }
            errors += nearest_phase(r(j), order) != sent[static_cast<std::size_t>(j)];
        }
        out[0] = user >= 0 ? errors : static_cast<double>(errors) / k;
    });
    return m.estimate(0);
}

Estimate estimate_outage(const SystemConfig& config, const LargeScaleFading& fading, const TrialPlan& plan,
                         double gamma_th, int cell, int user) {
    check_cell_user(config, cell, user);
    if (gamma_th < 0.0) {
        throw std::domain_error("estimate_outage: gamma_th must be non-negative");
    }
    const int k = config.users_per_cell;
    const Moments m = run_trials(plan, 1, [&](std::int64_t, RngStream& rng, std::vector<double>& out) {
        const auto sinr = zf_sinr(sample_channels(config, fading, cell, rng), config.transmit_snr);
        if (user >= 0) {
            out[0] = sinr[static_cast<std::size_t>(user)] <= gamma_th ? 1.0 : 0.0;
            return;
        }
        int below = 0;
        for (double g : sinr) {
            below += g <= gamma_th;
        }
        out[0] = static_cast<double>(below) / k;
    });
    return m.estimate(0);
}

std::vector<double> zf_sinr_samples(const SystemConfig& config, const LargeScaleFading& fading,
                                    const TrialPlan& plan, int user, int cell) {
    check_cell_user(config, cell, user);
    if (user < 0) {
        throw std::out_of_range("zf_sinr_samples: user index out of range");
    }
    return collect_trials(plan, [&](std::int64_t, RngStream& rng) {
        return zf_sinr(sample_channels(config, fading, cell, rng), config.transmit_snr)[static_cast<std::size_t>(user)];
    });
}

std::vector<double> model_sinr_samples(const SinrModel& model, const TrialPlan& plan) {
    return collect_trials(plan, [&](std::int64_t, RngStream& rng) { return sample_sinr(model, rng); });
}

}  // namespace mumimo
