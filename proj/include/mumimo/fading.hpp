// SPDX-License-Identifier: Apache-2.0
//
// System dimensions, large-scale fading tensors and the interference profile
// of a home cell: the diagonal of A_l, its distinct values and the partial
// fraction coefficients of prod_m (1 - mu_m s)^(-tau_m).

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mumimo {

struct SystemConfig {
    int num_cells = 1;        // L
    int users_per_cell = 1;   // K
    int antennas = 1;         // N
    double transmit_snr = 1;  // p_u, linear

    void validate() const;
};

// beta[l][i][k]: gain from user k of cell i to the BS of cell l.
class LargeScaleFading {
public:
    LargeScaleFading(int num_cells, int users_per_cell, double fill = 1.0);

    // Direct gains beta[l][l][k] = direct, every cross gain = cross.
    static LargeScaleFading symmetric(int num_cells, int users_per_cell, double direct, double cross);

    int num_cells() const { return cells_; }
    int users_per_cell() const { return users_; }

    double operator()(int l, int i, int k) const { return data_[index(l, i, k)]; }
    void set(int l, int i, int k, double value);

    // Throws std::invalid_argument when dimensions disagree with `config`.
    void check_compatible(const SystemConfig& config) const;

    // Text format:
    //   cells L
    //   users K
    //   l i b_0 ... b_{K-1}     (one row per ordered cell pair)
    // '#' starts a comment. Errors carry the offending line number.
    static LargeScaleFading read(std::istream& in);
    static LargeScaleFading read_file(const std::string& path);
    void write(std::ostream& out) const;

private:
    std::size_t index(int l, int i, int k) const;

    int cells_;
    int users_;
    std::vector<double> data_;
};

struct ProfileOptions {
    double cluster_tolerance = 1e-12;          // relative; values closer are one eigenvalue
    double near_degenerate_tolerance = 1e-6;   // relative; closer distinct values raise a warning
    bool merge_near_degenerate = false;        // cluster at near_degenerate_tolerance instead
};

struct InterferenceProfile {
    int home_cell = 0;
    std::vector<double> diagonal;  // beta[l][i][k] for i != l, cell-major
    std::vector<double> mu;        // distinct values, strictly decreasing
    std::vector<int> tau;          // multiplicities
    std::vector<std::string> warnings;

    bool empty() const { return mu.empty(); }
    int size() const { return static_cast<int>(diagonal.size()); }
    bool all_distinct() const;
    double trace() const;
};

InterferenceProfile build_profile(const SystemConfig& config, const LargeScaleFading& fading,
                                  int home_cell, const ProfileOptions& options = {});

// Profile built straight from a list of interfering gains.
InterferenceProfile profile_from_gains(std::vector<double> gains, const ProfileOptions& options = {});

struct CharacteristicTerm {
    double mu;
    int order;
    long double chi;
};

struct CharacteristicExpansion {
    std::vector<CharacteristicTerm> terms;

    bool empty() const { return terms.empty(); }
    // sum chi (1 - mu s)^(-n), valid for s < 1 / max mu.
    double mgf(double s) const;
    // sum |chi|, a measure of cancellation in every sum over the expansion.
    double magnitude() const;
};

CharacteristicExpansion characteristic_coefficients(const InterferenceProfile& profile);

// prod_m (1 - mu_m s)^(-tau_m) evaluated directly from the diagonal.
double profile_mgf(const InterferenceProfile& profile, double s);

}  // namespace mumimo
