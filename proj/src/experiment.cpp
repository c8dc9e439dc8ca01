// SPDX-License-Identifier: Apache-2.0

#include "mumimo/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "mumimo/asymptotic.hpp"
#include "mumimo/cellnet.hpp"
#include "mumimo/csv.hpp"
#include "mumimo/montecarlo.hpp"

namespace mumimo {
namespace {

// ---------------------------------------------------------------- parsing

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return "";
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) {
        out.push_back(trim(cur));
    }
    if (!s.empty() && s.back() == sep) {
        out.emplace_back();
    }
    return out;
}

template <class T>
bool parse_number(const std::string& text, T& out) {
    const std::string t = trim(text);
    if (t.empty()) {
        return false;
    }
    const char* first = t.data();
    const char* last = t.data() + t.size();
    if constexpr (std::is_floating_point_v<T>) {
        if (t == "inf" || t == "+inf") {
            out = std::numeric_limits<T>::infinity();
            return true;
        }
        if (*first == '+') {
            ++first;
        }
    }
    const auto res = std::from_chars(first, last, out);
    return res.ec == std::errc() && res.ptr == last;
}

using Errors = std::vector<std::string>;

std::string where(const Setting& s) { return s.origin + ": " + s.key + ": "; }

template <class T>
void set_scalar(const Setting& s, T& field, Errors& errs) {
    T v{};
    if (!parse_number(s.value, v)) {
        errs.push_back(where(s) + "cannot parse '" + s.value + "' as a number");
        return;
    }
    field = v;
}

// "a,b,c" or "start:step:stop" segments, comma separated.
template <class T>
void set_list(const Setting& s, std::vector<T>& field, Errors& errs) {
    std::vector<T> out;
    if (trim(s.value).empty()) {
        errs.push_back(where(s) + "list must not be empty");
        return;
    }
    for (const auto& item : split(s.value, ',')) {
        const auto parts = split(item, ':');
        if (parts.size() == 1) {
            T v{};
            if (!parse_number(parts[0], v)) {
                errs.push_back(where(s) + "cannot parse '" + item + "' as a number");
                return;
            }
            out.push_back(v);
        } else if (parts.size() == 3) {
            T a{}, step{}, b{};
            if (!parse_number(parts[0], a) || !parse_number(parts[1], step) || !parse_number(parts[2], b)) {
                errs.push_back(where(s) + "cannot parse range '" + item + "'");
                return;
            }
            if (!(step > T{0}) || b < a) {
                errs.push_back(where(s) + "range '" + item + "' needs step > 0 and stop >= start");
                return;
            }
            const auto count = static_cast<long long>(std::floor((b - a) / static_cast<double>(step) + 1e-9));
            if (count > 100000) {
                errs.push_back(where(s) + "range '" + item + "' has too many points");
                return;
            }
            for (long long j = 0; j <= count; ++j) {
                out.push_back(static_cast<T>(a + static_cast<T>(j) * step));
            }
        } else {
            errs.push_back(where(s) + "malformed list item '" + item + "'");
            return;
        }
    }
    field = std::move(out);
}

template <class T>
std::string format_number(T v) {
    if constexpr (std::is_floating_point_v<T>) {
        return csv::format_double(static_cast<double>(v));
    } else {
        return std::to_string(v);
    }
}

template <class T>
std::string format_list(const std::vector<T>& v) {
    std::string out;
    for (std::size_t j = 0; j < v.size(); ++j) {
        if (j > 0) {
            out += ",";
        }
        out += format_number(v[j]);
    }
    return out;
}

struct KeyDesc {
    const char* name;
    bool provenance;  // written into CSV headers
    std::function<void(ExperimentConfig&, const Setting&, Errors&)> parse;
    std::function<std::string(const ExperimentConfig&)> format;
};

const std::map<std::string, Mode>& mode_names() {
    static const std::map<std::string, Mode> m{
        {"rate", Mode::rate},           {"ser", Mode::ser},
        {"outage", Mode::outage},       {"asymptotic", Mode::asymptotic},
        {"dof", Mode::dof},             {"montecarlo", Mode::montecarlo},
        {"scenario2", Mode::scenario2}, {"figure", Mode::figure}};
    return m;
}

const char* formula_name(FormulaPath p) {
    switch (p) {
        case FormulaPath::automatic:
            return "automatic";
        case FormulaPath::general:
            return "general";
        case FormulaPath::distinct:
            return "distinct";
    }
    return "automatic";
}

#define MUMIMO_SCALAR(key, field)                                                                     \
    KeyDesc {                                                                                         \
        key, true, [](ExperimentConfig& c, const Setting& s, Errors& e) { set_scalar(s, c.field, e); }, \
            [](const ExperimentConfig& c) { return format_number(c.field); }                          \
    }
#define MUMIMO_LIST(key, field)                                                                     \
    KeyDesc {                                                                                       \
        key, true, [](ExperimentConfig& c, const Setting& s, Errors& e) { set_list(s, c.field, e); }, \
            [](const ExperimentConfig& c) { return format_list(c.field); }                          \
    }

const std::vector<KeyDesc>& keys() {
    static const std::vector<KeyDesc> table = [] {
        std::vector<KeyDesc> k;
        k.push_back({"mode", true,
                     [](ExperimentConfig& c, const Setting& s, Errors& e) {
                         const auto it = mode_names().find(trim(s.value));
                         if (it == mode_names().end()) {
                             e.push_back(where(s) + "unknown mode '" + s.value + "'");
                         } else {
                             c.mode = it->second;
                         }
                     },
                     [](const ExperimentConfig& c) { return std::string(to_string(c.mode)); }});
        k.push_back({"figure", true,
                     [](ExperimentConfig& c, const Setting& s, Errors&) { c.figure = trim(s.value); },
                     [](const ExperimentConfig& c) { return c.figure; }});
        k.push_back(MUMIMO_SCALAR("cells", cells));
        k.push_back(MUMIMO_SCALAR("users", users));
        k.push_back(MUMIMO_LIST("antennas", antennas));
        k.push_back(MUMIMO_LIST("snr_db", snr_db));
        k.push_back(MUMIMO_LIST("cross_gain", cross_gain));
        k.push_back(MUMIMO_SCALAR("direct_gain", direct_gain));
        k.push_back(MUMIMO_LIST("gamma_th", gamma_th));
        k.push_back(MUMIMO_SCALAR("modulation_order", modulation_order));
        k.push_back(MUMIMO_LIST("reuse", reuse));
        k.push_back(MUMIMO_LIST("kappa", kappa));
        k.push_back(MUMIMO_LIST("energy", energy));
        k.push_back(MUMIMO_LIST("eta", eta));
        k.push_back(MUMIMO_LIST("rate_limit", rate_limit));
        k.push_back({"power_scaling", true,
                     [](ExperimentConfig& c, const Setting& s, Errors& e) {
                         const std::string v = trim(s.value);
                         if (v == "true" || v == "1" || v == "yes") {
                             c.power_scaling = true;
                         } else if (v == "false" || v == "0" || v == "no") {
                             c.power_scaling = false;
                         } else {
                             e.push_back(where(s) + "expected true or false, got '" + s.value + "'");
                         }
                     },
                     [](const ExperimentConfig& c) { return std::string(c.power_scaling ? "true" : "false"); }});
        k.push_back({"formula", true,
                     [](ExperimentConfig& c, const Setting& s, Errors& e) {
                         const std::string v = trim(s.value);
                         if (v == "automatic") {
                             c.formula = FormulaPath::automatic;
                         } else if (v == "general") {
                             c.formula = FormulaPath::general;
                         } else if (v == "distinct") {
                             c.formula = FormulaPath::distinct;
                         } else {
                             e.push_back(where(s) + "expected automatic, general or distinct");
                         }
                     },
                     [](const ExperimentConfig& c) { return std::string(formula_name(c.formula)); }});
        k.push_back(MUMIMO_SCALAR("user", user));
        k.push_back(MUMIMO_SCALAR("trials", trials));
        k.push_back(MUMIMO_SCALAR("seed", seed));
        k.push_back(MUMIMO_SCALAR("batch_size", batch_size));
        KeyDesc threads = MUMIMO_SCALAR("threads", threads);
        threads.provenance = false;
        k.push_back(threads);
        k.push_back(MUMIMO_SCALAR("drops", drops));
        k.push_back(MUMIMO_SCALAR("samples_per_drop", samples_per_drop));
        k.push_back({"output", false,
                     [](ExperimentConfig& c, const Setting& s, Errors&) { c.output = trim(s.value); },
                     [](const ExperimentConfig& c) { return c.output; }});
        k.push_back({"fading_file", true,
                     [](ExperimentConfig& c, const Setting& s, Errors&) { c.fading_file = trim(s.value); },
                     [](const ExperimentConfig& c) { return c.fading_file; }});
        return k;
    }();
    return table;
}

#undef MUMIMO_SCALAR
#undef MUMIMO_LIST

bool valid_figure(const std::string& f) {
    static const std::set<std::string> ids{"1", "2", "3", "4", "5", "6", "7", "table1"};
    return ids.count(f) > 0;
}

void validate(const ExperimentConfig& c, Errors& e) {
    auto need = [&](bool ok, const std::string& msg) {
        if (!ok) {
            e.push_back(msg);
        }
    };
    auto finite_all = [](const std::vector<double>& v) {
        return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
    };
    need(valid_figure(c.figure), "figure: must be 1..7 or table1");
    need(c.cells >= 1, "cells: must be >= 1");
    need(c.users >= 1, "users: must be >= 1");
    need(!c.antennas.empty(), "antennas: grid must not be empty");
    for (int n : c.antennas) {
        if (n < c.users) {
            e.push_back("antennas: N = " + std::to_string(n) + " is below users = " + std::to_string(c.users));
            break;
        }
    }
    need(!c.snr_db.empty() && finite_all(c.snr_db), "snr_db: grid must be non-empty and finite");
    need(!c.cross_gain.empty() && finite_all(c.cross_gain), "cross_gain: grid must be non-empty and finite");
    need(std::all_of(c.cross_gain.begin(), c.cross_gain.end(), [](double a) { return a > 0.0; }),
         "cross_gain: values must be positive");
    need(std::isfinite(c.direct_gain) && c.direct_gain > 0.0, "direct_gain: must be positive and finite");
    need(!c.gamma_th.empty() && finite_all(c.gamma_th) &&
             std::all_of(c.gamma_th.begin(), c.gamma_th.end(), [](double g) { return g > 0.0; }),
         "gamma_th: values must be positive and finite");
    need(c.modulation_order >= 2, "modulation_order: must be >= 2");
    need(!c.reuse.empty() && std::all_of(c.reuse.begin(), c.reuse.end(),
                                         [](int r) { return r == 1 || r == 3 || r == 7; }),
         "reuse: values must be 1, 3 or 7");
    need(!c.kappa.empty() && finite_all(c.kappa) &&
             std::all_of(c.kappa.begin(), c.kappa.end(), [](double k) { return k > 1.0; }),
         "kappa: values must exceed 1");
    need(!c.energy.empty() && finite_all(c.energy) &&
             std::all_of(c.energy.begin(), c.energy.end(), [](double x) { return x > 0.0; }),
         "energy: values must be positive");
    need(!c.eta.empty() &&
             std::all_of(c.eta.begin(), c.eta.end(), [](double x) { return x > 0.0 && x < 1.0; }),
         "eta: values must lie in (0, 1)");
    need(!c.rate_limit.empty() && finite_all(c.rate_limit) &&
             std::all_of(c.rate_limit.begin(), c.rate_limit.end(), [](double x) { return x > 0.0; }),
         "rate_limit: values must be positive");
    need(c.user >= 0 && c.user < c.users, "user: must lie in [0, users)");
    need(c.trials >= 1, "trials: must be >= 1");
    need(c.batch_size >= 1, "batch_size: must be >= 1");
    need(c.threads >= 1, "threads: must be >= 1");
    need(c.drops >= 1, "drops: must be >= 1");
    need(c.samples_per_drop >= 1, "samples_per_drop: must be >= 1");
    need(!c.output.empty(), "output: must not be empty");
    if (!c.fading_file.empty()) {
        try {
            const LargeScaleFading f = LargeScaleFading::read_file(c.fading_file);
            need(f.num_cells() == c.cells && f.users_per_cell() == c.users,
                 "fading_file: dimensions do not match cells and users");
        } catch (const std::exception& ex) {
            e.push_back(std::string("fading_file: ") + ex.what());
        }
    }
}

// ---------------------------------------------------------------- running

template <class F>
void parallel_for(std::size_t n, int threads, const F& f) {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                f(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
            }
        }
    };
    const int t = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), n));
    if (t <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < t; ++i) {
            pool.emplace_back(worker);
        }
        for (auto& th : pool) {
            th.join();
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

std::uint64_t point_seed(std::uint64_t seed, std::uint64_t index) {
    return splitmix64(seed ^ splitmix64(index + 0x5851f42d4c957f2dULL));
}

class Runner {
public:
    explicit Runner(const ExperimentConfig& c) : c_(c) {}

    RunReport run(Mode mode) {
        switch (mode) {
            case Mode::rate:
                rate();
                break;
            case Mode::ser:
                ser();
                break;
            case Mode::outage:
                outage();
                break;
            case Mode::asymptotic:
                asymptotic();
                break;
            case Mode::dof:
                dof();
                break;
            case Mode::montecarlo:
                montecarlo();
                break;
            case Mode::scenario2:
                scenario2(false);
                break;
            case Mode::figure:
                figure();
                break;
        }
        return report_;
    }

private:
    struct Fading {
        double a;
        LargeScaleFading fading;
    };

    const ExperimentConfig& c_;
    RunReport report_;

    std::vector<Fading> fadings() const {
        std::vector<Fading> out;
        if (!c_.fading_file.empty()) {
            out.push_back({std::numeric_limits<double>::quiet_NaN(), LargeScaleFading::read_file(c_.fading_file)});
            return out;
        }
        for (double a : c_.cross_gain) {
            out.push_back({a, LargeScaleFading::symmetric(c_.cells, c_.users, c_.direct_gain, a)});
        }
        return out;
    }

    double pu(std::size_t snr_index, int antennas) const {
        const double p = c_.transmit_snr[snr_index];
        return c_.power_scaling ? p / antennas : p;
    }

    SystemConfig system(int antennas, double p_u) const { return {c_.cells, c_.users, antennas, p_u}; }

    TrialPlan plan(std::uint64_t index, int threads) const {
        TrialPlan p;
        p.num_trials = c_.trials;
        p.base_seed = point_seed(c_.seed, index);
        p.batch_size = c_.batch_size;
        p.threads = threads;
        return p;
    }

    void note(Quality q) { report_.worst = worst(report_.worst, q); }

    csv::Table table(std::vector<std::string> columns, const std::string& title) const {
        csv::Table t(std::move(columns));
        t.add_comment("mumimo " + title);
        for (const auto& line : split(serialize_provenance(), '\n')) {
            if (!line.empty()) {
                t.add_comment(line);
            }
        }
        return t;
    }

    std::string serialize_provenance() const {
        std::string out;
        for (const auto& k : keys()) {
            if (k.provenance) {
                out += std::string(k.name) + " = " + k.format(c_) + "\n";
            }
        }
        return out;
    }

    void save(const csv::Table& t, const std::string& name) {
        const std::string path = c_.output + "/" + name;
        t.write_file(path);
        report_.files.push_back(path);
    }

    // Grid of (fading, antennas, snr) points.
    struct Point {
        std::size_t f;
        int n;
        std::size_t s;
    };

    std::vector<Point> grid(std::size_t n_fading) const {
        std::vector<Point> pts;
        for (std::size_t f = 0; f < n_fading; ++f) {
            for (int n : c_.antennas) {
                for (std::size_t s = 0; s < c_.snr_db.size(); ++s) {
                    pts.push_back({f, n, s});
                }
            }
        }
        return pts;
    }

    void rate() {
        const auto fs = fadings();
        const auto pts = grid(fs.size());
        std::vector<RateResult> exact(pts.size()), bound(pts.size()), total(pts.size());
        parallel_for(pts.size(), c_.threads, [&](std::size_t i) {
            const auto& p = pts[i];
            const SystemConfig sys = system(p.n, pu(p.s, p.n));
            const SinrModel m = make_sinr_model(sys, fs[p.f].fading, 0, c_.user);
            exact[i] = rate_exact(m, c_.formula);
            bound[i] = rate_lower_bound(m);
            total[i] = sum_rate(sys, fs[p.f].fading, 0, c_.formula);
        });
        auto t = table({"cross_gain", "antennas", "snr_db", "p_u", "user", "rate", "method", "quality", "condition",
                        "lower_bound", "sum_rate"},
                       "rate");
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const auto& p = pts[i];
            note(worst(worst(exact[i].quality, bound[i].quality), total[i].quality));
            t.row() << fs[p.f].a << p.n << c_.snr_db[p.s] << pu(p.s, p.n) << c_.user << exact[i].value
                    << to_string(exact[i].method) << to_string(worst(exact[i].quality, total[i].quality))
                    << exact[i].condition << bound[i].value << total[i].value;
        }
        save(t, "rate.csv");
        report_.summary.push_back("rate: " + std::to_string(pts.size()) + " points");
    }

    void ser() {
        const auto fs = fadings();
        const auto pts = grid(fs.size());
        const ModulationScheme mod = ModulationScheme::psk(c_.modulation_order);
        std::vector<Evaluation> ex(pts.size()), ap(pts.size()), hi(pts.size());
        parallel_for(pts.size(), c_.threads, [&](std::size_t i) {
            const auto& p = pts[i];
            const SinrModel m = make_sinr_model(system(p.n, pu(p.s, p.n)), fs[p.f].fading, 0, c_.user);
            ex[i] = ser_exact(m, mod);
            ap[i] = ser_approx(m, mod);
            hi[i] = ser_high_snr(m, mod);
        });
        auto t = table({"cross_gain", "antennas", "snr_db", "p_u", "user", "modulation_order", "ser_exact",
                        "ser_approx", "ser_high_snr", "quality"},
                       "ser");
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const auto& p = pts[i];
            const Quality q = worst(worst(ex[i].quality, ap[i].quality), hi[i].quality);
            note(q);
            t.row() << fs[p.f].a << p.n << c_.snr_db[p.s] << pu(p.s, p.n) << c_.user << c_.modulation_order
                    << ex[i].value << ap[i].value << hi[i].value << to_string(q);
        }
        save(t, "ser.csv");
        report_.summary.push_back("ser: " + std::to_string(pts.size()) + " points");
    }

    void outage() {
        const auto fs = fadings();
        const auto base = grid(fs.size());
        struct OPoint {
            Point p;
            std::size_t g;
        };
        std::vector<OPoint> pts;
        for (const auto& p : base) {
            for (std::size_t g = 0; g < c_.gamma_th.size(); ++g) {
                pts.push_back({p, g});
            }
        }
        std::vector<Evaluation> ex(pts.size()), sm(pts.size());
        parallel_for(pts.size(), c_.threads, [&](std::size_t i) {
            const auto& p = pts[i].p;
            const SinrModel m = make_sinr_model(system(p.n, pu(p.s, p.n)), fs[p.f].fading, 0, c_.user);
            ex[i] = outage_exact(m, c_.gamma_th[pts[i].g], c_.formula);
            sm[i] = outage_small_threshold(m, c_.gamma_th[pts[i].g], c_.formula);
        });
        auto t = table({"cross_gain", "antennas", "snr_db", "p_u", "user", "gamma_th", "outage_exact",
                        "outage_small_threshold", "quality"},
                       "outage");
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const auto& p = pts[i].p;
            const Quality q = worst(ex[i].quality, sm[i].quality);
            note(q);
            t.row() << fs[p.f].a << p.n << c_.snr_db[p.s] << pu(p.s, p.n) << c_.user << c_.gamma_th[pts[i].g]
                    << ex[i].value << sm[i].value << to_string(q);
        }
        save(t, "outage.csv");
        report_.summary.push_back("outage: " + std::to_string(pts.size()) + " points");
    }

    void asymptotic() {
        const auto fs = fadings();
        auto t = table({"cross_gain", "user", "kappa", "energy", "deterministic_sir", "limit_rate",
                        "fixed_ratio_sinr", "fixed_ratio_rate"},
                       "asymptotic");
        for (const auto& f : fs) {
            for (double kappa : c_.kappa) {
                for (double e : c_.energy) {
                    const double sinr = power_scaled_fixed_ratio_sinr(f.fading, 0, c_.user, e, kappa);
                    t.row() << f.a << c_.user << kappa << e << deterministic_sir(f.fading, 0, c_.user, kappa)
                            << power_scaled_limit_rate(f.fading, 0, c_.user, e) << sinr << std::log2(1.0 + sinr);
                }
            }
        }
        save(t, "asymptotic.csv");
        report_.summary.push_back("asymptotic: " + std::to_string(t.size()) + " points");
    }

    void dof() {
        const auto fs = fadings();
        auto t = table({"cross_gain", "user", "eta", "rate_limit", "kappa", "antennas_needed", "residual"}, "dof");
        for (const auto& f : fs) {
            for (double eta : c_.eta) {
                for (double r : c_.rate_limit) {
                    const double kappa = required_kappa_for_rate(f.fading, 0, c_.user, r, eta);
                    const double beta = f.fading(0, 0, c_.user);
                    const double e = std::expm1(r * std::log(2.0)) / beta;
                    const double lhs = std::log2(1.0 + power_scaled_fixed_ratio_sinr(f.fading, 0, c_.user, e, kappa));
                    t.row() << f.a << c_.user << eta << r << kappa << antennas_for_kappa(kappa, c_.users)
                            << (lhs - eta * r) / (eta * r);
                }
            }
        }
        save(t, "dof.csv");
        report_.summary.push_back("dof: " + std::to_string(t.size()) + " points");
    }

    void montecarlo() {
        const auto fs = fadings();
        const auto pts = grid(fs.size());
        const ModulationScheme mod = ModulationScheme::psk(c_.modulation_order);
        struct Out {
            Estimate rate, ser;
            std::vector<Estimate> outage;
            RateResult rate_cf;
            Evaluation ser_cf;
            std::vector<Evaluation> outage_cf;
        };
        std::vector<Out> out(pts.size());
        const bool outer = pts.size() > 1;
        parallel_for(pts.size(), outer ? c_.threads : 1, [&](std::size_t i) {
            const auto& p = pts[i];
            const SystemConfig sys = system(p.n, pu(p.s, p.n));
            const auto& fad = fs[p.f].fading;
            const int inner = outer ? 1 : c_.threads;
            const SinrModel m = make_sinr_model(sys, fad, 0, c_.user);
            Out& o = out[i];
            o.rate = estimate_user_rate(sys, fad, plan(3 * i, inner), c_.user);
            o.rate_cf = rate_exact(m, c_.formula);
            o.ser = estimate_ser(sys, fad, mod, plan(3 * i + 1, inner), SerMode::semi_analytic, 0, c_.user);
            o.ser_cf = ser_exact(m, mod);
            for (double g : c_.gamma_th) {
                o.outage.push_back(estimate_outage(sys, fad, plan(3 * i + 2, inner), g, 0, c_.user));
                o.outage_cf.push_back(outage_exact(m, g, c_.formula));
            }
        });
        auto t = table({"cross_gain", "antennas", "snr_db", "p_u", "user", "metric", "parameter", "mean",
                        "standard_error", "trials", "analytic", "quality"},
                       "montecarlo");
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const auto& p = pts[i];
            const auto& o = out[i];
            auto emit = [&](const char* metric, double param, const Estimate& e, double analytic, Quality q) {
                note(q);
                t.row() << fs[p.f].a << p.n << c_.snr_db[p.s] << pu(p.s, p.n) << c_.user << metric << param
                        << e.mean << e.standard_error << static_cast<long long>(e.trials) << analytic
                        << to_string(q);
            };
            emit("rate", std::numeric_limits<double>::quiet_NaN(), o.rate, o.rate_cf.value, o.rate_cf.quality);
            emit("ser", c_.modulation_order, o.ser, o.ser_cf.value, o.ser_cf.quality);
            for (std::size_t g = 0; g < c_.gamma_th.size(); ++g) {
                emit("outage", c_.gamma_th[g], o.outage[g], o.outage_cf[g].value, o.outage_cf[g].quality);
            }
        }
        save(t, "montecarlo.csv");
        report_.summary.push_back("montecarlo: " + std::to_string(pts.size()) + " points, " +
                                  std::to_string(c_.trials) + " trials each");
    }

    // Returns distributions for (reuse, antennas) in grid order.
    std::vector<RateDistribution> distributions() const {
        std::vector<std::pair<int, int>> cfg;
        for (int r : c_.reuse) {
            for (int n : c_.antennas) {
                cfg.emplace_back(r, n);
            }
        }
        std::vector<RateDistribution> out(cfg.size());
        const bool outer = cfg.size() > 1;
        parallel_for(cfg.size(), outer ? c_.threads : 1, [&](std::size_t i) {
            NetworkScenario s;
            s.reuse_factor = cfg[i].first;
            s.antennas = cfg[i].second;
            s.users_per_cell = c_.users;
            s.transmit_snr = c_.transmit_snr.front();
            DistributionPlan p;
            p.num_drops = c_.drops;
            p.samples_per_drop = c_.samples_per_drop;
            p.seed = point_seed(c_.seed, i);
            p.threads = outer ? 1 : c_.threads;
            out[i] = rate_distribution(s, OfdmParams{}, p);
        });
        return out;
    }

    void scenario2(bool figure_layout) {
        const auto dists = distributions();
        auto summary = table({"reuse", "antennas", "percentile5_mbps", "mean_mbps", "samples"},
                             figure_layout ? "table1" : "scenario2");
        std::size_t i = 0;
        for (int r : c_.reuse) {
            for (int n : c_.antennas) {
                const auto& d = dists[i++];
                summary.row() << r << n << d.percentile5 / 1e6 << d.mean / 1e6
                              << static_cast<long long>(d.samples.size());
                if (!figure_layout) {
                    auto cdf = table({"x", "y", "method", "quality", "standard_error"}, "scenario2 cdf");
                    write_cdf(cdf, d);
                    save(cdf, "scenario2_cdf_r" + std::to_string(r) + "_N" + std::to_string(n) + ".csv");
                }
                report_.summary.push_back("r=" + std::to_string(r) + " N=" + std::to_string(n) +
                                          ": 95%-likely " + csv::format_double(d.percentile5 / 1e6) +
                                          " Mbit/s, mean " + csv::format_double(d.mean / 1e6) + " Mbit/s");
            }
        }
        save(summary, figure_layout ? "table1.csv" : "scenario2.csv");
    }

    static void write_cdf(csv::Table& t, const RateDistribution& d) {
        constexpr int kPoints = 400;
        for (int j = 1; j <= kPoints; ++j) {
            const double p = static_cast<double>(j) / kPoints;
            t.row() << d.quantile(p) / 1e6 << p << "empirical" << "clean" << "";
        }
    }

    // ---- figures: one CSV per curve with columns x, y, method, quality, standard_error

    using Curve = csv::Table;

    Curve curve(const std::string& title) const {
        return table({"x", "y", "method", "quality", "standard_error"}, "figure " + c_.figure + " " + title);
    }

    static std::string tag(const char* name, double v) {
        std::string s = csv::format_double(v);
        std::replace(s.begin(), s.end(), '.', 'p');
        return std::string(name) + s;
    }

    void figure() {
        const std::string& f = c_.figure;
        if (f == "1" || f == "2") {
            figure_rate(f == "1");
        } else if (f == "3") {
            figure3();
        } else if (f == "4") {
            figure4();
        } else if (f == "5") {
            figure5();
        } else if (f == "6") {
            figure6();
        } else if (f == "7") {
            figure7();
        } else if (f == "table1") {
            scenario2(true);
        } else {
            throw ConfigError({"figure: must be 1..7 or table1"});
        }
        report_.summary.push_back("figure " + f + ": " + std::to_string(report_.files.size()) + " files");
    }

    // Sum rate versus SNR (fig 1) or versus cross gain (fig 2), per N.
    void figure_rate(bool versus_snr) {
        const auto fs = fadings();
        const auto pts = grid(fs.size());
        struct Out {
            RateResult exact, bound;
            Estimate sim;
        };
        std::vector<Out> out(pts.size());
        parallel_for(pts.size(), c_.threads, [&](std::size_t i) {
            const auto& p = pts[i];
            const SystemConfig sys = system(p.n, pu(p.s, p.n));
            const auto& fad = fs[p.f].fading;
            out[i].exact = sum_rate(sys, fad, 0, c_.formula);
            const SinrModel m = make_sinr_model(sys, fad, 0, c_.user);
            out[i].bound = rate_lower_bound(m);
            out[i].sim = estimate_rate(sys, fad, plan(i, 1));
        });
        const double k = c_.users;
        for (int n : c_.antennas) {
            Curve sim = curve("simulated N=" + std::to_string(n));
            Curve ana = curve("analytical N=" + std::to_string(n));
            Curve bnd = curve("bound N=" + std::to_string(n));
            for (std::size_t i = 0; i < pts.size(); ++i) {
                const auto& p = pts[i];
                if (p.n != n) {
                    continue;
                }
                const double x = versus_snr ? c_.snr_db[p.s] : fs[p.f].a;
                const auto& o = out[i];
                note(o.exact.quality);
                note(o.bound.quality);
                sim.row() << x << k * o.sim.mean << "montecarlo" << "clean" << k * o.sim.standard_error;
                ana.row() << x << o.exact.value << to_string(o.exact.method) << to_string(o.exact.quality) << "";
                bnd.row() << x << k * o.bound.value << "lower_bound" << to_string(o.bound.quality) << "";
            }
            const std::string stem = "fig" + c_.figure + "_N" + std::to_string(n);
            save(sim, stem + "_simulated.csv");
            save(ana, stem + "_analytical.csv");
            save(bnd, stem + "_bound.csv");
        }
    }

    // Sum rate versus N for fixed and 1/N-scaled power.
    void figure3() {
        const auto fs = fadings();
        struct P {
            std::size_t f;
            int n;
            bool scaled;
        };
        std::vector<P> pts;
        for (std::size_t f = 0; f < fs.size(); ++f) {
            for (bool scaled : {false, true}) {
                for (int n : c_.antennas) {
                    pts.push_back({f, n, scaled});
                }
            }
        }
        std::vector<RateResult> out(pts.size());
        parallel_for(pts.size(), c_.threads, [&](std::size_t i) {
            const auto& p = pts[i];
            const double p_u = p.scaled ? c_.transmit_snr.front() / p.n : c_.transmit_snr.front();
            out[i] = sum_rate(system(p.n, p_u), fs[p.f].fading, 0, c_.formula);
        });
        for (std::size_t f = 0; f < fs.size(); ++f) {
            for (bool scaled : {false, true}) {
                Curve cv = curve(std::string(scaled ? "p_u = E/N" : "p_u fixed") + " a=" +
                                 csv::format_double(fs[f].a));
                for (std::size_t i = 0; i < pts.size(); ++i) {
                    if (pts[i].f != f || pts[i].scaled != scaled) {
                        continue;
                    }
                    note(out[i].quality);
                    cv.row() << pts[i].n << out[i].value << to_string(out[i].method) << to_string(out[i].quality)
                             << "";
                }
                save(cv, "fig3_" + tag("a", fs[f].a) + (scaled ? "_scaled.csv" : "_fixed.csv"));
            }
            Curve lim = curve("limit a=" + csv::format_double(fs[f].a));
            for (int n : c_.antennas) {
                lim.row() << n
                          << c_.users * power_scaled_limit_rate(fs[f].fading, 0, c_.user, c_.transmit_snr.front())
                          << "limit" << "clean" << "";
            }
            save(lim, "fig3_" + tag("a", fs[f].a) + "_limit.csv");
        }
    }

    // Required kappa versus R_inf.
    void figure4() {
        for (const auto& f : fadings()) {
            for (double eta : c_.eta) {
                Curve cv = curve("eta=" + csv::format_double(eta) + " a=" + csv::format_double(f.a));
                for (double r : c_.rate_limit) {
                    cv.row() << r << required_kappa_for_rate(f.fading, 0, c_.user, r, eta) << "bisection" << "clean"
                             << "";
                }
                save(cv, "fig4_" + tag("eta", eta) + "_" + tag("a", f.a) + ".csv");
            }
        }
    }

    // SER versus SNR, per N.
    void figure5() {
        const auto fs = fadings();
        const auto pts = grid(fs.size());
        const ModulationScheme mod = ModulationScheme::psk(c_.modulation_order);
        struct Out {
            Evaluation ex, ap, hi;
            Estimate sim;
        };
        std::vector<Out> out(pts.size());
        parallel_for(pts.size(), c_.threads, [&](std::size_t i) {
            const auto& p = pts[i];
            const SystemConfig sys = system(p.n, pu(p.s, p.n));
            const SinrModel m = make_sinr_model(sys, fs[p.f].fading, 0, c_.user);
            out[i].ex = ser_exact(m, mod);
            out[i].ap = ser_approx(m, mod);
            out[i].hi = ser_high_snr(m, mod);
            out[i].sim = estimate_ser(sys, fs[p.f].fading, mod, plan(i, 1), SerMode::semi_analytic, 0, c_.user);
        });
        for (std::size_t f = 0; f < fs.size(); ++f) {
            for (int n : c_.antennas) {
                Curve sim = curve("simulated N=" + std::to_string(n));
                Curve ex = curve("exact N=" + std::to_string(n));
                Curve ap = curve("approx N=" + std::to_string(n));
                Curve hi = curve("high snr N=" + std::to_string(n));
                for (std::size_t i = 0; i < pts.size(); ++i) {
                    if (pts[i].f != f || pts[i].n != n) {
                        continue;
                    }
                    const double x = c_.snr_db[pts[i].s];
                    const auto& o = out[i];
                    note(o.ex.quality);
                    note(o.ap.quality);
                    note(o.hi.quality);
                    sim.row() << x << o.sim.mean << "montecarlo" << "clean" << o.sim.standard_error;
                    ex.row() << x << o.ex.value << "exact" << to_string(o.ex.quality) << "";
                    ap.row() << x << o.ap.value << "approx" << to_string(o.ap.quality) << "";
                    hi.row() << x << o.hi.value << "high_snr" << to_string(o.hi.quality) << "";
                }
                const std::string stem = "fig5_" + tag("a", fs[f].a) + "_N" + std::to_string(n);
                save(sim, stem + "_simulated.csv");
                save(ex, stem + "_exact.csv");
                save(ap, stem + "_approx.csv");
                save(hi, stem + "_high_snr.csv");
            }
        }
    }

    // SER versus N, per cross gain.
    void figure6() {
        const auto fs = fadings();
        const auto pts = grid(fs.size());
        const ModulationScheme mod = ModulationScheme::psk(c_.modulation_order);
        std::vector<Evaluation> ex(pts.size()), ap(pts.size());
        parallel_for(pts.size(), c_.threads, [&](std::size_t i) {
            const auto& p = pts[i];
            const SinrModel m = make_sinr_model(system(p.n, pu(p.s, p.n)), fs[p.f].fading, 0, c_.user);
            ex[i] = ser_exact(m, mod);
            ap[i] = ser_approx(m, mod);
        });
        for (std::size_t f = 0; f < fs.size(); ++f) {
            for (std::size_t s = 0; s < c_.snr_db.size(); ++s) {
                Curve e = curve("exact a=" + csv::format_double(fs[f].a));
                Curve a = curve("approx a=" + csv::format_double(fs[f].a));
                for (std::size_t i = 0; i < pts.size(); ++i) {
                    if (pts[i].f != f || pts[i].s != s) {
                        continue;
                    }
                    note(ex[i].quality);
                    note(ap[i].quality);
                    e.row() << pts[i].n << ex[i].value << "exact" << to_string(ex[i].quality) << "";
                    a.row() << pts[i].n << ap[i].value << "approx" << to_string(ap[i].quality) << "";
                }
                const std::string stem = "fig6_" + tag("a", fs[f].a) + "_" + tag("snr", c_.snr_db[s]);
                save(e, stem + "_exact.csv");
                save(a, stem + "_approx.csv");
            }
        }
    }

    void figure7() {
        const auto dists = distributions();
        std::size_t i = 0;
        for (int r : c_.reuse) {
            for (int n : c_.antennas) {
                Curve cv = curve("cdf r=" + std::to_string(r) + " N=" + std::to_string(n));
                write_cdf(cv, dists[i++]);
                save(cv, "fig7_r" + std::to_string(r) + "_N" + std::to_string(n) + ".csv");
            }
        }
    }
};

}  // namespace

const char* to_string(Mode m) {
    for (const auto& [name, mode] : mode_names()) {
        if (mode == m) {
            return name.c_str();
        }
    }
    return "unknown";
}

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::runtime_error([&] {
          std::string msg = "invalid configuration:";
          for (const auto& p : problems) {
              msg += "\n  " + p;
          }
          return msg;
      }()),
      problems_(std::move(problems)) {}

std::vector<Setting> parse_settings(std::istream& in, const std::string& source) {
    std::vector<Setting> out;
    Errors errs;
    std::map<std::string, int> seen;
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.erase(hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const std::string origin = source + ":" + std::to_string(number);
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            errs.push_back(origin + ": expected 'key = value'");
            continue;
        }
        Setting s{trim(line.substr(0, eq)), trim(line.substr(eq + 1)), origin};
        if (s.key.empty()) {
            errs.push_back(origin + ": missing key");
            continue;
        }
        const auto [it, fresh] = seen.emplace(s.key, number);
        if (!fresh) {
            errs.push_back(origin + ": " + s.key + ": duplicate key (first set on line " +
                           std::to_string(it->second) + ")");
            continue;
        }
        out.push_back(std::move(s));
    }
    if (!errs.empty()) {
        throw ConfigError(std::move(errs));
    }
    return out;
}

std::vector<Setting> parse_settings_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError({path + ": cannot open configuration file"});
    }
    return parse_settings(in, path);
}

Setting parse_override(const std::string& text) {
    const auto eq = text.find('=');
    if (eq == std::string::npos || trim(text.substr(0, eq)).empty()) {
        throw ConfigError({"--set: expected key=value, got '" + text + "'"});
    }
    return {trim(text.substr(0, eq)), trim(text.substr(eq + 1)), "--set"};
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

ExperimentConfig resolve_config(const std::vector<Setting>& settings) {
    ExperimentConfig c;
    Errors errs;
    for (const auto& s : settings) {
        const auto it = std::find_if(keys().begin(), keys().end(), [&](const KeyDesc& k) { return s.key == k.name; });
        if (it == keys().end()) {
            errs.push_back(s.origin + ": unknown key '" + s.key + "'");
            continue;
        }
        it->parse(c, s, errs);
    }
    validate(c, errs);
    if (!errs.empty()) {
        throw ConfigError(std::move(errs));
    }
    c.transmit_snr.clear();
    for (double db : c.snr_db) {
        c.transmit_snr.push_back(db_to_linear(db));
    }
    return c;
}

std::string serialize(const ExperimentConfig& config) {
    std::string out;
    for (const auto& k : keys()) {
        out += std::string(k.name) + " = " + k.format(config) + "\n";
    }
    return out;
}

std::vector<Setting> figure_settings(const std::string& figure) {
    if (!valid_figure(figure)) {
        throw ConfigError({"figure: unknown figure id '" + figure + "' (expected 1..7 or table1)"});
    }
    std::vector<Setting> s{{"mode", "figure", "figure defaults"}, {"figure", figure, "figure defaults"}};
    auto add = [&](const char* k, const char* v) { s.push_back({k, v, "figure " + figure + " defaults"}); };
    add("cells", "4");
    add("users", "10");
    if (figure == "1") {
        add("antennas", "10,20,40,60,80,100");
        add("snr_db", "-10:5:30");
        add("cross_gain", "0.1");
        add("trials", "2000");
    } else if (figure == "2") {
        add("antennas", "10,50,500");
        add("snr_db", "10");
        add("cross_gain", "0.05:0.05:1");
        add("trials", "1000");
    } else if (figure == "3") {
        add("antennas", "10,20,50:50:500");
        add("snr_db", "10");
        add("cross_gain", "0.1,0.3,0.5");
    } else if (figure == "4") {
        add("rate_limit", "1:0.25:6");
        add("eta", "0.8,0.9");
        add("cross_gain", "0.1,0.5");
    } else if (figure == "5") {
        add("antennas", "15,20");
        add("snr_db", "0:5:40");
        add("cross_gain", "0.1");
        add("modulation_order", "4");
        add("trials", "2000");
    } else if (figure == "6") {
        add("antennas", "10:5:100");
        add("snr_db", "10");
        add("cross_gain", "0.1,0.2,0.3,0.4");
        add("modulation_order", "4");
    } else {
        add("antennas", "20,100");
        add("snr_db", "10");
        add("reuse", "1,3,7");
    }
    return s;
}

RunReport run_experiment(const ExperimentConfig& config) {
    Runner runner(config);
    return runner.run(config.mode);
}

RunReport run_figure(const std::string& figure, const std::vector<Setting>& overrides) {
    std::vector<Setting> all = figure_settings(figure);
    all.insert(all.end(), overrides.begin(), overrides.end());
    ExperimentConfig c = resolve_config(all);
    c.mode = Mode::figure;
    c.figure = figure;
    return run_experiment(c);
}

}  // namespace mumimo
