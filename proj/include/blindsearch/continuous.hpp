#pragma once

// Scale-invariant blind search on the unit interval: the log-uniform step
// sampler, the random-sign search loop against |x - x0|, halving statistics,
// and the precision-scaling study with its least-squares summary.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "blindsearch/errors.hpp"
#include "blindsearch/json.hpp"
#include "blindsearch/kahan.hpp"
#include "blindsearch/rng.hpp"

namespace blindsearch {

struct ContinuousConfig {
    double epsilon = 0.0;  // minimum perturbation size, in (0, 1)
    double p = 0.0;        // precision, ln(1/epsilon)
    double x0 = 0.3;       // optimum location
    std::int64_t max_steps = 1000000;
};

struct ContinuousRunStats {
    std::int64_t steps_to_success = 0;  // first t with |x_t - x0| < 2 epsilon
    std::int64_t halving_events = 0;    // accepted moves that at least halved the distance
    std::int64_t step_count_total = 0;
    bool succeeded = false;
};

struct PrecisionRow {
    double epsilon = 0.0;
    double p = 0.0;
    double mean_steps = 0.0;
    double std_error = 0.0;
    double halving_rate = 0.0;
};

struct PrecisionFit {
    double coefficient = 0.0;   // c in mean ~ c * ln(1/eps) * log2(1/eps)
    double rel_residual = 0.0;  // ||y - c x||_2 / ||y||_2 over the table
};

inline ContinuousConfig make_continuous_config(double epsilon, double x0 = 0.3,
                                               std::int64_t max_steps = 1000000) {
    if (!(epsilon > 0.0) || !(epsilon < 1.0))
        fail(Errc::bad_input, "epsilon must lie in (0, 1)");
    if (!(x0 >= 0.0) || !(x0 <= 1.0)) fail(Errc::bad_input, "optimum must lie in [0, 1]");
    if (max_steps < 1) fail(Errc::bad_input, "max_steps must be >= 1");
    ContinuousConfig cfg;
    cfg.epsilon = epsilon;
    cfg.p = std::log(1.0 / epsilon);
    cfg.x0 = x0;
    cfg.max_steps = max_steps;
    return cfg;
}

/// d = exp(-p u): log-uniform on [exp(-p), 1], density 1/(p d).
inline double scale_invariant_from_uniform(double p, double u) {
    if (!(p > 0.0)) fail(Errc::bad_input, "precision must be positive");
    return std::exp(-p * u);
}

inline double sample_scale_invariant(double p, Rng& rng) {
    return scale_invariant_from_uniform(p, rng.next_double());
}

/// One search step: draw a size, then a sign; move only to an in-range point
/// strictly closer to the optimum. Consumes exactly two variates.
inline double continuous_step(const ContinuousConfig& cfg, double x, Rng& rng) {
    const double d = sample_scale_invariant(cfg.p, rng);
    const double sign = rng.next_double() < 0.5 ? -1.0 : 1.0;
    const double cand = x + sign * d;
    if (cand < 0.0 || cand > 1.0) return x;
    return std::abs(cand - cfg.x0) < std::abs(x - cfg.x0) ? cand : x;
}

/// Full run from a uniform start until the distance falls below 2 epsilon
/// or the step budget runs out.
inline ContinuousRunStats simulate_continuous(const ContinuousConfig& cfg, Rng& rng) {
    ContinuousRunStats st;
    double x = rng.next_double();
    const double goal = 2.0 * cfg.epsilon;
    if (std::abs(x - cfg.x0) < goal) {
        st.succeeded = true;
        return st;
    }
    for (std::int64_t t = 1; t <= cfg.max_steps; ++t) {
        const double before = std::abs(x - cfg.x0);
        x = continuous_step(cfg, x, rng);
        const double after = std::abs(x - cfg.x0);
        ++st.step_count_total;
        if (after <= 0.5 * before) ++st.halving_events;
        if (after < goal) {
            st.steps_to_success = t;
            st.succeeded = true;
            break;
        }
    }
    return st;
}

/// One row per epsilon: success-time statistics plus the per-step halving
/// rate, using the same per-run seeded-stream contract as the discrete
/// estimators (stream index = row * runs + run), so the table is a pure
/// function of its arguments for any worker count. Rows where no run
/// succeeded report NaN means (unreachable at the default step budget).
inline std::vector<PrecisionRow> precision_scaling(const std::vector<double>& eps_list,
                                                   std::int64_t runs, std::uint64_t seed,
                                                   int workers = 1, double x0 = 0.3,
                                                   std::int64_t max_steps = 1000000) {
    if (runs < 1) fail(Errc::bad_input, "runs must be >= 1");
    if (workers < 1) fail(Errc::bad_input, "workers must be >= 1");
    for (double eps : eps_list)
        if (!(eps > 0.0) || !(eps < 0.25))
            fail(Errc::bad_input, "scaling study needs epsilon in (0, 1/4)");

    std::vector<PrecisionRow> table;
    table.reserve(eps_list.size());
    for (std::size_t row = 0; row < eps_list.size(); ++row) {
        const ContinuousConfig cfg = make_continuous_config(eps_list[row], x0, max_steps);
        std::vector<ContinuousRunStats> stats(static_cast<std::size_t>(runs));
        auto body = [&](std::int64_t lo, std::int64_t hi) {
            for (std::int64_t i = lo; i < hi; ++i) {
                Rng rng = run_rng(seed, static_cast<std::uint64_t>(row) * runs + i);
                stats[i] = simulate_continuous(cfg, rng);
            }
        };
        if (workers == 1) {
            body(0, runs);
        } else {
            const std::int64_t chunk = (runs + workers - 1) / workers;
            std::vector<std::thread> pool;
            for (int w = 0; w < workers; ++w) {
                const std::int64_t lo = w * chunk;
                const std::int64_t hi = std::min<std::int64_t>(runs, lo + chunk);
                if (lo >= hi) break;
                pool.emplace_back(body, lo, hi);
            }
            for (auto& th : pool) th.join();
        }

        std::int64_t succeeded = 0, halvings = 0, steps_total = 0;
        KahanSum sum;
        for (const auto& st : stats) {
            halvings += st.halving_events;
            steps_total += st.step_count_total;
            if (st.succeeded) {
                ++succeeded;
                sum.add(static_cast<double>(st.steps_to_success));
            }
        }
        PrecisionRow out;
        out.epsilon = cfg.epsilon;
        out.p = cfg.p;
        if (succeeded > 0) {
            out.mean_steps = sum.value() / static_cast<double>(succeeded);
            KahanSum sq;
            for (const auto& st : stats)
                if (st.succeeded) {
                    const double dev = static_cast<double>(st.steps_to_success) - out.mean_steps;
                    sq.add(dev * dev);
                }
            const double var =
                succeeded > 1 ? sq.value() / static_cast<double>(succeeded - 1) : 0.0;
            out.std_error = std::sqrt(var / static_cast<double>(runs));
        } else {
            out.mean_steps = std::numeric_limits<double>::quiet_NaN();
            out.std_error = std::numeric_limits<double>::quiet_NaN();
        }
        out.halving_rate =
            steps_total > 0 ? static_cast<double>(halvings) / static_cast<double>(steps_total)
                            : 0.0;
        table.push_back(out);
    }
    return table;
}

/// Least-squares fit of mean steps against x = ln(1/eps) * log2(1/eps),
/// through the origin: c = sum(x y)/sum(x^2).
inline PrecisionFit fit_precision_scaling(const std::vector<PrecisionRow>& table) {
    if (table.empty()) fail(Errc::bad_input, "cannot fit an empty table");
    KahanSum xy, xx, yy, rr;
    for (const auto& row : table) {
        const double x = row.p * (row.p / std::log(2.0));  // p * log2(1/eps)
        xy.add(x * row.mean_steps);
        xx.add(x * x);
        yy.add(row.mean_steps * row.mean_steps);
    }
    PrecisionFit fit;
    fit.coefficient = xy.value() / xx.value();
    for (const auto& row : table) {
        const double x = row.p * (row.p / std::log(2.0));
        const double r = row.mean_steps - fit.coefficient * x;
        rr.add(r * r);
    }
    fit.rel_residual = std::sqrt(rr.value() / yy.value());
    return fit;
}

inline json to_json(const std::vector<PrecisionRow>& table) {
    json out = json::array();
    for (const auto& r : table)
        out.push_back({{"epsilon", r.epsilon},
                       {"p", r.p},
                       {"mean_steps", r.mean_steps},
                       {"std_error", r.std_error},
                       {"halving_rate", r.halving_rate}});
    return out;
}

inline std::string continuous_csv(const std::vector<PrecisionRow>& table) {
    std::ostringstream out;
    out.precision(17);
    out << "epsilon,p,mean_steps,std_error,halving_rate\n";
    for (const auto& r : table)
        out << r.epsilon << ',' << r.p << ',' << r.mean_steps << ',' << r.std_error << ','
            << r.halving_rate << '\n';
    return out.str();
}

}  // namespace blindsearch
