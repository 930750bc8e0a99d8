#pragma once

// Numerical minimization of the exact expected absorption time over step
// distributions: exponentiated-gradient descent on log-weights against the
// O(n^2) exact objective, over the full simplex or the power-of-two block
// family, plus a side-by-side strategy comparison table.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "blindsearch/dist.hpp"
#include "blindsearch/errors.hpp"
#include "blindsearch/exact.hpp"
#include "blindsearch/json.hpp"
#include "blindsearch/potential.hpp"

namespace blindsearch {

constexpr int kDefaultOptimizeIters = 300;
constexpr int kOptimizeCap = 4096;

struct OptimizeReport {
    StepDistribution best_dist;
    double best_value = 0.0;
    std::vector<std::pair<int, double>> trace;  // (iteration, best objective so far)
    std::map<std::string, double> baseline_values;
    int iterations = 0;
    bool converged = false;
    std::uint64_t seed = 0;
};

struct StrategyRow {
    std::string name;
    double e_value = 0.0;
    double upper = 0.0;
    double lower = 0.0;
};

namespace detail {

// Exact objective; the deferred recurrence is the cheaper of the equivalent
// exact routes, and optimization stays far below the module size cap.
inline double exact_objective(const StepDistribution& d) {
    return deferred_expectation(d).e_value;
}

constexpr double kFdStep = 1e-4;
constexpr double kEta0 = 0.5;
constexpr double kMu1Floor = 1e-9;
constexpr int kStopWindow = 50;
constexpr double kStopRelImprove = 1e-6;
constexpr double kMaxLogStep = 10.0;  // per-coordinate update clamp, keeps exp() sane

// Exponentiated-gradient descent over the raw masses `w` (zero entries are
// frozen), where `expand` maps the compact parameter vector to full weights
// on [1, n]. Coordinate 0 always corresponds to mu(1) and is floored.
template <typename Expand>
struct EgState {
    int n;
    Expand expand;
    std::vector<double> w;

    StepDistribution candidate() const {
        std::vector<double> full = expand(w);
        double sum = 0.0;
        for (double x : full) sum += x;
        if (full[0] < kMu1Floor * sum) full[0] = kMu1Floor * sum;
        return make_custom(n, full);
    }
};

}  // namespace detail

namespace detail {

template <typename Expand>
inline OptimizeReport eg_minimize(int n, std::vector<double> w0, Expand expand, int iters,
                                  std::uint64_t seed, int workers,
                                  std::map<std::string, double> baselines) {
    EgState<Expand> state{n, expand, std::move(w0)};
    const std::size_t dim = state.w.size();

    OptimizeReport report;
    report.seed = seed;
    report.baseline_values = baselines;

    StepDistribution best_dist = state.candidate();
    double best = exact_objective(best_dist);
    report.trace.emplace_back(0, best);

    double window_anchor = best;
    int performed = 0;
    for (int t = 0; t < iters; ++t) {
        const StepDistribution base = state.candidate();
        const double f_base = exact_objective(base);

        // Forward finite differences on the log-weights, one coordinate each.
        std::vector<double> grad(dim, 0.0);
        auto grad_chunk = [&](std::size_t lo, std::size_t hi) {
            for (std::size_t j = lo; j < hi; ++j) {
                if (state.w[j] == 0.0) continue;
                EgState<Expand> probe = state;
                probe.w[j] *= std::exp(kFdStep);
                grad[j] = (exact_objective(probe.candidate()) - f_base) / kFdStep;
            }
        };
        if (workers <= 1) {
            grad_chunk(0, dim);
        } else {
            std::vector<std::thread> pool;
            const std::size_t chunk = (dim + workers - 1) / workers;
            for (int wk = 0; wk < workers; ++wk) {
                const std::size_t lo = wk * chunk;
                const std::size_t hi = std::min(dim, lo + chunk);
                if (lo >= hi) break;
                pool.emplace_back(grad_chunk, lo, hi);
            }
            for (auto& th : pool) th.join();
        }

        const double eta = kEta0 / std::sqrt(1.0 + t);
        double wmax = 0.0;
        for (std::size_t j = 0; j < dim; ++j) {
            if (state.w[j] == 0.0) continue;
            const double step = std::clamp(-eta * grad[j], -kMaxLogStep, kMaxLogStep);
            state.w[j] *= std::exp(step);
            wmax = std::max(wmax, state.w[j]);
        }
        for (double& x : state.w) x /= wmax;  // rescale only; the simplex point is unchanged

        ++performed;
        const StepDistribution cand = state.candidate();
        const double f = exact_objective(cand);
        if (f < best) {
            best = f;
            best_dist = cand;
        }
        report.trace.emplace_back(performed, best);

        if (performed % kStopWindow == 0) {
            if (window_anchor - best < kStopRelImprove * std::max(1.0, std::abs(best))) {
                report.converged = true;
                break;
            }
            window_anchor = best;
        }
    }
    report.iterations = performed;

    // A baseline that beats the search wins the report.
    for (const auto& [name, value] : report.baseline_values) {
        if (value < best) {
            best = value;
            best_dist = parse_dist_spec(name == "equal_mass" ? "pow2" : name, n);
        }
    }
    report.best_dist = best_dist;
    report.best_value = best;
    return report;
}

}  // namespace detail

/// Minimizes the exact expectation over all of the n-simplex, starting from
/// the harmonic law. The named baselines are evaluated exactly and the
/// returned optimum never loses to them.
inline OptimizeReport optimize_full_simplex(int n, int iters = kDefaultOptimizeIters,
                                            std::uint64_t seed = 0, int workers = 1) {
    if (n < 1) fail(Errc::bad_input, "n must be >= 1");
    if (n > kOptimizeCap)
        fail(Errc::cap_exceeded, "optimization capped at n <= " + std::to_string(kOptimizeCap));
    if (iters < 1) fail(Errc::bad_input, "iters must be >= 1");
    if (workers < 1) fail(Errc::bad_input, "workers must be >= 1");

    std::map<std::string, double> baselines;
    baselines["harmonic"] = detail::exact_objective(harmonic(n));
    baselines["pow2"] = detail::exact_objective(pow2(n));
    baselines["uniform"] = detail::exact_objective(uniform(n));

    const StepDistribution start = harmonic(n);
    std::vector<double> w0(start.weights.begin() + 1, start.weights.end());
    auto expand = [](const std::vector<double>& w) { return w; };
    return detail::eg_minimize(n, std::move(w0), expand, iters, seed, workers,
                               std::move(baselines));
}

/// Minimizes over laws supported on the powers of two, parameterized by one
/// mass per dyadic block, starting from the equal-mass point.
inline OptimizeReport optimize_interval_weights(int n, int iters = kDefaultOptimizeIters,
                                                std::uint64_t seed = 0, int workers = 1) {
    if (n < 1) fail(Errc::bad_input, "n must be >= 1");
    if (n > kOptimizeCap)
        fail(Errc::cap_exceeded, "optimization capped at n <= " + std::to_string(kOptimizeCap));
    if (iters < 0) fail(Errc::bad_input, "iters must be >= 0");
    if (workers < 1) fail(Errc::bad_input, "workers must be >= 1");

    const StepDistribution eq = pow2(n);
    std::map<std::string, double> baselines;
    baselines["equal_mass"] = detail::exact_objective(eq);

    int levels = 0;
    while ((1LL << (levels + 1)) <= n) ++levels;
    std::vector<double> p0(static_cast<std::size_t>(levels) + 1, 0.0);
    for (int i = 0; i <= levels; ++i) p0[i] = eq.mu(static_cast<int>(1LL << i));

    auto expand = [n, levels](const std::vector<double>& p) {
        std::vector<double> full(static_cast<std::size_t>(n), 0.0);
        for (int i = 0; i <= levels; ++i) full[(1LL << i) - 1] = p[i];
        return full;
    };
    if (iters == 0) {
        OptimizeReport report;
        report.seed = seed;
        report.baseline_values = baselines;
        report.best_dist = eq;
        report.best_value = baselines["equal_mass"];
        report.trace.emplace_back(0, report.best_value);
        report.iterations = 0;
        report.converged = false;
        return report;
    }
    return detail::eg_minimize(n, std::move(p0), expand, iters, seed, workers,
                               std::move(baselines));
}

/// One row per named strategy: exact expectation plus both certified bounds.
inline std::vector<StrategyRow> compare_strategies(int n, const std::vector<std::string>& names) {
    std::vector<StrategyRow> rows;
    rows.reserve(names.size());
    for (const std::string& name : names) {
        const StepDistribution d = parse_dist_spec(name, n);
        StrategyRow row;
        row.name = name;
        row.e_value = hitting_profile(d).e_value;
        row.upper = upper_bound(d);
        row.lower = d.mu1_positive ? potential_lower_bound(d) : 0.0;
        rows.push_back(std::move(row));
    }
    return rows;
}

inline json to_json(const OptimizeReport& r) {
    json trace = json::array();
    for (const auto& [it, obj] : r.trace) trace.push_back({{"iteration", it}, {"objective", obj}});
    std::vector<double> best_w(r.best_dist.weights.begin() + 1, r.best_dist.weights.end());
    return json{{"best_value", r.best_value},
                {"best_weights", best_w},
                {"n", r.best_dist.n},
                {"trace", trace},
                {"baseline_values", r.baseline_values},
                {"iterations", r.iterations},
                {"converged", r.converged},
                {"seed", r.seed}};
}

inline std::string trace_csv(const OptimizeReport& r) {
    std::ostringstream out;
    out.precision(17);
    out << "iteration,objective\n";
    for (const auto& [it, obj] : r.trace) out << it << ',' << obj << '\n';
    return out.str();
}

inline json to_json(const std::vector<StrategyRow>& rows) {
    json out = json::array();
    for (const auto& r : rows)
        out.push_back({{"name", r.name},
                       {"e_value", r.e_value},
                       {"upper_bound", r.upper},
                       {"lower_bound", r.lower}});
    return out;
}

}  // namespace blindsearch
