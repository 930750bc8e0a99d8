#pragma once

// Transition kernels of the token process R and the deferred size process S,
// single-run simulation, and reproducible multi-threaded Monte Carlo
// estimation of the expected absorption time.

#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "blindsearch/dist.hpp"
#include "blindsearch/errors.hpp"
#include "blindsearch/json.hpp"
#include "blindsearch/kahan.hpp"
#include "blindsearch/rng.hpp"

namespace blindsearch {

enum class Process { R, S };

inline char process_tag(Process p) { return p == Process::R ? 'R' : 'S'; }

struct TransitionRow {
    int from_state = 0;
    std::vector<std::pair<int, double>> entries;  // (to_state, probability), ascending, nonzero
};

struct SimSummary {
    Process process = Process::R;
    int n = 0;
    std::int64_t runs = 0;
    double mean = 0.0;
    double std_error = 0.0;
    std::int64_t censored = 0;
    std::uint64_t master_seed = 0;
    std::int64_t max_steps = 0;
};

/// Row a of the R kernel: jump to a-d with probability mu(d) for d <= a,
/// stay with the remaining mass. Zero-probability entries are omitted.
inline TransitionRow r_transition_row(const StepDistribution& dist, int a) {
    if (a < 0 || a > dist.n) fail(Errc::out_of_range, "state outside [0, n]");
    TransitionRow row;
    row.from_state = a;
    if (a == 0) {
        row.entries.emplace_back(0, 1.0);
        return row;
    }
    for (int target = 0; target < a; ++target) {
        const double p = dist.mu(a - target);
        if (p > 0.0) row.entries.emplace_back(target, p);
    }
    const double stay = 1.0 - dist.cdf[a];
    if (stay > 0.0) row.entries.emplace_back(a, stay);
    return row;
}

/// Row s of the S kernel: absorb with F(s)/s, land on s' < s with
/// (mu(s'+1) + mu(s-s')) * s'/s, stay with 1 - F(s).
inline TransitionRow s_transition_row(const StepDistribution& dist, int s) {
    if (s < 0 || s > dist.n) fail(Errc::out_of_range, "state outside [0, n]");
    TransitionRow row;
    row.from_state = s;
    if (s == 0) {
        row.entries.emplace_back(0, 1.0);
        return row;
    }
    const double inv_s = 1.0 / s;
    const double absorb = dist.cdf[s] * inv_s;
    if (absorb > 0.0) row.entries.emplace_back(0, absorb);
    for (int sp = 1; sp < s; ++sp) {
        const double p = (dist.mu(sp + 1) + dist.mu(s - sp)) * (sp * inv_s);
        if (p > 0.0) row.entries.emplace_back(sp, p);
    }
    const double stay = 1.0 - dist.cdf[s];
    if (stay > 0.0) row.entries.emplace_back(s, stay);
    return row;
}

/// Expected steps to absorption from every state, by back-substitution on
/// the (lower-triangular) kernel rows. Independent of the recurrence-based
/// routes in the exact computations; used to cross-examine them.
inline std::vector<double> solve_absorption_times(const StepDistribution& dist, Process proc) {
    std::vector<double> t(static_cast<std::size_t>(dist.n) + 1, 0.0);
    for (int s = 1; s <= dist.n; ++s) {
        const TransitionRow row =
            proc == Process::R ? r_transition_row(dist, s) : s_transition_row(dist, s);
        KahanSum acc;
        acc.add(1.0);
        double stay = 0.0;
        for (const auto& [to, p] : row.entries) {
            if (to == s)
                stay = p;
            else if (to > 0)
                acc.add(p * t[to]);
        }
        t[s] = acc.value() / (1.0 - stay);
    }
    return t;
}

/// One transition from `state`. Process R consumes one variate; process S
/// consumes a second variate on steps whose size draw fits (thresholds
/// ordered accept, finish, reject), so trajectories are reproducible from
/// the rng state. State 0 is absorbing and consumes nothing.
inline int step_once(const StepDistribution& dist, Process proc, int state, Rng& rng) {
    if (state == 0) return 0;
    const int d = sample(dist, rng);
    if (proc == Process::R) return d <= state ? state - d : state;
    const int s = state;
    if (d > s) return s;
    const double v = rng.next_double();
    const double accept = static_cast<double>(s - d) / s;
    if (v < accept) return s - d;
    if (v < accept + 1.0 / s) return 0;
    return d - 1;
}

/// One trajectory until absorption at 0 or censoring at max_steps.
inline std::pair<std::int64_t, bool> simulate_run(const StepDistribution& dist, Process proc,
                                                  int start, Rng& rng, std::int64_t max_steps) {
    if (start < 0 || start > dist.n) fail(Errc::out_of_range, "start outside [0, n]");
    if (max_steps < 1) fail(Errc::bad_input, "max_steps must be >= 1");
    int state = start;
    std::int64_t steps = 0;
    while (state != 0 && steps < max_steps) {
        state = step_once(dist, proc, state, rng);
        ++steps;
    }
    return {steps, state == 0};
}

/// Smallest k with 2^k >= n + 1, scaled to a generous censoring horizon.
inline std::int64_t default_max_steps(int n) {
    int k = 0;
    while ((1LL << k) < static_cast<long long>(n) + 1) ++k;
    return 1000000LL * std::max(1, k);
}

/// Monte Carlo estimate of the expected absorption time. Process R starts
/// uniform on [1, n] (drawn first from the run's own stream); process S
/// starts at n. Run i uses the stream derived from (master_seed, i), so the
/// summary is a pure function of the arguments regardless of worker count.
inline SimSummary estimate_expectation(const StepDistribution& dist, Process proc,
                                       std::int64_t runs, std::uint64_t master_seed,
                                       int workers = 1, std::int64_t max_steps = -1) {
    if (runs < 1) fail(Errc::bad_input, "runs must be >= 1");
    if (workers < 1) fail(Errc::bad_input, "workers must be >= 1");
    if (max_steps < 0) max_steps = default_max_steps(dist.n);

    std::vector<std::int64_t> steps(static_cast<std::size_t>(runs));
    std::vector<char> absorbed(static_cast<std::size_t>(runs));

    auto worker_body = [&](std::int64_t lo, std::int64_t hi) {
        for (std::int64_t i = lo; i < hi; ++i) {
            Rng rng = run_rng(master_seed, static_cast<std::uint64_t>(i));
            const int start = proc == Process::R ? rng.next_index(dist.n) : dist.n;
            const auto [count, done] = simulate_run(dist, proc, start, rng, max_steps);
            steps[i] = count;
            absorbed[i] = done ? 1 : 0;
        }
    };

    if (workers == 1) {
        worker_body(0, runs);
    } else {
        const std::int64_t chunk = (runs + workers - 1) / workers;
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) {
            const std::int64_t lo = w * chunk;
            const std::int64_t hi = std::min<std::int64_t>(runs, lo + chunk);
            if (lo >= hi) break;
            pool.emplace_back(worker_body, lo, hi);
        }
        for (auto& th : pool) th.join();
    }

    // Fixed-order reduction over run indices; censored runs never enter the mean.
    std::int64_t n_absorbed = 0;
    KahanSum total;
    for (std::int64_t i = 0; i < runs; ++i) {
        if (absorbed[i]) {
            ++n_absorbed;
            total.add(static_cast<double>(steps[i]));
        }
    }
    if (n_absorbed == 0) fail(Errc::all_censored, "every run hit the step limit");
    const double mean = total.value() / static_cast<double>(n_absorbed);

    KahanSum sq;
    for (std::int64_t i = 0; i < runs; ++i) {
        if (absorbed[i]) {
            const double dev = static_cast<double>(steps[i]) - mean;
            sq.add(dev * dev);
        }
    }
    const double sample_var = n_absorbed > 1 ? sq.value() / static_cast<double>(n_absorbed - 1) : 0.0;

    SimSummary out;
    out.process = proc;
    out.n = dist.n;
    out.runs = runs;
    out.mean = mean;
    out.std_error = std::sqrt(sample_var / static_cast<double>(runs));
    out.censored = runs - n_absorbed;
    out.master_seed = master_seed;
    out.max_steps = max_steps;
    return out;
}

inline json to_json(const SimSummary& s) {
    return json{{"process", std::string(1, process_tag(s.process))},
                {"n", s.n},
                {"runs", s.runs},
                {"mean", s.mean},
                {"std_error", s.std_error},
                {"censored", s.censored},
                {"master_seed", s.master_seed},
                {"max_steps", s.max_steps}};
}

inline std::string sim_csv(const SimSummary& s) {
    std::ostringstream out;
    out << "process,n,runs,mean,std_error,censored,master_seed\n";
    out << process_tag(s.process) << ',' << s.n << ',' << s.runs << ',';
    out.precision(17);
    out << s.mean << ',' << s.std_error << ',' << s.censored << ',' << s.master_seed << '\n';
    return out.str();
}

}  // namespace blindsearch
