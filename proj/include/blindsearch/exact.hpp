#pragma once

// Exact expectations for the token process: the O(n^2) dynamic programs for
// the fixed-start hitting times T_a and the uniform-start values A^(s)/B^(s),
// the exponential-size closed-form oracle, dyadic interval masses, and the
// reciprocal-mass upper bound.

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "blindsearch/dist.hpp"
#include "blindsearch/errors.hpp"
#include "blindsearch/json.hpp"
#include "blindsearch/kahan.hpp"

namespace blindsearch {

constexpr int kDefaultExactCap = 32768;

struct HittingProfile {
    int n = 0;
    std::vector<double> t;          // t[a] = expected steps from fixed start a; t[0] = 0
    std::vector<double> a_uniform;  // a_uniform[s] = expected steps from uniform start on [1,s]
    double e_value = 0.0;           // a_uniform[n]
    bool finite = false;
};

struct DeferredTable {
    int n = 0;
    std::vector<double> b;  // b[s] = expected steps of the deferred process from s; b[0] = 0
    double e_value = 0.0;   // b[n]
    bool finite = false;
};

namespace detail {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Expected remaining steps of the size-s deferred state, solved bottom-up:
//   X^(s) = (1/F(s)) * (1 + sum_{1<=s'<s} (mu(s'+1) + mu(s-s')) * (s'/s) * X^(s'))
// Requires mu(1) > 0 so every F(s) is positive.
inline std::vector<double> deferred_dp(const StepDistribution& dist) {
    const int n = dist.n;
    std::vector<double> x(static_cast<std::size_t>(n) + 1, 0.0);
    for (int s = 1; s <= n; ++s) {
        KahanSum acc;
        acc.add(1.0);
        const double inv_s = 1.0 / s;
        for (int sp = 1; sp < s; ++sp) {
            const double w = (dist.mu(sp + 1) + dist.mu(s - sp)) * (sp * inv_s);
            if (w > 0.0) acc.add(w * x[sp]);
        }
        x[s] = acc.value() / dist.cdf[s];
    }
    return x;
}

inline void check_cap(int n, int cap) {
    if (n > cap)
        fail(Errc::cap_exceeded, "n=" + std::to_string(n) + " exceeds the exact-computation cap " +
                                     std::to_string(cap));
}

}  // namespace detail

/// Expected absorption times from every start, plus uniform-start averages.
/// A^(s) is produced by two independent routes (prefix means of T and the
/// deferred recurrence) and the routes must agree to 1e-9 relative.
inline HittingProfile hitting_profile(const StepDistribution& dist,
                                      int cap = kDefaultExactCap) {
    detail::check_cap(dist.n, cap);
    const int n = dist.n;
    HittingProfile out;
    out.n = n;
    out.t.assign(static_cast<std::size_t>(n) + 1, 0.0);
    out.a_uniform.assign(static_cast<std::size_t>(n) + 1, 0.0);

    if (!dist.mu1_positive) {
        for (int a = 1; a <= n; ++a) out.t[a] = detail::kInf;
        for (int s = 1; s <= n; ++s) out.a_uniform[s] = detail::kInf;
        out.e_value = detail::kInf;
        out.finite = false;
        return out;
    }

    for (int a = 1; a <= n; ++a) {
        KahanSum acc;
        acc.add(1.0);
        for (int d = 1; d < a; ++d) {  // d = a lands on 0 and contributes nothing
            const double m = dist.mu(d);
            if (m > 0.0) acc.add(m * out.t[a - d]);
        }
        out.t[a] = acc.value() / dist.cdf[a];
    }

    // Route 1: running prefix means of t (stable even near the double ceiling).
    double mean = 0.0;
    for (int s = 1; s <= n; ++s) {
        mean += (out.t[s] - mean) / s;
        out.a_uniform[s] = mean;
    }

    // Route 2: the deferred recurrence; the two must coincide.
    const std::vector<double> x = detail::deferred_dp(dist);
    for (int s = 1; s <= n; ++s) {
        const double scale = std::max(1.0, std::abs(out.a_uniform[s]));
        if (std::abs(out.a_uniform[s] - x[s]) > 1e-9 * scale)
            fail(Errc::consistency,
                 "uniform-start routes disagree at s=" + std::to_string(s));
    }

    out.e_value = out.a_uniform[n];
    out.finite = true;
    return out;
}

/// Expected absorption time of the deferred size process started at each s.
inline DeferredTable deferred_expectation(const StepDistribution& dist,
                                          int cap = kDefaultExactCap) {
    detail::check_cap(dist.n, cap);
    DeferredTable out;
    out.n = dist.n;
    if (!dist.mu1_positive) {
        out.b.assign(static_cast<std::size_t>(dist.n) + 1, detail::kInf);
        out.b[0] = 0.0;
        out.e_value = detail::kInf;
        out.finite = false;
        return out;
    }
    out.b = detail::deferred_dp(dist);
    out.e_value = out.b[dist.n];
    out.finite = true;
    return out;
}

/// Uniform-start expectation summed over every nonempty increasing chain
///   a_1 < ... < a_l in [1, n]:  value = prod mu(a_{k+1} - a_k) / prod F(a_k).
/// Exponential in n; serves as an independent oracle for the DP routes.
inline double closed_form_oracle(const StepDistribution& dist) {
    if (dist.n > 20) fail(Errc::too_large, "closed form limited to n <= 20");
    if (!dist.mu1_positive) fail(Errc::mu1_zero, "closed form needs mu(1) > 0");
    KahanSum total;
    // Depth-first chain extension; value of a chain ending at m is v.
    struct Dfs {
        const StepDistribution& dist;
        KahanSum& total;
        void walk(int m, double v) const {
            total.add(v);
            for (int next = m + 1; next <= dist.n; ++next) {
                const double w = dist.mu(next - m);
                if (w > 0.0) walk(next, v * w / dist.cdf[next]);
            }
        }
    };
    const Dfs dfs{dist, total};
    for (int a = 1; a <= dist.n; ++a) dfs.walk(a, 1.0 / dist.cdf[a]);
    return total.value() / dist.n;
}

/// Mass per dyadic block: p_i = mu([2^i, min(2^{i+1}-1, n)]) for i = 0..L,
/// L = floor(log2 n). The final block is truncated at n.
inline std::vector<double> interval_masses(const StepDistribution& dist) {
    const int n = dist.n;
    int levels = 0;
    while ((1LL << (levels + 1)) <= n) ++levels;
    std::vector<double> p(static_cast<std::size_t>(levels) + 1, 0.0);
    for (int i = 0; i <= levels; ++i) {
        const long long lo = 1LL << i;
        const long long hi = i < levels ? (1LL << (i + 1)) - 1 : n;
        KahanSum acc;
        for (long long d = lo; d <= hi; ++d) acc.add(dist.mu(static_cast<int>(d)));
        p[i] = acc.value();
    }
    return p;
}

/// 3/p_0 + sum_{1<=i<=L-1} 2/p_i computed from precomputed block masses;
/// +infinity when a required block carries no mass.
inline double upper_bound_from_masses(const std::vector<double>& p) {
    const int levels = static_cast<int>(p.size()) - 1;
    if (p[0] <= 0.0) return detail::kInf;
    double ub = 3.0 / p[0];
    for (int i = 1; i <= levels - 1; ++i) {
        if (p[i] <= 0.0) return detail::kInf;
        ub += 2.0 / p[i];
    }
    return ub;
}

/// Reciprocal-block-mass upper bound on the uniform-start expectation.
inline double upper_bound(const StepDistribution& dist) {
    return upper_bound_from_masses(interval_masses(dist));
}

inline json to_json(const HittingProfile& profile) {
    return json{{"n", profile.n},
                {"e_value", profile.e_value},
                {"t", profile.t},
                {"a_uniform", profile.a_uniform},
                {"finite", profile.finite}};
}

inline json to_json(const DeferredTable& table) {
    return json{{"n", table.n},
                {"e_value", table.e_value},
                {"b", table.b},
                {"finite", table.finite}};
}

}  // namespace blindsearch
