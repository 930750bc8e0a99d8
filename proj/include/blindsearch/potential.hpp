#pragma once

// The potential function Phi over deferred states, its exact one-step
// expected drop under the S kernel, the drop-bound report behind the
// constant-7 certificate, and the resulting lower bound Phi_0 / C.

#include <cmath>
#include <string>
#include <vector>

#include "blindsearch/chain.hpp"
#include "blindsearch/dist.hpp"
#include "blindsearch/errors.hpp"
#include "blindsearch/exact.hpp"
#include "blindsearch/json.hpp"
#include "blindsearch/kahan.hpp"

namespace blindsearch {

inline constexpr double kDefaultPsiC = 0.70710678118654752;  // 1/sqrt(2)
inline constexpr double kDropConstant = 7.0;

struct PotentialProfile {
    int n = 0;
    double psi_c = kDefaultPsiC;
    std::vector<double> sigma;    // sigma[a], a = 1..n; [0] unused
    std::vector<double> phi;      // phi[a] = 1/(a*sigma[a]); [0] unused
    std::vector<double> big_phi;  // big_phi[s] = sum_{a<=s} phi[a]; big_phi[0] = 0
    double phi0 = 0.0;            // big_phi[n]
    std::vector<double> psi;      // psi[i], i = 0..floor(log2 n)
};

struct DropReport {
    int n = 0;
    std::vector<double> per_state_drop;       // [s], s = 1..n; [0] = 0
    std::vector<double> per_state_delta0;     // drop contribution of the jump to 0
    std::vector<double> per_state_delta_mid;  // drop contribution of jumps to 1..s-1
    double max_drop = 0.0;
};

/// sigma, phi, Phi and the block diagnostics psi, all in O(n) via the two
/// prefix sums P(a) = sum_{d<=a} mu(d) sqrt(d) and Q(a) = sum_{d>a} mu(d)/sqrt(d).
inline PotentialProfile potential_profile(const StepDistribution& dist,
                                          double psi_c = kDefaultPsiC) {
    if (!dist.mu1_positive) fail(Errc::mu1_zero, "potential needs mu(1) > 0");
    if (!(psi_c > 0.5) || !(psi_c < 1.0)) fail(Errc::bad_input, "psi constant must lie in (1/2, 1)");
    const int n = dist.n;
    PotentialProfile out;
    out.n = n;
    out.psi_c = psi_c;
    out.sigma.assign(static_cast<std::size_t>(n) + 1, 0.0);
    out.phi.assign(static_cast<std::size_t>(n) + 1, 0.0);
    out.big_phi.assign(static_cast<std::size_t>(n) + 1, 0.0);

    std::vector<double> root(static_cast<std::size_t>(n) + 1);
    for (int d = 0; d <= n; ++d) root[d] = std::sqrt(static_cast<double>(d));

    // p_acc walks P(a) upward; q_acc walks Q(a) downward from Q(n) = 0.
    std::vector<double> q(static_cast<std::size_t>(n) + 1, 0.0);
    KahanSum q_acc;
    for (int a = n - 1; a >= 1; --a) {
        q_acc.add(dist.mu(a + 1) / root[a + 1]);
        q[a] = q_acc.value();
    }
    KahanSum p_acc, phi_acc;
    for (int a = 1; a <= n; ++a) {
        p_acc.add(dist.mu(a) * root[a]);
        out.sigma[a] = p_acc.value() / root[a] + root[a] * q[a];
        out.phi[a] = 1.0 / (a * out.sigma[a]);
        phi_acc.add(out.phi[a]);
        out.big_phi[a] = phi_acc.value();
    }
    out.phi0 = out.big_phi[n];

    const std::vector<double> masses = interval_masses(dist);
    const int levels = static_cast<int>(masses.size()) - 1;
    out.psi.assign(static_cast<std::size_t>(levels) + 1, 0.0);
    for (int i = 0; i <= levels; ++i) {
        KahanSum denom;
        for (int j = 0; j <= levels; ++j)
            denom.add(masses[j] * std::pow(psi_c, std::abs(i - j)));
        out.psi[i] = 1.0 / denom.value();
    }
    return out;
}

/// Prefix sums Psi_k = sum_{i<=k} psi_i of the block diagnostics.
inline std::vector<double> psi_prefix(const PotentialProfile& profile) {
    std::vector<double> out(profile.psi.size());
    KahanSum acc;
    for (std::size_t i = 0; i < profile.psi.size(); ++i) {
        acc.add(profile.psi[i]);
        out[i] = acc.value();
    }
    return out;
}

/// Exact E(Phi(S_{t-1}) - Phi(S_t) | S_{t-1} = s), straight off the kernel row.
inline double expected_drop(const StepDistribution& dist, const PotentialProfile& profile,
                            int s) {
    if (s < 1 || s > dist.n) fail(Errc::out_of_range, "state outside [1, n]");
    const TransitionRow row = s_transition_row(dist, s);
    KahanSum acc;
    for (const auto& [to, p] : row.entries) acc.add((profile.big_phi[s] - profile.big_phi[to]) * p);
    return acc.value();
}

/// Per-state drops split into the jump-to-zero part and the interior part.
inline DropReport drop_bound_report(const StepDistribution& dist, int cap = kDefaultExactCap) {
    if (!dist.mu1_positive) fail(Errc::mu1_zero, "drop report needs mu(1) > 0");
    detail::check_cap(dist.n, cap);
    const PotentialProfile profile = potential_profile(dist);
    const int n = dist.n;
    DropReport out;
    out.n = n;
    out.per_state_drop.assign(static_cast<std::size_t>(n) + 1, 0.0);
    out.per_state_delta0.assign(static_cast<std::size_t>(n) + 1, 0.0);
    out.per_state_delta_mid.assign(static_cast<std::size_t>(n) + 1, 0.0);
    for (int s = 1; s <= n; ++s) {
        const TransitionRow row = s_transition_row(dist, s);
        KahanSum mid;
        for (const auto& [to, p] : row.entries) {
            if (to == 0)
                out.per_state_delta0[s] = profile.big_phi[s] * p;
            else if (to < s)
                mid.add((profile.big_phi[s] - profile.big_phi[to]) * p);
        }
        out.per_state_delta_mid[s] = mid.value();
        out.per_state_drop[s] = expected_drop(dist, profile, s);
        if (out.per_state_drop[s] > out.max_drop) out.max_drop = out.per_state_drop[s];
    }
    return out;
}

/// Certified lower bound Phi_0 / C on the uniform-start expectation. With
/// strict checking the divisor must dominate the computed maximal drop.
inline double potential_lower_bound(const StepDistribution& dist, double C = kDropConstant,
                                    bool strict = false) {
    if (!dist.mu1_positive) fail(Errc::mu1_zero, "lower bound needs mu(1) > 0");
    if (!(C > 0.0)) fail(Errc::invalid_c, "divisor must be positive");
    if (strict) {
        const DropReport report = drop_bound_report(dist);
        if (C < report.max_drop)
            fail(Errc::invalid_c, "divisor " + std::to_string(C) +
                                      " is below the computed maximal drop " +
                                      std::to_string(report.max_drop));
    }
    return potential_profile(dist).phi0 / C;
}

inline json to_json(const PotentialProfile& p) {
    return json{{"n", p.n},       {"psi_c", p.psi_c},       {"sigma", p.sigma},
                {"phi", p.phi},   {"big_phi", p.big_phi},   {"phi0", p.phi0},
                {"psi", p.psi}};
}

inline json to_json(const DropReport& r) {
    return json{{"n", r.n},
                {"per_state_drop", r.per_state_drop},
                {"per_state_delta0", r.per_state_delta0},
                {"per_state_delta_mid", r.per_state_delta_mid},
                {"max_drop", r.max_drop}};
}

}  // namespace blindsearch
