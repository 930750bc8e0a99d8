#pragma once

// Step-size distributions mu on the discrete interval [1, n]: construction,
// validation, CDF queries, and sampling. A StepDistribution is immutable
// after construction and safe to share read-only across threads; sampling
// state lives in the caller's Rng.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "blindsearch/errors.hpp"
#include "blindsearch/json.hpp"
#include "blindsearch/kahan.hpp"
#include "blindsearch/rng.hpp"

namespace blindsearch {

struct StepDistribution {
    int n = 0;
    // 1-based: weights[d] = mu(d), cdf[a] = F(a) = mu([1,a]); index 0 is 0.
    std::vector<double> weights;
    std::vector<double> cdf;
    bool mu1_positive = false;

    // Optional O(1) alias sampler (built on request; inverse CDF otherwise).
    std::vector<double> alias_prob;
    std::vector<int> alias_idx;

    double mu(int d) const { return weights[static_cast<std::size_t>(d)]; }
};

inline StepDistribution make_custom(int n, const std::vector<double>& raw_weights,
                                    bool build_alias_table = false);

namespace detail {

inline void build_alias(StepDistribution& dist) {
    const int n = dist.n;
    dist.alias_prob.assign(static_cast<std::size_t>(n), 0.0);
    dist.alias_idx.assign(static_cast<std::size_t>(n), 0);
    std::vector<double> scaled(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) scaled[i] = dist.weights[i + 1] * n;
    std::vector<int> small, large;
    for (int i = 0; i < n; ++i) (scaled[i] < 1.0 ? small : large).push_back(i);
    while (!small.empty() && !large.empty()) {
        int s = small.back(); small.pop_back();
        int l = large.back(); large.pop_back();
        dist.alias_prob[s] = scaled[s];
        dist.alias_idx[s] = l;
        scaled[l] = (scaled[l] + scaled[s]) - 1.0;
        (scaled[l] < 1.0 ? small : large).push_back(l);
    }
    for (int i : large) { dist.alias_prob[i] = 1.0; dist.alias_idx[i] = i; }
    for (int i : small) { dist.alias_prob[i] = 1.0; dist.alias_idx[i] = i; }
}

}  // namespace detail

/// Normalizes nonnegative raw weights into a distribution on [1, n].
inline StepDistribution make_custom(int n, const std::vector<double>& raw_weights,
                                    bool build_alias_table) {
    if (n < 1) fail(Errc::bad_input, "n must be >= 1");
    if (static_cast<int>(raw_weights.size()) != n)
        fail(Errc::length_mismatch, "expected " + std::to_string(n) + " weights, got " +
                                        std::to_string(raw_weights.size()));
    KahanSum total;
    for (double w : raw_weights) {
        if (!(w >= 0.0) || !std::isfinite(w))
            fail(Errc::negative_weight, "weights must be finite and nonnegative");
        total.add(w);
    }
    const double sum = total.value();
    if (sum <= 0.0) fail(Errc::zero_mass, "all weights are zero");
    if (!std::isfinite(sum)) fail(Errc::overflow, "weight sum is not representable");

    StepDistribution dist;
    dist.n = n;
    dist.weights.assign(static_cast<std::size_t>(n) + 1, 0.0);
    dist.cdf.assign(static_cast<std::size_t>(n) + 1, 0.0);
    KahanSum prefix;
    for (int d = 1; d <= n; ++d) {
        dist.weights[d] = raw_weights[d - 1] / sum;
        prefix.add(dist.weights[d]);
        dist.cdf[d] = prefix.value();
    }
    if (std::abs(dist.cdf[n] - 1.0) > 1e-12)
        fail(Errc::consistency, "normalized mass differs from 1 beyond tolerance");
    dist.cdf[n] = 1.0;  // snap; keeps inverse-CDF search total on u in [0,1)
    dist.mu1_positive = dist.weights[1] > 0.0;
    if (build_alias_table) detail::build_alias(dist);
    return dist;
}

/// mu(d) proportional to 1/d.
inline StepDistribution harmonic(int n) {
    if (n < 1) fail(Errc::bad_input, "n must be >= 1");
    std::vector<double> w(static_cast<std::size_t>(n));
    for (int d = 1; d <= n; ++d) w[d - 1] = 1.0 / d;
    return make_custom(n, w);
}

/// Equal mass on the powers of two below 2^floor(log2 n); for n = 1 the
/// whole mass sits on 1 so the distribution stays usable.
inline StepDistribution pow2(int n) {
    if (n < 1) fail(Errc::bad_input, "n must be >= 1");
    std::vector<double> w(static_cast<std::size_t>(n), 0.0);
    if (n == 1) {
        w[0] = 1.0;
    } else {
        int levels = 0;
        while ((1LL << (levels + 1)) <= n) ++levels;  // levels = floor(log2 n)
        for (int i = 0; i < levels; ++i) w[(1LL << i) - 1] = 1.0;
    }
    return make_custom(n, w);
}

/// All steps equally likely.
inline StepDistribution uniform(int n) {
    if (n < 1) fail(Errc::bad_input, "n must be >= 1");
    return make_custom(n, std::vector<double>(static_cast<std::size_t>(n), 1.0));
}

/// mu(d) proportional to B^(d-1). Computed in log space; weights whose true
/// value underflows double precision are clamped to the smallest positive
/// normal so that the mathematically positive mu(1) stays positive in the
/// stored representation.
inline StepDistribution adversarial_geometric(int n, double B) {
    if (n < 1) fail(Errc::bad_input, "n must be >= 1");
    if (!(B > 1.0) || !std::isfinite(B)) fail(Errc::bad_input, "base B must be finite and > 1");
    const double log_b = std::log(B);
    if (!std::isfinite(static_cast<double>(n) * log_b))
        fail(Errc::overflow, "n * ln(B) not representable");
    std::vector<double> w(static_cast<std::size_t>(n));
    for (int d = 1; d <= n; ++d) {
        double v = std::exp(static_cast<double>(d - n) * log_b);
        if (v < std::numeric_limits<double>::min()) v = std::numeric_limits<double>::min();
        w[d - 1] = v;
    }
    return make_custom(n, w);
}

/// F(a) for a in [0, n].
inline double cdf(const StepDistribution& dist, int a) {
    if (a < 0 || a > dist.n) fail(Errc::out_of_range, "cdf argument outside [0, n]");
    return dist.cdf[static_cast<std::size_t>(a)];
}

/// Inverse-CDF draw for a given uniform variate u in [0, 1]. Never returns
/// a zero-mass step.
inline int sample_from_uniform(const StepDistribution& dist, double u) {
    auto first = dist.cdf.begin() + 1;
    auto it = std::upper_bound(first, dist.cdf.end(), u);
    if (it == dist.cdf.end()) --it;
    return static_cast<int>(it - dist.cdf.begin());
}

/// One draw d ~ mu. Uses the alias table when present, otherwise an
/// O(log n) inverse-CDF search. Consumes exactly one variate either way.
inline int sample(const StepDistribution& dist, Rng& rng) {
    const double u = rng.next_double();
    if (!dist.alias_prob.empty()) {
        const double x = u * dist.n;
        int i = static_cast<int>(x);
        if (i >= dist.n) i = dist.n - 1;
        const double f = x - i;
        return f < dist.alias_prob[i] ? i + 1 : dist.alias_idx[i] + 1;
    }
    return sample_from_uniform(dist, u);
}

// --- JSON file format -------------------------------------------------------
// {"n": <int>, "weights": [...]} or {"n": <int>, "kind": "harmonic"} etc.;
// adversarial kind: {"n": <int>, "kind": {"adversarial": {"B": <float>}}}.

inline json to_json(const StepDistribution& dist) {
    std::vector<double> w(dist.weights.begin() + 1, dist.weights.end());
    return json{{"n", dist.n}, {"weights", w}};
}

inline StepDistribution dist_from_json(const json& j) {
    if (!j.is_object() || !j.contains("n") || !j["n"].is_number_integer())
        fail(Errc::bad_input, "distribution JSON needs an integer field \"n\"");
    const int n = j["n"].get<int>();
    if (j.contains("weights")) {
        if (!j["weights"].is_array()) fail(Errc::bad_input, "\"weights\" must be an array");
        std::vector<double> w;
        w.reserve(j["weights"].size());
        for (const auto& v : j["weights"]) {
            if (!v.is_number()) fail(Errc::bad_input, "weights must be numbers");
            w.push_back(v.get<double>());
        }
        KahanSum s;
        for (double x : w) s.add(x);
        if (std::abs(s.value() - 1.0) > 1e-6)
            fail(Errc::bad_input, "file weights must sum to 1 within 1e-6");
        return make_custom(n, w);
    }
    if (j.contains("kind")) {
        const auto& k = j["kind"];
        if (k.is_string()) {
            const std::string kind = k.get<std::string>();
            if (kind == "harmonic") return harmonic(n);
            if (kind == "pow2") return pow2(n);
            if (kind == "uniform") return uniform(n);
            fail(Errc::bad_input, "unknown distribution kind \"" + kind + "\"");
        }
        if (k.is_object() && k.contains("adversarial") && k["adversarial"].contains("B"))
            return adversarial_geometric(n, k["adversarial"]["B"].get<double>());
        fail(Errc::bad_input, "malformed \"kind\" field");
    }
    fail(Errc::bad_input, "distribution JSON needs \"weights\" or \"kind\"");
}

inline StepDistribution load_dist_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(Errc::bad_input, "cannot open distribution file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        fail(Errc::bad_input, std::string("distribution file is not valid JSON: ") + e.what());
    }
    return dist_from_json(j);
}

inline void save_dist_file(const StepDistribution& dist, const std::string& path) {
    std::ofstream out(path);
    if (!out) fail(Errc::bad_input, "cannot write distribution file: " + path);
    out << to_json(dist).dump(2) << "\n";
}

// Strategy spec grammar used by the CLI and by strategy tables:
//   harmonic | pow2 | uniform | adversarial:B=<float> | file:<path>
// For named specs `n` must be positive; for file specs the file's own n wins
// (a nonzero mismatching n is rejected).
inline StepDistribution parse_dist_spec(const std::string& spec, int n) {
    if (spec.rfind("file:", 0) == 0) {
        StepDistribution d = load_dist_file(spec.substr(5));
        if (n > 0 && n != d.n)
            fail(Errc::bad_input, "file n=" + std::to_string(d.n) +
                                      " disagrees with requested n=" + std::to_string(n));
        return d;
    }
    if (n < 1) fail(Errc::bad_input, "named distributions need n >= 1");
    if (spec == "harmonic") return harmonic(n);
    if (spec == "pow2") return pow2(n);
    if (spec == "uniform") return uniform(n);
    if (spec.rfind("adversarial:B=", 0) == 0) {
        const std::string num = spec.substr(14);
        std::size_t pos = 0;
        double b = 0.0;
        try {
            b = std::stod(num, &pos);
        } catch (const std::exception&) {
            fail(Errc::bad_input, "cannot parse base in \"" + spec + "\"");
        }
        if (pos != num.size()) fail(Errc::bad_input, "trailing junk in \"" + spec + "\"");
        return adversarial_geometric(n, b);
    }
    fail(Errc::unknown_name, "unknown distribution spec \"" + spec + "\"");
}

}  // namespace blindsearch
