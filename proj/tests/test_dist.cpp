#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "blindsearch/dist.hpp"
#include "test_util.hpp"

using namespace blindsearch;
using testutil::expect_errc;

namespace {

double mass_sum(const StepDistribution& d) {
    KahanSum s;
    for (int k = 1; k <= d.n; ++k) s.add(d.mu(k));
    return s.value();
}

}  // namespace

TEST_CASE("harmonic matches hand-computed weights", "[dist]") {
    const StepDistribution h2 = harmonic(2);
    CHECK(h2.mu(1) == Catch::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(h2.mu(2) == Catch::Approx(1.0 / 3.0).epsilon(1e-15));

    // H_4 = 25/12, so the weights are exact decimals.
    const StepDistribution h4 = harmonic(4);
    CHECK(h4.mu(1) == Catch::Approx(0.48).epsilon(1e-14));
    CHECK(h4.mu(2) == Catch::Approx(0.24).epsilon(1e-14));
    CHECK(h4.mu(3) == Catch::Approx(0.16).epsilon(1e-14));
    CHECK(h4.mu(4) == Catch::Approx(0.12).epsilon(1e-14));
}

TEST_CASE("harmonic has constant d*mu(d)", "[dist]") {
    for (int n : {3, 17, 100, 4096}) {
        const StepDistribution h = harmonic(n);
        const double c = h.mu(1);
        for (int d = 2; d <= n; ++d)
            REQUIRE(d * h.mu(d) == Catch::Approx(c).epsilon(1e-12));
    }
}

TEST_CASE("pow2 splits mass over powers of two", "[dist]") {
    const StepDistribution p4 = pow2(4);
    CHECK(p4.mu(1) == 0.5);
    CHECK(p4.mu(2) == 0.5);
    CHECK(p4.mu(3) == 0.0);
    CHECK(p4.mu(4) == 0.0);

    const StepDistribution p8 = pow2(8);
    CHECK(p8.mu(1) == Catch::Approx(1.0 / 3.0));
    CHECK(p8.mu(2) == Catch::Approx(1.0 / 3.0));
    CHECK(p8.mu(4) == Catch::Approx(1.0 / 3.0));
    CHECK(p8.mu(3) == 0.0);
    CHECK(p8.mu(8) == 0.0);

    CHECK(pow2(1).mu(1) == 1.0);

    // n = 1000: floor(log2 n) = 9, so levels 0..8 get mass 1/9 each.
    const StepDistribution p1000 = pow2(1000);
    CHECK(p1000.mu(256) == Catch::Approx(1.0 / 9.0));
    CHECK(p1000.mu(512) == 0.0);
}

TEST_CASE("adversarial geometric matches closed forms", "[dist]") {
    const StepDistribution a28 = adversarial_geometric(2, 8.0);
    CHECK(a28.mu(1) == Catch::Approx(1.0 / 9.0).epsilon(1e-14));
    CHECK(a28.mu(2) == Catch::Approx(8.0 / 9.0).epsilon(1e-14));

    const StepDistribution a32 = adversarial_geometric(3, 2.0);
    CHECK(a32.mu(1) == Catch::Approx(1.0 / 7.0).epsilon(1e-14));
    CHECK(a32.mu(2) == Catch::Approx(2.0 / 7.0).epsilon(1e-14));
    CHECK(a32.mu(3) == Catch::Approx(4.0 / 7.0).epsilon(1e-14));
}

TEST_CASE("adversarial geometric keeps exact log-space ratio", "[dist]") {
    for (auto [n, B] : std::vector<std::pair<int, double>>{{16, 2.0}, {64, 1.5}, {100, 1.1}}) {
        const StepDistribution a = adversarial_geometric(n, B);
        const double log_b = std::log(B);
        for (int d = 1; d < n; ++d)
            REQUIRE(std::log(a.mu(d + 1)) - std::log(a.mu(d)) ==
                    Catch::Approx(log_b).margin(1e-10));
    }
}

TEST_CASE("adversarial geometric survives underflow at B = n^3", "[dist]") {
    const int n = 64;
    const double B = static_cast<double>(n) * n * n;
    const StepDistribution a = adversarial_geometric(n, B);
    CHECK(a.mu1_positive);
    CHECK(a.mu(1) > 0.0);
    for (int d = 1; d < n; ++d) REQUIRE(a.mu(d) <= a.mu(d + 1));
    // B^-n underflows completely, so mu(n) = (1 - 1/B)/(1 - B^-n) = 1 - 1/B.
    CHECK(a.mu(n) == Catch::Approx(1.0 - 1.0 / B).epsilon(1e-12));
}

TEST_CASE("normalization and cdf invariants", "[dist]") {
    std::vector<StepDistribution> dists;
    dists.push_back(harmonic(1000000));
    dists.push_back(pow2(4096));
    dists.push_back(uniform(333));
    dists.push_back(adversarial_geometric(128, 3.0));
    dists.push_back(make_custom(4, {2.0, 2.0, 4.0, 8.0}));
    for (const auto& d : dists) {
        REQUIRE(std::abs(mass_sum(d) - 1.0) <= 1e-12);
        REQUIRE(d.cdf[0] == 0.0);
        REQUIRE(d.cdf[d.n] == 1.0);
        for (int a = 1; a <= d.n; ++a) REQUIRE(d.cdf[a] >= d.cdf[a - 1]);
        for (int a = 0; a <= d.n; ++a) REQUIRE(cdf(d, a) == d.cdf[a]);
    }
}

TEST_CASE("make_custom renormalizes arbitrary positive weights", "[dist]") {
    const StepDistribution d = make_custom(4, {2.0, 2.0, 4.0, 8.0});
    CHECK(d.mu(1) == Catch::Approx(0.125));
    CHECK(d.mu(2) == Catch::Approx(0.125));
    CHECK(d.mu(3) == Catch::Approx(0.25));
    CHECK(d.mu(4) == Catch::Approx(0.5));
}

TEST_CASE("constructors reject malformed input", "[dist]") {
    expect_errc(Errc::bad_input, [] { harmonic(0); });
    expect_errc(Errc::bad_input, [] { pow2(-3); });
    expect_errc(Errc::length_mismatch, [] { make_custom(3, {1.0, 1.0}); });
    expect_errc(Errc::negative_weight, [] { make_custom(2, {1.0, -0.5}); });
    expect_errc(Errc::negative_weight,
                [] { make_custom(2, {1.0, std::numeric_limits<double>::quiet_NaN()}); });
    expect_errc(Errc::zero_mass, [] { make_custom(2, {0.0, 0.0}); });
    expect_errc(Errc::bad_input, [] { adversarial_geometric(4, 1.0); });
    expect_errc(Errc::bad_input, [] { adversarial_geometric(4, 0.5); });
    expect_errc(Errc::out_of_range, [] { cdf(uniform(4), 5); });
    expect_errc(Errc::out_of_range, [] { cdf(uniform(4), -1); });
}

TEST_CASE("inverse-CDF sampling hits boundaries correctly", "[dist]") {
    const StepDistribution p8 = pow2(8);
    CHECK(sample_from_uniform(p8, 0.0) == 1);
    CHECK(sample_from_uniform(p8, 1.0 / 3.0 + 1e-12) == 2);
    CHECK(sample_from_uniform(p8, 0.999999999999) == 4);
    // u just below 1 must not fall off the table or land on zero mass.
    CHECK(sample_from_uniform(p8, std::nextafter(1.0, 0.0)) == 4);
    const StepDistribution u3 = uniform(3);
    CHECK(sample_from_uniform(u3, 0.0) == 1);
    CHECK(sample_from_uniform(u3, 0.34) == 2);
    CHECK(sample_from_uniform(u3, 0.67) == 3);
}

TEST_CASE("zero-mass steps are never sampled", "[dist]") {
    const StepDistribution p = pow2(8);
    Rng rng(12345);
    for (int i = 0; i < 20000; ++i) {
        const int d = sample(p, rng);
        REQUIRE((d == 1 || d == 2 || d == 4));
    }
}

TEST_CASE("sampling frequencies match the law", "[dist][slow]") {
    const StepDistribution h = harmonic(4);
    const int N = 1000000;
    std::map<int, long> counts;
    Rng rng(987654321);
    for (int i = 0; i < N; ++i) ++counts[sample(h, rng)];
    for (int d = 1; d <= 4; ++d) {
        const double p = h.mu(d);
        const double sigma = std::sqrt(p * (1.0 - p) / N);
        const double freq = static_cast<double>(counts[d]) / N;
        REQUIRE(std::abs(freq - p) <= 4.0 * sigma);
    }
}

TEST_CASE("alias table agrees with inverse-CDF law", "[dist][slow]") {
    std::vector<double> raw = {3.0, 0.0, 1.0, 5.0, 0.5, 0.5};
    const StepDistribution plain = make_custom(6, raw);
    const StepDistribution aliased = make_custom(6, raw, /*build_alias_table=*/true);
    REQUIRE(!aliased.alias_prob.empty());
    const int N = 400000;
    std::map<int, long> counts;
    Rng rng(55555);
    for (int i = 0; i < N; ++i) ++counts[sample(aliased, rng)];
    CHECK(counts[2] == 0);
    for (int d = 1; d <= 6; ++d) {
        const double p = plain.mu(d);
        const double sigma = std::sqrt(p * (1.0 - p) / N);
        REQUIRE(std::abs(static_cast<double>(counts[d]) / N - p) <= 4.0 * sigma + 1e-12);
    }
}

TEST_CASE("sampling is reproducible for a fixed seed", "[dist]") {
    const StepDistribution h = harmonic(100);
    std::vector<int> first, second;
    {
        Rng rng(42);
        for (int i = 0; i < 1000; ++i) first.push_back(sample(h, rng));
    }
    {
        Rng rng(42);
        for (int i = 0; i < 1000; ++i) second.push_back(sample(h, rng));
    }
    REQUIRE(first == second);
}

TEST_CASE("JSON round-trip preserves weights bit-for-bit", "[dist]") {
    const StepDistribution orig = harmonic(37);
    const nlohmann::json j = to_json(orig);
    const StepDistribution back = dist_from_json(j);
    REQUIRE(back.n == orig.n);
    for (int d = 1; d <= orig.n; ++d) REQUIRE(back.mu(d) == orig.mu(d));
}

TEST_CASE("file loading validates mass and round-trips", "[dist]") {
    const StepDistribution orig = adversarial_geometric(9, 2.5);
    save_dist_file(orig, "dist_roundtrip_tmp.json");
    const StepDistribution back = load_dist_file("dist_roundtrip_tmp.json");
    REQUIRE(back.n == orig.n);
    for (int d = 1; d <= orig.n; ++d) REQUIRE(back.mu(d) == orig.mu(d));
    std::remove("dist_roundtrip_tmp.json");

    const std::string bad = testutil::write_temp(
        "dist_badmass", R"({"n": 2, "weights": [0.25, 0.25]})");
    expect_errc(Errc::bad_input, [&] { (void)load_dist_file(bad); });
    std::remove(bad.c_str());

    const std::string junk = testutil::write_temp("dist_junk", "not json at all");
    expect_errc(Errc::bad_input, [&] { (void)load_dist_file(junk); });
    std::remove(junk.c_str());

    expect_errc(Errc::bad_input, [] { (void)load_dist_file("/nonexistent/nowhere.json"); });
}

TEST_CASE("kind-based JSON construction works", "[dist]") {
    const StepDistribution h = dist_from_json({{"n", 4}, {"kind", "harmonic"}});
    CHECK(h.mu(1) == Catch::Approx(0.48));
    const StepDistribution a =
        dist_from_json({{"n", 2}, {"kind", {{"adversarial", {{"B", 8.0}}}}}});
    CHECK(a.mu(2) == Catch::Approx(8.0 / 9.0));
    expect_errc(Errc::bad_input, [] { (void)dist_from_json({{"n", 4}, {"kind", "cauchy"}}); });
    expect_errc(Errc::bad_input, [] { (void)dist_from_json({{"weights", {1.0}}}); });
}

TEST_CASE("spec strings parse into the right families", "[dist]") {
    CHECK(parse_dist_spec("harmonic", 4).mu(1) == Catch::Approx(0.48));
    CHECK(parse_dist_spec("pow2", 4).mu(2) == 0.5);
    CHECK(parse_dist_spec("uniform", 5).mu(3) == Catch::Approx(0.2));
    CHECK(parse_dist_spec("adversarial:B=8", 2).mu(2) == Catch::Approx(8.0 / 9.0));

    const StepDistribution orig = harmonic(11);
    save_dist_file(orig, "dist_spec_tmp.json");
    const StepDistribution viaspec = parse_dist_spec("file:dist_spec_tmp.json", 0);
    CHECK(viaspec.n == 11);
    expect_errc(Errc::bad_input, [] { (void)parse_dist_spec("file:dist_spec_tmp.json", 7); });
    std::remove("dist_spec_tmp.json");

    expect_errc(Errc::unknown_name, [] { (void)parse_dist_spec("zipf", 4); });
    expect_errc(Errc::bad_input, [] { (void)parse_dist_spec("adversarial:B=oops", 4); });
    expect_errc(Errc::bad_input, [] { (void)parse_dist_spec("adversarial:B=2.5x", 4); });
    expect_errc(Errc::bad_input, [] { (void)parse_dist_spec("harmonic", 0); });
}
