#include <algorithm>
#include <cmath>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "blindsearch/optimize.hpp"
#include "test_util.hpp"

using namespace blindsearch;
using testutil::expect_errc;

TEST_CASE("one-point simplex is solved immediately", "[optimize]") {
    const OptimizeReport r = optimize_full_simplex(1, 60);
    CHECK(r.best_value == Catch::Approx(1.0).epsilon(1e-12));
    CHECK(r.best_dist.mu(1) == 1.0);
    CHECK(r.converged);
}

TEST_CASE("n = 2 search recovers the analytic optimum", "[optimize][slow]") {
    // Over mu(1) = q the objective is (1/q + 2)/2, minimized at q = 1 with
    // value 1.5; a fine grid pins the oracle down.
    double grid_best = 1e300;
    for (int i = 1; i <= 1000; ++i) {
        const double q = i / 1000.0;
        grid_best = std::min(grid_best, (1.0 / q + 2.0) / 2.0);
    }
    CHECK(grid_best == Catch::Approx(1.5).epsilon(1e-12));

    const OptimizeReport r = optimize_full_simplex(2, 12000, 1);
    CHECK(std::abs(r.best_value - grid_best) <= 0.01 * grid_best);
    CHECK(r.best_dist.mu(1) >= 0.99);
    // The search itself (before baseline comparison) must have moved well
    // past the harmonic start at 1.75.
    CHECK(r.trace.back().second <= 1.53);
    CHECK(r.trace.front().second == Catch::Approx(1.75).epsilon(1e-12));
}

TEST_CASE("mid-size search beats both named baselines", "[optimize][slow]") {
    const OptimizeReport r = optimize_full_simplex(64, kDefaultOptimizeIters, 0, 4);
    const double h = r.baseline_values.at("harmonic");
    const double p = r.baseline_values.at("pow2");
    REQUIRE(r.best_value <= std::min(h, p));
    // The trace must show genuine progress from the harmonic start.
    CHECK(r.trace.back().second < h);
}

TEST_CASE("trace of best-so-far never increases", "[optimize]") {
    const OptimizeReport r = optimize_full_simplex(16, 80);
    REQUIRE(r.trace.size() >= 2);
    for (std::size_t i = 1; i < r.trace.size(); ++i) {
        REQUIRE(r.trace[i].second <= r.trace[i - 1].second);
        REQUIRE(r.trace[i].first == static_cast<int>(i));
    }
}

TEST_CASE("optimization is deterministic in its arguments", "[optimize]") {
    const OptimizeReport a = optimize_full_simplex(12, 120, 7);
    const OptimizeReport b = optimize_full_simplex(12, 120, 7);
    const OptimizeReport c = optimize_full_simplex(12, 120, 7, 4);
    REQUIRE(a.best_value == b.best_value);
    REQUIRE(a.trace == b.trace);
    REQUIRE(a.best_dist.weights == b.best_dist.weights);
    REQUIRE(a.best_value == c.best_value);  // worker count cannot matter
    REQUIRE(a.trace == c.trace);
}

TEST_CASE("every reported candidate is a valid distribution", "[optimize]") {
    const OptimizeReport r = optimize_full_simplex(10, 100);
    KahanSum s;
    for (int d = 1; d <= 10; ++d) {
        REQUIRE(r.best_dist.mu(d) >= 0.0);
        s.add(r.best_dist.mu(d));
    }
    REQUIRE(std::abs(s.value() - 1.0) <= 1e-12);
    REQUIRE(r.best_dist.mu(1) > 0.0);
}

TEST_CASE("block-family optimization stays on powers of two", "[optimize]") {
    const OptimizeReport r = optimize_interval_weights(32, 40);
    for (int d = 1; d <= 32; ++d) {
        const bool pow_of_two = (d & (d - 1)) == 0;
        if (!pow_of_two) REQUIRE(r.best_dist.mu(d) == 0.0);
    }
    REQUIRE(r.best_value <= r.baseline_values.at("equal_mass"));
}

TEST_CASE("zero-iteration block optimization returns the equal-mass point", "[optimize]") {
    const OptimizeReport r = optimize_interval_weights(4, 0);
    CHECK(r.iterations == 0);
    CHECK(r.best_value == Catch::Approx(2.625).epsilon(1e-12));
    CHECK(r.baseline_values.at("equal_mass") == Catch::Approx(2.625).epsilon(1e-12));
    const StepDistribution eq = pow2(4);
    REQUIRE(r.best_dist.weights == eq.weights);
    REQUIRE(r.trace.size() == 1);
}

TEST_CASE("block optimum lands near the equal-mass point at scale", "[optimize][slow]") {
    const OptimizeReport r = optimize_interval_weights(1024, 60, 0, 2);
    const double eq = r.baseline_values.at("equal_mass");
    REQUIRE(r.best_value <= eq);
    REQUIRE(r.best_value >= 0.75 * eq);
}

TEST_CASE("domain guards reject bad optimization requests", "[optimize]") {
    expect_errc(Errc::cap_exceeded, [] { (void)optimize_full_simplex(4097, 10); });
    expect_errc(Errc::cap_exceeded, [] { (void)optimize_interval_weights(8192, 10); });
    expect_errc(Errc::bad_input, [] { (void)optimize_full_simplex(4, 0); });
    expect_errc(Errc::bad_input, [] { (void)optimize_interval_weights(4, -1); });
    expect_errc(Errc::bad_input, [] { (void)optimize_full_simplex(0, 10); });
}

TEST_CASE("strategy table matches the exact engines", "[optimize]") {
    const std::vector<StrategyRow> rows = compare_strategies(4, {"harmonic", "pow2"});
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].name == "harmonic");
    CHECK(rows[0].e_value == Catch::Approx(1151.0 / 396.0).epsilon(1e-12));
    CHECK(rows[1].e_value == Catch::Approx(2.625).epsilon(1e-12));
    for (const auto& row : rows) {
        REQUIRE(row.lower <= row.e_value);
        REQUIRE(row.e_value <= row.upper);
    }

    for (const auto& row : compare_strategies(1, {"harmonic", "pow2", "uniform"}))
        REQUIRE(row.e_value == Catch::Approx(1.0).epsilon(1e-12));

    expect_errc(Errc::unknown_name, [] { (void)compare_strategies(4, {"zipf"}); });
}

TEST_CASE("adversarial strategy row stays ordered at scale", "[optimize][slow]") {
    const std::vector<StrategyRow> rows =
        compare_strategies(1024, {"adversarial:B=1073741824"});
    REQUIRE(rows.size() == 1);
    CHECK(std::isfinite(rows[0].e_value));
    CHECK(rows[0].lower <= rows[0].e_value);
}

TEST_CASE("reports serialize to JSON and CSV", "[optimize]") {
    const OptimizeReport r = optimize_full_simplex(8, 30, 42);
    const json j = to_json(r);
    CHECK(j["n"] == 8);
    CHECK(j["seed"] == 42);
    CHECK(j["best_weights"].size() == 8);
    CHECK(j["trace"].size() == r.trace.size());
    CHECK(j["baseline_values"].contains("uniform"));
    const std::string csv = trace_csv(r);
    CHECK(csv.rfind("iteration,objective\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == static_cast<long>(r.trace.size()) + 1);
    const json jt = to_json(compare_strategies(4, {"pow2"}));
    CHECK(jt[0]["name"] == "pow2");
}
