// Command-line frontend: every library module behind one binary with
// reproducible seeds and machine-readable CSV/JSON output.
//
// Exit codes: 0 success, 1 usage error, 2 validation error (bad distribution
// or parameters), 3 numerical failure (censored estimate, cap exceeded,
// overflow, cross-check mismatch). Nothing is written on a nonzero exit.

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "blindsearch/chain.hpp"
#include "blindsearch/continuous.hpp"
#include "blindsearch/dist.hpp"
#include "blindsearch/errors.hpp"
#include "blindsearch/exact.hpp"
#include "blindsearch/optimize.hpp"
#include "blindsearch/potential.hpp"

namespace bs = blindsearch;

namespace {

int exit_code_for(bs::Errc code) {
    switch (code) {
        case bs::Errc::all_censored:
        case bs::Errc::cap_exceeded:
        case bs::Errc::overflow:
        case bs::Errc::consistency:
            return 3;
        default:
            return 2;
    }
}

// --seed wins; otherwise BLINDSEARCH_SEED; otherwise 0.
std::uint64_t resolve_seed(const CLI::Option* opt, std::uint64_t flag_value) {
    if (opt != nullptr && opt->count() > 0) return flag_value;
    if (const char* env = std::getenv("BLINDSEARCH_SEED")) {
        try {
            std::size_t used = 0;
            const std::string text(env);
            const std::uint64_t v = std::stoull(text, &used);
            if (used != text.size()) throw std::invalid_argument(text);
            return v;
        } catch (const std::exception&) {
            bs::fail(bs::Errc::bad_input, "BLINDSEARCH_SEED is not a valid unsigned integer");
        }
    }
    return flag_value;
}

std::string dump_json(const bs::json& j) { return j.dump(2) + "\n"; }

// The whole result is assembled in memory first so a failure emits nothing.
void emit(const std::string& payload, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << payload;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) bs::fail(bs::Errc::bad_input, "cannot open output file: " + out_path);
    out << payload;
    if (!out) bs::fail(bs::Errc::bad_input, "failed writing output file: " + out_path);
}

struct BoundsRow {
    int n = 0;
    double lower = 0.0;
    double e_value = 0.0;
    double upper = 0.0;
    bool finite = false;
    bool ok = false;
};

BoundsRow bounds_row(const bs::StepDistribution& dist, int cap) {
    const bs::HittingProfile profile = bs::hitting_profile(dist, cap);
    BoundsRow row;
    row.n = dist.n;
    row.e_value = profile.e_value;
    row.upper = bs::upper_bound(dist);
    row.lower = dist.mu1_positive ? bs::potential_lower_bound(dist) : 0.0;
    row.finite = profile.finite;
    row.ok = row.lower <= row.e_value && row.e_value <= row.upper;
    return row;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"blind-search toolkit: exact values, bounds, simulation and optimization "
                 "of step distributions on {0,...,n}"};
    app.require_subcommand(1);

    // Shared option storage; each subcommand registers the flags it honors.
    std::int64_t n = 0;
    std::string dist_spec = "harmonic";
    std::uint64_t seed = 0;
    std::int64_t runs = 100000;
    int workers = 1;
    std::int64_t max_steps = -1;
    std::string format = "csv";
    std::string out_path;
    std::int64_t cap_override = 0;

    const auto add_format = [&](CLI::App* cmd) {
        cmd->add_option("--format", format, "output format")
            ->check(CLI::IsMember({"csv", "json"}))
            ->capture_default_str();
        cmd->add_option("--out", out_path, "write output to this file instead of stdout");
    };
    const auto add_n = [&](CLI::App* cmd) {
        return cmd->add_option("--n", n, "state-space upper end")->required();
    };
    const auto add_dist = [&](CLI::App* cmd) {
        cmd->add_option("--dist", dist_spec,
                        "step distribution: harmonic | pow2 | uniform | "
                        "adversarial:B=<float> | file:<path>")
            ->capture_default_str();
    };
    const auto add_cap = [&](CLI::App* cmd) {
        cmd->add_option("--n-cap-override", cap_override,
                        "raise the exact-solver size cap (expert use)");
    };

    CLI::App* c_exact = app.add_subcommand("exact", "exact expected hitting times");
    add_n(c_exact);
    add_dist(c_exact);
    add_format(c_exact);
    add_cap(c_exact);
    std::string emit_dist_path;
    c_exact->add_option("--emit-dist", emit_dist_path,
                        "also write the resolved distribution as JSON to this path");

    CLI::App* c_simulate = app.add_subcommand("simulate", "Monte Carlo hitting-time estimate");
    add_n(c_simulate);
    add_dist(c_simulate);
    add_format(c_simulate);
    std::string process = "R";
    c_simulate->add_option("--process", process, "chain to simulate")
        ->check(CLI::IsMember({"R", "S"}))
        ->capture_default_str();
    CLI::Option* sim_seed = c_simulate->add_option("--seed", seed, "master seed");
    c_simulate->add_option("--runs", runs, "number of independent runs")->capture_default_str();
    c_simulate->add_option("--workers", workers, "worker threads")->capture_default_str();
    c_simulate->add_option("--max-steps", max_steps, "censoring horizon per run");

    CLI::App* c_potential = app.add_subcommand("potential",
                                               "potential profile and per-state drop bounds");
    add_n(c_potential);
    add_dist(c_potential);
    add_format(c_potential);
    add_cap(c_potential);

    CLI::App* c_bounds = app.add_subcommand("bounds", "lower bound, exact value, upper bound");
    add_n(c_bounds);
    add_dist(c_bounds);
    add_format(c_bounds);
    add_cap(c_bounds);

    CLI::App* c_optimize = app.add_subcommand("optimize", "search for low-cost distributions");
    add_n(c_optimize);
    add_format(c_optimize);
    std::string family = "simplex";
    c_optimize->add_option("--family", family, "parameter family to optimize")
        ->check(CLI::IsMember({"simplex", "interval"}))
        ->capture_default_str();
    std::int64_t iters = 300;
    c_optimize->add_option("--iters", iters, "gradient iterations")->capture_default_str();
    CLI::Option* opt_seed = c_optimize->add_option("--seed", seed, "master seed");
    c_optimize->add_option("--workers", workers, "worker threads")->capture_default_str();

    CLI::App* c_continuous = app.add_subcommand("continuous",
                                                "unit-interval search precision study");
    std::int64_t eps_exp_min = 5, eps_exp_max = 12;
    c_continuous->add_option("--eps-exp-min", eps_exp_min, "smallest k in epsilon = 2^-k")
        ->capture_default_str();
    c_continuous->add_option("--eps-exp-max", eps_exp_max, "largest k in epsilon = 2^-k")
        ->capture_default_str();
    double x0 = 0.3;
    c_continuous->add_option("--x0", x0, "optimum location in [0, 1]")->capture_default_str();
    CLI::Option* cont_seed = c_continuous->add_option("--seed", seed, "master seed");
    c_continuous->add_option("--runs", runs, "runs per epsilon")->capture_default_str();
    c_continuous->add_option("--workers", workers, "worker threads")->capture_default_str();
    c_continuous->add_option("--max-steps", max_steps, "censoring horizon per run");
    add_format(c_continuous);

    CLI::App* c_scaling = app.add_subcommand("scaling", "sweep n over powers of two");
    std::int64_t n_min_exp = 4, n_max_exp = 10;
    c_scaling->add_option("--n-min-exp", n_min_exp, "smallest k in n = 2^k")
        ->capture_default_str();
    c_scaling->add_option("--n-max-exp", n_max_exp, "largest k in n = 2^k")
        ->capture_default_str();
    add_dist(c_scaling);
    add_format(c_scaling);
    add_cap(c_scaling);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);  // prints help, exits 0
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }

    try {
        const int cap = cap_override > 0 ? static_cast<int>(cap_override)
                                         : bs::kDefaultExactCap;
        const bool json_out = format == "json";
        std::string payload;

        if (app.got_subcommand(c_exact)) {
            const bs::StepDistribution dist =
                bs::parse_dist_spec(dist_spec, static_cast<int>(n));
            const bs::HittingProfile profile = bs::hitting_profile(dist, cap);
            if (!emit_dist_path.empty()) bs::save_dist_file(dist, emit_dist_path);
            if (json_out) {
                payload = dump_json(bs::to_json(profile));
            } else {
                std::ostringstream out;
                out.precision(17);
                out << "s,hitting_time,prefix_average\n";
                for (int s = 0; s <= profile.n; ++s)
                    out << s << ',' << profile.t[s] << ',' << profile.a_uniform[s] << '\n';
                payload = out.str();
            }
        } else if (app.got_subcommand(c_simulate)) {
            const bs::StepDistribution dist =
                bs::parse_dist_spec(dist_spec, static_cast<int>(n));
            const bs::Process proc = process == "R" ? bs::Process::R : bs::Process::S;
            const bs::SimSummary summary = bs::estimate_expectation(
                dist, proc, runs, resolve_seed(sim_seed, seed), workers, max_steps);
            payload = json_out ? dump_json(bs::to_json(summary)) : bs::sim_csv(summary);
        } else if (app.got_subcommand(c_potential)) {
            const bs::StepDistribution dist =
                bs::parse_dist_spec(dist_spec, static_cast<int>(n));
            const bs::PotentialProfile profile = bs::potential_profile(dist);
            const bs::DropReport report = bs::drop_bound_report(dist, cap);
            if (json_out) {
                payload = dump_json(
                    bs::json{{"profile", bs::to_json(profile)}, {"report", bs::to_json(report)}});
            } else {
                std::ostringstream out;
                out.precision(17);
                out << "s,drop,delta0,delta_mid\n";
                for (int s = 1; s <= report.n; ++s)
                    out << s << ',' << report.per_state_drop[s] << ','
                        << report.per_state_delta0[s] << ',' << report.per_state_delta_mid[s]
                        << '\n';
                payload = out.str();
            }
        } else if (app.got_subcommand(c_bounds)) {
            const bs::StepDistribution dist =
                bs::parse_dist_spec(dist_spec, static_cast<int>(n));
            const BoundsRow row = bounds_row(dist, cap);
            if (json_out) {
                payload = dump_json(bs::json{{"n", row.n},
                                             {"lower", row.lower},
                                             {"e_value", row.e_value},
                                             {"upper", row.upper},
                                             {"finite", row.finite},
                                             {"sandwich_holds", row.ok}});
            } else {
                std::ostringstream out;
                out.precision(17);
                out << "n,lower,e_value,upper,finite,sandwich_holds\n";
                out << row.n << ',' << row.lower << ',' << row.e_value << ',' << row.upper << ','
                    << (row.finite ? 1 : 0) << ',' << (row.ok ? 1 : 0) << '\n';
                payload = out.str();
            }
        } else if (app.got_subcommand(c_optimize)) {
            const std::uint64_t s = resolve_seed(opt_seed, seed);
            const bs::OptimizeReport report =
                family == "simplex"
                    ? bs::optimize_full_simplex(static_cast<int>(n), static_cast<int>(iters), s,
                                                workers)
                    : bs::optimize_interval_weights(static_cast<int>(n), static_cast<int>(iters),
                                                    s, workers);
            payload = json_out ? dump_json(bs::to_json(report)) : bs::trace_csv(report);
        } else if (app.got_subcommand(c_continuous)) {
            if (eps_exp_min < 3 || eps_exp_max < eps_exp_min)
                bs::fail(bs::Errc::bad_input,
                         "need 3 <= eps-exp-min <= eps-exp-max (epsilon below 1/4)");
            std::vector<double> eps_list;
            for (std::int64_t k = eps_exp_min; k <= eps_exp_max; ++k)
                eps_list.push_back(std::ldexp(1.0, static_cast<int>(-k)));
            const std::int64_t budget = max_steps > 0 ? max_steps : 1000000;
            const auto table = bs::precision_scaling(eps_list, runs,
                                                     resolve_seed(cont_seed, seed), workers, x0,
                                                     budget);
            if (json_out) {
                const bs::PrecisionFit fit = bs::fit_precision_scaling(table);
                payload = dump_json(bs::json{{"rows", bs::to_json(table)},
                                             {"fit",
                                              {{"coefficient", fit.coefficient},
                                               {"rel_residual", fit.rel_residual}}}});
            } else {
                payload = bs::continuous_csv(table);
            }
        } else if (app.got_subcommand(c_scaling)) {
            if (n_min_exp < 1 || n_max_exp < n_min_exp)
                bs::fail(bs::Errc::bad_input, "need 1 <= n-min-exp <= n-max-exp");
            bs::json rows = bs::json::array();
            std::ostringstream out;
            out.precision(17);
            out << "n,e_value,phi0,upper,lower,e_over_log2n_sq\n";
            for (std::int64_t k = n_min_exp; k <= n_max_exp; ++k) {
                const int nk = 1 << k;
                const bs::StepDistribution dist = bs::parse_dist_spec(dist_spec, nk);
                const bs::HittingProfile profile = bs::hitting_profile(dist, cap);
                const bs::PotentialProfile pot = bs::potential_profile(dist);
                const double ub = bs::upper_bound(dist);
                const double lb = bs::potential_lower_bound(dist);
                const double norm = profile.e_value / (static_cast<double>(k) * k);
                if (json_out)
                    rows.push_back({{"n", nk},
                                    {"e_value", profile.e_value},
                                    {"phi0", pot.phi0},
                                    {"upper", ub},
                                    {"lower", lb},
                                    {"e_over_log2n_sq", norm}});
                else
                    out << nk << ',' << profile.e_value << ',' << pot.phi0 << ',' << ub << ','
                        << lb << ',' << norm << '\n';
            }
            payload = json_out ? dump_json(rows) : out.str();
        }

        emit(payload, out_path);
        return 0;
    } catch (const bs::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
