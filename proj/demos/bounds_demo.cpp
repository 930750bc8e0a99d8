// Minimal tour of the library: for a handful of step distributions on
// {0,...,n}, compute the exact expected hitting time and sandwich it
// between the potential lower bound and the interval-mass upper bound.

#include <cstdio>

#include "blindsearch/dist.hpp"
#include "blindsearch/exact.hpp"
#include "blindsearch/potential.hpp"

namespace bs = blindsearch;

int main() {
    const int n = 256;
    std::printf("n = %d\n%-12s %12s %12s %12s\n", n, "strategy", "lower", "exact", "upper");
    for (const char* name : {"harmonic", "pow2", "uniform"}) {
        const bs::StepDistribution dist = bs::parse_dist_spec(name, n);
        const double e = bs::hitting_profile(dist).e_value;
        const double lb = bs::potential_lower_bound(dist);
        const double ub = bs::upper_bound(dist);
        std::printf("%-12s %12.4f %12.4f %12.4f\n", name, lb, e, ub);
    }
    return 0;
}
