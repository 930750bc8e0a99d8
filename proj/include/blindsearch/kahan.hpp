#pragma once

// Compensated (Kahan-Neumaier) summation. Long probability and expectation
// sums in this library must hold tolerances near 1e-12 at n up to a few
// million terms, which plain left-to-right accumulation does not guarantee.

#include <cmath>

namespace blindsearch {

struct KahanSum {
    double sum = 0.0;
    double comp = 0.0;

    void add(double x) {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            comp += (sum - t) + x;
        else
            comp += (x - t) + sum;
        sum = t;
    }

    double value() const { return sum + comp; }
};

}  // namespace blindsearch
