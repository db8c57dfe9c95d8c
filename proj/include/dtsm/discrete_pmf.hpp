#pragma once

#include <vector>

namespace dtsm {

// Probability mass function on {0, 1, ..., K} with an explicit bound on the
// mass beyond K.  Truncations must say how much they dropped; exact finite
// laws carry tail_bound = 0.
struct DiscretePmf {
    std::vector<double> mass;  // mass[k] = P(X = k)
    double tail_bound = 0.0;

    long max_support() const { return static_cast<long>(mass.size()) - 1; }
    double at(long k) const {
        return (k >= 0 && k < static_cast<long>(mass.size())) ? mass[k] : 0.0;
    }

    // Entries nonnegative within -1e-12 and total mass + tail within 1e-12
    // of one; throws usage_error otherwise.
    void validate() const;
};

}  // namespace dtsm
