#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "dtsm/rng.hpp"
#include "dtsm/sibuya.hpp"

namespace dtsm {

// Density of the inverse alpha-stable subordinator at time t:
//   f(x) = t^{-alpha} W_{-alpha,1-alpha}(-x / t^alpha)
// Supported for alpha in (0,1), x >= 0, t > 0, x/t^alpha <= 30.
double inverse_stable_density(double alpha, double x, double t);

// cdf of the same law by adaptive quadrature of the density.
double inverse_stable_cdf(double alpha, double x, double t);

// Two-sided Kolmogorov-Smirnov statistic.  Samples must be sorted
// ascending; the cdf callable is invoked at the samples in that order and
// must be continuous (a jump at a sample point inflates the statistic).
double ks_statistic(const std::vector<double>& sorted_samples,
                    const std::function<double(double)>& cdf);

// One waiting time with survival P(J > t) = E_alpha(-lambda t^alpha),
// via an exponential time change of a one-sided stable variate.
double ml_waiting_time_sample(RngStream& rng, double alpha, double lambda);

struct ScalingExperiment {
    double alpha = 0.5;
    double t = 1.0;              // continuous target time
    std::vector<long> n_grid;    // strictly increasing scale factors
    long replicas = 100000;      // at least 10^4 for stable distances
    std::uint64_t seed = 0;
};

// One row per scale factor.  mean_model / mean_reference carry the
// first-moment cross-check; mean_stderr is the Monte Carlo standard error
// of whichever side was estimated by simulation.
struct DistanceReport {
    struct Row {
        long n = 0;
        double distance = 0.0;
        double mc_stderr = 0.0;
        double mean_model = 0.0;
        double mean_reference = 0.0;
        double mean_stderr = 0.0;
    };
    std::vector<Row> rows;
};

// KS distance between the rescaled Sibuya counting process n^{-alpha}
// L(floor(n t)) and the inverse stable law, one row per n.  Replica r uses
// stream (seed, r), so results do not depend on thread scheduling.
DistanceReport sibuya_limit_experiment(const ScalingExperiment& exp);

// Total-variation distance between the exact pmf of the rescaled
// fractional Bernoulli process (step scale 1/n, rate lambda/n^alpha,
// horizon floor(n t)) and a Monte Carlo fractional Poisson reference with
// `replicas` paths shared across the whole grid.
DistanceReport frac_poisson_limit_experiment(DmlKind kind, double alpha, double lambda,
                                             double t, const std::vector<long>& n_grid,
                                             long replicas, std::uint64_t seed);

}  // namespace dtsm
