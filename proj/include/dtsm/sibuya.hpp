#pragma once

#include <functional>
#include <vector>

#include "dtsm/discrete_pmf.hpp"
#include "dtsm/rng.hpp"

namespace dtsm {

// P(Z = k) and P(Z > k) for the Sibuya(alpha) step law on {1, 2, ...},
// alpha in (0, 1].  pmf requires k >= 1; survival accepts k >= 0.
double sibuya_pmf(double alpha, long k);
double sibuya_survival(double alpha, long k);

// Inverse-survival draw: min{k >= 1 : survival(alpha, k) <= U}.  Values
// beyond 2^60 saturate: past that point the conditional law is
// indistinguishable at double precision for any finite horizon.
long sibuya_sample(RngStream& rng, double alpha);

// Same draw as sibuya_sample from the same rng state, with a cached survival
// table for the common small values.
class SibuyaSampler {
public:
    explicit SibuyaSampler(double alpha);
    long operator()(RngStream& rng) const;
    double alpha() const { return alpha_; }

private:
    double alpha_;
    std::vector<double> table_;  // table_[k] = P(Z > k), k = 0..size-1
};

// Sojourn law built from a geometric number of Sibuya increments.
//   type_a: J = X_1 + ... + X_M,          M ~ Geometric(p) on {1, 2, ...}
//   type_b: J = 1 + X_1 + ... + X_{M-1}
enum class DmlKind { type_a, type_b };

// Draws M first, then the increments in index order.
long dml_sample(RngStream& rng, double alpha, double p, DmlKind kind);

// Renewal instants T_0 = 0 < T_1 < ... accumulated from i.i.d. steps until
// the partial sum first exceeds the horizon; that first overshoot is kept as
// the last entry.
struct RenewalPath {
    std::vector<long> renewal_times;
    long horizon = 0;

    // C(t) = #{n >= 1 : T_n <= t}, valid for 0 <= t <= horizon.
    long count_at(long t) const;
};

RenewalPath renewal_path(RngStream& rng, const std::function<long(RngStream&)>& step_sampler,
                         long horizon);

// P(C(t) = m) for the Sibuya renewal counting process, exact closed form:
//   sum_{r=0}^{m} (-1)^r C(m, r) C(t - alpha r - alpha, t)
double sibuya_counting_pmf(double alpha, long t, long m);

// pmf column C(t) = 0..m_max with certified tail bound.
DiscretePmf sibuya_counting_dist(double alpha, long t, long m_max);

// Full closed-form triangle: row t holds P(C(t) = m) for m = 0..t.  Shares
// the evaluation machinery of sibuya_counting_pmf but amortizes it across
// all (t, m) up to t_max.
std::vector<std::vector<double>> sibuya_counting_table(double alpha, long t_max);

// Closed-form first and second moments of the counting process at two
// ordered times, plus the cross moment E[C(t1) C(t2)].
struct CountingMoments {
    double mean_t1 = 0.0;
    double mean_t2 = 0.0;
    double second_t1 = 0.0;
    double second_t2 = 0.0;
    double cross = 0.0;
};

CountingMoments sibuya_counting_moments(double alpha, long t1, long t2);

// u(t) = C(t + alpha - 1, t): mean time the step random walk spends at t.
double sibuya_potential(double alpha, long t);

}  // namespace dtsm
