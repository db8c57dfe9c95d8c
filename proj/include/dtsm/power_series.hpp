#pragma once

#include <vector>

#include "dtsm/discrete_pmf.hpp"

namespace dtsm {

// Formal power series truncated at a fixed horizon H: coeffs[t] multiplies
// u^t, size is always H + 1.  Values are immutable by convention; operations
// allocate fresh results.
struct TruncatedPowerSeries {
    std::vector<double> coeffs;

    TruncatedPowerSeries() = default;
    explicit TruncatedPowerSeries(long horizon, double constant_term = 0.0);

    static TruncatedPowerSeries unit(long horizon);  // the series 1
    static TruncatedPowerSeries from_coeffs(std::vector<double> c);

    long horizon() const { return static_cast<long>(coeffs.size()) - 1; }
    double at(long t) const;
};

// Cauchy product truncated at the common horizon.  ps_mul picks the OpenMP
// path for large horizons; ps_mul_serial is the reference implementation.
// Both produce bit-identical coefficients.
TruncatedPowerSeries ps_mul(const TruncatedPowerSeries& a, const TruncatedPowerSeries& b);
TruncatedPowerSeries ps_mul_serial(const TruncatedPowerSeries& a, const TruncatedPowerSeries& b);

// Reciprocal series: ps_mul(a, ps_inv(a)) is the unit series through H.
// Requires a nonzero constant term.
TruncatedPowerSeries ps_inv(const TruncatedPowerSeries& a);

// (1 - u)^alpha: coefficient t is gen_binom(alpha, t) (-1)^t.
TruncatedPowerSeries ps_binomial(double alpha, long horizon);

// a^n for n >= 0 by binary exponentiation.
TruncatedPowerSeries ps_pow(const TruncatedPowerSeries& a, long n);

// P(C(t) = m) for t = 0..horizon, where C counts renewals with i.i.d. steps
// W >= 1, extracted from (1/(1-u)) F^m (1 - F) with F the step generating
// function.  Exact through the horizon for any step pmf resolved there.
std::vector<double> counting_pmf_via_gf(const DiscretePmf& step_pmf, long m, long horizon);

}  // namespace dtsm
