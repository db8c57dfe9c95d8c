#include "dtsm/power_series.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "dtsm/errors.hpp"
#include "dtsm/special_functions.hpp"

namespace dtsm {

TruncatedPowerSeries::TruncatedPowerSeries(long horizon, double constant_term) {
    if (horizon < 0) throw usage_error("TruncatedPowerSeries: horizon must be >= 0");
    coeffs.assign(static_cast<size_t>(horizon) + 1, 0.0);
    coeffs[0] = constant_term;
}

TruncatedPowerSeries TruncatedPowerSeries::unit(long horizon) {
    return TruncatedPowerSeries(horizon, 1.0);
}

TruncatedPowerSeries TruncatedPowerSeries::from_coeffs(std::vector<double> c) {
    if (c.empty()) throw usage_error("TruncatedPowerSeries: need at least the constant term");
    for (double v : c)
        if (!std::isfinite(v)) throw usage_error("TruncatedPowerSeries: nonfinite coefficient");
    TruncatedPowerSeries s;
    s.coeffs = std::move(c);
    return s;
}

double TruncatedPowerSeries::at(long t) const {
    if (t < 0 || t > horizon()) throw usage_error("TruncatedPowerSeries: index out of range");
    return coeffs[static_cast<size_t>(t)];
}

namespace {

void check_same_horizon(const TruncatedPowerSeries& a, const TruncatedPowerSeries& b) {
    if (a.coeffs.empty() || b.coeffs.empty())
        throw usage_error("power series: empty operand");
    if (a.coeffs.size() != b.coeffs.size())
        throw usage_error("power series: horizon mismatch");
}

void check_finite(const TruncatedPowerSeries& s, const char* op) {
    for (double v : s.coeffs)
        if (!std::isfinite(v)) throw range_error(std::string(op) + ": coefficient overflow");
}

// Coefficient t of the product is an independent dot product, so the loop
// parallelizes over t without changing any summation order.
TruncatedPowerSeries conv(const TruncatedPowerSeries& a, const TruncatedPowerSeries& b,
                          bool threaded) {
    check_same_horizon(a, b);
    const long h = a.horizon();
    TruncatedPowerSeries out(h);
    const double* pa = a.coeffs.data();
    const double* pb = b.coeffs.data();
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (threaded)
#else
    (void)threaded;
#endif
    for (long t = 0; t <= h; ++t) {
        long double s = 0.0L;
        for (long k = 0; k <= t; ++k)
            s += static_cast<long double>(pa[k]) * static_cast<long double>(pb[t - k]);
        out.coeffs[static_cast<size_t>(t)] = static_cast<double>(s);
    }
    check_finite(out, "ps_mul");
    return out;
}

}  // namespace

TruncatedPowerSeries ps_mul(const TruncatedPowerSeries& a, const TruncatedPowerSeries& b) {
    return conv(a, b, a.horizon() >= 256);
}

TruncatedPowerSeries ps_mul_serial(const TruncatedPowerSeries& a,
                                   const TruncatedPowerSeries& b) {
    return conv(a, b, false);
}

TruncatedPowerSeries ps_inv(const TruncatedPowerSeries& a) {
    if (a.coeffs.empty()) throw usage_error("ps_inv: empty operand");
    const double a0 = a.coeffs[0];
    if (a0 == 0.0) throw usage_error("ps_inv: constant term is zero, series not invertible");
    const long h = a.horizon();
    TruncatedPowerSeries out(h);
    out.coeffs[0] = 1.0 / a0;
    for (long t = 1; t <= h; ++t) {
        long double s = 0.0L;
        for (long k = 1; k <= t; ++k)
            s += static_cast<long double>(a.coeffs[static_cast<size_t>(k)]) *
                 static_cast<long double>(out.coeffs[static_cast<size_t>(t - k)]);
        out.coeffs[static_cast<size_t>(t)] = static_cast<double>(-s / a0);
    }
    check_finite(out, "ps_inv");
    return out;
}

TruncatedPowerSeries ps_binomial(double alpha, long horizon) {
    if (horizon < 0) throw usage_error("ps_binomial: horizon must be >= 0");
    TruncatedPowerSeries out(horizon);
    for (long t = 0; t <= horizon; ++t) {
        const long double c = detail::gen_binom_l(alpha, t);
        out.coeffs[static_cast<size_t>(t)] = static_cast<double>(t % 2 == 0 ? c : -c);
    }
    return out;
}

TruncatedPowerSeries ps_pow(const TruncatedPowerSeries& a, long n) {
    if (n < 0) throw usage_error("ps_pow: exponent must be >= 0; invert first for negative powers");
    if (a.coeffs.empty()) throw usage_error("ps_pow: empty operand");
    TruncatedPowerSeries result = TruncatedPowerSeries::unit(a.horizon());
    TruncatedPowerSeries base = a;
    while (n > 0) {
        if (n & 1) result = ps_mul(result, base);
        n >>= 1;
        if (n > 0) base = ps_mul(base, base);
    }
    return result;
}

std::vector<double> counting_pmf_via_gf(const DiscretePmf& step_pmf, long m, long horizon) {
    if (m < 0) throw usage_error("counting_pmf_via_gf: m must be >= 0");
    if (horizon < 0) throw usage_error("counting_pmf_via_gf: horizon must be >= 0");
    step_pmf.validate();
    if (step_pmf.mass[0] != 0.0)
        throw usage_error("counting_pmf_via_gf: step pmf must have no mass at 0");

    TruncatedPowerSeries f(horizon);
    const long k_max = std::min(horizon, step_pmf.max_support());
    for (long k = 1; k <= k_max; ++k)
        f.coeffs[static_cast<size_t>(k)] = step_pmf.mass[static_cast<size_t>(k)];

    // (1/(1-u)) F^m (1 - F)
    TruncatedPowerSeries ones(horizon);
    for (double& c : ones.coeffs) c = 1.0;
    TruncatedPowerSeries one_minus_f(horizon, 1.0);
    for (long t = 1; t <= horizon; ++t)
        one_minus_f.coeffs[static_cast<size_t>(t)] = -f.coeffs[static_cast<size_t>(t)];

    const TruncatedPowerSeries g = ps_mul(ps_mul(ones, ps_pow(f, m)), one_minus_f);
    return g.coeffs;
}

}  // namespace dtsm
