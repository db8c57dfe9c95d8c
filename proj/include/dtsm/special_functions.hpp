#pragma once

namespace dtsm {

// Natural log of the Gamma function for x > 0.
// Relative error stays below 1e-13 on [1e-6, 1e6]; the zeros of log Gamma at
// x = 1 and x = 2 are handled by dedicated Taylor series so relative accuracy
// survives there too.  Throws usage_error for x <= 0.
double log_gamma(double x);

// Generalized binomial coefficient binom(a, k) = a(a-1)...(a-k+1)/k!.
// Evaluated as a left-to-right product of factors (a-j+1)/j with binary
// rescaling, so signs are exact and an integer upper index a < k yields an
// exact zero.  k < 0 throws usage_error.
double gen_binom(double a, long k);

// sin(pi x) with range reduction performed on x itself, so large arguments
// do not lose the phase.
double sin_pi(double x);

// One-parameter Mittag-Leffler function E_alpha(x) = sum_k x^k / Gamma(1+alpha k)
// on the relaxation branch alpha in (0,1], x <= 0.  The power series is summed
// directly for x in [-1, 0]; for x < -1 the completely monotone spectral
// representation is integrated instead, because the alternating series cancels
// catastrophically in double precision there.  Supported box |x| <= 50.
double mittag_leffler(double alpha, double x);

// Wright function W_{-alpha,1-alpha}(z) for alpha in (0,1), z <= 0. This is
// the kernel of the inverse-stable density. Terms are generated by the
// reflection form z^r/r! * Gamma(alpha(r+1)) sin(pi alpha(r+1))/pi and summed
// with compensation in extended precision; summation stops when addends fall
// below 1e-15 of the partial sum (exact-zero terms at Gamma poles do not stop
// it).  Supported box |z| <= 30; a term-count cap of 1e5 and an intermediate
// overflow guard throw range_error where the series is numerically hopeless.
double wright_density_kernel(double alpha, double z);

namespace detail {

// long double log Gamma used internally where extra headroom matters.
long double log_gamma_l(long double x);

// long double sin(pi x), same reduction as sin_pi.
long double sin_pi_l(long double x);

// gen_binom carried out in long double; alternating sums over binomials call
// this to keep cancellation error below their 1e-12 budgets.
long double gen_binom_l(double a, long k);

}  // namespace detail

}  // namespace dtsm
