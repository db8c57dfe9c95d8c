#include "dtsm/special_functions.hpp"

#include <cfloat>
#include <cmath>
#include <cstdint>
#include <string>

#include "dtsm/errors.hpp"
#include "dtsm/quadrature.hpp"

namespace dtsm {
namespace {

constexpr long double kPi = 3.14159265358979323846264338327950288L;
constexpr long double kEulerGamma = 0.577215664901532860606512090082402431L;
constexpr long double kLogSqrt2Pi = 0.918938533204672741780329736405617639L;

// zeta(k)-1 for k = 2..41.  Drives the accelerated Taylor series of
// log Gamma(1+z); the k-th addend is bounded by (|z|/2)^k so forty terms are
// far more than |z| <= 1/2 ever needs.
constexpr long double kZetaM1[] = {
    0.6449340668482264364724152e+0L,  0.2020569031595942853997382e+0L,
    0.8232323371113819151600369e-1L,  0.3692775514336992633136549e-1L,
    0.1734306198444913971451793e-1L,  0.8349277381922826839797549e-2L,
    0.4077356197944339378685239e-2L,  0.2008392826082214417852769e-2L,
    0.9945751278180853371459589e-3L,  0.4941886041194645587022825e-3L,
    0.2460865533080482986379980e-3L,  0.1227133475784891467518365e-3L,
    0.6124813505870482925854511e-4L,  0.3058823630702049355172851e-4L,
    0.1528225940865187173257149e-4L,  0.7637197637899762273600294e-5L,
    0.3817293264999839856461645e-5L,  0.1908212716553938925656958e-5L,
    0.9539620338727961131520387e-6L,  0.4769329867878064631167195e-6L,
    0.2384505027277329900036481e-6L,  0.1192199259653110730677888e-6L,
    0.5960818905125947961244030e-7L,  0.2980350351465228018606371e-7L,
    0.1490155482836504123465858e-7L,  0.7450711789835429491981016e-8L,
    0.3725334024788457054819148e-8L,  0.1862659723513049006403935e-8L,
    0.9313274324196681828718401e-9L,  0.4656629065033784072989187e-9L,
    0.2328311833676505492002149e-9L,  0.1164155017270051977592699e-9L,
    0.5820772087902700889250753e-10L, 0.2910385044497099686928299e-10L,
    0.1455192189104198423598010e-10L, 0.7275959835057481014508872e-11L,
    0.3637979547378651190236902e-11L, 0.1818989650307065947652863e-11L,
    0.9094947840263889282877190e-12L, 0.4547473783042154027043683e-12L,
};

// log Gamma(1+z) for |z| <= 1/2 via
//   -log(1+z) + z(1-gamma) + sum_{k>=2} (-1)^k (zeta(k)-1) z^k / k.
long double log_gamma_taylor(long double z) {
    long double acc = 0.0L;
    long double zk = z;  // z^k
    for (int k = 2; k < 42; ++k) {
        zk *= z;
        long double add = kZetaM1[k - 2] * zk / k;
        if ((k & 1) != 0) add = -add;
        acc += add;
        if (fabsl(add) < 1e-22L * (fabsl(acc) + 1e-30L)) break;
    }
    return -log1pl(z) + z * (1.0L - kEulerGamma) + acc;
}

// Lanczos approximation (g = 7, 9 terms), adequate for x >= 2.5 where
// log Gamma has no zeros and relative error ~1e-15 carries over.
long double log_gamma_lanczos(long double x) {
    static const long double c[9] = {
        0.99999999999980993L,     676.5203681218851L,    -1259.1392167224028L,
        771.32342877765313L,      -176.61502916214059L,  12.507343278686905L,
        -0.13857109526572012L,    9.9843695780195716e-6L, 1.5056327351493116e-7L,
    };
    long double a = c[0];
    for (int i = 1; i < 9; ++i) a += c[i] / (x - 1.0L + i);
    long double t = x + 6.5L;
    return kLogSqrt2Pi + (x - 0.5L) * logl(t) - t + logl(a);
}

}  // namespace

namespace detail {

long double log_gamma_l(long double x) {
    if (x < 0.5L) return log_gamma_l(x + 1.0L) - logl(x);
    if (x <= 1.5L) return log_gamma_taylor(x - 1.0L);
    if (x <= 2.5L) return log1pl(x - 2.0L) + log_gamma_taylor(x - 2.0L);
    return log_gamma_lanczos(x);
}

long double sin_pi_l(long double x) {
    long double n = nearbyintl(x);
    long double s = sinl(kPi * (x - n));
    if (fmodl(fabsl(n), 2.0L) == 1.0L) s = -s;
    return s;
}

}  // namespace detail

double log_gamma(double x) {
    if (!(x > 0.0)) throw usage_error("log_gamma: requires x > 0, got " + std::to_string(x));
    return static_cast<double>(detail::log_gamma_l(x));
}

double sin_pi(double x) { return static_cast<double>(detail::sin_pi_l(x)); }

namespace detail {

long double gen_binom_l(double a, long k) {
    if (k < 0) throw usage_error("gen_binom: requires k >= 0");
    long double m = 1.0L;
    long e2 = 0;
    for (long j = 1; j <= k; ++j) {
        m *= (static_cast<long double>(a) - j + 1) / j;
        if (m == 0.0L) return 0.0L;  // integer a < k: exact zero, keep it
        if (fabsl(m) > 0x1p+900L) { m = ldexpl(m, -1800); e2 += 1800; }
        else if (fabsl(m) < 0x1p-900L) { m = ldexpl(m, 1800); e2 -= 1800; }
    }
    if (e2 != 0) {
        if (e2 > 20000) e2 = 20000;      // ldexpl saturates to inf below
        if (e2 < -20000) e2 = -20000;    // ...and flushes to zero here
        m = ldexpl(m, static_cast<int>(e2));
        if (std::isinf(m)) throw range_error("gen_binom: result exceeds supported range");
    }
    return m;
}

}  // namespace detail

double gen_binom(double a, long k) {
    long double v = detail::gen_binom_l(a, k);
    if (fabsl(v) > static_cast<long double>(DBL_MAX))
        throw range_error("gen_binom: result exceeds double range");
    return static_cast<double>(v);
}

namespace {

// Power-series branch of E_alpha(x), used on [-1, 0] where the first term
// dominates and no cancellation builds up.
double mittag_leffler_series(double alpha, double x) {
    long double sum = 1.0L, comp = 0.0L;
    long double term = 1.0L;
    long double lg_cur = 0.0L;  // log Gamma(1 + alpha k) at current k
    int small_run = 0;
    for (long k = 1; k <= 100000; ++k) {
        long double lg_next = detail::log_gamma_l(1.0L + alpha * static_cast<long double>(k));
        term *= x * expl(lg_cur - lg_next);
        lg_cur = lg_next;
        long double y = term - comp;
        long double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        if (fabsl(term) < 1e-15L * fmaxl(1.0L, fabsl(sum))) {
            if (++small_run >= 2) return static_cast<double>(sum);
        } else {
            small_run = 0;
        }
    }
    throw range_error("mittag_leffler: series did not converge within term cap");
}

// Spectral branch for x < -1: with y = -x, T = y^{1/alpha}, c = cos(pi alpha),
//   E_alpha(-y) = sin(pi alpha)/(alpha pi) *
//                 [ int_0^1 exp(-T s^{1/alpha}) / (s^2+2cs+1) ds
//                 + int_0^1 exp(-T u^{-1/alpha}) / (1+2cu+u^2) du ].
// Both integrands are smooth on [0,1]; the exponent is built in log space so
// small alpha cannot overflow pow.
double mittag_leffler_integral(double alpha, double y) {
    const double log_y = std::log(y);
    const double inv_a = 1.0 / alpha;
    const double c = static_cast<double>(detail::sin_pi_l(0.5L - static_cast<long double>(alpha)));  // cos(pi a)
    auto decay = [&](double w) {  // exp(-exp(w)) with under/overflow guards
        if (w > 709.0) return 0.0;
        if (w < -745.0) return 1.0;
        return std::exp(-std::exp(w));
    };
    auto f_inner = [&](double s) {
        if (s <= 0.0) return 1.0;
        double w = inv_a * (log_y + std::log(s));
        return decay(w) / ((s + 2.0 * c) * s + 1.0);
    };
    auto f_outer = [&](double u) {
        if (u <= 0.0) return 0.0;
        double w = inv_a * (log_y - std::log(u));
        return decay(w) / ((u + 2.0 * c) * u + 1.0);
    };
    double i1 = integrate(f_inner, 0.0, 1.0, 5e-14, 1e-300);
    double i2 = integrate(f_outer, 0.0, 1.0, 5e-14, 1e-300);
    double front = static_cast<double>(detail::sin_pi_l(alpha) / (alpha * kPi));
    return front * (i1 + i2);
}

}  // namespace

double mittag_leffler(double alpha, double x) {
    if (!(alpha > 0.0) || alpha > 1.0)
        throw usage_error("mittag_leffler: requires alpha in (0,1]");
    if (x > 0.0)
        throw usage_error("mittag_leffler: only the relaxation branch x <= 0 is supported");
    if (x < -50.0)
        throw range_error("mittag_leffler: |x| > 50 is outside the supported range");
    if (alpha == 1.0) return std::exp(x);
    if (x == 0.0) return 1.0;
    if (x >= -1.0) return mittag_leffler_series(alpha, x);
    return mittag_leffler_integral(alpha, -x);
}

namespace {

// Tail branch.  With y = |z|, lam = y^{1/(1-a)} and the Kanter function
//   A(phi) = sin((1-a)phi) sin(a phi)^{a/(1-a)} / sin(phi)^{1/(1-a)},
// which increases from A(0) = (1-a) a^{a/(1-a)} to infinity on (0, pi),
//   M_a(y) = y^{a/(1-a)} / ((1-a) pi) * int_0^pi A(phi) e^{-lam A(phi)} dphi.
// The integrand is positive and bell-shaped, so the quadrature keeps full
// relative accuracy where the power series cancels away thousands of digits.
double wright_tail_integral(double alpha, double y) {
    const double ia = 1.0 / (1.0 - alpha);
    const double log_lam = ia * std::log(y);
    if (log_lam > 709.0) return 0.0;  // decay underflows for every phi
    const double lam = std::exp(log_lam);
    const double a0 = (1.0 - alpha) * std::pow(alpha, alpha * ia);
    if (lam * a0 > 745.0) return 0.0;  // underflows at the integrand maximum
    auto h = [alpha, ia, lam](double phi) {
        if (phi <= 0.0 || phi >= kPi) return 0.0;
        const double w = std::log(std::sin((1.0 - alpha) * phi)) +
                         alpha * ia * std::log(std::sin(alpha * phi)) -
                         ia * std::log(std::sin(phi));
        if (w > 700.0) return 0.0;  // A overflows; the decay factor wins
        const double a_val = std::exp(w);
        const double e = lam * a_val;
        return e > 745.0 ? 0.0 : a_val * std::exp(-e);
    };
    // A e^{-lam A} peaks at A = 1/lam, or at A(0) when lam A(0) >= 1.
    const double h_max =
        lam * a0 >= 1.0 ? a0 * std::exp(-lam * a0) : 1.0 / (2.718281828459045 * lam);
    const double mass = integrate(h, 0.0, kPi, 1e-12, h_max * 1e-13);
    if (mass <= 0.0) return 0.0;
    return std::exp(alpha * ia * std::log(y)) / ((1.0 - alpha) * kPi) * mass;
}

}  // namespace

double wright_density_kernel(double alpha, double z) {
    if (!(alpha > 0.0) || !(alpha < 1.0))
        throw usage_error("wright_density_kernel: requires alpha in (0,1)");
    if (z > 0.0)
        throw usage_error("wright_density_kernel: requires z <= 0");
    if (z < -30.0)
        throw range_error("wright_density_kernel: |z| > 30 is outside the supported range");

    const long double a = alpha;
    long double mag = expl(detail::log_gamma_l(a));  // |z|^r/r! * Gamma(a(r+1)) at r = 0
    long double lg_cur = detail::log_gamma_l(a);
    long double phase = a;        // a(r+1) mod 2
    bool negate = false;          // parity of r (z <= 0 makes z^r alternate)
    long double az = fabsl(static_cast<long double>(z));

    long double sum = 0.0L, comp = 0.0L;
    int small_run = 0;
    for (long r = 0; r < 100000; ++r) {
        long double term = mag * detail::sin_pi_l(phase) / kPi;
        if (negate) term = -term;
        // Terms past ~1e3 cancel below the long double noise floor; the
        // integral form stays accurate there.
        if (fabsl(term) > 1e3L) return wright_tail_integral(alpha, static_cast<double>(az));
        long double y = term - comp;
        long double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        if (fabsl(term) < 1e-15L * fmaxl(1.0L, fabsl(sum))) {
            // Gamma poles make exact-zero addends; require a run of small
            // terms so a pole cannot truncate the series early.
            if (++small_run >= 3) return static_cast<double>(sum);
        } else {
            small_run = 0;
        }
        long double lg_next = detail::log_gamma_l(a * static_cast<long double>(r + 2));
        mag *= az / (r + 1) * expl(lg_next - lg_cur);
        lg_cur = lg_next;
        phase += a;
        if (phase >= 2.0L) phase -= 2.0L;
        negate = !negate;
    }
    throw range_error("wright_density_kernel: series did not converge within term cap");
}

}  // namespace dtsm
