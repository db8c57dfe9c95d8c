#include "dtsm/limits.hpp"

#include <algorithm>
#include <cmath>

#include "dtsm/errors.hpp"
#include "dtsm/frac_ops.hpp"
#include "dtsm/quadrature.hpp"
#include "dtsm/special_functions.hpp"

namespace dtsm {

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_time(double t) {
    if (!(t > 0.0)) throw usage_error("limits: t must be > 0");
}

}  // namespace

double inverse_stable_density(double alpha, double x, double t) {
    check_time(t);
    if (!(x >= 0.0)) throw usage_error("inverse_stable_density: x must be >= 0");
    const double scale = std::pow(t, -alpha);
    return scale * wright_density_kernel(alpha, -x * scale);
}

double inverse_stable_cdf(double alpha, double x, double t) {
    check_time(t);
    if (!(x >= 0.0)) throw usage_error("inverse_stable_cdf: x must be >= 0");
    // wright_density_kernel supports |z| <= 30; mass beyond is below 1e-15
    // for every alpha bounded away from 1, so the cdf saturates there.
    const double x_cap = 30.0 * std::pow(t, alpha);
    const double upper = std::min(x, x_cap);
    const double f = integrate([&](double u) { return inverse_stable_density(alpha, u, t); },
                               0.0, upper, 1e-8, 1e-14);
    return std::min(f, 1.0);
}

double ks_statistic(const std::vector<double>& sorted_samples,
                    const std::function<double(double)>& cdf) {
    const size_t n = sorted_samples.size();
    if (n == 0) throw usage_error("ks_statistic: need at least one sample");
    double d = 0.0;
    for (size_t i = 0; i < n; ++i) {
        if (i > 0 && sorted_samples[i] < sorted_samples[i - 1])
            throw usage_error("ks_statistic: samples must be sorted ascending");
        const double f = cdf(sorted_samples[i]);
        if (!(f >= 0.0) || f > 1.0 + 1e-12)
            throw usage_error("ks_statistic: cdf value outside [0, 1]");
        d = std::max(d, f - static_cast<double>(i) / static_cast<double>(n));
        d = std::max(d, static_cast<double>(i + 1) / static_cast<double>(n) - f);
    }
    return d;
}

double ml_waiting_time_sample(RngStream& rng, double alpha, double lambda) {
    if (!(alpha > 0.0) || alpha > 1.0)
        throw usage_error("ml_waiting_time_sample: alpha must lie in (0, 1]");
    if (!(lambda > 0.0)) throw usage_error("ml_waiting_time_sample: lambda must be > 0");
    const double e1 = rng.next_exponential();
    if (alpha == 1.0) return e1 / lambda;
    // One-sided stable variate by the Kanter construction, then the
    // exponential time change J = lambda^{-1/a} E^{1/a} S.
    const double u = kPi * rng.next_unit();
    const double e2 = rng.next_exponential();
    const double a = std::sin((1.0 - alpha) * u) *
                     std::pow(std::sin(alpha * u), alpha / (1.0 - alpha)) /
                     std::pow(std::sin(u), 1.0 / (1.0 - alpha));
    const double s = std::pow(a / e2, (1.0 - alpha) / alpha);
    return std::pow(lambda, -1.0 / alpha) * std::pow(e1, 1.0 / alpha) * s;
}

namespace {

void check_experiment_grid(const std::vector<long>& n_grid, long replicas) {
    if (n_grid.empty()) throw usage_error("limit experiment: empty scale grid");
    for (size_t i = 0; i < n_grid.size(); ++i) {
        if (n_grid[i] < 1) throw usage_error("limit experiment: scales must be >= 1");
        if (i > 0 && n_grid[i] <= n_grid[i - 1])
            throw usage_error("limit experiment: scale grid must be strictly increasing");
    }
    if (replicas < 10000)
        throw usage_error("limit experiment: at least 10^4 replicas needed for stable distances");
}

long count_renewals(RngStream& rng, const SibuyaSampler& sampler, long horizon) {
    long t = 0;
    long count = 0;
    for (;;) {
        const long step = sampler(rng);
        if (step > horizon - t) return count;
        t += step;
        ++count;
    }
}

struct MeanStderr {
    double mean = 0.0;
    double stderr_ = 0.0;
};

MeanStderr mean_and_stderr(const std::vector<double>& xs) {
    const double n = static_cast<double>(xs.size());
    long double s = 0.0L;
    for (double x : xs) s += x;
    const double mean = static_cast<double>(s / n);
    long double v = 0.0L;
    for (double x : xs) v += (x - mean) * (x - mean);
    return {mean, std::sqrt(static_cast<double>(v) / (n * (n - 1.0)))};
}

}  // namespace

DistanceReport sibuya_limit_experiment(const ScalingExperiment& exp) {
    if (!(exp.alpha > 0.0) || exp.alpha > 1.0)
        throw usage_error("sibuya_limit_experiment: alpha must lie in (0, 1]");
    check_time(exp.t);
    check_experiment_grid(exp.n_grid, exp.replicas);

    const SibuyaSampler sampler(exp.alpha);
    DistanceReport report;
    for (const long n : exp.n_grid) {
        const long horizon = static_cast<long>(std::floor(static_cast<double>(n) * exp.t));
        const double scale = std::pow(static_cast<double>(n), -exp.alpha);

        std::vector<long> counts(static_cast<size_t>(exp.replicas));
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
        for (long r = 0; r < exp.replicas; ++r) {
            RngStream rng(exp.seed, static_cast<std::uint64_t>(r));
            counts[static_cast<size_t>(r)] = count_renewals(rng, sampler, horizon);
        }

        std::vector<double> samples(counts.size());
        std::sort(counts.begin(), counts.end());
        for (size_t i = 0; i < counts.size(); ++i)
            samples[i] = scale * static_cast<double>(counts[i]);

        DistanceReport::Row row;
        row.n = n;
        if (exp.alpha == 1.0) {
            // Degenerate limit: point mass at t.  The sup distance reduces to
            // the mass the empirical law puts strictly below t plus none at or
            // above; ks_statistic assumes a continuous reference instead.
            const double tt = exp.t;
            size_t below = 0, at_or_below = 0;
            for (double s : samples) {
                if (s < tt) ++below;
                if (s <= tt) ++at_or_below;
            }
            const double nn = static_cast<double>(samples.size());
            row.distance = std::max(static_cast<double>(below) / nn,
                                    1.0 - static_cast<double>(at_or_below) / nn);
        } else {
            // cdf evaluated left to right, integrating only over the gaps.
            double last_x = 0.0;
            double last_f = 0.0;
            const double x_cap = 30.0 * std::pow(exp.t, exp.alpha);
            const auto cdf = [&, x_cap](double x) {
                const double upper = std::min(x, x_cap);
                if (upper > last_x) {
                    last_f += integrate(
                        [&](double u) { return inverse_stable_density(exp.alpha, u, exp.t); },
                        last_x, upper, 1e-8, 1e-14);
                    last_x = upper;
                }
                return std::min(last_f, 1.0);
            };
            row.distance = ks_statistic(samples, cdf);
        }
        row.mc_stderr = 0.5 / std::sqrt(static_cast<double>(exp.replicas));
        const MeanStderr ms = mean_and_stderr(samples);
        row.mean_model = ms.mean;
        row.mean_reference =
            std::pow(exp.t, exp.alpha) / std::exp(log_gamma(1.0 + exp.alpha));
        row.mean_stderr = ms.stderr_;
        report.rows.push_back(row);
    }
    return report;
}

DistanceReport frac_poisson_limit_experiment(DmlKind kind, double alpha, double lambda,
                                             double t, const std::vector<long>& n_grid,
                                             long replicas, std::uint64_t seed) {
    if (!(alpha > 0.0) || alpha > 1.0)
        throw usage_error("frac_poisson_limit_experiment: alpha must lie in (0, 1]");
    if (!(lambda > 0.0)) throw usage_error("frac_poisson_limit_experiment: lambda must be > 0");
    check_time(t);
    check_experiment_grid(n_grid, replicas);
    for (const long n : n_grid)
        if (lambda / std::pow(static_cast<double>(n), alpha) >= 1.0)
            throw usage_error(
                "frac_poisson_limit_experiment: lambda/n^alpha must be < 1; increase n");

    // Continuous fractional Poisson reference, shared by every scale.
    std::vector<int> counts(static_cast<size_t>(replicas));
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (long r = 0; r < replicas; ++r) {
        RngStream rng(seed, static_cast<std::uint64_t>(r));
        double elapsed = 0.0;
        int count = 0;
        for (;;) {
            elapsed += ml_waiting_time_sample(rng, alpha, lambda);
            if (elapsed > t || count > 1000000) break;
            ++count;
        }
        counts[static_cast<size_t>(r)] = count;
    }

    int max_count = 0;
    for (int c : counts) max_count = std::max(max_count, c);
    std::vector<double> ref_pmf(static_cast<size_t>(max_count) + 1, 0.0);
    for (int c : counts) ref_pmf[static_cast<size_t>(c)] += 1.0;
    long double mc_mean_acc = 0.0L, mc_var_acc = 0.0L;
    for (int c : counts) mc_mean_acc += c;
    const double mc_mean = static_cast<double>(mc_mean_acc / replicas);
    for (int c : counts) mc_var_acc += (c - mc_mean) * (c - mc_mean);
    const double mc_mean_stderr = std::sqrt(static_cast<double>(mc_var_acc) /
                                            (static_cast<double>(replicas) *
                                             (static_cast<double>(replicas) - 1.0)));
    for (double& p : ref_pmf) p /= static_cast<double>(replicas);

    DistanceReport report;
    for (const long n : n_grid) {
        const double lambda_n = lambda / std::pow(static_cast<double>(n), alpha);
        const double p_n = lambda_n / (1.0 + lambda_n);
        const long horizon = static_cast<long>(std::floor(static_cast<double>(n) * t));

        // Exact rescaled pmf, extended until the tail is accounted for.
        std::vector<double> exact;
        long m_max = std::max<long>(max_count + 8, 32);
        for (;;) {
            m_max = std::min(m_max, horizon);
            const std::vector<std::vector<double>> grid =
                frac_bernoulli_grid(kind, alpha, p_n, m_max, horizon);
            exact.assign(static_cast<size_t>(m_max) + 1, 0.0);
            long double total = 0.0L;
            for (long m = 0; m <= m_max; ++m) {
                exact[static_cast<size_t>(m)] = grid[static_cast<size_t>(m)][static_cast<size_t>(horizon)];
                total += exact[static_cast<size_t>(m)];
            }
            if (1.0L - total < 1e-10L || m_max == horizon) break;
            m_max *= 2;
        }

        long double tv_acc = 0.0L;
        long double exact_mean_acc = 0.0L;
        long double noise_acc = 0.0L;
        const size_t k_both = std::max(exact.size(), ref_pmf.size());
        for (size_t m = 0; m < k_both; ++m) {
            const double pe = m < exact.size() ? exact[m] : 0.0;
            const double pr = m < ref_pmf.size() ? ref_pmf[m] : 0.0;
            tv_acc += std::fabs(pe - pr);
            exact_mean_acc += static_cast<long double>(m) * pe;
            noise_acc += pr * (1.0 - pr);
        }

        DistanceReport::Row row;
        row.n = n;
        row.distance = 0.5 * static_cast<double>(tv_acc);
        row.mc_stderr =
            0.5 * std::sqrt(static_cast<double>(noise_acc) / static_cast<double>(replicas));
        row.mean_model = static_cast<double>(exact_mean_acc);
        row.mean_reference = mc_mean;
        row.mean_stderr = mc_mean_stderr;
        report.rows.push_back(row);
    }
    return report;
}

}  // namespace dtsm
