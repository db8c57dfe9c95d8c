#include "dtsm/semi_markov.hpp"

#include <algorithm>
#include <cmath>

#include "dtsm/errors.hpp"
#include "dtsm/power_series.hpp"

namespace dtsm {

StepDist StepDist::sibuya(double alpha) {
    StepDist d;
    d.kind_ = Kind::sibuya;
    d.alpha_ = alpha;
    d.sampler_ = std::make_shared<const SibuyaSampler>(alpha);
    return d;
}

StepDist StepDist::point_mass(long value) {
    if (value < 1) throw usage_error("StepDist: point mass must sit on a positive integer");
    StepDist d;
    d.kind_ = Kind::point;
    d.value_ = value;
    return d;
}

StepDist StepDist::table(DiscretePmf pmf) {
    pmf.validate();
    if (!pmf.mass.empty() && pmf.mass[0] != 0.0)
        throw usage_error("StepDist: step distribution must have no mass at 0");
    StepDist d;
    d.kind_ = Kind::table;
    d.mass_ = pmf.mass;
    d.table_tail_ = pmf.tail_bound;
    return d;
}

double StepDist::sibuya_alpha() const {
    if (kind_ != Kind::sibuya) throw usage_error("StepDist: not a Sibuya distribution");
    return alpha_;
}

long StepDist::sample(RngStream& rng) const {
    switch (kind_) {
        case Kind::sibuya:
            return (*sampler_)(rng);
        case Kind::point:
            return value_;
        case Kind::table: {
            if (table_tail_ > 1e-12)
                throw usage_error("StepDist: cannot sample a table with truncated mass");
            const double u = rng.next_unit();
            long double cum = 0.0L;
            long last_positive = 1;
            for (size_t k = 1; k < mass_.size(); ++k) {
                if (mass_[k] <= 0.0) continue;
                last_positive = static_cast<long>(k);
                cum += mass_[k];
                if (u <= static_cast<double>(cum)) return last_positive;
            }
            return last_positive;
        }
    }
    throw usage_error("StepDist: invalid kind");
}

double StepDist::pmf_at(long k) const {
    if (k < 1) throw usage_error("StepDist: pmf index must be >= 1");
    switch (kind_) {
        case Kind::sibuya:
            return sibuya_pmf(alpha_, k);
        case Kind::point:
            return k == value_ ? 1.0 : 0.0;
        case Kind::table:
            return k < static_cast<long>(mass_.size()) ? mass_[static_cast<size_t>(k)] : 0.0;
    }
    throw usage_error("StepDist: invalid kind");
}

double StepDist::survival(long k) const {
    if (k < 0) throw usage_error("StepDist: survival index must be >= 0");
    switch (kind_) {
        case Kind::sibuya:
            return sibuya_survival(alpha_, k);
        case Kind::point:
            return k < value_ ? 1.0 : 0.0;
        case Kind::table: {
            long double s = table_tail_;
            for (size_t j = mass_.size(); j-- > 1;) {
                if (static_cast<long>(j) <= k) break;
                s += mass_[j];
            }
            return static_cast<double>(s);
        }
    }
    throw usage_error("StepDist: invalid kind");
}

DiscretePmf StepDist::pmf_to(long t_max) const {
    if (t_max < 0) throw usage_error("StepDist: t_max must be >= 0");
    DiscretePmf out;
    out.mass.assign(static_cast<size_t>(t_max) + 1, 0.0);
    for (long k = 1; k <= t_max; ++k) out.mass[static_cast<size_t>(k)] = pmf_at(k);
    out.tail_bound = survival(t_max);
    return out;
}

long PathSample::state_at(long t) const {
    if (t < 0 || t > horizon) throw usage_error("state_at: t outside [0, horizon]");
    long start = 0;
    for (const Epoch& e : epochs) {
        if (t < start + e.sojourn) return e.state;
        start += e.sojourn;
    }
    throw usage_error("state_at: path does not cover t");
}

long PathSample::age_at(long t) const {
    if (t < 0 || t > horizon) throw usage_error("age_at: t outside [0, horizon]");
    long start = 0;
    for (const Epoch& e : epochs) {
        if (t < start + e.sojourn) return t - start;
        start += e.sojourn;
    }
    throw usage_error("age_at: path does not cover t");
}

namespace {

// Inverse-cdf scan; rounding slack in the row sum falls back to the last
// positive-mass entry.
long draw_from_row(RngStream& rng, const std::vector<double>& row) {
    const double u = rng.next_unit();
    long double cum = 0.0L;
    long last_positive = -1;
    for (size_t j = 0; j < row.size(); ++j) {
        if (row[j] <= 0.0) continue;
        last_positive = static_cast<long>(j);
        cum += row[j];
        if (u <= static_cast<double>(cum)) return last_positive;
    }
    if (last_positive < 0) throw usage_error("simulate: transition row has no mass");
    return last_positive;
}

void check_initial(long initial, long n) {
    if (initial < 0 || initial >= n) throw usage_error("simulate: initial state out of range");
}

long sojourn_sample(RngStream& rng, const StepDist& step, double p, DmlKind kind) {
    constexpr long kCap = 1L << 60;
    const long m = next_geometric(rng, p);
    const long steps = (kind == DmlKind::type_a) ? m : m - 1;
    long total = (kind == DmlKind::type_a) ? 0 : 1;
    for (long i = 0; i < steps; ++i) {
        total += step.sample(rng);
        if (total >= kCap) return kCap;  // beyond any usable horizon
    }
    return total;
}

template <typename SojournFn, typename TargetFn>
PathSample run_path(long initial, long horizon, SojournFn&& sojourn, TargetFn&& target) {
    if (horizon < 0) throw usage_error("simulate: horizon must be >= 0");
    PathSample path;
    path.horizon = horizon;
    long t = 0;
    long state = initial;
    for (;;) {
        const long j = sojourn(state);
        path.epochs.push_back({state, j});
        if (t + j > horizon) {
            path.age = horizon - t;
            return path;
        }
        t += j;
        state = target(state);
    }
}

}  // namespace

PathSample simulate(const MarkovSpec& spec, RngStream& rng, long initial, long horizon) {
    spec.validate();
    check_initial(initial, spec.size());
    const JumpChain jc = decompose(spec);
    return run_path(
        initial, horizon,
        [&](long i) { return next_geometric(rng, jc.p[static_cast<size_t>(i)]); },
        [&](long i) { return draw_from_row(rng, jc.h[static_cast<size_t>(i)]); });
}

PathSample simulate(const SemiMarkovSpec& spec, RngStream& rng, long initial, long horizon) {
    const long n = spec.jump_chain.size();
    if (n == 0) throw usage_error("simulate: empty jump chain");
    check_initial(initial, n);
    return run_path(
        initial, horizon,
        [&](long i) {
            return sojourn_sample(rng, spec.step_dist, spec.jump_chain.p[static_cast<size_t>(i)],
                                  spec.kind);
        },
        [&](long i) { return draw_from_row(rng, spec.jump_chain.h[static_cast<size_t>(i)]); });
}

PathSample time_change_sample(const MarkovSpec& markov, const StepDist& step_dist,
                              RngStream& rng, long initial, long horizon) {
    markov.validate();
    check_initial(initial, markov.size());
    if (horizon < 0) throw usage_error("time_change_sample: horizon must be >= 0");
    for (long i = 0; i < markov.size(); ++i)
        if (!(markov.p(i) > 0.0))
            throw usage_error("time_change_sample: state '" +
                              markov.states[static_cast<size_t>(i)] +
                              "' is absorbing; the time change requires none");

    const RenewalPath renewals =
        renewal_path(rng, [&](RngStream& r) { return step_dist.sample(r); }, horizon);
    const long n_steps = renewals.count_at(horizon);

    std::vector<long> x(static_cast<size_t>(n_steps) + 1);
    x[0] = initial;
    for (long m = 1; m <= n_steps; ++m)
        x[static_cast<size_t>(m)] =
            draw_from_row(rng, markov.a[static_cast<size_t>(x[static_cast<size_t>(m - 1)])]);

    PathSample path;
    path.horizon = horizon;
    // L(t) increments exactly at the renewal times <= horizon.
    long cur = x[0];
    long run_start = 0;
    long l = 0;
    for (size_t n = 1; n < renewals.renewal_times.size(); ++n) {
        const long tn = renewals.renewal_times[static_cast<size_t>(n)];
        if (tn > horizon) break;
        ++l;
        const long nxt = x[static_cast<size_t>(l)];
        if (nxt != cur) {
            path.epochs.push_back({cur, tn - run_start});
            cur = nxt;
            run_start = tn;
        }
    }
    path.epochs.push_back({cur, horizon - run_start + 1});
    path.age = horizon - run_start;
    return path;
}

namespace {

void check_t_max(long t_max) {
    if (t_max < 0) throw usage_error("enumerate_exact: t_max must be >= 0");
    if (t_max > 12)
        throw usage_error("enumerate_exact: t_max capped at 12, the exact DP grows too fast");
}

// pmf of the sojourn law through t_max by series extraction:
//   type_a: p F / (1 - q F)     type_b: p u / (1 - q F)
std::vector<double> sojourn_pmf(const StepDist& step, double p, DmlKind kind, long t_max) {
    const DiscretePmf zpmf = step.pmf_to(t_max);
    TruncatedPowerSeries f(t_max);
    for (long k = 1; k <= t_max; ++k)
        f.coeffs[static_cast<size_t>(k)] = zpmf.mass[static_cast<size_t>(k)];
    TruncatedPowerSeries denom(t_max, 1.0);
    for (long k = 1; k <= t_max; ++k)
        denom.coeffs[static_cast<size_t>(k)] = -(1.0 - p) * f.coeffs[static_cast<size_t>(k)];
    TruncatedPowerSeries numer(t_max);
    if (kind == DmlKind::type_a) {
        for (long k = 0; k <= t_max; ++k)
            numer.coeffs[static_cast<size_t>(k)] = p * f.coeffs[static_cast<size_t>(k)];
    } else {
        if (t_max >= 1) numer.coeffs[1] = p;
    }
    return ps_mul_serial(numer, ps_inv(denom)).coeffs;
}

}  // namespace

std::vector<std::vector<double>> enumerate_exact(const MarkovSpec& spec, long initial,
                                                 long t_max) {
    spec.validate();
    check_initial(initial, spec.size());
    check_t_max(t_max);
    const size_t n = spec.states.size();
    std::vector<std::vector<double>> out;
    std::vector<double> row(n, 0.0);
    row[static_cast<size_t>(initial)] = 1.0;
    out.push_back(row);
    for (long t = 1; t <= t_max; ++t) {
        std::vector<double> next(n, 0.0);
        for (size_t j = 0; j < n; ++j) {
            long double s = 0.0L;
            for (size_t i = 0; i < n; ++i)
                s += static_cast<long double>(row[i]) * static_cast<long double>(spec.a[i][j]);
            next[j] = static_cast<double>(s);
        }
        row = next;
        out.push_back(row);
    }
    return out;
}

std::vector<std::vector<double>> enumerate_exact(const SemiMarkovSpec& spec, long initial,
                                                 long t_max) {
    const long n = spec.jump_chain.size();
    if (n == 0) throw usage_error("enumerate_exact: empty jump chain");
    check_initial(initial, n);
    check_t_max(t_max);

    // Per-state sojourn pmf and survival through t_max.
    std::vector<std::vector<double>> jp(static_cast<size_t>(n));
    std::vector<std::vector<double>> js(static_cast<size_t>(n));
    for (long i = 0; i < n; ++i) {
        jp[static_cast<size_t>(i)] =
            sojourn_pmf(spec.step_dist, spec.jump_chain.p[static_cast<size_t>(i)], spec.kind,
                        t_max);
        std::vector<double>& surv = js[static_cast<size_t>(i)];
        surv.assign(static_cast<size_t>(t_max) + 1, 0.0);
        long double acc = 1.0L;
        for (long k = 0; k <= t_max; ++k) {
            if (k >= 1) acc -= jp[static_cast<size_t>(i)][static_cast<size_t>(k)];
            surv[static_cast<size_t>(k)] = static_cast<double>(std::max(acc, 0.0L));
        }
    }

    // g[t][j] = P(a jump lands in state j exactly at time t); g[0] = start.
    std::vector<std::vector<double>> g(static_cast<size_t>(t_max) + 1,
                                       std::vector<double>(static_cast<size_t>(n), 0.0));
    g[0][static_cast<size_t>(initial)] = 1.0;
    for (long t = 0; t <= t_max; ++t)
        for (long i = 0; i < n; ++i) {
            const double gi = g[static_cast<size_t>(t)][static_cast<size_t>(i)];
            if (gi == 0.0) continue;
            for (long k = 1; t + k <= t_max; ++k) {
                const double jump = gi * jp[static_cast<size_t>(i)][static_cast<size_t>(k)];
                if (jump == 0.0) continue;
                for (long j = 0; j < n; ++j)
                    g[static_cast<size_t>(t + k)][static_cast<size_t>(j)] +=
                        jump * spec.jump_chain.h[static_cast<size_t>(i)][static_cast<size_t>(j)];
            }
        }

    std::vector<std::vector<double>> out(static_cast<size_t>(t_max) + 1,
                                         std::vector<double>(static_cast<size_t>(n), 0.0));
    for (long t = 0; t <= t_max; ++t)
        for (long j = 0; j < n; ++j) {
            long double s = 0.0L;
            for (long u = 0; u <= t; ++u)
                s += static_cast<long double>(g[static_cast<size_t>(u)][static_cast<size_t>(j)]) *
                     static_cast<long double>(js[static_cast<size_t>(j)][static_cast<size_t>(t - u)]);
            out[static_cast<size_t>(t)][static_cast<size_t>(j)] = static_cast<double>(s);
        }
    return out;
}

std::vector<std::vector<double>> enumerate_exact(const MarkovSpec& markov,
                                                 const StepDist& step_dist, long initial,
                                                 long t_max) {
    markov.validate();
    check_initial(initial, markov.size());
    check_t_max(t_max);
    const size_t n = markov.states.size();

    // P(Y(t) = j) = sum_m P(L(t) = m) (a^m)_{initial, j}
    std::vector<std::vector<double>> lp(static_cast<size_t>(t_max) + 1);
    const DiscretePmf zpmf = step_dist.pmf_to(t_max);
    for (long m = 0; m <= t_max; ++m)
        lp[static_cast<size_t>(m)] = counting_pmf_via_gf(zpmf, m, t_max);

    std::vector<std::vector<double>> out(static_cast<size_t>(t_max) + 1,
                                         std::vector<double>(n, 0.0));
    Matrix power = mat_identity(static_cast<long>(n));
    for (long m = 0; m <= t_max; ++m) {
        if (m > 0) power = mat_mul(power, markov.a);
        for (long t = m; t <= t_max; ++t) {
            const double w = lp[static_cast<size_t>(m)][static_cast<size_t>(t)];
            if (w == 0.0) continue;
            for (size_t j = 0; j < n; ++j)
                out[static_cast<size_t>(t)][j] += w * power[static_cast<size_t>(initial)][j];
        }
    }
    return out;
}

double timechange_autocorr(const CountingMoments& lm, double mean_x1, double var_x1) {
    if (!(var_x1 >= 0.0)) throw usage_error("timechange_autocorr: variance must be >= 0");
    const double mx2 = mean_x1 * mean_x1;
    const double cov = lm.cross - lm.mean_t1 * lm.mean_t2;
    const double var_s = lm.second_t1 - lm.mean_t1 * lm.mean_t1;
    const double var_t = lm.second_t2 - lm.mean_t2 * lm.mean_t2;
    const double num = cov * mx2 + lm.mean_t1 * var_x1;
    const double den_s = var_s * mx2 + lm.mean_t1 * var_x1;
    const double den_t = var_t * mx2 + lm.mean_t2 * var_x1;
    if (!(den_s > 0.0) || !(den_t > 0.0))
        throw usage_error("timechange_autocorr: degenerate (zero-variance) denominator");
    return num / (std::sqrt(den_s) * std::sqrt(den_t));
}

}  // namespace dtsm
