#include "dtsm/frac_ops.hpp"

#include <cmath>

#include "dtsm/errors.hpp"
#include "dtsm/power_series.hpp"
#include "dtsm/special_functions.hpp"

namespace dtsm {

namespace {

void check_alpha_unit(double alpha, const char* who) {
    if (!(alpha > 0.0) || alpha > 1.0)
        throw usage_error(std::string(who) + ": alpha must lie in (0, 1]");
}

long double seq_at(const std::vector<double>& seq, long i) {
    if (i < 0 || i >= static_cast<long>(seq.size())) return 0.0L;
    return seq[static_cast<size_t>(i)];
}

}  // namespace

FracKernel FracKernel::sibuya(double alpha) {
    check_alpha_unit(alpha, "FracKernel");
    FracKernel k;
    k.sibuya_ = true;
    k.alpha_ = alpha;
    return k;
}

FracKernel FracKernel::general(DiscretePmf step_pmf) {
    step_pmf.validate();
    if (step_pmf.mass[0] != 0.0)
        throw usage_error("FracKernel: kernel must have no mass at 0");
    FracKernel k;
    k.mass_ = step_pmf.mass;
    k.tail_ = step_pmf.tail_bound;
    // surv_[t] = tail + sum of masses beyond t, accumulated back to front.
    k.surv_.assign(k.mass_.size(), 0.0);
    long double acc = k.tail_;
    for (size_t t = k.mass_.size(); t-- > 0;) {
        k.surv_[t] = static_cast<double>(acc);
        acc += k.mass_[t];
    }
    return k;
}

double FracKernel::alpha() const {
    if (!sibuya_) throw usage_error("FracKernel: not a Sibuya kernel");
    return alpha_;
}

double FracKernel::mu(long tau) const {
    if (tau < 0) throw usage_error("FracKernel: lag must be >= 0");
    if (tau == 0) return 0.0;
    if (sibuya_) return sibuya_pmf(alpha_, tau);
    return tau < static_cast<long>(mass_.size()) ? mass_[static_cast<size_t>(tau)] : 0.0;
}

double FracKernel::survival(long t) const {
    if (t < 0) throw usage_error("FracKernel: time must be >= 0");
    if (sibuya_) return sibuya_survival(alpha_, t);
    if (t < static_cast<long>(surv_.size())) return surv_[static_cast<size_t>(t)];
    return tail_;
}

void FracKernel::require_resolved(long horizon) const {
    if (sibuya_) return;
    if (horizon >= static_cast<long>(mass_.size()) && tail_ > 1e-12)
        throw accuracy_error(
            "FracKernel: kernel tail bound too large for the requested horizon");
}

double frac_diff(double alpha, const std::vector<double>& seq, long t) {
    check_alpha_unit(alpha, "frac_diff");
    if (t < 0) throw usage_error("frac_diff: t must be >= 0");
    long double sum = 0.0L, comp = 0.0L;
    for (long k = 0; k <= t; ++k) {
        const long double v = seq_at(seq, t - k);
        if (v == 0.0L) continue;
        const long double w = detail::gen_binom_l(alpha, k);
        const long double term = (k % 2 == 0 ? w : -w) * v;
        const long double y = term - comp;
        const long double s = sum + y;
        comp = (s - sum) - y;
        sum = s;
    }
    return static_cast<double>(sum);
}

double gen_frac_deriv(const FracKernel& kernel, const std::vector<double>& seq, long t) {
    if (t < 0) throw usage_error("gen_frac_deriv: t must be >= 0");
    long double sum = 0.0L, comp = 0.0L;
    for (long tau = 1; tau <= t; ++tau) {
        const long double v = seq_at(seq, t - tau);
        if (v == 0.0L) continue;
        const long double term = static_cast<long double>(kernel.mu(tau)) * v;
        const long double y = term - comp;
        const long double s = sum + y;
        comp = (s - sum) - y;
        sum = s;
    }
    return static_cast<double>(seq_at(seq, t) - sum);
}

double SolutionGrid::at(long i, long j, long t) const {
    return values[static_cast<size_t>((i * n_states + j) * (horizon + 1) + t)];
}

double& SolutionGrid::at(long i, long j, long t) {
    return values[static_cast<size_t>((i * n_states + j) * (horizon + 1) + t)];
}

namespace {

std::vector<double> jump_lambdas(const JumpChain& jump) {
    std::vector<double> lam(static_cast<size_t>(jump.size()));
    for (size_t i = 0; i < lam.size(); ++i) {
        const double p = jump.p[i];
        if (!(p > 0.0) || !(p < 1.0))
            throw usage_error(
                "governing system: lambda_i = p_i/(1-p_i) needs jump probability in (0, 1)");
        lam[i] = p / (1.0 - p);
    }
    return lam;
}

}  // namespace

SolutionGrid solve_backward(const JumpChain& jump, const FracKernel& kernel, long horizon) {
    if (horizon < 0) throw usage_error("solve_backward: horizon must be >= 0");
    const long n = jump.size();
    if (n == 0) throw usage_error("solve_backward: empty jump chain");
    kernel.require_resolved(horizon);
    const std::vector<double> lam = jump_lambdas(jump);

    std::vector<double> mu(static_cast<size_t>(horizon) + 1, 0.0);
    std::vector<double> surv(static_cast<size_t>(horizon) + 1, 0.0);
    for (long t = 0; t <= horizon; ++t) {
        mu[static_cast<size_t>(t)] = kernel.mu(t);
        surv[static_cast<size_t>(t)] = kernel.survival(t);
    }

    SolutionGrid grid;
    grid.n_states = n;
    grid.horizon = horizon;
    grid.values.assign(static_cast<size_t>(n) * static_cast<size_t>(n) *
                           (static_cast<size_t>(horizon) + 1),
                       0.0);
    for (long i = 0; i < n; ++i) grid.at(i, i, 0) = 1.0;

    for (long t = 1; t <= horizon; ++t)
        for (long i = 0; i < n; ++i) {
            const double li = lam[static_cast<size_t>(i)];
            for (long j = 0; j < n; ++j) {
                long double s = 0.0L;
                for (long tau = 1; tau <= t; ++tau)
                    s += static_cast<long double>(mu[static_cast<size_t>(tau)]) *
                         static_cast<long double>(grid.at(i, j, t - tau));
                if (i == j) s += surv[static_cast<size_t>(t)];
                long double h = 0.0L;
                for (long l = 0; l < n; ++l)
                    h += static_cast<long double>(
                             jump.h[static_cast<size_t>(i)][static_cast<size_t>(l)]) *
                         static_cast<long double>(grid.at(l, j, t - 1));
                s += static_cast<long double>(li) * h;
                grid.at(i, j, t) = static_cast<double>(s / (1.0L + li));
            }
        }
    return grid;
}

Matrix residual_backward(const SolutionGrid& grid, const JumpChain& jump,
                         const FracKernel& kernel, long t) {
    if (t < 0 || t > grid.horizon)
        throw usage_error("residual_backward: t outside the grid horizon");
    const long n = grid.n_states;
    if (jump.size() != n) throw usage_error("residual_backward: dimension mismatch");
    const std::vector<double> lam = jump_lambdas(jump);

    Matrix res(static_cast<size_t>(n), std::vector<double>(static_cast<size_t>(n), 0.0));
    std::vector<double> seq(static_cast<size_t>(t) + 1);
    for (long i = 0; i < n; ++i)
        for (long j = 0; j < n; ++j) {
            for (long u = 0; u <= t; ++u) seq[static_cast<size_t>(u)] = grid.at(i, j, u);
            const double lhs =
                gen_frac_deriv(kernel, seq, t) -
                kernel.survival(t) * grid.at(i, j, 0);
            long double back = 0.0L;
            if (t >= 1)
                for (long l = 0; l < n; ++l)
                    back += static_cast<long double>(
                                jump.h[static_cast<size_t>(i)][static_cast<size_t>(l)]) *
                            static_cast<long double>(grid.at(l, j, t - 1));
            double rhs = lam[static_cast<size_t>(i)] *
                         (static_cast<double>(back) - grid.at(i, j, t));
            if (t == 0) rhs += lam[static_cast<size_t>(i)] * grid.at(i, j, 0);
            res[static_cast<size_t>(i)][static_cast<size_t>(j)] = lhs - rhs;
        }
    return res;
}

std::vector<std::vector<double>> nb_forward_solve(double alpha, double lambda, long horizon,
                                                  long k_max) {
    check_alpha_unit(alpha, "nb_forward_solve");
    if (!(lambda > 0.0)) throw usage_error("nb_forward_solve: lambda must be > 0");
    if (horizon < 0) throw usage_error("nb_forward_solve: horizon must be >= 0");
    if (k_max < 0) throw usage_error("nb_forward_solve: k_max must be >= 0");

    // w[j] = gen_binom(alpha, j) (-1)^j, the (I-B)^alpha weights;
    // src[t] = gen_binom(alpha-1, t) (-1)^t, the k = 0 source row.
    std::vector<long double> w(static_cast<size_t>(horizon) + 1);
    std::vector<long double> src(static_cast<size_t>(horizon) + 1);
    for (long j = 0; j <= horizon; ++j) {
        const long double b = detail::gen_binom_l(alpha, j);
        w[static_cast<size_t>(j)] = (j % 2 == 0) ? b : -b;
        const long double c = detail::gen_binom_l(alpha - 1.0, j);
        src[static_cast<size_t>(j)] = (j % 2 == 0) ? c : -c;
    }

    std::vector<std::vector<double>> p(static_cast<size_t>(k_max) + 1,
                                       std::vector<double>(static_cast<size_t>(horizon) + 1,
                                                           0.0));
    p[0][0] = 1.0;
    const long double denom = 1.0L + static_cast<long double>(lambda);
    for (long t = 1; t <= horizon; ++t)
        for (long k = 0; k <= k_max; ++k) {
            long double s = 0.0L, comp = 0.0L;
            for (long j = 1; j <= t; ++j) {
                const long double term =
                    -w[static_cast<size_t>(j)] *
                    static_cast<long double>(p[static_cast<size_t>(k)][static_cast<size_t>(t - j)]);
                const long double y = term - comp;
                const long double acc = s + y;
                comp = (acc - s) - y;
                s = acc;
            }
            if (k >= 1)
                s += static_cast<long double>(lambda) *
                     static_cast<long double>(p[static_cast<size_t>(k - 1)][static_cast<size_t>(t - 1)]);
            else
                s += src[static_cast<size_t>(t)];
            double v = static_cast<double>(s / denom);
            if (v < 0.0 && v > -1e-12) v = 0.0;
            p[static_cast<size_t>(k)][static_cast<size_t>(t)] = v;
        }
    return p;
}

namespace {

struct BernoulliSeriesParts {
    TruncatedPowerSeries g0;    // row 0 of the generating function
    TruncatedPowerSeries step;  // multiply to move from row m to row m+1
};

// type_a: G_m = (1-u)^{a-1} D^{-1} [p (1-(1-u)^a) D^{-1}]^m
// type_b: G_m = (p + q (1-u)^{a-1}) D^{-1} [p u D^{-1}]^m
// with D = p + q (1-u)^a.  Folding p and the u-shift into the step factor
// keeps every intermediate at pmf scale.
BernoulliSeriesParts bernoulli_series_parts(DmlKind kind, double alpha, double p,
                                            long horizon) {
    check_alpha_unit(alpha, "frac_bernoulli_pmf");
    if (!(p > 0.0) || p > 1.0) throw usage_error("frac_bernoulli_pmf: p must lie in (0, 1]");
    if (horizon < 0) throw usage_error("frac_bernoulli_pmf: horizon must be >= 0");
    const double q = 1.0 - p;

    const TruncatedPowerSeries bin_a = ps_binomial(alpha, horizon);
    const TruncatedPowerSeries bin_am1 = ps_binomial(alpha - 1.0, horizon);

    TruncatedPowerSeries denom(horizon);
    for (long t = 0; t <= horizon; ++t)
        denom.coeffs[static_cast<size_t>(t)] = q * bin_a.coeffs[static_cast<size_t>(t)];
    denom.coeffs[0] += p;
    const TruncatedPowerSeries inv_d = ps_inv(denom);

    BernoulliSeriesParts parts{TruncatedPowerSeries(horizon), TruncatedPowerSeries(horizon)};
    if (kind == DmlKind::type_a) {
        parts.g0 = ps_mul(bin_am1, inv_d);
        TruncatedPowerSeries sib(horizon);  // 1 - (1-u)^a, all coefficients >= 0
        for (long t = 1; t <= horizon; ++t)
            sib.coeffs[static_cast<size_t>(t)] = -bin_a.coeffs[static_cast<size_t>(t)];
        for (long t = 0; t <= horizon; ++t) sib.coeffs[static_cast<size_t>(t)] *= p;
        parts.step = ps_mul(sib, inv_d);
    } else {
        TruncatedPowerSeries numer(horizon);
        for (long t = 0; t <= horizon; ++t)
            numer.coeffs[static_cast<size_t>(t)] = q * bin_am1.coeffs[static_cast<size_t>(t)];
        numer.coeffs[0] += p;
        parts.g0 = ps_mul(numer, inv_d);
        TruncatedPowerSeries shifted(horizon);  // p u inv_d
        for (long t = 1; t <= horizon; ++t)
            shifted.coeffs[static_cast<size_t>(t)] = p * inv_d.coeffs[static_cast<size_t>(t - 1)];
        parts.step = shifted;
    }
    return parts;
}

std::vector<double> clamp_dust(std::vector<double> v) {
    for (double& x : v)
        if (x < 0.0 && x > -1e-12) x = 0.0;
    return v;
}

}  // namespace

std::vector<double> frac_bernoulli_pmf(DmlKind kind, double alpha, double p, long m,
                                       long horizon) {
    if (m < 0) throw usage_error("frac_bernoulli_pmf: m must be >= 0");
    const BernoulliSeriesParts parts = bernoulli_series_parts(kind, alpha, p, horizon);
    return clamp_dust(ps_mul(parts.g0, ps_pow(parts.step, m)).coeffs);
}

std::vector<std::vector<double>> frac_bernoulli_grid(DmlKind kind, double alpha, double p,
                                                     long m_max, long horizon) {
    if (m_max < 0) throw usage_error("frac_bernoulli_grid: m_max must be >= 0");
    const BernoulliSeriesParts parts = bernoulli_series_parts(kind, alpha, p, horizon);
    std::vector<std::vector<double>> out;
    out.reserve(static_cast<size_t>(m_max) + 1);
    TruncatedPowerSeries row = parts.g0;
    out.push_back(clamp_dust(row.coeffs));
    for (long m = 1; m <= m_max; ++m) {
        row = ps_mul(row, parts.step);
        out.push_back(clamp_dust(row.coeffs));
    }
    return out;
}

}  // namespace dtsm
