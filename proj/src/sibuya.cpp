#include "dtsm/sibuya.hpp"

#include <algorithm>
#include <cmath>

#include "dtsm/errors.hpp"
#include "dtsm/special_functions.hpp"

namespace dtsm {

namespace {

constexpr long kSampleCap = 1L << 60;

void check_alpha(double alpha) {
    if (!(alpha > 0.0) || alpha > 1.0)
        throw usage_error("sibuya: alpha must lie in (0, 1]");
}

// P(Z > k) in long double.  Direct product for small k; the Gamma-ratio
// form exp(lnG(k+1-a) - lnG(k+1) - lnG(1-a)) takes over where the product
// would need too many factors.
long double survival_l(double alpha, long k) {
    if (k <= 0) return 1.0L;
    if (alpha == 1.0) return 0.0L;
    if (k <= 64) {
        long double s = 1.0L;
        for (long j = 1; j <= k; ++j) s *= 1.0L - static_cast<long double>(alpha) / j;
        return s;
    }
    const long double a = alpha;
    return expl(detail::log_gamma_l(k + 1 - a) - detail::log_gamma_l(k + 1.0L) -
                detail::log_gamma_l(1.0L - a));
}

}  // namespace

double sibuya_survival(double alpha, long k) {
    check_alpha(alpha);
    if (k < 0) throw usage_error("sibuya_survival: k must be >= 0");
    return static_cast<double>(survival_l(alpha, k));
}

double sibuya_pmf(double alpha, long k) {
    check_alpha(alpha);
    if (k < 1) throw usage_error("sibuya_pmf: k must be >= 1");
    return static_cast<double>(survival_l(alpha, k - 1) *
                               (static_cast<long double>(alpha) / k));
}

namespace {

// min{k >= 1 : survival(k) <= u}, by doubling then bisection on the
// decreasing survival function.  Comparisons are made at double precision so
// the cached-table path draws identically.
double survival_d(double alpha, long k) { return static_cast<double>(survival_l(alpha, k)); }

long invert_survival(double alpha, double u) {
    long lo = 0;  // survival(lo) > u
    long hi = 1;
    while (survival_d(alpha, hi) > u) {
        lo = hi;
        if (hi >= kSampleCap / 2) return kSampleCap;
        hi *= 2;
    }
    while (hi - lo > 1) {
        long mid = lo + (hi - lo) / 2;
        if (survival_d(alpha, mid) > u)
            lo = mid;
        else
            hi = mid;
    }
    return hi;
}

}  // namespace

long sibuya_sample(RngStream& rng, double alpha) {
    check_alpha(alpha);
    const double u = rng.next_unit();
    if (alpha == 1.0) return 1;
    return invert_survival(alpha, u);
}

SibuyaSampler::SibuyaSampler(double alpha) : alpha_(alpha) {
    check_alpha(alpha);
    table_.resize(1024);
    // Must round-trip through the same survival evaluation the fallback path
    // uses, so cached and uncached draws agree bit for bit.
    for (size_t k = 0; k < table_.size(); ++k)
        table_[k] = survival_d(alpha, static_cast<long>(k));
}

long SibuyaSampler::operator()(RngStream& rng) const {
    const double u = rng.next_unit();
    if (alpha_ == 1.0) return 1;
    // table_[k] = P(Z > k) is decreasing; want smallest k >= 1 with table_[k] <= u.
    if (table_.back() <= u) {
        size_t lo = 0, hi = table_.size() - 1;  // table_[lo] > u >= table_[hi]
        while (hi - lo > 1) {
            size_t mid = lo + (hi - lo) / 2;
            if (table_[mid] > u)
                lo = mid;
            else
                hi = mid;
        }
        return static_cast<long>(hi);
    }
    return invert_survival(alpha_, u);
}

long dml_sample(RngStream& rng, double alpha, double p, DmlKind kind) {
    check_alpha(alpha);
    if (!(p > 0.0) || p > 1.0) throw usage_error("dml_sample: p must lie in (0, 1]");
    const long m = next_geometric(rng, p);
    const long steps = (kind == DmlKind::type_a) ? m : m - 1;
    long double total = (kind == DmlKind::type_a) ? 0.0L : 1.0L;
    for (long i = 0; i < steps; ++i) {
        total += static_cast<long double>(sibuya_sample(rng, alpha));
        if (total >= static_cast<long double>(kSampleCap)) return kSampleCap;
    }
    return static_cast<long>(total);
}

long RenewalPath::count_at(long t) const {
    if (t < 0) throw usage_error("count_at: t must be >= 0");
    if (t > horizon) throw usage_error("count_at: t beyond simulated horizon");
    long n = 0;
    for (size_t i = 1; i < renewal_times.size(); ++i) {
        if (renewal_times[i] > t) break;
        ++n;
    }
    return n;
}

RenewalPath renewal_path(RngStream& rng, const std::function<long(RngStream&)>& step_sampler,
                         long horizon) {
    if (horizon < 0) throw usage_error("renewal_path: horizon must be >= 0");
    RenewalPath path;
    path.horizon = horizon;
    path.renewal_times.push_back(0);
    long t = 0;
    while (t <= horizon) {  // keep the first overshoot, then stop
        const long step = step_sampler(rng);
        if (step < 1) throw usage_error("renewal_path: steps must be >= 1");
        t += step;
        path.renewal_times.push_back(t);
    }
    return path;
}

namespace {

// Compensated pair arithmetic over F (double or __float128), giving roughly
// twice the base precision via the Dekker/Knuth error-free transforms.  The
// alternating closed-form sum below needs it: its terms can exceed the
// result by more than thirty orders of magnitude at large (t, m).
template <class F>
struct SplitConst;
template <>
struct SplitConst<double> {
    static double value() { return 134217729.0; }  // 2^27 + 1
};
template <>
struct SplitConst<__float128> {
    static __float128 value() {
        return static_cast<__float128>((1ULL << 57) + 1ULL);  // 2^57 + 1
    }
};

template <class F>
struct Pair {
    F h, l;
};

template <class F>
Pair<F> two_sum(F a, F b) {
    const F s = a + b;
    const F bb = s - a;
    return {s, (a - (s - bb)) + (b - bb)};
}

template <class F>
Pair<F> quick_sum(F a, F b) {  // needs |a| >= |b| or a == 0
    const F s = a + b;
    return {s, b - (s - a)};
}

template <class F>
Pair<F> two_prod(F a, F b) {
    const F p = a * b;
    const F ca = SplitConst<F>::value() * a;
    const F ah = ca - (ca - a), al = a - ah;
    const F cb = SplitConst<F>::value() * b;
    const F bh = cb - (cb - b), bl = b - bh;
    return {p, ((ah * bh - p) + ah * bl + al * bh) + al * bl};
}

template <class F>
Pair<F> p_add(Pair<F> a, Pair<F> b) {
    Pair<F> s = two_sum(a.h, b.h);
    const Pair<F> t = two_sum(a.l, b.l);
    s.l += t.h;
    s = quick_sum(s.h, s.l);
    s.l += t.l;
    return quick_sum(s.h, s.l);
}

template <class F>
Pair<F> p_mul(Pair<F> a, Pair<F> b) {
    Pair<F> p = two_prod(a.h, b.h);
    p.l += a.h * b.l + a.l * b.h;
    return quick_sum(p.h, p.l);
}

template <class F>
Pair<F> p_div(Pair<F> a, Pair<F> b) {
    const F q1 = a.h / b.h;
    Pair<F> r = p_add(a, p_mul(b, Pair<F>{-q1, 0}));
    const F q2 = r.h / b.h;
    r = p_add(r, p_mul(b, Pair<F>{-q2, 0}));
    const F q3 = r.h / b.h;
    Pair<F> q = quick_sum(q1, q2);
    q.l += q3;
    return quick_sum(q.h, q.l);
}

template <class F>
Pair<F> p_neg(Pair<F> a) {
    return {-a.h, -a.l};
}

// B_r(t) = C(t - alpha(r+1), t) advanced one step in t:
// B_r(t) = B_r(t-1) (t - alpha(r+1)) / t.  alpha(r+1) is exact in each pair
// format, so a zero factor (integer upper index below t) lands exactly and
// the value stays zero from then on.
void advance_b(std::vector<Pair<double>>& b, double alpha, long t) {
    for (size_t r = 0; r < b.size(); ++r) {
        if (b[r].h == 0.0) continue;
        const Pair<double> c = two_prod(alpha, static_cast<double>(r + 1));
        const Pair<double> f =
            p_add(Pair<double>{static_cast<double>(t), 0.0}, p_neg(c));
        b[r] = p_div(p_mul(b[r], f), Pair<double>{static_cast<double>(t), 0.0});
    }
}

void advance_b(std::vector<Pair<__float128>>& b, double alpha, long t) {
    for (size_t r = 0; r < b.size(); ++r) {
        if (b[r].h == 0) continue;
        const __float128 c =
            static_cast<__float128>(alpha) * static_cast<__float128>(r + 1);
        const __float128 f = static_cast<__float128>(t) - c;
        b[r] = p_div(p_mul(b[r], Pair<__float128>{f, 0}),
                     Pair<__float128>{static_cast<__float128>(t), 0});
    }
}

// One row of the closed form at fixed t:
//   P(L(t) = m) = sum_r (-1)^r C(m, r) B_r(t).
// `bound` is sum_r C(m, r) |B_r(t)|, the magnitude the cancellation has to
// climb down from; it picks the precision tier.
constexpr double kDoubleDoubleBound = 1e15;
constexpr double kQuadBound = 1e50;

template <class F>
double alt_dot(const std::vector<Pair<F>>& c_row, const std::vector<Pair<F>>& b, long m) {
    Pair<F> s{0, 0};
    for (long r = 0; r <= m; ++r) {
        Pair<F> term = p_mul(c_row[static_cast<size_t>(r)], b[static_cast<size_t>(r)]);
        if (r & 1) term = p_neg(term);
        s = p_add(s, term);
    }
    return static_cast<double>(s.h) + static_cast<double>(s.l);
}

double clamp_dust(double v) { return (v < 0.0 && v > -1e-12) ? 0.0 : v; }

// Shared state for evaluating closed-form rows m = 0..m_max at one or more
// times t.  Pascal rows advance in m.  The quad tier is expensive, so its
// B table is either advanced eagerly (table sweeps, where every t is
// visited) or replayed once on first demand (single-column calls).
struct ClosedFormState {
    double alpha;
    long m_cap;
    long t_now = 0;
    bool bq_current;
    std::vector<Pair<double>> bd;       // B_r(t), double-double
    std::vector<Pair<__float128>> bq;   // B_r(t), double-quad
    std::vector<double> cn;             // C(m, r), magnitude bound only
    std::vector<Pair<double>> cd;       // C(m, r), double-double
    std::vector<Pair<__float128>> cq;   // C(m, r), double-quad
    long pascal_m = 0;

    ClosedFormState(double a, long cap, bool eager_bq)
        : alpha(a),
          m_cap(cap),
          bq_current(eager_bq),
          bd(static_cast<size_t>(cap) + 1, Pair<double>{1.0, 0.0}),
          bq(static_cast<size_t>(cap) + 1, Pair<__float128>{1, 0}),
          cn(static_cast<size_t>(cap) + 1, 0.0),
          cd(static_cast<size_t>(cap) + 1, Pair<double>{0.0, 0.0}),
          cq(static_cast<size_t>(cap) + 1, Pair<__float128>{0, 0}) {
        cn[0] = 1.0;
        cd[0] = {1.0, 0.0};
        cq[0] = {1, 0};
    }

    void step_t(long t) {
        advance_b(bd, alpha, t);
        if (bq_current) advance_b(bq, alpha, t);
        t_now = t;
    }

    void ensure_bq() {
        if (bq_current) return;
        for (size_t r = 0; r < bq.size(); ++r) {
            const __float128 c =
                static_cast<__float128>(alpha) * static_cast<__float128>(r + 1);
            Pair<__float128> b{1, 0};
            for (long tau = 1; tau <= t_now; ++tau) {
                const __float128 f = static_cast<__float128>(tau) - c;
                if (f == 0) {
                    b = {0, 0};
                    break;
                }
                b = p_div(p_mul(b, Pair<__float128>{f, 0}),
                          Pair<__float128>{static_cast<__float128>(tau), 0});
            }
            bq[r] = b;
        }
        bq_current = true;
    }

    void pascal_to(long m) {
        for (; pascal_m < m; ++pascal_m) {
            for (long r = pascal_m + 1; r >= 1; --r) {
                const size_t ur = static_cast<size_t>(r);
                cn[ur] += cn[ur - 1];
                cd[ur] = p_add(cd[ur], cd[ur - 1]);
                cq[ur] = p_add(cq[ur], cq[ur - 1]);
            }
        }
    }

    // pmf value at the current t for row m; Pascal rows must be at m.
    double row_value(long m) {
        double bound = 0.0;
        for (long r = 0; r <= m; ++r)
            bound += cn[static_cast<size_t>(r)] * std::fabs(bd[static_cast<size_t>(r)].h);
        if (bound < kDoubleDoubleBound) return clamp_dust(alt_dot(cd, bd, m));
        if (bound < kQuadBound) {
            ensure_bq();
            return clamp_dust(alt_dot(cq, bq, m));
        }
        throw accuracy_error(
            "sibuya counting closed form: alternating sum cancels beyond working "
            "precision at this (t, m); reduce t or m");
    }
};

}  // namespace

double sibuya_counting_pmf(double alpha, long t, long m) {
    check_alpha(alpha);
    if (t < 0) throw usage_error("sibuya_counting_pmf: t must be >= 0");
    if (m < 0) throw usage_error("sibuya_counting_pmf: m must be >= 0");
    if (m > t) return 0.0;
    ClosedFormState st(alpha, m, false);
    for (long tau = 1; tau <= t; ++tau) st.step_t(tau);
    st.pascal_to(m);
    return st.row_value(m);
}

DiscretePmf sibuya_counting_dist(double alpha, long t, long m_max) {
    check_alpha(alpha);
    if (t < 0) throw usage_error("sibuya_counting_dist: t must be >= 0");
    if (m_max < 0) throw usage_error("sibuya_counting_dist: m_max must be >= 0");
    DiscretePmf out;
    out.mass.assign(static_cast<size_t>(m_max) + 1, 0.0);
    const long mm = std::min(m_max, t);
    ClosedFormState st(alpha, mm, false);
    for (long tau = 1; tau <= t; ++tau) st.step_t(tau);
    long double total = 0.0L;
    for (long m = 0; m <= mm; ++m) {
        st.pascal_to(m);
        const double v = st.row_value(m);
        out.mass[static_cast<size_t>(m)] = v;
        total += v;
    }
    const long double tail = 1.0L - total;
    out.tail_bound = tail > 0.0L ? static_cast<double>(tail) : 0.0;
    return out;
}

std::vector<std::vector<double>> sibuya_counting_table(double alpha, long t_max) {
    check_alpha(alpha);
    if (t_max < 0) throw usage_error("sibuya_counting_table: t_max must be >= 0");
    std::vector<std::vector<double>> out(static_cast<size_t>(t_max) + 1);
    out[0] = {1.0};
    // Pascal triangles held whole so every row m is available at every t.
    std::vector<std::vector<Pair<double>>> cd_rows(static_cast<size_t>(t_max) + 1);
    std::vector<std::vector<Pair<__float128>>> cq_rows(static_cast<size_t>(t_max) + 1);
    std::vector<std::vector<double>> bound_rows(static_cast<size_t>(t_max) + 1);
    {
        ClosedFormState st(alpha, t_max, false);
        for (long m = 0; m <= t_max; ++m) {
            st.pascal_to(m);
            const size_t um = static_cast<size_t>(m);
            cd_rows[um].assign(st.cd.begin(), st.cd.begin() + m + 1);
            cq_rows[um].assign(st.cq.begin(), st.cq.begin() + m + 1);
            bound_rows[um].assign(st.cn.begin(), st.cn.begin() + m + 1);
        }
    }
    ClosedFormState bstate(alpha, t_max, true);
    for (long t = 1; t <= t_max; ++t) {
        bstate.step_t(t);
        std::vector<double>& row = out[static_cast<size_t>(t)];
        row.resize(static_cast<size_t>(t) + 1);
        for (long m = 0; m <= t; ++m) {
            const size_t um = static_cast<size_t>(m);
            double bound = 0.0;
            for (long r = 0; r <= m; ++r)
                bound += bound_rows[um][static_cast<size_t>(r)] *
                         std::fabs(bstate.bd[static_cast<size_t>(r)].h);
            if (bound < kDoubleDoubleBound)
                row[um] = clamp_dust(alt_dot(cd_rows[um], bstate.bd, m));
            else if (bound < kQuadBound)
                row[um] = clamp_dust(alt_dot(cq_rows[um], bstate.bq, m));
            else
                throw accuracy_error(
                    "sibuya counting closed form: alternating sum cancels beyond "
                    "working precision at this (t, m); reduce t or m");
        }
    }
    return out;
}

namespace {

long double counting_mean_l(double alpha, long t) {
    return detail::gen_binom_l(t + alpha, t) - 1.0L;
}

long double counting_second_l(double alpha, long t) {
    return 2.0L * detail::gen_binom_l(t + 2.0 * alpha, t) -
           3.0L * detail::gen_binom_l(t + alpha, t) + 1.0L;
}

}  // namespace

CountingMoments sibuya_counting_moments(double alpha, long t1, long t2) {
    check_alpha(alpha);
    if (t1 < 0 || t2 < t1)
        throw usage_error("sibuya_counting_moments: need 0 <= t1 <= t2");
    CountingMoments mom;
    mom.mean_t1 = static_cast<double>(counting_mean_l(alpha, t1));
    mom.mean_t2 = static_cast<double>(counting_mean_l(alpha, t2));
    mom.second_t1 = static_cast<double>(counting_second_l(alpha, t1));
    mom.second_t2 = static_cast<double>(counting_second_l(alpha, t2));
    // E[C(t1) C(t2)] = sum_{l=1}^{t1} u(l) [E C(t1-l) + E C(t2-l) + 1]:
    // condition on the first renewal of each ordered pair.
    long double sum = 0.0L, comp = 0.0L;
    long double u = 1.0L;  // u(0)
    for (long l = 1; l <= t1; ++l) {
        u = u * (l - 1 + static_cast<long double>(alpha)) / l;
        const long double term =
            u * (counting_mean_l(alpha, t1 - l) + counting_mean_l(alpha, t2 - l) + 1.0L);
        const long double y = term - comp;
        const long double s = sum + y;
        comp = (s - sum) - y;
        sum = s;
    }
    mom.cross = static_cast<double>(sum);
    return mom;
}

double sibuya_potential(double alpha, long t) {
    check_alpha(alpha);
    if (t < 0) throw usage_error("sibuya_potential: t must be >= 0");
    return gen_binom(t + alpha - 1.0, t);
}

}  // namespace dtsm
