#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "dtsm/errors.hpp"
#include "dtsm/frac_ops.hpp"
#include "dtsm/markov.hpp"
#include "dtsm/power_series.hpp"
#include "dtsm/rng.hpp"
#include "dtsm/semi_markov.hpp"
#include "dtsm/sibuya.hpp"
#include "dtsm/special_functions.hpp"

using namespace dtsm;

namespace {

MarkovSpec two_state_sym() {
    MarkovSpec s;
    s.states = {"a", "b"};
    s.a = {{0.5, 0.5}, {0.5, 0.5}};
    s.validate();
    return s;
}

MarkovSpec two_state() {
    MarkovSpec s;
    s.states = {"a", "b"};
    s.a = {{0.5, 0.5}, {0.25, 0.75}};
    s.validate();
    return s;
}

MarkovSpec three_state() {
    MarkovSpec s;
    s.states = {"a", "b", "c"};
    s.a = {{0.2, 0.5, 0.3}, {0.4, 0.1, 0.5}, {0.25, 0.25, 0.5}};
    s.validate();
    return s;
}

std::vector<double> random_seq(long n, std::uint64_t stream) {
    RngStream rng(1234, stream);
    std::vector<double> v(static_cast<size_t>(n));
    for (auto& x : v) x = 2.0 * rng.next_unit() - 1.0;
    return v;
}

}  // namespace

TEST_CASE("fractional difference operator") {
    auto seq = random_seq(201, 0);
    SUBCASE("alpha one is the discrete derivative") {
        for (long t = 0; t <= 200; t += 11) {
            const double prev = t > 0 ? seq[static_cast<size_t>(t) - 1] : 0.0;
            CHECK(frac_diff(1.0, seq, t) == doctest::Approx(seq[static_cast<size_t>(t)] - prev)
                                                .epsilon(1e-15));
        }
    }
    SUBCASE("impulse and step responses") {
        std::vector<double> impulse = {1.0};
        CHECK(frac_diff(0.5, impulse, 2) == doctest::Approx(-0.125).epsilon(1e-14));
        std::vector<double> step(201, 1.0);
        CHECK(frac_diff(0.5, step, 2) == doctest::Approx(0.375).epsilon(1e-14));
        for (long t = 0; t <= 200; t += 17) {
            const double expect = ((t % 2 == 0) ? 1.0 : -1.0) * gen_binom(0.5 - 1.0, t);
            CHECK(frac_diff(0.5, step, t) == doctest::Approx(expect).epsilon(1e-12));
        }
    }
    SUBCASE("composition adds exponents") {
        for (double a : {0.3, 0.5, 0.8}) {
            std::vector<double> inner(201);
            for (long t = 0; t <= 200; ++t) inner[static_cast<size_t>(t)] = frac_diff(1.0 - a, seq, t);
            for (long t = 0; t <= 200; ++t) {
                const double prev = t > 0 ? seq[static_cast<size_t>(t) - 1] : 0.0;
                CHECK(std::fabs(frac_diff(a, inner, t) - (seq[static_cast<size_t>(t)] - prev)) <
                      1e-12);
            }
        }
    }
}

TEST_CASE("kernel derivative") {
    auto seq = random_seq(201, 3);
    SUBCASE("unit-step kernel is the discrete derivative") {
        DiscretePmf unit_step;
        unit_step.mass = {0.0, 1.0};
        unit_step.tail_bound = 0.0;
        auto kernel = FracKernel::general(unit_step);
        for (long t = 0; t <= 200; t += 13) {
            const double prev = t > 0 ? seq[static_cast<size_t>(t) - 1] : 0.0;
            CHECK(gen_frac_deriv(kernel, seq, t) ==
                  doctest::Approx(seq[static_cast<size_t>(t)] - prev).epsilon(1e-15));
        }
    }
    SUBCASE("heavy-tailed kernel equals the fractional difference") {
        for (double a : {0.3, 0.5, 0.8}) {
            auto kernel = FracKernel::sibuya(a);
            for (long t = 0; t <= 200; ++t)
                CHECK(std::fabs(gen_frac_deriv(kernel, seq, t) - frac_diff(a, seq, t)) < 1e-12);
        }
    }
    SUBCASE("constant sequences decay with the kernel survival") {
        auto kernel = FracKernel::sibuya(0.5);
        std::vector<double> c(120, 0.7);
        for (long t = 0; t <= 119; t += 7)
            CHECK(gen_frac_deriv(kernel, c, t) ==
                  doctest::Approx(0.7 * kernel.survival(t)).epsilon(1e-12));
    }
    SUBCASE("kernel mass accounting") {
        auto kernel = FracKernel::sibuya(0.4);
        CHECK(kernel.mu(0) == 0.0);
        long double acc = 0.0L;
        for (long tau = 1; tau <= 500; ++tau) acc += kernel.mu(tau);
        CHECK(static_cast<double>(acc) + kernel.survival(500) ==
              doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("unresolved general kernel tail is an accuracy error") {
        DiscretePmf truncated;
        truncated.mass = {0.0, 0.5, 0.25};
        truncated.tail_bound = 0.25;
        auto kernel = FracKernel::general(truncated);
        CHECK_THROWS_AS(kernel.require_resolved(10), accuracy_error);
    }
}

TEST_CASE("backward system solution") {
    SUBCASE("unit-step kernel degenerates to matrix powers") {
        DiscretePmf unit_step;
        unit_step.mass = {0.0, 1.0};
        unit_step.tail_bound = 0.0;
        for (const auto& spec : {two_state(), three_state()}) {
            auto grid = solve_backward(decompose(spec), FracKernel::general(unit_step), 200);
            for (long t = 0; t <= 200; t += 23) {
                auto pt = markov_pmf(spec, t);
                for (long i = 0; i < spec.size(); ++i)
                    for (long j = 0; j < spec.size(); ++j)
                        CHECK(std::fabs(grid.at(i, j, t) -
                                        pt[static_cast<size_t>(i)][static_cast<size_t>(j)]) <
                              1e-12);
            }
        }
    }
    SUBCASE("first step stays with probability q") {
        auto grid = solve_backward(decompose(two_state_sym()), FracKernel::sibuya(0.5), 4);
        CHECK(grid.at(0, 0, 1) == doctest::Approx(0.5).epsilon(1e-14));
        CHECK(grid.at(1, 1, 1) == doctest::Approx(0.5).epsilon(1e-14));
        CHECK(grid.at(0, 0, 0) == 1.0);
        CHECK(grid.at(0, 1, 0) == 0.0);
    }
    SUBCASE("solution equals the exact enumeration of the renewal chain") {
        for (const auto& spec : {two_state(), three_state()}) {
            for (double a : {0.3, 0.5, 0.8}) {
                auto jc = decompose(spec);
                auto grid = solve_backward(jc, FracKernel::sibuya(a), 10);
                SemiMarkovSpec sm{jc, StepDist::sibuya(a), DmlKind::type_b};
                for (long i = 0; i < spec.size(); ++i) {
                    auto law = enumerate_exact(sm, i, 10);
                    for (long t = 0; t <= 10; ++t)
                        for (long j = 0; j < spec.size(); ++j)
                            CHECK(std::fabs(grid.at(i, j, t) -
                                            law[static_cast<size_t>(t)][static_cast<size_t>(j)]) <
                                  1e-12);
                }
            }
        }
    }
    SUBCASE("rows are pmfs") {
        auto grid = solve_backward(decompose(three_state()), FracKernel::sibuya(0.7), 200);
        for (long t = 0; t <= 200; ++t)
            for (long i = 0; i < 3; ++i) {
                double s = 0.0;
                for (long j = 0; j < 3; ++j) {
                    CHECK(grid.at(i, j, t) >= 0.0);
                    s += grid.at(i, j, t);
                }
                CHECK(s == doctest::Approx(1.0).epsilon(1e-10));
            }
    }
    SUBCASE("lambda needs jump probability strictly inside (0,1)") {
        MarkovSpec s;
        s.states = {"a", "b"};
        s.a = {{0.0, 1.0}, {1.0, 0.0}};
        CHECK_THROWS_AS(solve_backward(decompose(s), FracKernel::sibuya(0.5), 5), usage_error);
    }
}

TEST_CASE("backward system residuals") {
    auto jc = decompose(two_state());
    auto kernel = FracKernel::sibuya(0.5);
    auto grid = solve_backward(jc, kernel, 200);

    SUBCASE("solver output satisfies the system") {
        for (long t = 0; t <= 200; ++t) {
            auto r = residual_backward(grid, jc, kernel, t);
            for (const auto& row : r)
                for (double v : row) CHECK(std::fabs(v) < 1e-10);
        }
    }
    SUBCASE("perturbation is detected") {
        auto bad = grid;
        bad.at(0, 0, 5) += 1e-3;
        auto r = residual_backward(bad, jc, kernel, 5);
        double worst = 0.0;
        for (const auto& row : r)
            for (double v : row) worst = std::max(worst, std::fabs(v));
        CHECK(worst >= 1e-4);
    }
    SUBCASE("monte carlo pmfs satisfy the system within noise") {
        const long N = 200000, T = 6;
        SemiMarkovSpec sm{jc, StepDist::sibuya(0.5), DmlKind::type_b};
        SolutionGrid mc;
        mc.n_states = 2;
        mc.horizon = T;
        mc.values.assign(static_cast<size_t>(2 * 2 * (T + 1)), 0.0);
        for (long i = 0; i < 2; ++i)
            for (long r = 0; r < N; ++r) {
                RngStream rng(500 + static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(r));
                auto path = simulate(sm, rng, i, T);
                for (long t = 0; t <= T; ++t)
                    mc.at(i, path.state_at(t), t) += 1.0 / static_cast<double>(N);
            }
        // each pmf entry has sd <= 0.5/sqrt(N); the residual mixes ~5 of them
        const double tol = 4.0 * 0.5 / std::sqrt(static_cast<double>(N)) * 3.0;
        for (long t = 0; t <= T; ++t) {
            auto r = residual_backward(mc, jc, kernel, t);
            for (const auto& row : r)
                for (double v : row) CHECK(std::fabs(v) < tol);
        }
    }
}

TEST_CASE("forward system for the renewal count") {
    SUBCASE("initial condition and first step") {
        for (double lambda : {0.5, 1.0, 3.0}) {
            auto grid = nb_forward_solve(0.5, lambda, 6, 6);
            CHECK(grid[0][0] == 1.0);
            CHECK(grid[1][0] == 0.0);
            CHECK(grid[0][1] == doctest::Approx(1.0 / (1.0 + lambda)).epsilon(1e-15));
        }
    }
    SUBCASE("columns are pmfs") {
        for (double a : {0.3, 0.8}) {
            auto grid = nb_forward_solve(a, 2.0, 200, 200);
            for (long t = 0; t <= 200; ++t) {
                long double s = 0.0L;
                for (long k = 0; k <= 200; ++k) {
                    CHECK(grid[static_cast<size_t>(k)][static_cast<size_t>(t)] >= 0.0);
                    s += grid[static_cast<size_t>(k)][static_cast<size_t>(t)];
                }
                CHECK(static_cast<double>(s) == doctest::Approx(1.0).epsilon(1e-10));
            }
        }
    }
    SUBCASE("parameter validation") {
        CHECK_THROWS_AS(nb_forward_solve(1.5, 1.0, 5, 5), usage_error);
        CHECK_THROWS_AS(nb_forward_solve(0.5, -1.0, 5, 5), usage_error);
    }
}

TEST_CASE("compound-count pmf via generating functions") {
    SUBCASE("type B base cases") {
        for (double lambda : {0.5, 2.0}) {
            const double p = lambda / (1.0 + lambda);
            auto v = frac_bernoulli_pmf(DmlKind::type_b, 0.5, p, 0, 8);
            CHECK(v[0] == doctest::Approx(1.0).epsilon(1e-14));
            CHECK(v[1] == doctest::Approx(1.0 / (1.0 + lambda)).epsilon(1e-13));
        }
    }
    SUBCASE("type B matches the forward solver") {
        for (double a : {0.3, 0.5, 0.8}) {
            for (double lambda : {0.5, 1.0, 3.0}) {
                const double p = lambda / (1.0 + lambda);
                const long T = 60;
                auto grid = nb_forward_solve(a, lambda, T, 20);
                auto series = frac_bernoulli_grid(DmlKind::type_b, a, p, 20, T);
                for (long k = 0; k <= 20; ++k)
                    for (long t = 0; t <= T; ++t)
                        CHECK(std::fabs(series[static_cast<size_t>(k)][static_cast<size_t>(t)] -
                                        grid[static_cast<size_t>(k)][static_cast<size_t>(t)]) <
                              1e-10);
            }
        }
    }
    SUBCASE("grid rows equal single-m extraction") {
        auto grid = frac_bernoulli_grid(DmlKind::type_a, 0.6, 0.45, 6, 40);
        for (long m : {0L, 3L, 6L}) {
            auto one = frac_bernoulli_pmf(DmlKind::type_a, 0.6, 0.45, m, 40);
            for (long t = 0; t <= 40; ++t)
                CHECK(std::fabs(grid[static_cast<size_t>(m)][static_cast<size_t>(t)] -
                                one[static_cast<size_t>(t)]) < 1e-12);
        }
    }
    SUBCASE("type A with p=1 collapses to the bare counting process") {
        for (double a : {0.3, 0.8}) {
            auto grid = frac_bernoulli_grid(DmlKind::type_a, a, 1.0, 10, 30);
            for (long m = 0; m <= 10; ++m)
                for (long t = 0; t <= 30; ++t)
                    CHECK(std::fabs(grid[static_cast<size_t>(m)][static_cast<size_t>(t)] -
                                    sibuya_counting_pmf(a, t, m)) < 1e-12);
        }
    }
    SUBCASE("type B with p=1 counts every step") {
        auto grid = frac_bernoulli_grid(DmlKind::type_b, 0.5, 1.0, 10, 10);
        for (long m = 0; m <= 10; ++m)
            for (long t = 0; t <= 10; ++t)
                CHECK(std::fabs(grid[static_cast<size_t>(m)][static_cast<size_t>(t)] -
                                (m == t ? 1.0 : 0.0)) < 1e-12);
    }
    SUBCASE("type A equals conditioning on the clock") {
        const double p = 0.4, q = 0.6;
        for (double a : {0.5, 0.8}) {
            const long T = 40;
            auto grid = frac_bernoulli_grid(DmlKind::type_a, a, p, T, T);
            for (long t = 0; t <= T; t += 7) {
                std::vector<double> clock(static_cast<size_t>(t) + 1);
                for (long j = 0; j <= t; ++j)
                    clock[static_cast<size_t>(j)] = sibuya_counting_pmf(a, t, j);
                for (long m = 0; m <= t; ++m) {
                    long double s = 0.0L;
                    for (long j = m; j <= t; ++j)
                        s += gen_binom(static_cast<double>(j), m) *
                             std::pow(p, static_cast<double>(m)) *
                             std::pow(q, static_cast<double>(j - m)) *
                             clock[static_cast<size_t>(j)];
                    CHECK(std::fabs(grid[static_cast<size_t>(m)][static_cast<size_t>(t)] -
                                    static_cast<double>(s)) < 1e-12);
                }
            }
        }
    }
}

TEST_CASE("counting pmf solves its own governing identity") {
    // Row m of the counting pmf satisfies (I-B)^a p_m(t) = p_m(t) - p_{m+1}(t),
    // with the m=0 source equal to the step survival in its binomial form.
    for (double a : {0.3, 0.5, 0.8}) {
        const long T = 100;
        std::vector<std::vector<double>> pmf(12, std::vector<double>(static_cast<size_t>(T) + 1));
        for (long m = 0; m < 12; ++m)
            for (long t = 0; t <= T; ++t)
                pmf[static_cast<size_t>(m)][static_cast<size_t>(t)] = sibuya_counting_pmf(a, t, m);
        for (long t = 0; t <= T; ++t) {
            const double src = ((t % 2 == 0) ? 1.0 : -1.0) * gen_binom(a - 1.0, t);
            CHECK(std::fabs(src - sibuya_survival(a, t)) < 1e-12);
            CHECK(std::fabs(src - pmf[0][static_cast<size_t>(t)]) < 1e-12);
        }
        for (long m = 0; m + 1 < 12; ++m) {
            for (long t = 0; t <= T; ++t) {
                const double lhs = frac_diff(a, pmf[static_cast<size_t>(m)], t);
                const double rhs = pmf[static_cast<size_t>(m)][static_cast<size_t>(t)] -
                                   pmf[static_cast<size_t>(m + 1)][static_cast<size_t>(t)];
                CHECK(std::fabs(lhs - rhs) < 1e-10);
            }
        }
    }
}
