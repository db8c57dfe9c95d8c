// Benchmarks the threaded kernels against their serial references and
// checks that both produce bit-identical results.

#include <chrono>
#include <cstdio>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "dtsm/power_series.hpp"
#include "dtsm/rng.hpp"
#include "dtsm/sibuya.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

dtsm::TruncatedPowerSeries random_series(std::uint64_t stream, long horizon) {
    dtsm::RngStream rng(42, stream);
    std::vector<double> c(static_cast<size_t>(horizon) + 1);
    for (auto& v : c) v = 2.0 * rng.next_unit() - 1.0;
    return dtsm::TruncatedPowerSeries::from_coeffs(std::move(c));
}

void bench_ps_mul(long horizon, int reps) {
    const auto a = random_series(1, horizon);
    const auto b = random_series(2, horizon);

    auto t0 = Clock::now();
    dtsm::TruncatedPowerSeries serial = dtsm::ps_mul_serial(a, b);
    for (int r = 1; r < reps; ++r) serial = dtsm::ps_mul_serial(a, b);
    const double t_serial = seconds_since(t0) / reps;

    t0 = Clock::now();
    dtsm::TruncatedPowerSeries threaded = dtsm::ps_mul(a, b);
    for (int r = 1; r < reps; ++r) threaded = dtsm::ps_mul(a, b);
    const double t_threaded = seconds_since(t0) / reps;

    bool identical = true;
    for (long u = 0; u <= horizon; ++u)
        if (serial.at(u) != threaded.at(u)) identical = false;

    std::printf("ps_mul        h=%-6ld serial %8.4f ms  threaded %8.4f ms  speedup %5.2fx  bitwise %s\n",
                horizon, 1e3 * t_serial, 1e3 * t_threaded,
                t_threaded > 0 ? t_serial / t_threaded : 0.0,
                identical ? "equal" : "DIFFER");
    if (!identical) std::exit(1);
}

void bench_replicas(long replicas, long horizon) {
    const dtsm::SibuyaSampler sampler(0.6);
    std::vector<long> serial(static_cast<size_t>(replicas));
    std::vector<long> threaded(static_cast<size_t>(replicas));

    auto t0 = Clock::now();
    for (long r = 0; r < replicas; ++r) {
        dtsm::RngStream rng(7, static_cast<std::uint64_t>(r));
        const auto path = dtsm::renewal_path(
            rng, [&](dtsm::RngStream& g) { return sampler(g); }, horizon);
        serial[static_cast<size_t>(r)] = path.count_at(horizon);
    }
    const double t_serial = seconds_since(t0);

    t0 = Clock::now();
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (long r = 0; r < replicas; ++r) {
        dtsm::RngStream rng(7, static_cast<std::uint64_t>(r));
        const auto path = dtsm::renewal_path(
            rng, [&](dtsm::RngStream& g) { return sampler(g); }, horizon);
        threaded[static_cast<size_t>(r)] = path.count_at(horizon);
    }
    const double t_threaded = seconds_since(t0);

    const bool identical = serial == threaded;
    std::printf("replica loop  n=%-6ld serial %8.4f ms  threaded %8.4f ms  speedup %5.2fx  bitwise %s\n",
                replicas, 1e3 * t_serial, 1e3 * t_threaded,
                t_threaded > 0 ? t_serial / t_threaded : 0.0,
                identical ? "equal" : "DIFFER");
    if (!identical) std::exit(1);
}

}  // namespace

int main() {
#ifdef _OPENMP
    std::printf("OpenMP enabled, max threads %d\n", omp_get_max_threads());
#else
    std::printf("OpenMP disabled, serial build\n");
#endif
    bench_ps_mul(1024, 20);
    bench_ps_mul(4096, 5);
    bench_ps_mul(16384, 2);
    bench_replicas(2000, 500);
    bench_replicas(20000, 500);
    std::printf("all kernel comparisons bitwise equal\n");
    return 0;
}
