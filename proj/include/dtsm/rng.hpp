#pragma once

#include <cmath>
#include <cstdint>

namespace dtsm {

// Splittable counter-style generator in the SplitMix64 family.  A stream is
// identified by (seed, stream_id); distinct ids get distinct odd increments,
// so replica r of an experiment can run on stream r and produce the same
// numbers no matter how replicas are scheduled across threads.
class RngStream {
  public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id) {
        state_ = mix(seed ^ mix(stream_id + 0x9E3779B97F4A7C15ULL));
        gamma_ = mix(stream_id ^ mix(seed + 0xBF58476D1CE4E5B9ULL)) | 1ULL;
    }

    std::uint64_t next_u64() {
        state_ += gamma_;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform draw strictly inside (0,1): 53 random bits centered in the bin.
    double next_unit() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    double next_exponential() { return -std::log(next_unit()); }

  private:
    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 33;
        z *= 0xFF51AFD7ED558CCDULL;
        z ^= z >> 33;
        z *= 0xC4CEB9FE1A85EC53ULL;
        z ^= z >> 33;
        return z;
    }

    std::uint64_t state_;
    std::uint64_t gamma_;
};

// Geometric number of trials until first success, support {1,2,...},
// P(M=k) = p(1-p)^{k-1}, sampled by inversion of the survival function.
inline long next_geometric(RngStream& g, double p) {
    if (p >= 1.0) return 1;
    double v = std::floor(std::log(g.next_unit()) / std::log1p(-p));
    if (v > 4.0e18) return 4000000000000000000L;  // beyond any usable horizon
    return 1 + static_cast<long>(v);
}

}  // namespace dtsm
