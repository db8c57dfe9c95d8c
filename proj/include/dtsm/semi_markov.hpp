#pragma once

#include <memory>
#include <vector>

#include "dtsm/discrete_pmf.hpp"
#include "dtsm/markov.hpp"
#include "dtsm/rng.hpp"
#include "dtsm/sibuya.hpp"

namespace dtsm {

// Positive-integer step distribution: Sibuya(alpha), a point mass, or a
// user-supplied table on {1..K}.  Sampling a table requires a negligible
// tail bound; enumeration accepts truncated tables and reports the deficit.
class StepDist {
public:
    static StepDist sibuya(double alpha);
    static StepDist point_mass(long value);
    static StepDist table(DiscretePmf pmf);

    long sample(RngStream& rng) const;  // one uniform for sibuya/table, none for point mass
    double pmf_at(long k) const;        // k >= 1
    double survival(long k) const;      // P(Z > k), k >= 0
    DiscretePmf pmf_to(long t_max) const;

    bool is_sibuya() const { return kind_ == Kind::sibuya; }
    double sibuya_alpha() const;

private:
    enum class Kind { sibuya, point, table };
    StepDist() = default;

    Kind kind_ = Kind::point;
    double alpha_ = 1.0;
    long value_ = 1;
    std::vector<double> mass_;            // table kind, indexed by k
    double table_tail_ = 0.0;
    std::shared_ptr<const SibuyaSampler> sampler_;
};

// Semi-Markov chain: jump targets from the embedded chain, sojourn in state
// i drawn from the compound law with M ~ Geometric(p_i) steps Z ~ step_dist,
//   type_a: J = Z_1 + ... + Z_M        type_b: J = 1 + Z_1 + ... + Z_{M-1}
struct SemiMarkovSpec {
    JumpChain jump_chain;
    StepDist step_dist;
    DmlKind kind = DmlKind::type_a;
};

// Right-continuous trajectory on [0, horizon]: epochs[k] holds the state and
// the full drawn sojourn; the last sojourn runs past the horizon.  age is
// the elapsed time in the final epoch at t = horizon.
struct PathSample {
    struct Epoch {
        long state;
        long sojourn;
    };
    std::vector<Epoch> epochs;
    long horizon = 0;
    long age = 0;

    long state_at(long t) const;  // 0 <= t <= horizon
    long age_at(long t) const;    // time since the sojourn containing t began
};

// Per epoch: the sojourn is drawn first, then (if the horizon is not yet
// covered) the jump target.
PathSample simulate(const MarkovSpec& spec, RngStream& rng, long initial, long horizon);
PathSample simulate(const SemiMarkovSpec& spec, RngStream& rng, long initial, long horizon);

// Y(t) = X(L(t)): the renewal path of step_dist is drawn first, then the
// Markov transitions it requires.  Epochs record visible state changes.
PathSample time_change_sample(const MarkovSpec& markov, const StepDist& step_dist,
                              RngStream& rng, long initial, long horizon);

// Exact state pmfs for t = 0..t_max (outer index t).  Row sums fall short
// of 1 only by the truncated step-distribution tail.  t_max is capped at 12
// to keep the dynamic programs exact and small.
std::vector<std::vector<double>> enumerate_exact(const MarkovSpec& spec, long initial,
                                                 long t_max);
std::vector<std::vector<double>> enumerate_exact(const SemiMarkovSpec& spec, long initial,
                                                 long t_max);
std::vector<std::vector<double>> enumerate_exact(const MarkovSpec& markov,
                                                 const StepDist& step_dist, long initial,
                                                 long t_max);

// Autocorrelation of Y(t) = X(L(t)) for i.i.d.-increment X with the given
// one-step mean and variance; L moments at (s, t) = (t1, t2):
//   rho = [cov(L(s),L(t)) (EX)^2 + E L(s) VarX] / sqrt(d(s)) sqrt(d(t)),
//   d(u) = Var L(u) (EX)^2 + E L(u) VarX.
double timechange_autocorr(const CountingMoments& lm, double mean_x1, double var_x1);

}  // namespace dtsm
