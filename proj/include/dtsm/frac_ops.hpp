#pragma once

#include <vector>

#include "dtsm/discrete_pmf.hpp"
#include "dtsm/markov.hpp"
#include "dtsm/sibuya.hpp"

namespace dtsm {

// Step-law kernel mu(tau) = P(Z = tau) of the generalized discrete
// derivative, with its survival S(t) = P(Z > t).  Sibuya kernels are exact
// at every lag; general kernels carry the tail of their truncated table.
class FracKernel {
public:
    static FracKernel sibuya(double alpha);
    static FracKernel general(DiscretePmf step_pmf);  // no mass at 0

    double mu(long tau) const;       // tau >= 0; mu(0) = 0
    double survival(long t) const;   // t >= 0

    // Solving out to the horizon needs exact mu on every lag <= horizon.
    void require_resolved(long horizon) const;

    bool is_sibuya() const { return sibuya_; }
    double alpha() const;

private:
    FracKernel() = default;
    bool sibuya_ = false;
    double alpha_ = 0.0;
    std::vector<double> mass_;
    std::vector<double> surv_;  // survival at 0..K for the general kind
    double tail_ = 0.0;
};

// (I - B)^alpha seq at t: sum_{k=0}^{t} gen_binom(alpha, k) (-1)^k seq[t-k].
// Entries outside the stored range read as zero.
double frac_diff(double alpha, const std::vector<double>& seq, long t);

// Generalized derivative: seq[t] - sum_{tau=1}^{t} mu(tau) seq[t-tau].
double gen_frac_deriv(const FracKernel& kernel, const std::vector<double>& seq, long t);

// Transition functions p[i][j][t] on t = 0..horizon.
struct SolutionGrid {
    long n_states = 0;
    long horizon = 0;
    std::vector<double> values;

    double at(long i, long j, long t) const;
    double& at(long i, long j, long t);
};

// Solves the backward governing system for the type-B chain built on the
// jump chain and kernel, by exact rearrangement into a time recursion:
//   p_ij(t) (1 + lambda_i) = sum_{tau=1}^{t} mu(tau) p_ij(t - tau)
//                            + S(t) delta_ij + lambda_i sum_l h_il p_lj(t-1)
// with p_ij(0) = delta_ij and lambda_i = p_i / (1 - p_i).
SolutionGrid solve_backward(const JumpChain& jump, const FracKernel& kernel, long horizon);

// Left side minus right side of the governing system at time t; near zero
// certifies the grid solves it.
Matrix residual_backward(const SolutionGrid& grid, const JumpChain& jump,
                         const FracKernel& kernel, long t);

// Fractional Bernoulli forward system, solved as an explicit recursion:
// returns values[k][t] = p_k(t) for k <= k_max, t <= horizon, with
// p_k(0) = delta_{0k} and rate lambda > 0.
std::vector<std::vector<double>> nb_forward_solve(double alpha, double lambda, long horizon,
                                                  long k_max);

// P(N(t) = m) for t = 0..horizon of the type-A / type-B counting process
// with Sibuya(alpha) steps and geometric(p) compounding, by coefficient
// extraction from the closed generating functions.
std::vector<double> frac_bernoulli_pmf(DmlKind kind, double alpha, double p, long m,
                                       long horizon);

// All rows m = 0..m_max at once, sharing the series work.
std::vector<std::vector<double>> frac_bernoulli_grid(DmlKind kind, double alpha, double p,
                                                     long m_max, long horizon);

}  // namespace dtsm
