#pragma once

#include <string>
#include <vector>

namespace dtsm {

using Matrix = std::vector<std::vector<double>>;

Matrix mat_identity(long n);
Matrix mat_mul(const Matrix& a, const Matrix& b);

// Finite-state chain with one-step transition matrix a (row-stochastic).
// q_i = a[i][i] is the holding probability, p_i = 1 - q_i the jump
// probability, lambda_i = p_i / q_i (only where q_i > 0).
struct MarkovSpec {
    std::vector<std::string> states;
    Matrix a;

    long size() const { return static_cast<long>(states.size()); }
    long index_of(const std::string& label) const;
    void validate() const;

    double q(long i) const { return a[static_cast<size_t>(i)][static_cast<size_t>(i)]; }
    double p(long i) const { return 1.0 - q(i); }
    double lambda(long i) const;  // requires q_i > 0
};

// Embedded jump chain: h has zero diagonal and stochastic rows,
// h[i][j] = a[i][j] / p_i for j != i.
struct JumpChain {
    Matrix h;
    std::vector<double> p;

    long size() const { return static_cast<long>(p.size()); }
};

// Splits a into holding probabilities and the jump chain.  Rejects absorbing
// states: the time-change construction requires p_i > 0 everywhere.
JumpChain decompose(const MarkovSpec& spec);

// P(t) = a^t by repeated squaring; P(0) = I.
Matrix markov_pmf(const MarkovSpec& spec, long t);

}  // namespace dtsm
