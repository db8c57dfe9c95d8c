#include "dtsm/markov.hpp"

#include <cmath>

#include "dtsm/errors.hpp"

namespace dtsm {

Matrix mat_identity(long n) {
    Matrix m(static_cast<size_t>(n), std::vector<double>(static_cast<size_t>(n), 0.0));
    for (size_t i = 0; i < m.size(); ++i) m[i][i] = 1.0;
    return m;
}

Matrix mat_mul(const Matrix& a, const Matrix& b) {
    const size_t n = a.size();
    if (n == 0 || b.size() != n)
        throw usage_error("mat_mul: dimension mismatch");
    Matrix out(n, std::vector<double>(n, 0.0));
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < n; ++j) {
            long double s = 0.0L;
            for (size_t k = 0; k < n; ++k)
                s += static_cast<long double>(a[i][k]) * static_cast<long double>(b[k][j]);
            out[i][j] = static_cast<double>(s);
        }
    }
    return out;
}

long MarkovSpec::index_of(const std::string& label) const {
    for (size_t i = 0; i < states.size(); ++i)
        if (states[i] == label) return static_cast<long>(i);
    throw usage_error("MarkovSpec: unknown state label '" + label + "'");
}

void MarkovSpec::validate() const {
    const size_t n = states.size();
    if (n == 0) throw usage_error("MarkovSpec: empty state set");
    if (a.size() != n) throw usage_error("MarkovSpec: matrix row count does not match states");
    for (size_t i = 0; i < n; ++i) {
        if (a[i].size() != n)
            throw usage_error("MarkovSpec: matrix is not square");
        long double row = 0.0L;
        for (double v : a[i]) {
            if (!(v >= 0.0) || v > 1.0)
                throw usage_error("MarkovSpec: entries must lie in [0, 1]");
            row += v;
        }
        if (std::fabs(static_cast<double>(row - 1.0L)) > 1e-12)
            throw usage_error("MarkovSpec: row " + std::to_string(i) + " does not sum to 1");
    }
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 1; j < n; ++j)
            if (states[i] == states[j])
                throw usage_error("MarkovSpec: duplicate state label '" + states[i] + "'");
}

double MarkovSpec::lambda(long i) const {
    const double qi = q(i);
    if (!(qi > 0.0))
        throw usage_error("MarkovSpec: lambda undefined at q_i = 0 (zero holding probability)");
    return p(i) / qi;
}

JumpChain decompose(const MarkovSpec& spec) {
    spec.validate();
    const size_t n = spec.states.size();
    JumpChain jc;
    jc.p.resize(n);
    jc.h.assign(n, std::vector<double>(n, 0.0));
    for (size_t i = 0; i < n; ++i) {
        const double pi = 1.0 - spec.a[i][i];
        if (!(pi > 0.0))
            throw usage_error("decompose: state '" + spec.states[i] +
                              "' is absorbing; the decomposition needs p_i > 0 in every state");
        jc.p[i] = pi;
        for (size_t j = 0; j < n; ++j)
            if (j != i) jc.h[i][j] = spec.a[i][j] / pi;
    }
    return jc;
}

Matrix markov_pmf(const MarkovSpec& spec, long t) {
    spec.validate();
    if (t < 0) throw usage_error("markov_pmf: t must be >= 0");
    Matrix result = mat_identity(spec.size());
    Matrix base = spec.a;
    while (t > 0) {
        if (t & 1) result = mat_mul(result, base);
        t >>= 1;
        if (t > 0) base = mat_mul(base, base);
    }
    return result;
}

}  // namespace dtsm
