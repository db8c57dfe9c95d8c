#include "dtsm/discrete_pmf.hpp"

#include <cmath>
#include <string>

#include "dtsm/errors.hpp"

namespace dtsm {

void DiscretePmf::validate() const {
    if (mass.empty()) throw usage_error("DiscretePmf: empty mass vector");
    double total = tail_bound;
    for (std::size_t k = 0; k < mass.size(); ++k) {
        if (mass[k] < -1e-12)
            throw usage_error("DiscretePmf: negative mass at k=" + std::to_string(k));
        total += mass[k];
    }
    if (tail_bound < -1e-12) throw usage_error("DiscretePmf: negative tail bound");
    if (std::fabs(total - 1.0) > 1e-12)
        throw usage_error("DiscretePmf: total mass " + std::to_string(total) + " is not 1");
}

}  // namespace dtsm
