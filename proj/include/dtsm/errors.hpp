#pragma once

#include <stdexcept>
#include <string>

namespace dtsm {

// Precondition violations: bad parameters, malformed specs, out-of-contract
// calls.  The command line tool maps these to exit code 2.
struct usage_error : std::invalid_argument {
    explicit usage_error(const std::string& what) : std::invalid_argument(what) {}
};

// A request that leaves the supported numeric envelope (declared parameter
// boxes, series term caps, overflowing intermediates).  Exit code 3.
struct range_error : std::out_of_range {
    explicit range_error(const std::string& what) : std::out_of_range(what) {}
};

// A request whose result cannot be delivered at documented accuracy,
// e.g. a truncated kernel whose tail bound is too large for the horizon.
struct accuracy_error : range_error {
    explicit accuracy_error(const std::string& what) : range_error(what) {}
};

}  // namespace dtsm
