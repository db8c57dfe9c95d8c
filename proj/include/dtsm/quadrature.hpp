#pragma once

#include <functional>

namespace dtsm {

// Adaptive Gauss-Kronrod (G7,K15) integration of f over [a, b].
// A panel is accepted when |K15 - G7| <= max(abs_tol, rel_tol*|K15|) scaled
// to the panel share; otherwise it is bisected.  Throws accuracy_error if the
// recursion cannot reach the requested tolerance.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol = 1e-10, double abs_tol = 1e-14);

}  // namespace dtsm
