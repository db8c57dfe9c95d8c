#include "dtsm/quadrature.hpp"

#include <cmath>

#include "dtsm/errors.hpp"

namespace dtsm {
namespace {

// 15-point Kronrod abscissae on [-1,1] (positive half) and weights, with the
// embedded 7-point Gauss weights sitting on the odd-index abscissae.
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0,
};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
};

struct PanelEstimate {
    double kronrod;
    double err;
};

PanelEstimate gk15(const std::function<double(double)>& f, double a, double b) {
    const double h = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    double resk = 0.0, resg = 0.0;
    for (int i = 0; i < 8; ++i) {
        double v;
        if (i == 7) {
            v = f(mid);
        } else {
            double dx = h * kXgk[i];
            v = f(mid - dx) + f(mid + dx);
        }
        resk += kWgk[i] * v;
        if (i % 2 == 1) resg += kWg[i / 2] * v;
    }
    return {resk * h, std::fabs(resk - resg) * h};
}

double integrate_rec(const std::function<double(double)>& f, double a, double b,
                     double rel_tol, double abs_tol, int depth) {
    PanelEstimate e = gk15(f, a, b);
    if (e.err <= std::fmax(abs_tol, rel_tol * std::fabs(e.kronrod)) || e.err == 0.0)
        return e.kronrod;
    if (depth >= 60)
        throw accuracy_error("integrate: adaptive subdivision failed to reach tolerance");
    double mid = 0.5 * (a + b);
    return integrate_rec(f, a, mid, rel_tol, 0.5 * abs_tol, depth + 1) +
           integrate_rec(f, mid, b, rel_tol, 0.5 * abs_tol, depth + 1);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol, double abs_tol) {
    if (a == b) return 0.0;
    return integrate_rec(f, a, b, rel_tol, abs_tol, 0);
}

}  // namespace dtsm
