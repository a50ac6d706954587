#ifndef SELFSIM_QUADRATURE_HPP
#define SELFSIM_QUADRATURE_HPP

#include <functional>

namespace selfsim {

struct QuadResult {
    double value = 0.0;
    double error_estimate = 0.0;
    bool converged = true;
};

// Adaptive Gauss-Kronrod 7-15 panel quadrature on [a, b].
QuadResult integrate_gk15(const std::function<double(double)>& f, double a, double b,
                          double abs_tol = 1e-10, double rel_tol = 1e-10, int max_panels = 4000);

} // namespace selfsim

#endif
