#ifndef SELFSIM_PARAMS_HPP
#define SELFSIM_PARAMS_HPP

#include <stdexcept>
#include <string>

namespace selfsim {

// Equivariant reduction parameters: spatial dimension m (odd, >=3),
// equivariance degree l (>=1), and the coupling k = l(l+m-2)/2 that
// multiplies sin(2h) in the profile equation.
struct EquationParams {
    int m = 3;
    int l = 1;
    double k = 1.0;

    static EquationParams make(int m, int l) {
        if (m < 3)
            throw std::invalid_argument("EquationParams: m must be >= 3, got " + std::to_string(m));
        if (m % 2 == 0)
            throw std::invalid_argument("EquationParams: m must be odd (smooth profiles require odd m), got " +
                                        std::to_string(m));
        if (l < 1)
            throw std::invalid_argument("EquationParams: l must be >= 1, got " + std::to_string(l));
        EquationParams p;
        p.m = m;
        p.l = l;
        p.k = 0.5 * static_cast<double>(l) * static_cast<double>(l + m - 2);
        return p;
    }
};

// Profile value and its derivative with respect to the active abscissa.
struct PhaseState {
    double u = 0.0;
    double du = 0.0;
};

} // namespace selfsim

#endif
