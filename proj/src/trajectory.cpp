#include "selfsim/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace selfsim {

namespace {

// Cubic Hermite on one segment; returns value and derivative at t.
PhaseState hermite_eval(const TrajectoryNode& a, const TrajectoryNode& b, double t) {
    const double h = b.t - a.t;
    const double s = (t - a.t) / h;
    const double s2 = s * s;
    const double s3 = s2 * s;
    const double h00 = 2 * s3 - 3 * s2 + 1;
    const double h10 = s3 - 2 * s2 + s;
    const double h01 = -2 * s3 + 3 * s2;
    const double h11 = s3 - s2;
    const double u = h00 * a.s.u + h10 * h * a.f.u + h01 * b.s.u + h11 * h * b.f.u;
    // Interpolate u' with its own Hermite cubic (slopes are u'' = f.du).
    const double du = h00 * a.s.du + h10 * h * a.f.du + h01 * b.s.du + h11 * h * b.f.du;
    return {u, du};
}

} // namespace

PhaseState Trajectory::eval(double t) const {
    if (nodes.size() < 2)
        throw std::runtime_error("Trajectory::eval: fewer than two nodes");
    const bool fwd = forward();
    const double lo = fwd ? nodes.front().t : nodes.back().t;
    const double hi = fwd ? nodes.back().t : nodes.front().t;
    const double pad = 1e-12 * (1.0 + std::abs(hi));
    if (t < lo - pad || t > hi + pad)
        throw std::out_of_range("Trajectory::eval: abscissa outside node span");
    t = std::clamp(t, lo, hi);

    std::size_t i;
    if (fwd) {
        auto it = std::upper_bound(nodes.begin(), nodes.end(), t,
                                   [](double v, const TrajectoryNode& n) { return v < n.t; });
        i = static_cast<std::size_t>(std::distance(nodes.begin(), it));
        if (i == 0) i = 1;
        if (i == nodes.size()) i = nodes.size() - 1;
    } else {
        auto it = std::upper_bound(nodes.begin(), nodes.end(), t,
                                   [](double v, const TrajectoryNode& n) { return v > n.t; });
        i = static_cast<std::size_t>(std::distance(nodes.begin(), it));
        if (i == 0) i = 1;
        if (i == nodes.size()) i = nodes.size() - 1;
    }
    return hermite_eval(nodes[i - 1], nodes[i], t);
}

void Trajectory::make_increasing() {
    if (!forward())
        std::reverse(nodes.begin(), nodes.end());
}

} // namespace selfsim
