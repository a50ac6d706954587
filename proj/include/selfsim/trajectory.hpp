#ifndef SELFSIM_TRAJECTORY_HPP
#define SELFSIM_TRAJECTORY_HPP

#include <cstddef>
#include <vector>

#include "selfsim/params.hpp"

namespace selfsim {

enum class Coordinate { Rho, X };

enum class Termination { ReachedEnd, EscapedPlus, EscapedMinus, StepFailure };

enum class EventKind { Crossing, Extremum, EscapeThreshold };

struct Event {
    EventKind kind;
    double abscissa;
};

// One accepted integration node: abscissa, state, and the RHS evaluated
// there (slopes for cubic Hermite dense output).
struct TrajectoryNode {
    double t;
    PhaseState s;
    PhaseState f; // f.u = u', f.du = u''
};

// Densely sampled solution of one integration run.  Nodes are ordered in
// the direction of integration (t may decrease for backward runs).
class Trajectory {
  public:
    Coordinate coordinate = Coordinate::X;
    std::vector<TrajectoryNode> nodes;
    std::vector<Event> events;
    Termination termination = Termination::ReachedEnd;

    bool forward() const { return nodes.size() < 2 || nodes.back().t >= nodes.front().t; }
    double t_front() const { return nodes.front().t; }
    double t_back() const { return nodes.back().t; }

    // Cubic Hermite interpolation of (u, u') at abscissa t inside the node span.
    PhaseState eval(double t) const;

    std::size_t count_events(EventKind kind) const {
        std::size_t c = 0;
        for (const auto& e : events)
            if (e.kind == kind) ++c;
        return c;
    }

    // Reorder nodes so abscissae increase; events are left untouched.
    void make_increasing();
};

} // namespace selfsim

#endif
