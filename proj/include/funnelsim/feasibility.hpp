#pragma once

// Feasibility checks for a scenario: initial funnel membership of all four
// channels, and the trade-off condition coupling the channel-0 boundary
// rate, the channel-1 width, the altitude-rate disturbance bound and the
// reference rate. The trade-off quantity
//   L(t) = |phiDot0| / (V phi0^2) + 1/phi1 + D0/V + (1+V)/V * |dzref(t)|
// must stay below some mu < 1 for the containment guarantee to apply.

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "funnelsim/boundary.hpp"
#include "funnelsim/controller.hpp"
#include "funnelsim/plant.hpp"
#include "funnelsim/reference.hpp"

namespace funnelsim {

struct ChannelMembership {
    double margin = 0.0;  // phi_i(0) |e_i(0)|
    bool ok = false;
};

struct InitialMembership {
    std::array<ChannelMembership, 4> channels{};
    bool allOk = false;
};

inline InitialMembership check_initial(const PlantState& state0,
                                       const ReferencePath& ref,
                                       const SchedulePtrs& schedules) {
    const RefSample r0 = ref.sample(0.0);
    const ErrorChainResult chain = compute_error_chain(state0, r0, schedules, 0.0, 0.0);
    InitialMembership out;
    out.allOk = true;
    for (int i = 0; i < 4; ++i) {
        out.channels[i].margin = std::abs(chain.out.w[i]);
        out.channels[i].ok = out.channels[i].margin < 1.0;
        out.allOk = out.allOk && out.channels[i].ok;
    }
    return out;
}

struct TradeoffReport {
    std::vector<double> times;
    std::vector<double> lhs;
    double mu = 0.0;      // supremum of the series
    double muTime = 0.0;  // where the supremum is attained
    bool satisfied = false;
};

inline TradeoffReport check_tradeoff(const FunnelSchedule& sched0,
                                     const FunnelSchedule& sched1,
                                     const ReferencePath& ref, double V, double D0,
                                     double grid, double horizon) {
    if (!(grid > 0.0)) throw std::invalid_argument("check_tradeoff: grid must be > 0");
    TradeoffReport rep;
    const std::size_t n = static_cast<std::size_t>(std::floor(horizon / grid)) + 1;
    rep.times.reserve(n);
    rep.lhs.reserve(n);
    rep.mu = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) * grid;
        const PhiSample p0 = sched0.phi(t);
        const PhiSample p1 = sched1.phi(t);
        const double dz = std::abs(ref.sample(t).dz);
        const double value = std::abs(p0.phiDot) / (V * p0.phi * p0.phi) + 1.0 / p1.phi +
                             D0 / V + (1.0 + V) / V * dz;
        rep.times.push_back(t);
        rep.lhs.push_back(value);
        if (value > rep.mu) {
            rep.mu = value;
            rep.muTime = t;
        }
    }
    rep.satisfied = rep.mu < 1.0;
    return rep;
}

struct FeasibilityReport {
    InitialMembership initial;
    TradeoffReport tradeoff;
};

}  // namespace funnelsim
