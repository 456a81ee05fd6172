#pragma once

// Recursive funnel errors, normalized errors, gains, and the control law.
//
// Channel errors chain through the normalized error of the previous channel:
//   e0 = y0 - zref,   ei = yi - zref^(i) + k_{i-1} w_{i-1}   (i = 1..3)
// with w_i = phi_i e_i and k_i = 1 / (1 - w_i^2). The rudder command is
// u = -k3 e3, clamped by the actuator limit.

#include <array>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

#include "funnelsim/boundary.hpp"
#include "funnelsim/plant.hpp"
#include "funnelsim/reference.hpp"

namespace funnelsim {

struct FunnelViolation {
    int channel = -1;
    double time = 0.0;
    double error = 0.0;  // e_i at the event
    double width = 0.0;  // rho_i at the event
};

class FunnelViolationError : public std::runtime_error {
  public:
    FunnelViolation event;

    explicit FunnelViolationError(const FunnelViolation& ev)
        : std::runtime_error(describe(ev)), event(ev) {}

    static std::string describe(const FunnelViolation& ev) {
        char buf[160];
        std::snprintf(buf, sizeof(buf),
                      "funnel violation on channel %d at t = %.6f s (|e| = %.6g, width = %.6g)",
                      ev.channel, ev.time, ev.error, ev.width);
        return buf;
    }
};

struct ControllerOutput {
    std::array<double, 4> e{};  // channel errors
    std::array<double, 4> w{};  // normalized errors phi_i e_i
    std::array<double, 4> k{};  // gains 1/(1 - w_i^2)
    double uRaw = 0.0;          // unclamped command
    double uSat = 0.0;          // clamped command
};

struct ErrorChainResult {
    ControllerOutput out;
    int violatedChannel = -1;  // first channel with |w| >= 1 - guard, or -1
};

using SchedulePtrs = std::array<const FunnelSchedule*, 4>;

// Evaluate the full error chain without throwing. When a channel's
// normalized error reaches 1 - guard its gain is computed from the clamped
// value so downstream quantities stay finite; the reported w holds the true
// (unclamped) normalized error.
inline ErrorChainResult compute_error_chain(const PlantState& s, const RefSample& ref,
                                            const SchedulePtrs& schedules, double t,
                                            double guard = 0.0) noexcept {
    const std::array<double, 4> y{s.y0, s.y1, s.y2, s.y3};
    const std::array<double, 4> zref{ref.z, ref.dz, ref.d2z, ref.d3z};

    ErrorChainResult r;
    double chain = 0.0;  // k_{i-1} * w_{i-1}
    for (int i = 0; i < 4; ++i) {
        const double e = y[i] - zref[i] + chain;
        const double phi = schedules[i]->phi(t).phi;
        const double w = phi * e;
        r.out.e[i] = e;
        r.out.w[i] = w;
        double wEff = w;
        if (std::abs(w) >= 1.0 - guard) {
            if (r.violatedChannel < 0) r.violatedChannel = i;
            wEff = std::copysign(1.0 - std::max(guard, 1e-12), w);
        }
        const double k = 1.0 / (1.0 - wEff * wEff);
        r.out.k[i] = k;
        chain = k * wEff;
    }
    r.out.uRaw = -r.out.k[3] * r.out.e[3];
    return r;
}

// Strict variant: throws FunnelViolationError at the first channel whose
// normalized error leaves the open unit interval.
inline ControllerOutput compute_errors(const PlantState& s, const RefSample& ref,
                                       const SchedulePtrs& schedules, double t) {
    ErrorChainResult r = compute_error_chain(s, ref, schedules, t, 0.0);
    if (r.violatedChannel >= 0) {
        const int i = r.violatedChannel;
        throw FunnelViolationError({i, t, r.out.e[i], 1.0 / schedules[i]->phi(t).phi});
    }
    return r.out;
}

// u = -e3 / (1 - phi3^2 e3^2); requires |phi3 e3| < 1.
inline double control_law(double e3, double phi3, double t = 0.0) {
    const double w3 = phi3 * e3;
    if (!(std::abs(w3) < 1.0)) {
        throw FunnelViolationError({3, t, e3, 1.0 / phi3});
    }
    return -e3 / (1.0 - w3 * w3);
}

// Hard clamp to [-limit, limit].
inline double saturate(double uRaw, double limit = 40.0) {
    if (uRaw > limit) return limit;
    if (uRaw < -limit) return -limit;
    return uRaw;
}

}  // namespace funnelsim
