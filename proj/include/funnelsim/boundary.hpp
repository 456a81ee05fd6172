#pragma once

// Time-triggered non-monotonic funnel boundary.
//
// The boundary rho(t) of each performance funnel is a chain of exponential
// shrink phases stitched together by cubic bridges. A bridge spans one
// maneuver window [tj, tjBar) and widens the funnel so that scheduled
// reference maneuvers do not push the error across the boundary. Value and
// first derivative are matched at every junction, so rho is C^1 on [0, inf).

#include <cmath>
#include <cstddef>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace funnelsim {

// One exponential shrink phase, evaluated in phase-local time:
//   rho(t) = (rho0 - rhoInf) * exp(-rate * (t - tStart)) + rhoInf
struct ExponentialSegment {
    double rho0 = 0.0;    // width at phase start (channel units)
    double rhoInf = 0.0;  // steady-state width
    double rate = 0.0;    // convergence rate (1/s)
    double tStart = 0.0;  // absolute phase start time (s)

    double value(double t) const {
        return (rho0 - rhoInf) * std::exp(-rate * (t - tStart)) + rhoInf;
    }
    double slope(double t) const {
        return -rate * (rho0 - rhoInf) * std::exp(-rate * (t - tStart));
    }
};

// Cubic widening bridge q(t) = a x^3 + b x^2 + c x + d with x = t - tj,
// valid on [tj, tjBar).
struct CubicBridge {
    double a = 0.0, b = 0.0, c = 0.0, d = 0.0;
    double tj = 0.0;
    double tjBar = 0.0;

    double value(double t) const {
        const double x = t - tj;
        return ((a * x + b) * x + c) * x + d;
    }
    double slope(double t) const {
        const double x = t - tj;
        return (3.0 * a * x + 2.0 * b) * x + c;
    }
};

// Width/slope sample of a boundary, and its reciprocal.
struct WidthSample {
    double rho = 0.0;
    double rhoDot = 0.0;
};
struct PhiSample {
    double phi = 0.0;
    double phiDot = 0.0;
};

// Parameters of one exponential phase as written in a scenario file.
struct FunnelPhase {
    double rho0 = 0.0;
    double rhoInf = 0.0;
    double rate = 0.0;
};

namespace detail {

inline std::string format_time(double t) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.9g", t);
    return buf;
}

}  // namespace detail

// Unique cubic with q(tj)=vL, q'(tj)=sL, q(tjBar)=vR, q'(tjBar)=sR.
// Rejects degenerate intervals and cubics that are not strictly positive
// anywhere on [tj, tjBar].
inline CubicBridge hermite_bridge(double tj, double tjBar, double vL, double sL,
                                  double vR, double sR,
                                  double minDuration = 1e-6) {
    const double h = tjBar - tj;
    if (!(h > minDuration)) {
        throw std::invalid_argument("hermite_bridge: interval [" +
                                    detail::format_time(tj) + ", " +
                                    detail::format_time(tjBar) +
                                    "] shorter than minimum duration");
    }
    if (!(vL > 0.0) || !(vR > 0.0)) {
        throw std::invalid_argument("hermite_bridge: endpoint widths must be > 0");
    }

    CubicBridge q;
    q.tj = tj;
    q.tjBar = tjBar;
    q.d = vL;
    q.c = sL;
    const double p = vR - vL - sL * h;   // residual value gap
    const double r = sR - sL;            // residual slope gap
    q.a = (h * r - 2.0 * p) / (h * h * h);
    q.b = (r - 3.0 * q.a * h * h) / (2.0 * h);

    // Positivity on [0, h]: check endpoints, interior extrema of the cubic,
    // and a dense scan as a backstop.
    double minVal = std::min(vL, vR);
    double minAt = (vL <= vR) ? tj : tjBar;
    auto consider = [&](double x) {
        const double v = ((q.a * x + q.b) * x + q.c) * x + q.d;
        if (v < minVal) {
            minVal = v;
            minAt = tj + x;
        }
    };
    // Roots of q'(x) = 3a x^2 + 2b x + c.
    const double qa = 3.0 * q.a, qb = 2.0 * q.b, qc = q.c;
    if (std::abs(qa) > 0.0) {
        const double disc = qb * qb - 4.0 * qa * qc;
        if (disc >= 0.0) {
            const double sq = std::sqrt(disc);
            for (double root : {(-qb + sq) / (2.0 * qa), (-qb - sq) / (2.0 * qa)}) {
                if (root > 0.0 && root < h) consider(root);
            }
        }
    } else if (std::abs(qb) > 0.0) {
        const double root = -qc / qb;
        if (root > 0.0 && root < h) consider(root);
    }
    for (int i = 1; i < 256; ++i) consider(h * static_cast<double>(i) / 256.0);

    if (!(minVal > 0.0)) {
        throw std::invalid_argument("hermite_bridge: bridge is non-positive at t = " +
                                    detail::format_time(minAt));
    }
    return q;
}

// Piecewise funnel boundary for one channel: phases[0] on [0, t1),
// bridges[j] on [tj+1, tjBar+1), phases[j+1] on [tjBar+1, tj+2), ...,
// phases[p] on [tjBar_p, inf). All intervals are left-closed/right-open.
struct FunnelSchedule {
    std::vector<ExponentialSegment> phases;  // p + 1 entries
    std::vector<CubicBridge> bridges;        // p entries
    int channelIndex = 0;

    std::size_t triggerCount() const { return bridges.size(); }

    WidthSample width(double t) const {
        for (std::size_t j = 0; j < bridges.size(); ++j) {
            if (t < bridges[j].tj) return {phases[j].value(t), phases[j].slope(t)};
            if (t < bridges[j].tjBar) return {bridges[j].value(t), bridges[j].slope(t)};
        }
        const ExponentialSegment& last = phases.back();
        return {last.value(t), last.slope(t)};
    }

    PhiSample phi(double t) const {
        const WidthSample w = width(t);
        return {1.0 / w.rho, -w.rhoDot / (w.rho * w.rho)};
    }

    // Strict containment test: phi(t) * |e| < 1.
    bool contains(double t, double e) const {
        return phi(t).phi * std::abs(e) < 1.0;
    }

    // Junction times (tj, tjBar) of every bridge, in order.
    std::vector<double> junctionTimes() const {
        std::vector<double> out;
        out.reserve(2 * bridges.size());
        for (const CubicBridge& b : bridges) {
            out.push_back(b.tj);
            out.push_back(b.tjBar);
        }
        return out;
    }
};

// Assemble a schedule from per-phase parameters and maneuver windows.
// Bridge endpoint values/slopes come from the adjacent exponential phases:
// the left phase evaluated at tj, the right phase at its own start tjBar.
inline FunnelSchedule build_schedule(const std::vector<FunnelPhase>& phases,
                                     const std::vector<std::pair<double, double>>& triggers,
                                     int channelIndex = 0) {
    if (phases.empty()) {
        throw std::invalid_argument("build_schedule: at least one phase required");
    }
    if (phases.size() != triggers.size() + 1) {
        throw std::invalid_argument(
            "build_schedule: phase count must be trigger count + 1 (got " +
            std::to_string(phases.size()) + " phases, " +
            std::to_string(triggers.size()) + " triggers)");
    }
    for (const FunnelPhase& p : phases) {
        if (!(p.rho0 > 0.0)) throw std::invalid_argument("build_schedule: rho0 > 0 violated");
        if (!(p.rhoInf > 0.0)) throw std::invalid_argument("build_schedule: rhoInf > 0 violated");
        if (!(p.rate > 0.0)) throw std::invalid_argument("build_schedule: rate > 0 violated");
        if (!(p.rho0 >= p.rhoInf)) {
            throw std::invalid_argument("build_schedule: rho0 >= rhoInf violated");
        }
    }
    double prevEnd = 0.0;
    for (const auto& [tj, tjBar] : triggers) {
        if (!(tj >= prevEnd)) {
            throw std::invalid_argument("build_schedule: trigger windows overlap or are out of order");
        }
        if (!(tjBar > tj)) {
            throw std::invalid_argument("build_schedule: trigger window must have tjBar > tj");
        }
        prevEnd = tjBar;
    }

    FunnelSchedule s;
    s.channelIndex = channelIndex;
    s.phases.reserve(phases.size());
    s.bridges.reserve(triggers.size());

    double tStart = 0.0;
    for (std::size_t j = 0; j < phases.size(); ++j) {
        s.phases.push_back({phases[j].rho0, phases[j].rhoInf, phases[j].rate, tStart});
        if (j < triggers.size()) tStart = triggers[j].second;
    }
    for (std::size_t j = 0; j < triggers.size(); ++j) {
        const auto& [tj, tjBar] = triggers[j];
        const ExponentialSegment& left = s.phases[j];
        const ExponentialSegment& right = s.phases[j + 1];
        s.bridges.push_back(hermite_bridge(tj, tjBar, left.value(tj), left.slope(tj),
                                           right.value(tjBar), right.slope(tjBar)));
    }
    return s;
}

// Pointwise scaled copy: rho'(t) = factor * rho(t). The Hermite conditions
// are linear in the endpoint data, so scaling the phase widths scales the
// bridge coefficients exactly.
inline FunnelSchedule scaled_schedule(const FunnelSchedule& base, double factor,
                                      int channelIndex) {
    if (!(factor > 0.0)) {
        throw std::invalid_argument("scaled_schedule: factor must be > 0");
    }
    std::vector<FunnelPhase> phases;
    phases.reserve(base.phases.size());
    for (const ExponentialSegment& p : base.phases) {
        phases.push_back({p.rho0 * factor, p.rhoInf * factor, p.rate});
    }
    std::vector<std::pair<double, double>> triggers;
    triggers.reserve(base.bridges.size());
    for (const CubicBridge& b : base.bridges) triggers.emplace_back(b.tj, b.tjBar);
    return build_schedule(phases, triggers, channelIndex);
}

}  // namespace funnelsim
