#pragma once

// Closed-loop simulation: plant + funnel controller + disturbances +
// reference, integrated with the adaptive Dormand-Prince scheme. The
// controller is evaluated inside the right-hand side (continuous feedback).
// Funnel-violation events are located by bisection on the dense output.

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "funnelsim/boundary.hpp"
#include "funnelsim/controller.hpp"
#include "funnelsim/integrate.hpp"
#include "funnelsim/plant.hpp"
#include "funnelsim/reference.hpp"

namespace funnelsim {

struct SimSettings {
    double relTol = 1e-6;
    double absTol = 1e-8;
    double maxStep = 0.05;
    double minStep = 1e-9;
    double outputStep = 0.01;
    double guard = 1e-6;  // violation declared at |w| >= 1 - guard
};

struct Scenario {
    std::string name;
    VehicleParams vehicle;
    bool includeChordInMoment = false;
    DerivedConstants constants;
    DisturbanceSpec disturbance;
    ReferencePath path;
    double smoothingTol = 0.5;  // allowed |smoothed - raw| altitude deviation (m)
    std::array<FunnelSchedule, 4> schedules;
    PlantState initialState;
    double horizon = 0.0;
    double saturationLimit = 40.0;
    SimSettings sim;
    std::string outputDir = "out";
    bool plots = true;

    SchedulePtrs schedulePtrs() const {
        return {&schedules[0], &schedules[1], &schedules[2], &schedules[3]};
    }
};

// Uniformly sampled closed-loop time series.
struct TrajectoryRecord {
    std::vector<double> t;
    std::vector<std::array<double, 4>> y;
    std::vector<double> psi;
    std::vector<std::array<double, 4>> e;
    std::vector<std::array<double, 4>> w;
    std::vector<std::array<double, 4>> k;
    std::vector<std::array<double, 4>> rho;
    std::vector<double> uRaw;
    std::vector<double> uSat;
    std::vector<std::array<double, 4>> d;
    std::vector<double> zref, dzref, d2zref, d3zref;

    std::size_t size() const { return t.size(); }
};

struct SimOutcome {
    TrajectoryRecord record;  // rows up to the event when a violation occurs
    std::optional<FunnelViolation> violation;
};

// Closed-loop right-hand side. Evaluations slightly outside a funnel are
// clamped (trial steps may overshoot); violations are only declared on
// accepted steps.
class ClosedLoopRhs {
  public:
    explicit ClosedLoopRhs(const Scenario& sc)
        : sc_(&sc), schedules_(sc.schedulePtrs()) {}

    StateVec<4> operator()(double t, const StateVec<4>& y) const {
        const PlantState s{y[0], y[1], y[2], y[3]};
        const RefSample ref = sc_->path.sample(t);
        const ErrorChainResult chain =
            compute_error_chain(s, ref, schedules_, t, sc_->sim.guard);
        const double u = saturate(chain.out.uRaw, sc_->saturationLimit);
        return plant_rhs(s, u, sc_->disturbance.eval(t), sc_->vehicle, sc_->constants);
    }

  private:
    const Scenario* sc_;
    SchedulePtrs schedules_;
};

namespace detail {

inline void append_row(TrajectoryRecord& rec, const Scenario& sc,
                       const SchedulePtrs& schedules, double t,
                       const StateVec<4>& y) {
    const PlantState s{y[0], y[1], y[2], y[3]};
    const RefSample ref = sc.path.sample(t);
    const ErrorChainResult chain =
        compute_error_chain(s, ref, schedules, t, sc.sim.guard);
    rec.t.push_back(t);
    rec.y.push_back(y);
    rec.psi.push_back(s.psi());
    rec.e.push_back(chain.out.e);
    rec.w.push_back(chain.out.w);
    rec.k.push_back(chain.out.k);
    std::array<double, 4> rho;
    for (int i = 0; i < 4; ++i) rho[i] = schedules[i]->width(t).rho;
    rec.rho.push_back(rho);
    rec.uRaw.push_back(chain.out.uRaw);
    rec.uSat.push_back(saturate(chain.out.uRaw, sc.saturationLimit));
    rec.d.push_back(sc.disturbance.eval(t));
    rec.zref.push_back(ref.z);
    rec.dzref.push_back(ref.dz);
    rec.d2zref.push_back(ref.d2z);
    rec.d3zref.push_back(ref.d3z);
}

}  // namespace detail

// Largest normalized error magnitude across channels at (t, y).
inline std::pair<double, int> funnel_margin(const Scenario& sc,
                                            const SchedulePtrs& schedules, double t,
                                            const StateVec<4>& y) {
    const PlantState s{y[0], y[1], y[2], y[3]};
    const RefSample ref = sc.path.sample(t);
    const ErrorChainResult chain =
        compute_error_chain(s, ref, schedules, t, sc.sim.guard);
    double best = -1.0;
    int channel = 0;
    for (int i = 0; i < 4; ++i) {
        const double m = std::abs(chain.out.w[i]);
        if (m > best) {
            best = m;
            channel = i;
        }
    }
    return {best, channel};
}

// Violation search over one dense-output span: locate the first time the
// margin reaches 1 - guard, then attribute the event to the first channel
// (in chain evaluation order 0..3) at or beyond the threshold there.
template <std::size_t N>
std::optional<FunnelViolation> detect_violation(const Scenario& sc,
                                                const SchedulePtrs& schedules,
                                                const DenseOutput<N>& dense,
                                                double tGood, double tBad,
                                                double timeTol = 1e-6) {
    auto margin = [&](double t) {
        return funnel_margin(sc, schedules, t, dense.eval(t)).first;
    };
    const double threshold = 1.0 - sc.sim.guard;
    const double tEvent = locate_crossing(margin, tGood, tBad, threshold, timeTol);
    const StateVec<N> y = dense.eval(tEvent);
    const PlantState s{y[0], y[1], y[2], y[3]};
    const RefSample ref = sc.path.sample(tEvent);
    const ErrorChainResult chain =
        compute_error_chain(s, ref, schedules, tEvent, sc.sim.guard);
    int channel = chain.violatedChannel;
    if (channel < 0) channel = funnel_margin(sc, schedules, tEvent, y).second;
    return FunnelViolation{channel, tEvent, chain.out.e[channel],
                           schedules[channel]->width(tEvent).rho};
}

inline SimOutcome simulate(const Scenario& sc) {
    SimOutcome outcome;
    const SchedulePtrs schedules = sc.schedulePtrs();
    const double threshold = 1.0 - sc.sim.guard;

    StateVec<4> y0{sc.initialState.y0, sc.initialState.y1, sc.initialState.y2,
                   sc.initialState.y3};

    // Initial membership is a hard precondition.
    {
        detail::append_row(outcome.record, sc, schedules, 0.0, y0);
        const PlantState s{y0[0], y0[1], y0[2], y0[3]};
        const RefSample ref = sc.path.sample(0.0);
        const ErrorChainResult chain =
            compute_error_chain(s, ref, schedules, 0.0, sc.sim.guard);
        if (chain.violatedChannel >= 0) {
            const int ch = chain.violatedChannel;
            outcome.violation = FunnelViolation{ch, 0.0, chain.out.e[ch],
                                                schedules[ch]->width(0.0).rho};
            return outcome;
        }
    }

    IntegratorSettings is;
    is.relTol = sc.sim.relTol;
    is.absTol = sc.sim.absTol;
    is.maxStep = sc.sim.maxStep;
    is.minStep = sc.sim.minStep;
    is.initialStep = std::min(1e-3, sc.sim.maxStep);

    const double outStep = sc.sim.outputStep;
    std::size_t nextOut = 1;  // row 0 already recorded
    double lastGood = 0.0;

    ClosedLoopRhs rhs(sc);
    auto observer = [&](const DenseOutput<4>& dense, const StateVec<4>& yNew) {
        // Output samples inside this step.
        while (true) {
            const double tk = static_cast<double>(nextOut) * outStep;
            if (tk > sc.horizon + 1e-12 || tk > dense.t1() + 1e-12) break;
            const StateVec<4> yk = dense.eval(std::min(tk, dense.t1()));
            const auto [m, channel] = funnel_margin(sc, schedules, tk, yk);
            if (m >= threshold) {
                outcome.violation = detect_violation(sc, schedules, dense,
                                                     std::max(lastGood, dense.t0), tk);
                return false;
            }
            detail::append_row(outcome.record, sc, schedules, tk, yk);
            lastGood = tk;
            ++nextOut;
        }
        // Step endpoint check (covers spans between output samples).
        const auto [m, channel] = funnel_margin(sc, schedules, dense.t1(), yNew);
        if (m >= threshold) {
            outcome.violation = detect_violation(sc, schedules, dense,
                                                 std::max(lastGood, dense.t0), dense.t1());
            return false;
        }
        return true;
    };

    integrate_dopri5<4>(rhs, 0.0, sc.horizon, y0, is, observer);
    return outcome;
}

}  // namespace funnelsim
