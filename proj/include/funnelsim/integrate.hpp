#pragma once

// Embedded Dormand-Prince 4(5) integrator with FSAL, PI-free standard step
// control and 4th-order dense output. The observer is invoked once per
// accepted step with a dense interpolant over that step and may stop the
// integration early.

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace funnelsim {

struct StepFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IntegratorSettings {
    double relTol = 1e-6;
    double absTol = 1e-8;
    double maxStep = 0.05;
    double minStep = 1e-9;
    double initialStep = 1e-3;
};

template <std::size_t N>
using StateVec = std::array<double, N>;

// Continuous extension over one accepted step [t0, t0+h].
template <std::size_t N>
struct DenseOutput {
    double t0 = 0.0;
    double h = 0.0;
    std::array<StateVec<N>, 5> cont{};

    double t1() const { return t0 + h; }

    StateVec<N> eval(double t) const {
        const double theta = (t - t0) / h;
        const double theta1 = 1.0 - theta;
        StateVec<N> y;
        for (std::size_t i = 0; i < N; ++i) {
            y[i] = cont[0][i] +
                   theta * (cont[1][i] +
                            theta1 * (cont[2][i] +
                                      theta * (cont[3][i] + theta1 * cont[4][i])));
        }
        return y;
    }
};

// Rhs: StateVec<N>(double t, const StateVec<N>& y).
// Observer: bool(const DenseOutput<N>&, const StateVec<N>& yNew);
// returning false stops the integration after the current step.
template <std::size_t N, typename Rhs, typename Observer>
StateVec<N> integrate_dopri5(Rhs&& rhs, double t0, double tEnd, StateVec<N> y,
                             const IntegratorSettings& s, Observer&& observe) {
    // Butcher tableau.
    constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                     a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                     a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                     a75 = -2187.0 / 6784, a76 = 11.0 / 84;
    // 5th-order minus 4th-order weights (error estimator).
    constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                     e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
    // Dense-output weights.
    constexpr double d1 = -12715105075.0 / 11282082432.0;
    constexpr double d3 = 87487479700.0 / 32700410799.0;
    constexpr double d4 = -10690763975.0 / 1880347072.0;
    constexpr double d5 = 701980252875.0 / 199316789632.0;
    constexpr double d6 = -1453857185.0 / 822651844.0;
    constexpr double d7 = 69997945.0 / 29380423.0;

    if (!(tEnd > t0)) return y;

    double t = t0;
    double h = std::min({s.initialStep, s.maxStep, tEnd - t0});
    StateVec<N> k1 = rhs(t, y);
    bool rejectedLast = false;

    while (t < tEnd) {
        const bool lastStep = (t + h >= tEnd);
        if (lastStep) h = tEnd - t;

        StateVec<N> tmp, k2, k3, k4, k5, k6, k7, yNew;
        for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * a21 * k1[i];
        k2 = rhs(t + c2 * h, tmp);
        for (std::size_t i = 0; i < N; ++i)
            tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        k3 = rhs(t + c3 * h, tmp);
        for (std::size_t i = 0; i < N; ++i)
            tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        k4 = rhs(t + c4 * h, tmp);
        for (std::size_t i = 0; i < N; ++i)
            tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        k5 = rhs(t + c5 * h, tmp);
        for (std::size_t i = 0; i < N; ++i)
            tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] +
                                 a64 * k4[i] + a65 * k5[i]);
        k6 = rhs(t + h, tmp);
        for (std::size_t i = 0; i < N; ++i)
            yNew[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] +
                                  a75 * k5[i] + a76 * k6[i]);
        k7 = rhs(t + h, yNew);

        double errSq = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double err = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] +
                                    e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
            const double sc = s.absTol + s.relTol * std::max(std::abs(y[i]), std::abs(yNew[i]));
            errSq += (err / sc) * (err / sc);
        }
        const double errNorm = std::sqrt(errSq / static_cast<double>(N));

        if (errNorm <= 1.0 || !(std::isfinite(errNorm))) {
            if (!std::isfinite(errNorm)) {
                // Non-finite stage values: treat as a hard rejection.
                h *= 0.25;
                if (h < s.minStep) throw StepFailure("integrate_dopri5: step size underflow");
                rejectedLast = true;
                continue;
            }
            DenseOutput<N> dense;
            dense.t0 = t;
            dense.h = h;
            for (std::size_t i = 0; i < N; ++i) {
                const double ydiff = yNew[i] - y[i];
                const double bspl = h * k1[i] - ydiff;
                dense.cont[0][i] = y[i];
                dense.cont[1][i] = ydiff;
                dense.cont[2][i] = bspl;
                dense.cont[3][i] = ydiff - h * k7[i] - bspl;
                dense.cont[4][i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] +
                                        d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
            }
            t += h;
            y = yNew;
            k1 = k7;  // FSAL
            if (!observe(dense, y)) return y;

            double fac = 0.9 * std::pow(std::max(errNorm, 1e-10), -0.2);
            fac = std::min(rejectedLast ? 1.0 : 5.0, std::max(0.2, fac));
            h = std::min(h * fac, s.maxStep);
            rejectedLast = false;
        } else {
            const double fac = std::max(0.2, 0.9 * std::pow(errNorm, -0.2));
            h *= fac;
            rejectedLast = true;
            if (h < s.minStep) throw StepFailure("integrate_dopri5: step size underflow");
        }
    }
    return y;
}

// Locate the first time in (tGood, tBad] where `margin` crosses `threshold`
// from below, to within timeTol. Assumes margin(tGood) < threshold and
// margin(tBad) >= threshold.
template <typename MarginFn>
double locate_crossing(MarginFn&& margin, double tGood, double tBad,
                       double threshold, double timeTol = 1e-6) {
    while (tBad - tGood > timeTol) {
        const double mid = 0.5 * (tGood + tBad);
        if (margin(mid) >= threshold) {
            tBad = mid;
        } else {
            tGood = mid;
        }
    }
    return tBad;
}

}  // namespace funnelsim
