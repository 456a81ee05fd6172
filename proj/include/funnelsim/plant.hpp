#pragma once

// Yaw-channel dynamics in transformed coordinates
//   y0 = altitude, y1 = deflection angle, y2 = sideslip, y3 = yaw rate,
// with lumped constants c1..c5 derived from the vehicle data. Disturbances
// are per-channel sinusoids with a known bound.

#include <array>
#include <cmath>
#include <stdexcept>

namespace funnelsim {

struct VehicleParams {
    double m = 0.0;      // mass (kg)
    double V = 0.0;      // speed (m/s)
    double Jy = 0.0;     // yaw inertia (kg m^2)
    double qbar = 0.0;   // dynamic pressure (Pa)
    double S = 0.0;      // reference area (m^2)
    double l = 0.0;      // aerodynamic chord (m)
    double alpha = 0.0;  // angle of attack (rad)
    double czAlpha = 0.0;
    double czBeta = 0.0;
    double cz0 = 0.0;
    double cmAlpha = 0.0;
    double cmBeta = 0.0;
    double cmDeltaY = 0.0;
    double cm0 = 0.0;

    void validate() const {
        if (!(m > 0.0 && V > 0.0 && Jy > 0.0 && qbar > 0.0 && S > 0.0 && l > 0.0)) {
            throw std::invalid_argument("VehicleParams: m, V, Jy, qbar, S, l must be > 0");
        }
    }
};

struct DerivedConstants {
    double c1 = 0.0;  // 1/s
    double c2 = 0.0;  // 1/s
    double c3 = 0.0;  // 1/s^2
    double c4 = 0.0;  // 1/s^2
    double c5 = 0.0;  // 1/s^2
};

// Lump the aerodynamic data into c1..c5. By default c4 and c5 use qbar*S
// without the chord; `includeChordInMoment` switches them to qbar*S*l so
// that all moment terms share the chord factor.
inline DerivedConstants derive_constants(const VehicleParams& p,
                                         bool includeChordInMoment = false) {
    p.validate();
    DerivedConstants c;
    const double qS = p.qbar * p.S;
    c.c1 = qS * (p.czAlpha * p.alpha + p.cz0) / (p.m * p.V);
    c.c2 = qS * p.czBeta / (p.m * p.V);
    c.c3 = qS * p.l * (p.cmAlpha * p.alpha + p.cm0) / p.Jy;
    const double momentScale = includeChordInMoment ? qS * p.l : qS;
    c.c4 = momentScale * p.cmBeta / p.Jy;
    c.c5 = momentScale * p.cmDeltaY / p.Jy;
    if (c.c5 == 0.0) {
        throw std::invalid_argument("derive_constants: c5 = 0 (no control effectiveness)");
    }
    return c;
}

struct PlantState {
    double y0 = 0.0;  // altitude (m)
    double y1 = 0.0;  // deflection angle (rad)
    double y2 = 0.0;  // sideslip (rad)
    double y3 = 0.0;  // yaw rate (rad/s)

    double psi() const { return y2 + y1; }  // yaw angle
};

// Per-channel disturbance amplitude[i] * scale * sin(omega * t). The data
// sheet lists amplitudes in degrees, hence the literal 1/57.3 scale.
struct DisturbanceSpec {
    std::array<double, 4> amplitudes{5.0, 0.2, 2.0, 10.0};
    double omega = M_PI / 4.0;  // rad/s
    double scale = 1.0 / 57.3;

    std::array<double, 4> eval(double t) const {
        const double s = scale * std::sin(omega * t);
        return {amplitudes[0] * s, amplitudes[1] * s, amplitudes[2] * s,
                amplitudes[3] * s};
    }
    // Sup-norm bounds D_i.
    std::array<double, 4> bounds() const {
        return {std::abs(amplitudes[0] * scale), std::abs(amplitudes[1] * scale),
                std::abs(amplitudes[2] * scale), std::abs(amplitudes[3] * scale)};
    }
};

// Transformed-coordinate right-hand side.
inline std::array<double, 4> plant_rhs(const PlantState& s, double u,
                                       const std::array<double, 4>& d,
                                       const VehicleParams& p,
                                       const DerivedConstants& c) {
    return {
        -p.V * std::sin(s.y1) + d[0],
        -c.c1 - c.c2 * s.y2 + d[1],
        s.y3 + c.c1 + c.c2 * s.y2 + d[2] - d[1],
        c.c3 + c.c4 * s.y2 + c.c5 * u + d[3],
    };
}

}  // namespace funnelsim
