#pragma once

// Planning path and reference altitude profile.
//
// The path is a planar Dubins chain: straight legs joined by circular
// fillets that are tangent to both neighbouring legs. Waypoints come in
// pairs: (w0,w1) straight, (w1,w2) turn, (w2,w3) straight, ... The path is
// traversed at constant speed V, which turns arc length into time.
//
// The raw altitude profile z(t) along such a path is only C^1 (curvature
// steps at the fillet junctions), while the controller consumes derivatives
// up to order 4. We therefore expose a mollified profile: z convolved with a
// compactly supported C^4 kernel of half-width `smoothingWidth` seconds.
// Derivatives are taken on the kernel, and the quadrature is split at the
// raw profile's junction times, so every returned derivative is exact up to
// roundoff. Straight stretches are reproduced exactly (the kernel has unit
// mass and zero first moment).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace funnelsim {

struct Waypoint {
    double x = 0.0;  // downrange position (m)
    double z = 0.0;  // lateral altitude (m)
    std::string label;
};

struct PathSegment {
    enum class Kind { Straight, Arc };
    Kind kind = Kind::Straight;
    double length = 0.0;     // arc length (m)
    double startTime = 0.0;  // s
    double endTime = 0.0;    // s

    // Straight: endpoints.
    double x0 = 0.0, z0 = 0.0, x1 = 0.0, z1 = 0.0;
    // Arc: center, radius, entry angle, signed sweep.
    double cx = 0.0, cz = 0.0, radius = 0.0, theta0 = 0.0, sweep = 0.0;

    double zAt(double u) const {
        if (kind == Kind::Straight) return z0 + (z1 - z0) * (u / length);
        const double th = theta0 + sweep * (u / length);
        return cz + radius * std::sin(th);
    }
    double xAt(double u) const {
        if (kind == Kind::Straight) return x0 + (x1 - x0) * (u / length);
        const double th = theta0 + sweep * (u / length);
        return cx + radius * std::cos(th);
    }
    // dz/du along the segment.
    double zSlopeAt(double u) const {
        if (kind == Kind::Straight) return (z1 - z0) / length;
        const double th = theta0 + sweep * (u / length);
        return std::cos(th) * (sweep > 0 ? 1.0 : -1.0) * std::abs(sweep) * radius / length;
    }
    double headingAt(double u) const {
        if (kind == Kind::Straight) return std::atan2(z1 - z0, x1 - x0);
        const double th = theta0 + sweep * (u / length);
        // Tangent is the radius vector rotated +-90 degrees.
        const double s = (sweep >= 0.0) ? 1.0 : -1.0;
        return std::atan2(s * std::cos(th), -s * std::sin(th));
    }
};

struct RefSample {
    double z = 0.0;
    double dz = 0.0;
    double d2z = 0.0;
    double d3z = 0.0;
    double d4z = 0.0;
};

namespace detail {

// 16-point Gauss-Legendre rule on [-1,1], computed once by Newton iteration
// on the Legendre recurrence.
struct GaussLegendre16 {
    std::array<double, 16> node{};
    std::array<double, 16> weight{};

    GaussLegendre16() {
        constexpr int n = 16;
        for (int i = 0; i < n / 2; ++i) {
            double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
            double dp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = x;
                for (int k = 2; k <= n; ++k) {
                    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n * (x * p1 - p0) / (x * x - 1.0);
                const double dx = p1 / dp;
                x -= dx;
                if (std::abs(dx) < 1e-15) break;
            }
            const double w = 2.0 / ((1.0 - x * x) * dp * dp);
            node[i] = -x;
            node[n - 1 - i] = x;
            weight[i] = w;
            weight[n - 1 - i] = w;
        }
    }
};

inline const GaussLegendre16& gauss16() {
    static const GaussLegendre16 rule;
    return rule;
}

// Mollifier K(x) = (693/512) (1 - x^2)^5 on [-1,1] and its first four
// derivatives, stored as dense polynomial coefficients (index = power).
struct MollifierKernel {
    std::array<std::array<double, 11>, 5> coeff{};

    MollifierKernel() {
        const double c = 693.0 / 512.0;
        coeff[0] = {c, 0, -5 * c, 0, 10 * c, 0, -10 * c, 0, 5 * c, 0, -c};
        for (int k = 1; k <= 4; ++k) {
            for (int p = 0; p < 10; ++p) {
                coeff[k][p] = coeff[k - 1][p + 1] * (p + 1);
            }
            coeff[k][10] = 0.0;
        }
    }

    double eval(int k, double x) const {
        const auto& c = coeff[k];
        double v = c[10];
        for (int p = 9; p >= 0; --p) v = v * x + c[p];
        return v;
    }
};

inline const MollifierKernel& mollifier() {
    static const MollifierKernel kern;
    return kern;
}

}  // namespace detail

class ReferencePath {
  public:
    std::vector<PathSegment> segments;
    double V = 0.0;               // speed (m/s)
    double smoothingWidth = 0.5;  // kernel half-width (s)

    double duration() const {
        return segments.empty() ? 0.0 : segments.back().endTime;
    }

    double totalLength() const {
        double s = 0.0;
        for (const PathSegment& seg : segments) s += seg.length;
        return s;
    }

    // Raw geometric altitude as a function of time. Extended linearly before
    // t = 0 and held constant after the final waypoint.
    double rawZ(double t) const {
        const PathSegment& first = segments.front();
        if (t <= 0.0) return first.zAt(0.0) + t * V * first.zSlopeAt(0.0);
        const double end = duration();
        if (t >= end) return segments.back().zAt(segments.back().length);
        std::size_t lo = 0, hi = segments.size() - 1;
        while (lo < hi) {
            const std::size_t mid = (lo + hi) / 2;
            if (t < segments[mid].endTime) hi = mid; else lo = mid + 1;
        }
        const PathSegment& seg = segments[lo];
        return seg.zAt((t - seg.startTime) * V);
    }

    // Mollified altitude and derivatives 1..4 at time t >= 0.
    RefSample sample(double t) const {
        if (t < 0.0) throw std::domain_error("ReferencePath::sample: t must be >= 0");
        const double w = smoothingWidth;
        const auto& gl = detail::gauss16();
        const auto& kern = detail::mollifier();

        // Split [-1,1] at the raw profile's junction times inside the
        // kernel support, so every sub-integral has a smooth integrand.
        std::array<double, 16> cuts{};
        std::size_t ncuts = 0;
        cuts[ncuts++] = -1.0;
        for (double tb : breakTimes_) {
            const double xi = (tb - t) / w;
            if (xi > -1.0 + 1e-14 && xi < 1.0 - 1e-14) cuts[ncuts++] = xi;
            if (ncuts == cuts.size() - 1) break;
        }
        cuts[ncuts++] = 1.0;
        std::sort(cuts.begin(), cuts.begin() + ncuts);

        std::array<double, 5> acc{};
        for (std::size_t p = 0; p + 1 < ncuts; ++p) {
            const double a = cuts[p], b = cuts[p + 1];
            if (!(b - a > 1e-15)) continue;
            const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
            for (int i = 0; i < 16; ++i) {
                const double xi = mid + half * gl.node[i];
                const double zv = rawZ(t + w * xi);
                const double wz = gl.weight[i] * half * zv;
                for (int k = 0; k < 5; ++k) acc[k] += wz * kern.eval(k, xi);
            }
        }
        RefSample out;
        out.z = acc[0];
        out.dz = -acc[1] / w;
        out.d2z = acc[2] / (w * w);
        out.d3z = -acc[3] / (w * w * w);
        out.d4z = acc[4] / (w * w * w * w);
        return out;
    }

    // One maneuver window per arc: starts `lead` seconds before arc entry,
    // lasts min(window, arc duration).
    std::vector<std::pair<double, double>> triggerWindows(double window,
                                                          double lead = 0.0) const {
        if (!(window > 0.0)) {
            throw std::invalid_argument("triggerWindows: window must be > 0");
        }
        std::vector<std::pair<double, double>> out;
        for (const PathSegment& seg : segments) {
            if (seg.kind != PathSegment::Kind::Arc) continue;
            const double tj = std::max(0.0, seg.startTime - lead);
            const double span = std::min(window, seg.endTime - seg.startTime);
            out.emplace_back(tj, tj + span);
        }
        for (std::size_t i = 0; i + 1 < out.size(); ++i) {
            if (!(out[i].second < out[i + 1].first)) {
                throw std::invalid_argument("triggerWindows: windows overlap after clipping");
            }
        }
        return out;
    }

    void finalizeTiming() {
        double t = 0.0;
        for (PathSegment& seg : segments) {
            seg.startTime = t;
            t += seg.length / V;
            seg.endTime = t;
        }
        breakTimes_.clear();
        for (std::size_t i = 0; i + 1 < segments.size(); ++i) {
            breakTimes_.push_back(segments[i].endTime);
        }
        breakTimes_.push_back(duration());
    }

  private:
    std::vector<double> breakTimes_;
};

namespace detail {

struct Vec2 {
    double x = 0.0, z = 0.0;
};
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.z - b.z}; }
inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.z + b.z}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.z}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.z * b.z; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.z - a.z * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.z); }
inline Vec2 unit(Vec2 a) {
    const double n = norm(a);
    return {a.x / n, a.z / n};
}
// +90 degree rotation.
inline Vec2 perp(Vec2 a) { return {-a.z, a.x}; }

}  // namespace detail

// Fit the Dubins chain through the waypoints. `radii` may be empty (every
// fillet auto-fitted so that its tangent length is the distance from the
// corner to the nearer of the two turn waypoints; all waypoints then lie on
// the path) or hold one radius per turn.
inline ReferencePath build_dubins(const std::vector<Waypoint>& waypoints,
                                  const std::vector<double>& radii, double V,
                                  double smoothingWidth = 0.5) {
    using detail::Vec2;
    if (waypoints.size() < 2) {
        throw std::invalid_argument("build_dubins: at least two waypoints required");
    }
    if (!(V > 0.0)) throw std::invalid_argument("build_dubins: V must be > 0");
    if (!(smoothingWidth > 0.0)) {
        throw std::invalid_argument("build_dubins: smoothingWidth must be > 0");
    }
    for (std::size_t i = 0; i + 1 < waypoints.size(); ++i) {
        if (!(waypoints[i + 1].x > waypoints[i].x)) {
            throw std::invalid_argument("build_dubins: waypoint x-coordinates must be strictly increasing");
        }
    }

    ReferencePath path;
    path.V = V;
    path.smoothingWidth = smoothingWidth;

    auto addStraight = [&](Vec2 a, Vec2 b) {
        const double len = detail::norm(b - a);
        if (len < 1e-9) return;
        PathSegment seg;
        seg.kind = PathSegment::Kind::Straight;
        seg.length = len;
        seg.x0 = a.x;
        seg.z0 = a.z;
        seg.x1 = b.x;
        seg.z1 = b.z;
        path.segments.push_back(seg);
    };

    if (waypoints.size() == 2) {
        addStraight({waypoints[0].x, waypoints[0].z}, {waypoints[1].x, waypoints[1].z});
        path.finalizeTiming();
        return path;
    }

    if (waypoints.size() % 2 != 0) {
        throw std::invalid_argument(
            "build_dubins: waypoints must come in straight/turn pairs (even count)");
    }
    const std::size_t nTurns = waypoints.size() / 2 - 1;
    if (!radii.empty() && radii.size() != nTurns) {
        throw std::invalid_argument("build_dubins: expected " + std::to_string(nTurns) +
                                    " radii, got " + std::to_string(radii.size()));
    }

    Vec2 cursor{waypoints[0].x, waypoints[0].z};
    for (std::size_t j = 0; j < nTurns; ++j) {
        const Vec2 a0{waypoints[2 * j].x, waypoints[2 * j].z};
        const Vec2 a1{waypoints[2 * j + 1].x, waypoints[2 * j + 1].z};
        const Vec2 b0{waypoints[2 * j + 2].x, waypoints[2 * j + 2].z};
        const Vec2 b1{waypoints[2 * j + 3].x, waypoints[2 * j + 3].z};
        const Vec2 u1 = detail::unit(a1 - a0);
        const Vec2 u2 = detail::unit(b1 - b0);

        const double crs = detail::cross(u1, u2);
        if (std::abs(crs) < 1e-12) {
            throw std::invalid_argument("build_dubins: turn " + std::to_string(j) +
                                        " has no heading change");
        }
        // Corner: intersection of the two leg lines.
        const double s = detail::cross(b0 - a1, u2) / crs;
        const Vec2 corner = a1 + s * u1;

        const double turnAngle = std::atan2(std::abs(crs), detail::dot(u1, u2));
        const double lIn = detail::norm(corner - a1);
        const double lOut = detail::norm(b0 - corner);
        if (detail::dot(corner - a1, u1) < 0.0 || detail::dot(b0 - corner, u2) < 0.0) {
            throw std::invalid_argument("build_dubins: turn " + std::to_string(j) +
                                        " corner does not lie between its legs");
        }

        double radius, tangentLen;
        if (radii.empty()) {
            tangentLen = std::min(lIn, lOut);
            radius = tangentLen / std::tan(0.5 * turnAngle);
        } else {
            radius = radii[j];
            if (!(radius > 0.0)) {
                throw std::invalid_argument("build_dubins: radius must be > 0");
            }
            tangentLen = radius * std::tan(0.5 * turnAngle);
        }

        const Vec2 t1 = corner - tangentLen * u1;  // arc entry
        const Vec2 t2 = corner + tangentLen * u2;  // arc exit
        if (detail::dot(t1 - cursor, u1) <= 1e-9 && detail::norm(t1 - cursor) > 1e-9) {
            throw std::invalid_argument("build_dubins: radius too large to fit at turn " +
                                        std::to_string(j));
        }

        addStraight(cursor, t1);

        const double side = (crs > 0.0) ? 1.0 : -1.0;
        const Vec2 center = t1 + (side * radius) * detail::perp(u1);
        PathSegment arc;
        arc.kind = PathSegment::Kind::Arc;
        arc.radius = radius;
        arc.cx = center.x;
        arc.cz = center.z;
        arc.theta0 = std::atan2(t1.z - center.z, t1.x - center.x);
        arc.sweep = side * turnAngle;
        arc.length = radius * turnAngle;
        path.segments.push_back(arc);

        cursor = t2;
    }
    addStraight(cursor, {waypoints.back().x, waypoints.back().z});

    path.finalizeTiming();
    return path;
}

}  // namespace funnelsim
