#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "funnelsim/reference.hpp"

using namespace funnelsim;

namespace {

std::vector<Waypoint> flight_waypoints() {
    return {{0, 450, "A"},     {12000, 50, "B"},  {15000, 0, "C"},
            {24000, 0, "D"},   {27000, 50, "E"},  {30000, 150, "F"},
            {35000, 260, "G"}, {48530, -200, "H"}};
}

constexpr double kSpeed = 1475.35;

ReferencePath flight_path(double w = 0.5) {
    return build_dubins(flight_waypoints(), {}, kSpeed, w);
}

}  // namespace

TEST_CASE("two waypoints give a single straight", "[reference]") {
    const ReferencePath p = build_dubins({{0, 1, ""}, {300, 5, ""}}, {}, 10.0, 0.2);
    REQUIRE(p.segments.size() == 1);
    CHECK(p.segments[0].kind == PathSegment::Kind::Straight);
    CHECK(p.duration() == Catch::Approx(std::hypot(300.0, 4.0) / 10.0).epsilon(1e-14));
}

TEST_CASE("flight path has the expected segment structure", "[reference]") {
    const ReferencePath p = flight_path();
    REQUIRE(p.segments.size() == 7);
    int straights = 0, arcs = 0;
    double total = 0.0;
    for (const PathSegment& s : p.segments) {
        (s.kind == PathSegment::Kind::Arc ? arcs : straights)++;
        total += s.length;
    }
    CHECK(straights == 4);
    CHECK(arcs == 3);
    CHECK(total == Catch::Approx(p.totalLength()).epsilon(1e-14));

    // First leg: A to (just past) B along the same line.
    const double chordAB = std::hypot(12000.0, 400.0);
    CHECK(p.segments[0].length == Catch::Approx(chordAB).margin(2.0));

    // Arc timing t = theta * R / V.
    for (const PathSegment& s : p.segments) {
        if (s.kind != PathSegment::Kind::Arc) continue;
        const double tArc = std::abs(s.sweep) * s.radius / kSpeed;
        CHECK(s.endTime - s.startTime == Catch::Approx(tArc).epsilon(1e-12));
    }
}

TEST_CASE("tangent continuity at every junction", "[reference]") {
    const ReferencePath p = flight_path();
    for (std::size_t i = 0; i + 1 < p.segments.size(); ++i) {
        const double hOut = p.segments[i].headingAt(p.segments[i].length);
        const double hIn = p.segments[i + 1].headingAt(0.0);
        CHECK(std::abs(hOut - hIn) < 1e-8);
    }
}

TEST_CASE("segment times are consistent with arc length", "[reference]") {
    const ReferencePath p = flight_path();
    double t = 0.0;
    for (const PathSegment& s : p.segments) {
        CHECK(s.startTime == Catch::Approx(t).margin(1e-12));
        CHECK(s.endTime - s.startTime == Catch::Approx(s.length / kSpeed).epsilon(1e-12));
        t = s.endTime;
    }
}

TEST_CASE("smoothed profile starts on the first waypoint", "[reference]") {
    const ReferencePath p = flight_path();
    const RefSample s0 = p.sample(0.0);
    CHECK(s0.z == Catch::Approx(450.0).margin(1e-9));
    // Constant slope of the first leg times the speed.
    const double dz0 = -400.0 / std::hypot(12000.0, 400.0) * kSpeed;
    CHECK(s0.dz == Catch::Approx(dz0).epsilon(1e-12));
    CHECK(std::abs(s0.d2z) < 1e-9);
}

TEST_CASE("level stretch has vanishing higher derivatives", "[reference]") {
    const ReferencePath p = flight_path();
    const RefSample s = p.sample(13.0);  // interior of the level C-D leg
    CHECK(std::abs(s.z) < 1e-3);
    CHECK(std::abs(s.dz) < 1e-3);
    CHECK(std::abs(s.d2z) < 1e-3);
    CHECK(std::abs(s.d3z) < 1e-3);
}

TEST_CASE("smoothed profile stays near the raw profile", "[reference]") {
    const ReferencePath p = flight_path(0.5);
    double maxDev = 0.0;
    for (int i = 0; i <= 4000; ++i) {
        const double t = p.duration() * i / 4000.0;
        maxDev = std::max(maxDev, std::abs(p.sample(t).z - p.rawZ(t)));
    }
    CHECK(maxDev < 3.5);  // configured tolerance of the bundled flight setup

    // A gentle profile meets a much tighter bound.
    const ReferencePath g = build_dubins(
        {{0, 3, ""}, {400, 1, ""}, {520, 0.5, ""}, {850, 0.5, ""},
         {1000, 1, ""}, {1100, 1.5, ""}, {1250, 2, ""}, {1600, 2, ""}},
        {}, 50.0, 0.3);
    double gDev = 0.0;
    for (int i = 0; i <= 4000; ++i) {
        const double t = g.duration() * i / 4000.0;
        gDev = std::max(gDev, std::abs(g.sample(t).z - g.rawZ(t)));
    }
    CHECK(gDev < 0.05);
}

TEST_CASE("sampled derivatives agree with finite differences", "[reference]") {
    const ReferencePath p = flight_path();
    // Points in the smoothing ramp of the first arc and on smooth stretches.
    for (double t : {2.0, 7.9, 8.3, 9.0, 20.0, 24.5}) {
        const double h = 1e-3;
        auto z = [&](double tt) { return p.sample(tt).z; };
        const RefSample s = p.sample(t);
        const double fd1 = (z(t + h) - z(t - h)) / (2 * h);
        const double fd2 = (z(t + h) - 2 * z(t) + z(t - h)) / (h * h);
        const double fd3 =
            (z(t + 2 * h) - 2 * z(t + h) + 2 * z(t - h) - z(t - 2 * h)) / (2 * h * h * h);
        CHECK(s.dz == Catch::Approx(fd1).epsilon(1e-4).margin(1e-4));
        CHECK(s.d2z == Catch::Approx(fd2).epsilon(1e-3).margin(2e-3));
        CHECK(s.d3z == Catch::Approx(fd3).epsilon(1e-2).margin(5e-2));
    }
}

TEST_CASE("profile holds the last altitude past the end", "[reference]") {
    const ReferencePath p = flight_path();
    const double tEnd = p.duration();
    const RefSample far = p.sample(tEnd + 2.0);
    CHECK(far.z == Catch::Approx(-200.0).margin(1e-6));
    CHECK(std::abs(far.dz) < 1e-9);
    CHECK(std::abs(far.d2z) < 1e-9);
}

TEST_CASE("negative sample times are rejected", "[reference]") {
    const ReferencePath p = flight_path();
    CHECK_THROWS_AS(p.sample(-0.1), std::domain_error);
}

TEST_CASE("maneuver windows follow the arcs", "[reference]") {
    const ReferencePath p = flight_path();
    const auto windows = p.triggerWindows(10.0, 0.5);
    REQUIRE(windows.size() == 3);
    std::size_t k = 0;
    for (const PathSegment& s : p.segments) {
        if (s.kind != PathSegment::Kind::Arc) continue;
        CHECK(windows[k].first == Catch::Approx(s.startTime - 0.5).margin(1e-12));
        CHECK(windows[k].second ==
              Catch::Approx(s.startTime - 0.5 + std::min(10.0, s.endTime - s.startTime))
                  .margin(1e-12));
        ++k;
    }
    for (std::size_t i = 0; i + 1 < windows.size(); ++i) {
        CHECK(windows[i].second < windows[i + 1].first);
    }

    const ReferencePath straight = build_dubins({{0, 0, ""}, {100, 0, ""}}, {}, 10.0, 0.2);
    CHECK(straight.triggerWindows(1.0).empty());
}

TEST_CASE("construction rejects bad geometry", "[reference]") {
    CHECK_THROWS_AS(build_dubins({{0, 0, ""}}, {}, 10.0, 0.2), std::invalid_argument);
    CHECK_THROWS_AS(build_dubins({{0, 0, ""}, {-5, 1, ""}}, {}, 10.0, 0.2),
                    std::invalid_argument);
    CHECK_THROWS_AS(build_dubins(flight_waypoints(), {}, -1.0, 0.2), std::invalid_argument);
    // An odd waypoint count cannot be paired into legs and turns.
    CHECK_THROWS_AS(build_dubins({{0, 0, ""}, {1, 0, ""}, {2, 0, ""}, {3, 0, ""},
                                  {4, 0, ""}, {5, 0, ""}, {6, 0, ""}, {7, 0, ""},
                                  {8, 0, ""}, {9, 0, ""}, {10, 0, ""}},
                                 {}, 10.0, 0.2),
                    std::invalid_argument);
    // First fillet radius too large to fit on the first leg.
    CHECK_THROWS_AS(build_dubins(flight_waypoints(), {9e5, 9e4, 2.5e4}, kSpeed, 0.5),
                    std::invalid_argument);
}
