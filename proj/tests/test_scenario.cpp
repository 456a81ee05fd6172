#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>
#include <string>

#include "funnelsim/scenario.hpp"
#include "support/paths.hpp"

using namespace funnelsim;

namespace {

// Writes a scenario file derived from a minimal valid template, with one
// substring replaced, and returns its path.
std::string write_variant(const std::string& tag, const std::string& from,
                          const std::string& to) {
    static const std::string base = R"([vehicle]
mass = 10.0
area = 1.0
chord = 1.0
inertia_yaw = 5.0
alpha_deg = 1.0
cz_alpha = 0.0
cz_beta = 0.1
cz_0 = -0.01
cm_alpha = 0.0
cm_beta = 1.0
cm_delta = 2.0
cm_0 = 0.0
qbar = 100.0

[disturbance]
amplitudes = 1 1 1 1

[reference]
waypoints = 0 5, 1000 5
speed = 100.0
smoothing_width = 0.5

[funnel]
channel0 = 10 1 0.5
multipliers = 2 3 4

[initial]
altitude = 5.0
psi_v_deg = 0.0
psi_deg = 0.0
omega_y = 0.0

[sim]
horizon = 5.0

[output]
dir = out/test
)";
    std::string text = base;
    if (!from.empty()) {
        const auto pos = text.find(from);
        REQUIRE(pos != std::string::npos);
        text.replace(pos, from.size(), to);
    }
    const std::string path = "/tmp/funnelsim_test_" + tag + ".scenario";
    std::ofstream out(path);
    out << text;
    return path;
}

}  // namespace

TEST_CASE("bundled flight scenario loads with the published values", "[scenario]") {
    const Scenario sc = load_scenario(scenario_path("paper.scenario"));
    CHECK(sc.vehicle.V == Catch::Approx(1475.35).epsilon(1e-12));
    CHECK(sc.vehicle.m == 1200.0);
    CHECK(sc.vehicle.qbar == Catch::Approx(3711.93329));
    CHECK(sc.vehicle.alpha == Catch::Approx(5.0 / 57.3).epsilon(1e-14));
    CHECK(sc.initialState.y0 == 400.0);
    CHECK(sc.initialState.y1 == Catch::Approx(2.0 / 57.3).epsilon(1e-14));
    CHECK(sc.initialState.y2 == Catch::Approx(2.0 / 57.3).epsilon(1e-12));
    CHECK(sc.initialState.y3 == 0.035);
    CHECK(sc.saturationLimit == 40.0);
    CHECK(sc.horizon == Catch::Approx(sc.path.duration() + 5.0));
    CHECK(sc.horizon == Catch::Approx(38.0).margin(0.3));
    REQUIRE(sc.schedules[0].triggerCount() == 3);
    CHECK(sc.schedules[0].width(0.0).rho == Catch::Approx(200.0));
    CHECK(sc.schedules[1].width(0.0).rho == Catch::Approx(360.0));
    CHECK(sc.schedules[3].width(0.0).rho == Catch::Approx(1200.0));
    CHECK(sc.disturbance.amplitudes[3] == 10.0);
}

TEST_CASE("the demo scenario loads explicit per-channel funnels", "[scenario]") {
    const Scenario sc = load_scenario(scenario_path("gentle.scenario"));
    CHECK(sc.vehicle.V == 50.0);
    CHECK(sc.schedules[0].width(0.0).rho == Catch::Approx(40.0));
    CHECK(sc.schedules[1].width(0.0).rho == Catch::Approx(18.0));
    CHECK(sc.schedules[3].width(0.0).rho == Catch::Approx(900.0));
    CHECK(sc.saturationLimit == 1.0);
}

TEST_CASE("a valid minimal scenario loads", "[scenario]") {
    const Scenario sc = load_scenario(write_variant("ok", "", ""));
    CHECK(sc.vehicle.V == 100.0);
    CHECK(sc.horizon == 5.0);
    CHECK(sc.schedules[0].triggerCount() == 0);
    CHECK(sc.schedules[2].width(1.0).rho ==
          Catch::Approx(3.0 * sc.schedules[0].width(1.0).rho).epsilon(1e-12));
}

TEST_CASE("an empty file is a parse error", "[scenario]") {
    const std::string path = "/tmp/funnelsim_test_empty.scenario";
    std::ofstream(path).close();
    try {
        load_scenario(path);
        FAIL("expected a parse error");
    } catch (const ScenarioError& e) {
        CHECK(std::string(e.what()).find("empty") != std::string::npos);
    }
}

TEST_CASE("a vanishing steady-state width names the violated invariant", "[scenario]") {
    const std::string path =
        write_variant("rhoinf", "channel0 = 10 1 0.5", "channel0 = 10 0 0.5");
    try {
        load_scenario(path);
        FAIL("expected a validation error");
    } catch (const ScenarioError& e) {
        CHECK(std::string(e.what()).find("rhoInf > 0") != std::string::npos);
    }
}

TEST_CASE("unknown keys and sections are rejected", "[scenario]") {
    CHECK_THROWS_AS(load_scenario(write_variant("badkey", "mass = 10.0",
                                                "mass = 10.0\nwingspan = 3")),
                    ScenarioError);
    try {
        load_scenario(write_variant("badkey2", "mass = 10.0", "mass = 10.0\nwingspan = 3"));
    } catch (const ScenarioError& e) {
        CHECK(std::string(e.what()).find("wingspan") != std::string::npos);
    }
    CHECK_THROWS_AS(load_scenario(write_variant("badsec", "[output]", "[outputs]")),
                    ScenarioError);
}

TEST_CASE("missing sections and malformed values are diagnosed", "[scenario]") {
    CHECK_THROWS_AS(load_scenario(write_variant("nosec", "[initial]\naltitude = 5.0\n",
                                                "")),
                    ScenarioError);
    try {
        load_scenario(write_variant("badnum", "mass = 10.0", "mass = heavy"));
        FAIL("expected a parse error");
    } catch (const ScenarioError& e) {
        // Diagnostics carry file and line.
        CHECK(std::string(e.what()).find(".scenario:2") != std::string::npos);
    }
    CHECK_THROWS_AS(load_scenario(write_variant("dup", "area = 1.0", "area = 1.0\narea = 2.0")),
                    ScenarioError);
}

TEST_CASE("funnel channel declarations are mutually exclusive", "[scenario]") {
    CHECK_THROWS_AS(
        load_scenario(write_variant("both", "multipliers = 2 3 4",
                                    "multipliers = 2 3 4\nchannel1 = 10 1 0.5")),
        ScenarioError);
    CHECK_THROWS_AS(load_scenario(write_variant("neither", "multipliers = 2 3 4", "")),
                    ScenarioError);
}

TEST_CASE("phase count must match the maneuver windows", "[scenario]") {
    // The straight-line template has no turns, so two phases cannot fit.
    CHECK_THROWS_AS(load_scenario(write_variant("phases", "channel0 = 10 1 0.5",
                                                "channel0 = 10 1 0.5, 5 1 0.5")),
                    ScenarioError);
}

TEST_CASE("nonexistent files are reported", "[scenario]") {
    CHECK_THROWS_AS(load_scenario("/tmp/does_not_exist_12345.scenario"), ScenarioError);
}
