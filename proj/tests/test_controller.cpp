#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "funnelsim/controller.hpp"
#include "funnelsim/scenario.hpp"
#include "support/paths.hpp"
#include "support/synthetic.hpp"

using namespace funnelsim;

namespace {

struct Fixture {
    std::array<FunnelSchedule, 4> sched;
    SchedulePtrs ptrs() {
        return {&sched[0], &sched[1], &sched[2], &sched[3]};
    }
    Fixture() {
        for (int i = 0; i < 4; ++i) sched[i] = flat_schedule(10.0 * (i + 1), i);
    }
};

}  // namespace

TEST_CASE("zero state on a zero reference gives a zero chain", "[controller]") {
    Fixture f;
    const RefSample ref{};
    const ControllerOutput out = compute_errors({0, 0, 0, 0}, ref, f.ptrs(), 0.0);
    for (int i = 0; i < 4; ++i) {
        CHECK(out.e[i] == 0.0);
        CHECK(out.w[i] == 0.0);
        CHECK(out.k[i] == 1.0);
    }
}

TEST_CASE("chain recursion matches hand evaluation", "[controller]") {
    Fixture f;
    const RefSample ref{2.0, 1.0, 0.5, -0.25, 0.0};
    const PlantState s{3.0, -1.0, 0.25, 0.5};
    const ControllerOutput out = compute_errors(s, ref, f.ptrs(), 0.0);

    double chain = 0.0;
    const double y[4] = {3.0, -1.0, 0.25, 0.5};
    const double zr[4] = {2.0, 1.0, 0.5, -0.25};
    for (int i = 0; i < 4; ++i) {
        const double e = y[i] - zr[i] + chain;
        const double w = e / (10.0 * (i + 1));
        const double k = 1.0 / (1.0 - w * w);
        CHECK(out.e[i] == Catch::Approx(e).epsilon(1e-14));
        CHECK(out.w[i] == Catch::Approx(w).epsilon(1e-14));
        CHECK(out.k[i] == Catch::Approx(k).epsilon(1e-14));
        chain = k * w;
    }
    CHECK(out.uRaw == Catch::Approx(-out.k[3] * out.e[3]).epsilon(1e-14));
}

TEST_CASE("gain map k = 1/(1 - w^2)", "[controller]") {
    Fixture f;
    // w0 = 0 -> k0 = 1.
    ControllerOutput a = compute_errors({0, 0, 0, 0}, RefSample{}, f.ptrs(), 0.0);
    CHECK(a.k[0] == 1.0);
    // w0^2 = 0.5 -> k0 = 2 (rho0 = 10, so e0 = 10/sqrt(2)).
    ControllerOutput b =
        compute_errors({10.0 / std::sqrt(2.0), 0, 0, 0}, RefSample{}, f.ptrs(), 0.0);
    CHECK(b.k[0] == Catch::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("initial margins of the bundled flight scenario", "[controller]") {
    const Scenario sc = load_scenario(scenario_path("paper.scenario"));
    const RefSample r0 = sc.path.sample(0.0);
    const ControllerOutput out =
        compute_errors(sc.initialState, r0, sc.schedulePtrs(), 0.0);
    CHECK(out.e[0] == Catch::Approx(-50.0).margin(1e-9));
    CHECK(out.w[0] == Catch::Approx(-0.25).margin(1e-11));
    // e1 carries the reference rate directly.
    const double k0w0 = out.k[0] * out.w[0];
    CHECK(out.e[1] ==
          Catch::Approx(sc.initialState.y1 - r0.dz + k0w0).epsilon(1e-12));
    CHECK(std::abs(out.w[1]) < 1.0);
}

TEST_CASE("gain grows without bound toward the boundary", "[controller]") {
    double prev = 0.0;
    for (double w : {0.0, 0.2, 0.5, 0.8, 0.95, 0.99, 0.9995}) {
        const double k = 1.0 / (1.0 - w * w);
        CHECK(k > prev);
        prev = k;
    }
    CHECK(1.0 / (1.0 - 0.9995 * 0.9995) > 1e3);
}

TEST_CASE("control law values and sign", "[controller]") {
    CHECK(control_law(0.0, 0.1) == 0.0);
    CHECK(control_law(0.5, 1.0) == Catch::Approx(-2.0 / 3.0).epsilon(1e-14));
    std::mt19937 rng(41);
    std::uniform_real_distribution<double> ed(-0.99, 0.99);
    for (int i = 0; i < 1000; ++i) {
        const double e3 = ed(rng);
        if (e3 == 0.0) continue;
        const double u = control_law(e3, 1.0);
        CHECK(u * e3 < 0.0);
    }
    CHECK_THROWS_AS(control_law(2.0, 1.0), FunnelViolationError);
}

TEST_CASE("saturation clamps and is idempotent", "[controller]") {
    CHECK(saturate(10.0) == 10.0);
    CHECK(saturate(-55.0) == -40.0);
    CHECK(saturate(40.0) == 40.0);
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> ud(-500.0, 500.0);
    for (int i = 0; i < 200; ++i) {
        const double u = ud(rng);
        CHECK(saturate(saturate(u)) == saturate(u));
        CHECK(std::abs(saturate(u)) <= 40.0);
    }
}

TEST_CASE("normalized error is consistent with the schedule", "[controller]") {
    Fixture f;
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> yd(-5.0, 5.0);
    for (int i = 0; i < 300; ++i) {
        const PlantState s{yd(rng), yd(rng) * 0.1, yd(rng) * 0.1, yd(rng) * 0.1};
        const ErrorChainResult r = compute_error_chain(s, RefSample{}, f.ptrs(), 0.0);
        REQUIRE(r.violatedChannel == -1);
        for (int ch = 0; ch < 4; ++ch) {
            const double phi = f.sched[ch].phi(0.0).phi;
            CHECK(std::abs(r.out.w[ch] - phi * r.out.e[ch]) < 1e-12);
        }
    }
}

TEST_CASE("violations abort the strict chain and flag the guarded one", "[controller]") {
    Fixture f;
    const PlantState outside{25.0, 0, 0, 0};  // |e0| = 25 vs rho0 = 10
    try {
        compute_errors(outside, RefSample{}, f.ptrs(), 3.25);
        FAIL("expected a funnel violation");
    } catch (const FunnelViolationError& e) {
        CHECK(e.event.channel == 0);
        CHECK(e.event.time == 3.25);
        CHECK(e.event.error == Catch::Approx(25.0));
        CHECK(e.event.width == Catch::Approx(10.0));
    }

    const ErrorChainResult guarded =
        compute_error_chain(outside, RefSample{}, f.ptrs(), 3.25, 1e-6);
    CHECK(guarded.violatedChannel == 0);
    CHECK(std::abs(guarded.out.w[0]) == Catch::Approx(2.5));
    for (int ch = 0; ch < 4; ++ch) {
        CHECK(std::isfinite(guarded.out.k[ch]));
        CHECK(std::isfinite(guarded.out.e[ch]));
    }
    CHECK(std::isfinite(guarded.out.uRaw));
}
