#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "ibsim/thermal/thermal.hpp"

using namespace ibsim::thermal;

namespace {

const ThermalParams kRoom{1.0e-2, 2.0e6};
const HeatInput kBoth{2000.0, 0.0};

// Classical RK4 on the governing ODE; independent of the Euler/closed-form code.
double rk4(const ThermalParams& p, double t0, const HeatInput& h, double t_out, double t, double dt) {
    auto f = [&](double T) {
        return (h.power - (T - t_out) * (1.0 / p.resistance + h.vent_extra_conductance)) / p.capacitance;
    };
    double T = t0;
    const auto n = static_cast<long>(std::llround(t / dt));
    for (long i = 0; i < n; ++i) {
        const double k1 = f(T), k2 = f(T + dt / 2 * k1), k3 = f(T + dt / 2 * k2), k4 = f(T + dt * k3);
        T += dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    }
    return T;
}

}  // namespace

TEST_SUITE("thermal") {
    TEST_CASE("parameter validation") {
        CHECK_NOTHROW(kRoom.validate());
        CHECK_THROWS_AS(ThermalParams({0.0, 1.0}).validate(), std::invalid_argument);
        CHECK_THROWS_AS(ThermalParams({1.0, -1.0}).validate(), std::invalid_argument);
        CHECK_THROWS_AS(ThermalParams({INFINITY, 1.0}).validate(), std::invalid_argument);
        CHECK_THROWS_AS(HeatInput({-1.0, 0.0}).validate(), std::invalid_argument);
    }

    TEST_CASE("step: equilibrium and fixed point") {
        CHECK(step({10.0}, kRoom, {}, 10.0, 60.0).state.temperature == 10.0);
        // T = t_out + P R
        const double fixed = 10.0 + 2000.0 * kRoom.resistance;
        CHECK(step({fixed}, kRoom, kBoth, 10.0, 60.0).state.temperature == doctest::Approx(fixed).epsilon(1e-15));
    }

    TEST_CASE("step: stability guard") {
        CHECK(max_stable_dt(kRoom) == doctest::Approx(2000.0));
        CHECK_NOTHROW((void)step({16.0}, kRoom, {}, 10.0, 2000.0));
        CHECK_THROWS_AS((void)step({16.0}, kRoom, {}, 10.0, 2000.5), StabilityError);
        CHECK_THROWS_AS((void)step({16.0}, kRoom, {}, 10.0, 0.0), StabilityError);
    }

    TEST_CASE("step: clamping is flagged") {
        const auto r = step({59.99}, kRoom, {1e6, 0.0}, 50.0, 1000.0);
        CHECK(r.clamped);
        CHECK(r.state.temperature == kMaxTemperature);
        CHECK_FALSE(step({16.0}, kRoom, kBoth, 10.0, 60.0).clamped);
    }

    TEST_CASE("step: ventilation cannot cool below outdoors") {
        RoomThermalState s{22.0};
        for (int i = 0; i < 5000; ++i) s = step(s, kRoom, {0.0, 300.0}, 5.0, 60.0).state;
        CHECK(s.temperature >= 5.0);
        CHECK(s.temperature == doctest::Approx(5.0).epsilon(1e-6));
    }

    TEST_CASE("analytic: initial condition, asymptote, worked example") {
        CHECK(analytic_temp(kRoom, 16.0, kBoth, 10.0, 0.0) == 16.0);
        CHECK(equilibrium_temp(kRoom, kBoth, 10.0) == doctest::Approx(30.0));
        CHECK(time_constant(kRoom, kBoth) == doctest::Approx(20000.0));
        const double tau = time_constant(kRoom, kBoth);
        CHECK(std::abs(analytic_temp(kRoom, 16.0, kBoth, 10.0, 50 * tau) - 30.0) <= 1e-6);
        // Frozen from an RK4 integration at dt = 0.1 s.
        const double at_one_hour = analytic_temp(kRoom, 16.0, kBoth, 10.0, 3600.0);
        CHECK(at_one_hour == doctest::Approx(18.3062170402421).epsilon(1e-12));
        CHECK(std::abs(at_one_hour - rk4(kRoom, 16.0, kBoth, 10.0, 3600.0, 1.0)) <= 1e-9);
    }

    TEST_CASE("step converges to the closed form at first order") {
        const double tau = time_constant(kRoom, kBoth);
        double prev_err = 0.0;
        for (int halvings = 0; halvings < 5; ++halvings) {
            const double dt = 600.0 / std::pow(2.0, halvings);
            RoomThermalState s{16.0};
            const auto n = static_cast<int>(std::lround(tau / dt));
            for (int i = 0; i < n; ++i) s = step(s, kRoom, kBoth, 10.0, dt).state;
            const double err = std::abs(s.temperature - analytic_temp(kRoom, 16.0, kBoth, 10.0, n * dt));
            if (halvings > 0) CHECK(err / prev_err == doctest::Approx(0.5).epsilon(0.02));
            prev_err = err;
        }
    }

    TEST_CASE("step_exact follows the closed form") {
        RoomThermalState s{16.0};
        for (int i = 0; i < 60; ++i) s = step_exact(s, kRoom, kBoth, 10.0, 60.0).state;
        CHECK(s.temperature == doctest::Approx(analytic_temp(kRoom, 16.0, kBoth, 10.0, 3600.0)).epsilon(1e-12));
    }

    TEST_CASE("time_to_target") {
        CHECK(time_to_target(kRoom, 16.0, 16.0, kBoth, 10.0) == 0.0);
        CHECK_FALSE(time_to_target(kRoom, 16.0, 30.0, kBoth, 10.0).has_value());
        CHECK_FALSE(time_to_target(kRoom, 16.0, 31.0, kBoth, 10.0).has_value());
        CHECK_FALSE(time_to_target(kRoom, 16.0, 14.0, kBoth, 10.0).has_value());
        // 1000 W tops out at 20 degC here.
        CHECK_FALSE(time_to_target(kRoom, 16.0, 22.0, {1000.0, 0.0}, 10.0).has_value());
        // cooling towards outdoors is reachable
        CHECK(time_to_target(kRoom, 22.0, 16.0, {}, 10.0).has_value());

        const auto t = time_to_target(kRoom, 16.0, 22.0, kBoth, 10.0);
        REQUIRE(t.has_value());
        CHECK(*t == doctest::Approx(11192.315758708453).epsilon(1e-12));
        // Stepping oracle: fine Euler steps cross 22 degC within one step of t.
        RoomThermalState s{16.0};
        const double dt = 1.0;
        double elapsed = 0.0;
        while (s.temperature < 22.0) {
            s = step(s, kRoom, kBoth, 10.0, dt).state;
            elapsed += dt;
        }
        CHECK(std::abs(elapsed - *t) <= 2.0);
    }

    TEST_CASE("time_to_target round-trips through analytic_temp") {
        std::mt19937_64 rng(17);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        int reachable = 0;
        for (int i = 0; i < 500; ++i) {
            const ThermalParams p{0.002 + 0.03 * u(rng), 5e5 + 5e6 * u(rng)};
            const HeatInput h{3000.0 * u(rng), 50.0 * u(rng)};
            const double t_out = -20.0 + 40.0 * u(rng);
            const double t0 = -10.0 + 40.0 * u(rng);
            const double target = -10.0 + 40.0 * u(rng);
            if (const auto t = time_to_target(p, t0, target, h, t_out)) {
                ++reachable;
                CHECK(*t >= 0.0);
                CHECK(std::abs(analytic_temp(p, t0, h, t_out, *t) - target) <= 1e-6);
            }
        }
        CHECK(reachable > 50);
    }

    TEST_CASE("monotone in power") {
        for (double t : {0.0, 100.0, 3600.0, 36000.0}) {
            double prev = -INFINITY;
            for (double power : {0.0, 500.0, 1000.0, 2000.0}) {
                const double T = analytic_temp(kRoom, 16.0, {power, 0.0}, 10.0, t);
                CHECK(T >= prev);
                prev = T;
            }
        }
    }

    TEST_CASE("energy balance on a stepped trajectory") {
        for (const HeatInput& h : {kBoth, HeatInput{1000.0, 40.0}, HeatInput{0.0, 0.0}}) {
            const double tau = time_constant(kRoom, h);
            const double dt = tau / 100.0;
            const double k = effective_conductance(kRoom, h);
            RoomThermalState s{16.0};
            double losses = 0.0;
            const int n = 300;
            for (int i = 0; i < n; ++i) {
                losses += (s.temperature - 10.0) * k * dt;
                s = step(s, kRoom, h, 10.0, dt).state;
            }
            const double delivered = h.power * n * dt;
            const double stored = kRoom.capacitance * (s.temperature - 16.0);
            CHECK(std::abs(delivered - (stored + losses)) <= 0.01 * std::max(std::abs(delivered), 1.0));
        }
    }

    TEST_CASE("energy_of_schedule") {
        const std::vector<ScheduleEntry> two_hours{{2000.0, 7200.0}};
        CHECK(energy_of_schedule(two_hours) == doctest::Approx(4.0));
        CHECK(energy_of_schedule({}) == 0.0);
        const std::vector<ScheduleEntry> mixed{{1000.0, 1800.0}, {2000.0, 1800.0}};
        CHECK(energy_of_schedule(mixed) == doctest::Approx(1.5));
        const std::vector<ScheduleEntry> bad{{1000.0, -1.0}};
        CHECK_THROWS_AS((void)energy_of_schedule(bad), std::invalid_argument);
    }
}
