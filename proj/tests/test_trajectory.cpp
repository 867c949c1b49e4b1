#include <doctest.h>

#include <cmath>
#include <numbers>

#include "loopsim/errors.hpp"
#include "loopsim/json_io.hpp"
#include "loopsim/quadrature.hpp"
#include "loopsim/rng.hpp"
#include "loopsim/trajectory.hpp"

using namespace loopsim;

namespace {

// Five-point central differences on the plain value channel; the independent
// check for the analytic derivatives. The wide stencil keeps roundoff near
// 1e-12 at the 1e-8 agreement gate.
double fd_first(const TrajectorySpec& traj, double t, double h) {
    return (traj.eval(t - 2 * h).d - 8.0 * traj.eval(t - h).d + 8.0 * traj.eval(t + h).d -
            traj.eval(t + 2 * h).d) /
           (12.0 * h);
}

double fd_second(const TrajectorySpec& traj, double t, double h) {
    return (-traj.eval(t - 2 * h).d + 16.0 * traj.eval(t - h).d - 30.0 * traj.eval(t).d +
            16.0 * traj.eval(t + h).d - traj.eval(t + 2 * h).d) /
           (12.0 * h * h);
}

// Fixed-step Simpson reference, independent of the adaptive machinery.
double simpson_reference(const TrajectorySpec& traj, int n) {
    const double T = traj.duration();
    const double h = T / n;
    double acc = traj.eval(0.0).d + traj.eval(T).d;
    for (int i = 1; i < n; ++i) acc += (i % 2 ? 4.0 : 2.0) * traj.eval(i * h).d;
    return acc * h / 3.0;
}

TrajectorySpec sample_spline(double T) {
    SampledSpline s;
    s.knots = {{0.0, 0.0}, {0.2 * T, 0.3}, {0.45 * T, 0.9}, {0.7 * T, 0.5}, {T, 0.0}};
    return TrajectorySpec(std::move(s), T);
}

}  // namespace

TEST_CASE("endpoint smoothness for every family") {
    const double T = 10.0;
    const TrajectorySpec trajs[] = {
        TrajectorySpec(QuinticBumpHold{1.0, 2.0}, T),
        TrajectorySpec(QuinticBumpHold{-0.7, 5.0}, T),  // no hold: 2 tau_r = T
        TrajectorySpec(SineFourthBump{1.3}, T),
        sample_spline(T),
    };
    for (const auto& traj : trajs) {
        for (double t : {0.0, T}) {
            const PathPoint p = traj.eval(t);
            CHECK(std::abs(p.d) <= 1e-12);
            CHECK(std::abs(p.d_dot) <= 1e-12);
            CHECK(std::abs(p.d_ddot) <= 1e-12);
        }
    }
}

TEST_CASE("quintic bump evaluates to the hold plateau") {
    const TrajectorySpec traj(QuinticBumpHold{1.0, 2.0}, 10.0);
    const PathPoint start = traj.eval(0.0);
    CHECK(start.d == 0.0);
    const PathPoint mid = traj.eval(5.0);
    CHECK(mid.d == doctest::Approx(1.0));
    CHECK(mid.d_dot == 0.0);
    CHECK(mid.d_ddot == 0.0);
}

TEST_CASE("eval outside [0, T] returns zeros") {
    const TrajectorySpec traj(SineFourthBump{2.0}, 4.0);
    for (double t : {-1.0, 4.5, 100.0}) {
        const PathPoint p = traj.eval(t);
        CHECK(p.d == 0.0);
        CHECK(p.d_dot == 0.0);
        CHECK(p.d_ddot == 0.0);
    }
}

TEST_CASE("sine-fourth midpoint value and curvature") {
    const double T = 10.0;
    const TrajectorySpec traj(SineFourthBump{1.0}, T);
    const PathPoint p = traj.eval(T / 2.0);
    CHECK(p.d == doctest::Approx(1.0));
    CHECK(std::abs(p.d_dot) <= 1e-14);
    const double expected = -4.0 * std::numbers::pi * std::numbers::pi / (T * T);
    CHECK(p.d_ddot == doctest::Approx(expected).epsilon(1e-12));
    CHECK(std::abs(p.d_ddot - fd_second(traj, T / 2.0, 1e-3)) <= 1e-8);
}

TEST_CASE("analytic derivatives agree with finite differences") {
    const double T = 10.0;
    const TrajectorySpec trajs[] = {
        TrajectorySpec(QuinticBumpHold{1.4, 2.5}, T),
        TrajectorySpec(SineFourthBump{-0.8}, T),
        sample_spline(T),
    };
    for (const auto& traj : trajs) {
        for (double t : {0.7, 1.9, 3.3, 4.8, 6.1, 8.6}) {
            const PathPoint p = traj.eval(t);
            CHECK(std::abs(p.d_dot - fd_first(traj, t, 1e-4)) <= 1e-8);
            CHECK(std::abs(p.d_ddot - fd_second(traj, t, 1e-3)) <= 1e-8);
        }
    }
}

TEST_CASE("malformed spline knots are rejected") {
    SampledSpline bad;
    bad.knots = {{0.0, 0.0}, {3.0, 1.0}, {2.0, 0.5}, {10.0, 0.0}};
    CHECK_THROWS_AS(TrajectorySpec(std::move(bad), 10.0), ValidationError);

    SampledSpline nonzero_end;
    nonzero_end.knots = {{0.0, 0.0}, {5.0, 1.0}, {10.0, 0.4}};
    CHECK_THROWS_AS(TrajectorySpec(std::move(nonzero_end), 10.0), ValidationError);
}

TEST_CASE("quintic ramp bounds are enforced") {
    CHECK_THROWS_AS(TrajectorySpec(QuinticBumpHold{1.0, 6.0}, 10.0), ValidationError);
    CHECK_THROWS_AS(TrajectorySpec(QuinticBumpHold{1.0, 0.0}, 10.0), ValidationError);
    CHECK_NOTHROW(TrajectorySpec(QuinticBumpHold{1.0, 5.0}, 10.0));
}

TEST_CASE("validate accepts zero paths and flags violations") {
    const double T = 10.0;
    const PathPair zero(TrajectorySpec::zero(T), TrajectorySpec::zero(T));
    CHECK(validate(zero, 1.0).valid());

    const PathPair flipped(TrajectorySpec(QuinticBumpHold{-1.0, 2.0}, T),
                           TrajectorySpec(QuinticBumpHold{-1.0, 2.0}, T));
    const ValidationReport r1 = validate(flipped, 10.0);
    CHECK_FALSE(r1.valid());
    bool found_sign = false;
    for (const auto& issue : r1.issues) found_sign |= issue.constraint == "d_up >= 0";
    CHECK(found_sign);

    const PathPair too_deep(TrajectorySpec::zero(T),
                            TrajectorySpec(QuinticBumpHold{-2.0, 2.0}, T));
    const ValidationReport r2 = validate(too_deep, 1.0);
    CHECK_FALSE(r2.valid());
    bool found_bound = false;
    for (const auto& issue : r2.issues)
        if (issue.constraint == "|d_down| < x0") {
            found_bound = true;
            CHECK(issue.value == doctest::Approx(2.0));
        }
    CHECK(found_bound);
}

TEST_CASE("path pair requires matching durations") {
    CHECK_THROWS_AS(PathPair(TrajectorySpec::zero(10.0), TrajectorySpec::zero(9.0)),
                    ValidationError);
}

TEST_CASE("enclosed area: quintic pair") {
    const PathPair pair(TrajectorySpec(QuinticBumpHold{1.0, 2.0}, 10.0),
                        TrajectorySpec(QuinticBumpHold{-1.0, 2.0}, 10.0));
    // Per-branch area D (T - tau_r) by ramp symmetry.
    CHECK(enclosed_area(pair) == doctest::Approx(16.0).epsilon(1e-12));
    const double ref = simpson_reference(pair.up(), 1 << 16) - simpson_reference(pair.down(), 1 << 16);
    CHECK(enclosed_area(pair) == doctest::Approx(ref).epsilon(1e-10));
}

TEST_CASE("enclosed area: sine-fourth pair equals 3T/4 for unit amplitudes") {
    const PathPair pair(TrajectorySpec(SineFourthBump{1.0}, 10.0),
                        TrajectorySpec(SineFourthBump{-1.0}, 10.0));
    CHECK(enclosed_area(pair) == doctest::Approx(7.5).epsilon(1e-12));
}

TEST_CASE("enclosed area of zero paths vanishes") {
    const PathPair pair(TrajectorySpec::zero(10.0), TrajectorySpec::zero(10.0));
    CHECK(enclosed_area(pair) == 0.0);
}

TEST_CASE("quadrature consistency: refined value stays inside the error bound") {
    const TrajectorySpec traj(QuinticBumpHold{1.0, 2.0}, 10.0);
    const auto f = [&](double t) { return traj.eval(t).d; };
    const auto coarse = integrate_piecewise(f, traj.breakpoints(), 1e-6);
    const auto fine = integrate_piecewise(f, traj.breakpoints(), 1e-13);
    CHECK(std::abs(coarse.value - fine.value) <= coarse.error_bound + 1e-13);
}

TEST_CASE("max acceleration of the quintic ramp") {
    const TrajectorySpec traj(QuinticBumpHold{1.0, 2.0}, 10.0);
    const double expected = 10.0 / std::sqrt(3.0) / 4.0;  // peak of 60 u(1-u)(1-2u) / tau^2
    CHECK(max_acceleration(traj) == doctest::Approx(expected).epsilon(1e-9));

    CHECK(max_acceleration(TrajectorySpec::zero(10.0)) == 0.0);

    const TrajectorySpec doubled(QuinticBumpHold{2.0, 2.0}, 10.0);
    CHECK(max_acceleration(doubled) == doctest::Approx(2.0 * expected).epsilon(1e-9));
}

TEST_CASE("equal area family: single pair") {
    const auto family = equal_area_family(5.0, 10.0, 10.0, 1, 42);
    REQUIRE(family.size() == 1);
    CHECK(enclosed_area(family[0], 1e-11) == doctest::Approx(5.0).epsilon(1e-10));
}

TEST_CASE("equal area family: five distinct valid pairs at the same area") {
    const auto family = equal_area_family(16.0, 20.0, 10.0, 5, 7);
    REQUIRE(family.size() == 5);
    for (const auto& pair : family) {
        CHECK(validate(pair, 20.0).valid());
        CHECK(std::abs(enclosed_area(pair, 1e-11) - 16.0) <= 1e-9);
    }
    // Pairwise shape distinctness of the up branches.
    for (std::size_t i = 0; i < family.size(); ++i) {
        for (std::size_t j = i + 1; j < family.size(); ++j) {
            double max_diff = 0.0;
            for (int k = 0; k <= 100; ++k) {
                const double t = 10.0 * k / 100.0;
                max_diff = std::max(max_diff, std::abs(family[i].up().eval(t).d -
                                                       family[j].up().eval(t).d));
            }
            CHECK(max_diff > 0.01);
        }
    }
}

TEST_CASE("equal area family: infeasible target") {
    CHECK_THROWS_AS(equal_area_family(100.0, 0.5, 1.0, 3, 1), ValidationError);
}

TEST_CASE("equal area family: deterministic under seed") {
    const auto a = equal_area_family(16.0, 20.0, 10.0, 4, 99);
    const auto b = equal_area_family(16.0, 20.0, 10.0, 4, 99);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(trajectory_to_json(a[i].up()) == trajectory_to_json(b[i].up()));
        CHECK(trajectory_to_json(a[i].down()) == trajectory_to_json(b[i].down()));
    }
}

TEST_CASE("property: random specs stay smooth at the endpoints and areas integrate") {
    for (std::uint64_t s = 0; s < 24; ++s) {
        const CounterRng rng(4242, s);
        const double T = rng.uniform(0, 4.0, 20.0);
        const double tau = T * rng.uniform(1, 0.05, 0.5);
        const double D = rng.uniform(2, -2.0, 2.0);
        const TrajectorySpec traj = (s % 2) == 0 ? TrajectorySpec(QuinticBumpHold{D, tau}, T)
                                                 : TrajectorySpec(SineFourthBump{D}, T);
        for (double t : {0.0, T}) {
            const PathPoint p = traj.eval(t);
            CHECK(std::abs(p.d) <= 1e-12);
            CHECK(std::abs(p.d_dot) <= 1e-12);
            CHECK(std::abs(p.d_ddot) <= 1e-12);
        }
        const double quad = path_integral(traj, 1e-11);
        const double expected = (s % 2) == 0 ? D * (T - tau) : D * 3.0 * T / 8.0;
        CHECK(quad == doctest::Approx(expected).epsilon(1e-9));
    }
}

TEST_CASE("trajectory json round trip") {
    const TrajectorySpec traj(QuinticBumpHold{1.5, 2.5}, 12.0);
    const TrajectorySpec back = trajectory_from_json(trajectory_to_json(traj));
    CHECK(back.family_name() == "quintic_bump_hold");
    CHECK(back.duration() == 12.0);
    for (double t : {0.4, 3.0, 7.7, 11.2})
        CHECK(back.eval(t).d == traj.eval(t).d);

    const TrajectorySpec spline = sample_spline(10.0);
    const TrajectorySpec spline_back = trajectory_from_json(trajectory_to_json(spline));
    for (double t : {1.0, 4.5, 8.0})
        CHECK(spline_back.eval(t).d == doctest::Approx(spline.eval(t).d).epsilon(1e-15));

    CHECK_THROWS_AS(trajectory_from_json("{\"family\": \"bogus\", \"params\": {}, \"T\": 1}"),
                    ValidationError);
}
