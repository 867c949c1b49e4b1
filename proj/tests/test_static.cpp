#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "loopsim/errors.hpp"
#include "loopsim/rng.hpp"
#include "loopsim/static_interferometer.hpp"
#include "loopsim/trajectory.hpp"

using namespace loopsim;

TEST_CASE("branch phase of an undriven branch is -gamma x0^beta T") {
    const StaticConfig cfg{1.0, 1.0, 2.0 * std::numbers::pi, 1.0};
    const double phase = branch_phase(cfg, TrajectorySpec::zero(cfg.T));
    CHECK(phase == doctest::Approx(-2.0 * std::numbers::pi).epsilon(1e-14));

    const StaticConfig quadratic{1.0, 1.0, 1.0, 2.0};
    CHECK(branch_phase(quadratic, TrajectorySpec::zero(1.0)) ==
          doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("branch phase of the held quintic ramp") {
    const StaticConfig cfg{0.5, 10.0, 10.0, 1.0};
    const TrajectorySpec traj(QuinticBumpHold{1.0, 2.0}, 10.0);
    // Path integral D (T - tau_r) = 8, so the phase is -0.5 (100 + 8).
    CHECK(branch_phase(cfg, traj) == doctest::Approx(-54.0).epsilon(1e-12));
}

TEST_CASE("collision with the static charge raises a domain error") {
    const StaticConfig cfg{0.5, 1.0, 10.0, 1.0};
    const TrajectorySpec dive(QuinticBumpHold{-2.0, 2.0}, 10.0);
    CHECK_THROWS_AS(branch_phase(cfg, dive), DomainError);
}

TEST_CASE("evolve_static: zero paths give equal amplitudes") {
    const StaticConfig cfg{0.3, 2.0, 5.0, 1.0};
    const PathPair pair(TrajectorySpec::zero(5.0), TrajectorySpec::zero(5.0));
    const TwoBranchState state = evolve_static(cfg, pair);
    const std::complex<double> expected =
        std::polar(1.0 / std::numbers::sqrt2, -cfg.gamma * cfg.x0 * cfg.T);
    CHECK(std::abs(state.amp_up - expected) <= 1e-12);
    CHECK(std::abs(state.amp_down - expected) <= 1e-12);
}

TEST_CASE("evolve_static: gamma = 0 is the free case") {
    const StaticConfig cfg{0.0, 2.0, 5.0, 1.0};
    const PathPair pair(TrajectorySpec(QuinticBumpHold{1.0, 1.0}, 5.0),
                        TrajectorySpec(QuinticBumpHold{-0.5, 1.5}, 5.0));
    const TwoBranchState state = evolve_static(cfg, pair);
    CHECK(std::abs(state.amp_up - 1.0 / std::numbers::sqrt2) <= 1e-14);
    CHECK(std::abs(state.amp_down - 1.0 / std::numbers::sqrt2) <= 1e-14);
}

TEST_CASE("relative phase of a pi-area pair") {
    // Quintic pair with enclosed area A = pi / gamma.
    const double T = 10.0, tau = 2.0, gamma = 0.5;
    const double area = std::numbers::pi / gamma;
    const double D = area / (2.0 * (T - tau));
    const StaticConfig cfg{gamma, 10.0, T, 1.0};
    const PathPair pair(TrajectorySpec(QuinticBumpHold{D, tau}, T),
                        TrajectorySpec(QuinticBumpHold{-D, tau}, T));
    const TwoBranchState state = evolve_static(cfg, pair);
    const double rel = std::arg(state.amp_up * std::conj(state.amp_down));
    CHECK(std::abs(rel) == doctest::Approx(std::numbers::pi).epsilon(1e-10));

    const RelativePhase phase = relative_phase(cfg, pair);
    CHECK(phase.unwrapped == doctest::Approx(-std::numbers::pi).epsilon(1e-10));
}

TEST_CASE("ramsey probabilities at the special phases") {
    const StaticConfig cfg{0.5, 10.0, 10.0, 1.0};

    // gamma A = 0: all population returns to |down>.
    const PathPair zero(TrajectorySpec::zero(10.0), TrajectorySpec::zero(10.0));
    const RamseyProbabilities p0 = ramsey(evolve_static(cfg, zero));
    CHECK(p0.p_up == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(p0.p_down == doctest::Approx(1.0).epsilon(1e-14));

    // gamma A = pi: inverted.
    const double T = 10.0, tau = 2.0;
    const double D = (std::numbers::pi / cfg.gamma) / (2.0 * (T - tau));
    const PathPair pi_pair(TrajectorySpec(QuinticBumpHold{D, tau}, T),
                           TrajectorySpec(QuinticBumpHold{-D, tau}, T));
    const RamseyProbabilities p1 = ramsey(evolve_static(cfg, pi_pair));
    CHECK(p1.p_up == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(p1.p_down == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("ramsey reproduces sin^2(gamma A / 2) on the standard quintic pair") {
    const StaticConfig cfg{0.5, 10.0, 10.0, 1.0};
    const PathPair pair(TrajectorySpec(QuinticBumpHold{1.0, 2.0}, 10.0),
                        TrajectorySpec(QuinticBumpHold{-1.0, 2.0}, 10.0));
    const RamseyProbabilities p = ramsey(evolve_static(cfg, pair, 1e-12));
    const double s = std::sin(0.5 * cfg.gamma * enclosed_area(pair, 1e-12));
    CHECK(p.p_up == doctest::Approx(s * s).epsilon(1e-12));
    CHECK(p.p_up + p.p_down == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("ramsey rejects unnormalized states") {
    TwoBranchState bad{{0.9, 0.0}, {0.1, 0.0}};
    CHECK_THROWS_AS(ramsey(bad), ContractError);
}

TEST_CASE("ramsey preserves the norm of random states") {
    for (std::uint64_t s = 0; s < 50; ++s) {
        const CounterRng rng(777, s);
        const double theta = rng.uniform(0, 0.0, std::numbers::pi / 2.0);
        const double phi_a = rng.uniform(1, -std::numbers::pi, std::numbers::pi);
        const double phi_b = rng.uniform(2, -std::numbers::pi, std::numbers::pi);
        const TwoBranchState state{std::polar(std::cos(theta), phi_a),
                                   std::polar(std::sin(theta), phi_b)};
        const RamseyProbabilities p = ramsey(state);
        CHECK(std::abs(p.p_up + p.p_down - 1.0) <= 1e-14);
    }
}

TEST_CASE("area law at beta = 1: equal-area family has a single phase") {
    const StaticConfig cfg{0.7, 10.0, 10.0, 1.0};
    const auto family = equal_area_family(12.0, 10.0, 10.0, 4, 11);
    double min_phase = 1e300, max_phase = -1e300;
    for (const auto& pair : family) {
        const double rel = relative_phase(cfg, pair, 1e-12).unwrapped;
        min_phase = std::min(min_phase, rel);
        max_phase = std::max(max_phase, rel);
        CHECK(rel == doctest::Approx(-cfg.gamma * 12.0).epsilon(1e-9));
    }
    CHECK(max_phase - min_phase <= 1e-8);
}

TEST_CASE("shape sensitivity at beta = 2") {
    const StaticConfig cfg{0.7, 10.0, 10.0, 2.0};
    const auto family = equal_area_family(16.0, 10.0, 10.0, 5, 3);
    double min_phase = 1e300, max_phase = -1e300;
    for (const auto& pair : family) {
        const double rel = relative_phase(cfg, pair, 1e-12).unwrapped;
        min_phase = std::min(min_phase, rel);
        max_phase = std::max(max_phase, rel);
    }
    CHECK(max_phase - min_phase > 1e-2);
}

TEST_CASE("linearity in gamma") {
    const PathPair pair(TrajectorySpec(QuinticBumpHold{0.8, 2.0}, 10.0),
                        TrajectorySpec(SineFourthBump{-0.6}, 10.0));
    const double area = enclosed_area(pair, 1e-12);
    const StaticConfig cfg1{0.3, 10.0, 10.0, 1.0};
    const StaticConfig cfg2{1.1, 10.0, 10.0, 1.0};
    const double d_phase = relative_phase(cfg2, pair, 1e-12).unwrapped -
                           relative_phase(cfg1, pair, 1e-12).unwrapped;
    CHECK(d_phase == doctest::Approx(-(1.1 - 0.3) * area).epsilon(1e-9));
}

TEST_CASE("static_run packages the record") {
    const StaticConfig cfg{0.5, 10.0, 10.0, 1.0};
    const PathPair pair(TrajectorySpec(QuinticBumpHold{1.0, 2.0}, 10.0),
                        TrajectorySpec(QuinticBumpHold{-1.0, 2.0}, 10.0));
    const StaticRunResult r = static_run(cfg, pair, 1e-12);
    CHECK(r.area == doctest::Approx(16.0).epsilon(1e-10));
    CHECK(r.phase_unwrapped == doctest::Approx(-8.0).epsilon(1e-10));
    CHECK(r.phase_wrapped == doctest::Approx(wrap_phase(-8.0)).epsilon(1e-12));
    const double s = std::sin(0.5 * cfg.gamma * r.area);
    CHECK(r.p_up == doctest::Approx(s * s).epsilon(1e-10));
}
