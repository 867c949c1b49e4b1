#pragma once

#include <complex>

#include "loopsim/trajectory.hpp"

namespace loopsim {

/// Static (externally dragged) charge pair under V(R) = gamma * R^beta.
/// beta = 1 is the linear confining potential; other exponents model
/// non-confining phases for the area-law probe.
struct StaticConfig {
    double gamma = 0.0;
    double x0 = 1.0;
    double T = 1.0;
    double beta = 1.0;

    void validate() const;
};

struct TwoBranchState {
    std::complex<double> amp_up;
    std::complex<double> amp_down;
};

struct RamseyProbabilities {
    double p_up = 0.0;
    double p_down = 0.0;
};

struct RelativePhase {
    double unwrapped = 0.0;  ///< from the continuous integral
    double wrapped = 0.0;    ///< reduced to (-pi, pi]
};

/// JSON-facing record of one static experiment.
struct StaticRunResult {
    double gamma, beta, x0, T;
    double area;
    double phase_unwrapped;
    double phase_wrapped;
    double p_up;
    double p_down;
};

/// Reduce a phase to (-pi, pi].
double wrap_phase(double phase);

/// Accumulated branch phase -integral gamma (x0 + d(t))^beta dt. For beta = 1
/// this is exactly -gamma x0 T - gamma * path_integral(d). Throws DomainError
/// if the separation x0 + d(t) becomes non-positive anywhere (collision with
/// the static charge).
double branch_phase(const StaticConfig& cfg, const TrajectorySpec& traj, double tol = 1e-10);

/// The two-branch state at t = T: amp_s = exp(i branch_phase_s) / sqrt(2).
/// The common exp(-i gamma x0^beta T) factor is kept in both amplitudes.
TwoBranchState evolve_static(const StaticConfig& cfg, const PathPair& pair, double tol = 1e-10);

/// Fixed pi/2 Ramsey rotation exp(-i (pi/4) sigma_y) followed by projective
/// measurement. Input must be normalized to 1e-9 or better.
RamseyProbabilities ramsey(const TwoBranchState& state);

/// Relative branch phase phi_up - phi_down, unwrapped and wrapped.
RelativePhase relative_phase(const StaticConfig& cfg, const PathPair& pair, double tol = 1e-10);

/// Full experiment record for the CLI/serializers.
StaticRunResult static_run(const StaticConfig& cfg, const PathPair& pair, double tol = 1e-10);

}  // namespace loopsim
