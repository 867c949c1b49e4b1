#pragma once

#include <complex>
#include <vector>

#include "loopsim/static_interferometer.hpp"
#include "loopsim/trajectory.hpp"

namespace loopsim {

/// Staircase discretization of a closed spacetime loop: sampled separations
/// x_n = x0 + d(t_n) over N equal steps of delta_t = T/N. The purely temporal
/// segments contribute nothing in temporal gauge; only the flux-tube lengths
/// enter the phase.
struct DiscretizedLoop {
    std::vector<double> x_n;
    double delta_t = 0.0;
    double x0 = 0.0;
    double T = 0.0;
};

enum class SamplingRule {
    Left,     ///< t_n at left endpoints, matching the stepwise construction
    Midpoint  ///< t_n at subinterval midpoints
};

/// Samples x0 + d(t) over N subintervals. Throws DomainError if the
/// separation is not positive at a sample.
DiscretizedLoop discretize(double x0, const TrajectorySpec& traj, int N, SamplingRule rule);

/// Strong-coupling loop expectation exp(-i gamma sum x_n delta_t);
/// unit modulus by construction.
std::complex<double> loop_expectation(const DiscretizedLoop& loop, double gamma);

/// Continuum limit exp(-i gamma integral (x0 + d) dt): the phase is the
/// spacetime area under the separation curve.
std::complex<double> continuum_loop(double gamma, double x0, const TrajectorySpec& traj,
                                    double tol = 1e-10);

struct CorrespondenceBranch {
    std::complex<double> amplitude;       ///< <s|psi(T)> from the interferometer
    std::complex<double> loop_amplitude;  ///< <W(C_s)> / sqrt(2)
    double deviation = 0.0;
};

/// Checks <s|psi(T)> = <W(C_s)>/sqrt(2) for both branches (beta = 1 only).
/// A deviation above 1e-9 raises the failure flag but is reported, not thrown.
struct CorrespondenceReport {
    CorrespondenceBranch up;
    CorrespondenceBranch down;
    bool correspondence_ok = false;
};

CorrespondenceReport amplitude_correspondence(const StaticConfig& cfg, const PathPair& pair,
                                              double tol = 1e-10);

}  // namespace loopsim
