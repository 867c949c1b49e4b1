#pragma once

#include <complex>
#include <vector>

#include "loopsim/trajectory.hpp"

namespace loopsim {

/// Dynamic-quark model: one static charge at the origin, one charge of mass m
/// held in a harmonic trap of frequency omega centered at x0, joined by a
/// linear potential of tension gamma. Natural units (hbar = 1).
struct DynamicConfig {
    double m = 1.0;
    double omega = 1.0;
    double gamma = 0.0;
    double x0 = 1.0;
    double T = 1.0;

    /// Trap equilibrium once the linear pull is absorbed: x0 - gamma/(m omega^2).
    double equilibrium_center() const { return x0 - gamma / (m * omega * omega); }

    void validate() const;
};

/// Per-internal-level solution record at t = T.
struct BranchState {
    double q = 0.0;      ///< oscillator response displacement
    double q_dot = 0.0;  ///< response velocity
    std::complex<double> alpha;
    double phi0_tilde = 0.0;
    double phi0 = 0.0;
    double gamma_phase = 0.0;  ///< -gamma * integral of d
    double x_s_final = 0.0;
    double f_integral = 0.0;   ///< integral of f_s = G x0 - G^2/(2 m omega^2)
    double d_integral = 0.0;   ///< integral of d
    double d_dot_final = 0.0;
    double max_abs_q = 0.0;    ///< largest |q(t)| seen on the solve grid

    // Provenance, for interference() contract checks.
    double m = 0.0, omega = 0.0, gamma = 0.0, T = 0.0;
};

/// Sampled response history on the solver grid (diagnostics and dumps).
struct BranchTrace {
    std::vector<double> t;
    std::vector<double> q;
    std::vector<double> q_dot;
    std::vector<std::complex<double>> alpha;
};

/// Exact solution via the Green's-function convolution
///   q(t) = -(1/omega) int_0^t sin(omega (t - t')) d_ddot(t') dt',
/// with all phase integrals accumulated on the same composite-Simpson grid as
/// the convolution itself. Refines dyadically until successive levels agree
/// to tol on every reported quantity.
BranchState solve_branch(const DynamicConfig& cfg, const TrajectorySpec& traj,
                         double tol = 1e-10, BranchTrace* trace = nullptr);

/// Independent verification route: classic fixed-step RK4 time stepping of
/// q_ddot = -omega^2 q - d_ddot with the phase integrals carried as
/// additional state. Requires dt <= 0.1 / omega.
BranchState solve_branch_ode(const DynamicConfig& cfg, const TrajectorySpec& traj,
                             double dt, BranchTrace* trace = nullptr);

/// Interference summary after the Ramsey rotation.
struct InterferenceResult {
    double delta_phi = 0.0;          ///< Phi_up - Phi_down, unwrapped
    double delta_phi_wrapped = 0.0;  ///< reduced to (-pi, pi]
    std::complex<double> B;          ///< coherence factor <alpha_down|alpha_up>
    double B0 = 0.0;                 ///< |B|
    double delta = 0.0;              ///< arg B
    double p_up = 0.0;
    double p_down = 0.0;
    double visibility = 0.0;  ///< |B|

    // Provenance for contract checks.
    double gamma = 0.0, m = 0.0, omega = 0.0, T = 0.0;
    double d_integral_up = 0.0, d_integral_down = 0.0;

    double area() const { return d_integral_up - d_integral_down; }
};

/// Combines two solved branches: B = exp(-(|a_up|^2 + |a_down|^2)/2 +
/// a_up conj(a_down)), P_up = (1 - Re(exp(i dPhi) B)) / 2. Branches must come
/// from the same config and T.
InterferenceResult interference(const BranchState& up, const BranchState& down);

/// dPhi(gamma_2) - dPhi(gamma_1) for the same pair; equals -(gamma_2 -
/// gamma_1) * A because the calculable phase Phi_0 is gamma-independent.
double gamma_phase_difference(const InterferenceResult& at_gamma2,
                              const InterferenceResult& at_gamma1,
                              const PathPair& pair);

struct AdiabaticityMargin {
    double margin = 0.0;  ///< a_max * T * sqrt(2 m / omega)
    bool ok = false;      ///< margin < 0.1
};

/// Operationalizes the smallness condition on the maximal path acceleration;
/// "much less than" is pinned at margin < 0.1.
AdiabaticityMargin adiabaticity_margin(const DynamicConfig& cfg, const PathPair& pair);

}  // namespace loopsim
