#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "loopsim/dynamic_solver.hpp"
#include "loopsim/trajectory.hpp"

namespace loopsim {

/// Uniform position grid for the brute-force integrator. n_points must be a
/// power of two (the kinetic factor is applied in momentum space) and at
/// least 256; dt is the requested step (evolution lands exactly on T with a
/// step no larger than dt).
struct Grid {
    double x_min = 0.0;
    double x_max = 0.0;
    int n_points = 0;
    double dt = 0.0;

    Grid() = default;
    Grid(double x_min, double x_max, int n_points, double dt);

    double dx() const { return (x_max - x_min) / n_points; }
    double x(int j) const { return x_min + j * dx(); }
    std::vector<double> xs() const;

    bool same_layout(const Grid& other) const {
        return x_min == other.x_min && x_max == other.x_max && n_points == other.n_points;
    }
};

struct WavefunctionState {
    Grid grid;
    std::vector<std::complex<double>> samples;
    double t = 0.0;
    /// Phase accumulated from the x-independent potential terms gamma d_s +
    /// f_s, applied exactly instead of through the grid factor. The physical
    /// wavefunction is exp(i scalar_phase) * samples.
    double scalar_phase = 0.0;
    double norm_drift = 0.0;  ///< max |norm - 1| observed during evolution

    double norm() const;
};

enum class EvolutionMode {
    CompletedSquare,  ///< p^2/2m + (m w^2/2)(x - x_s(t))^2, scalars tracked exactly
    Original          ///< p^2/2m + (m w^2/2)(x - x0)^2 + gamma x + G_s(t) x
};

using SnapshotCallback =
    std::function<void(double t, const std::vector<double>& x,
                       const std::vector<std::complex<double>>& psi)>;

/// Norm-preserving Strang-split spectral integration of one branch, starting
/// from the trap ground state centered at the equilibrium point. Second order
/// in dt. Throws DomainError if the wavefunction reaches the box edge and
/// NumericsError if the norm drifts by more than 1e-6.
WavefunctionState evolve_branch(const DynamicConfig& cfg, const TrajectorySpec& traj,
                                const Grid& grid, EvolutionMode mode,
                                const SnapshotCallback& on_step = {});

/// <bra|ket> including the exp(i scalar_phase) bookkeeping of both states.
/// Grids and times must match.
std::complex<double> overlap(const WavefunctionState& bra, const WavefunctionState& ket);

/// Coherent state exp(i p (x - center)) chi_0(x - center - q) with
/// (q, p) implied by alpha; discretely normalized.
WavefunctionState coherent_state_on_grid(std::complex<double> alpha, double center,
                                         const DynamicConfig& cfg, const Grid& grid);

/// Coefficients of the state in the instantaneous oscillator eigenbasis
/// centered at x_s(t). n_max <= 60; throws NumericsError when the captured
/// probability falls short of 1 by more than 1e-4.
std::vector<std::complex<double>> project_instantaneous_basis(const WavefunctionState& state,
                                                              const DynamicConfig& cfg,
                                                              const TrajectorySpec& traj,
                                                              int n_max);

/// The exact branch solution assembled from a BranchState: all phases baked
/// into the samples (scalar_phase = 0), discretely normalized.
WavefunctionState analytic_branch_state(const DynamicConfig& cfg, const TrajectorySpec& traj,
                                        const BranchState& branch, const Grid& grid);

/// Normalized oscillator eigenfunctions phi_0..phi_n_max at dimensionless xi,
/// by the stable normalized three-term recurrence.
std::vector<double> hermite_functions(int n_max, double xi);

/// Grid sized from the actual branch solutions: box spans the equilibrium
/// center +- (max |d| + max |q| + 10 * ground-state width), n = 2048,
/// dt = 5e-4 / omega.
Grid make_default_grid(const DynamicConfig& cfg, const PathPair& pair, double solver_tol = 1e-10);
Grid make_default_grid(const DynamicConfig& cfg, const TrajectorySpec& traj, double solver_tol = 1e-10);

/// Numeric-vs-analytic gate for one experiment: per-branch fidelities and
/// phase errors, and the two-branch overlap against exp(i dPhi) B.
struct OracleComparison {
    double fidelity_up = 0.0, fidelity_down = 0.0;
    double phase_error_up = 0.0, phase_error_down = 0.0;
    std::complex<double> overlap_numeric;
    std::complex<double> overlap_analytic;
    double overlap_abs_error = 0.0;
    double norm_drift_up = 0.0, norm_drift_down = 0.0;
    double p_up_numeric = 0.0;
};

OracleComparison compare_oracle(const DynamicConfig& cfg, const PathPair& pair,
                                const Grid& grid, double solver_tol = 1e-10);

/// CompletedSquare and Original evolutions of the same branch agree up to the
/// constant phase (gamma x0 - gamma^2/(2 m omega^2)) T dropped when the
/// square is completed.
struct ModeComparison {
    double fidelity = 0.0;
    double phase_error = 0.0;
};

ModeComparison compare_modes(const DynamicConfig& cfg, const TrajectorySpec& traj, const Grid& grid);

}  // namespace loopsim
