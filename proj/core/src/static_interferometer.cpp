#include "loopsim/static_interferometer.hpp"

#include <cmath>
#include <numbers>

#include "loopsim/errors.hpp"
#include "loopsim/quadrature.hpp"

namespace loopsim {

void StaticConfig::validate() const {
    if (!(gamma >= 0.0)) throw ValidationError("static config: gamma must be >= 0");
    if (!(x0 > 0.0)) throw ValidationError("static config: x0 must be > 0");
    if (!(T > 0.0)) throw ValidationError("static config: T must be > 0");
    if (!(beta > 0.0)) throw ValidationError("static config: beta must be > 0");
}

double wrap_phase(double phase) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double w = phase - two_pi * std::round(phase / two_pi);
    if (w <= -std::numbers::pi) w += two_pi;
    return w;
}

namespace {

void check_no_collision(const StaticConfig& cfg, const TrajectorySpec& traj) {
    // The minimum separation is the trajectory's most negative excursion.
    const auto brk = traj.breakpoints();
    constexpr int samples = 512;
    for (std::size_t s = 0; s + 1 < brk.size(); ++s) {
        const double a = brk[s], h = (brk[s + 1] - brk[s]) / samples;
        for (int i = 0; i <= samples; ++i) {
            const double t = a + i * h;
            const double sep = cfg.x0 + traj.eval(t).d;
            if (!(sep > 0.0))
                throw DomainError("branch_phase: separation x0 + d(t) <= 0 (quark collision)");
        }
    }
}

}  // namespace

double branch_phase(const StaticConfig& cfg, const TrajectorySpec& traj, double tol) {
    cfg.validate();
    if (traj.duration() != cfg.T)
        throw ContractError("branch_phase: trajectory duration differs from config T");
    check_no_collision(cfg, traj);

    if (cfg.beta == 1.0)
        return -cfg.gamma * (cfg.x0 * cfg.T + path_integral(traj, tol));

    const double phase =
        integrate_piecewise(
            [&](double t) {
                const double sep = cfg.x0 + traj.eval(t).d;
                if (!(sep > 0.0))
                    throw DomainError("branch_phase: separation x0 + d(t) <= 0 (quark collision)");
                return std::pow(sep, cfg.beta);
            },
            traj.breakpoints(), tol)
            .value;
    return -cfg.gamma * phase;
}

TwoBranchState evolve_static(const StaticConfig& cfg, const PathPair& pair, double tol) {
    constexpr double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
    const double phi_up = branch_phase(cfg, pair.up(), tol);
    const double phi_down = branch_phase(cfg, pair.down(), tol);
    return {inv_sqrt2 * std::polar(1.0, phi_up), inv_sqrt2 * std::polar(1.0, phi_down)};
}

RamseyProbabilities ramsey(const TwoBranchState& state) {
    const double norm2 = std::norm(state.amp_up) + std::norm(state.amp_down);
    if (std::abs(norm2 - 1.0) > 1e-9)
        throw ContractError("ramsey: input state is not normalized");

    // U = exp(-i (pi/4) sigma_y) = [[1, -1], [1, 1]] / sqrt(2) acting on
    // (amp_up, amp_down).
    constexpr double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
    const std::complex<double> new_up = inv_sqrt2 * (state.amp_up - state.amp_down);
    const std::complex<double> new_down = inv_sqrt2 * (state.amp_up + state.amp_down);
    return {std::norm(new_up), std::norm(new_down)};
}

RelativePhase relative_phase(const StaticConfig& cfg, const PathPair& pair, double tol) {
    const double unwrapped = branch_phase(cfg, pair.up(), tol) - branch_phase(cfg, pair.down(), tol);
    return {unwrapped, wrap_phase(unwrapped)};
}

StaticRunResult static_run(const StaticConfig& cfg, const PathPair& pair, double tol) {
    StaticRunResult r{};
    r.gamma = cfg.gamma;
    r.beta = cfg.beta;
    r.x0 = cfg.x0;
    r.T = cfg.T;
    r.area = enclosed_area(pair, tol);
    const RelativePhase phase = relative_phase(cfg, pair, tol);
    r.phase_unwrapped = phase.unwrapped;
    r.phase_wrapped = phase.wrapped;
    const RamseyProbabilities p = ramsey(evolve_static(cfg, pair, tol));
    r.p_up = p.p_up;
    r.p_down = p.p_down;
    return r;
}

}  // namespace loopsim
