#include "loopsim/wilson_loop.hpp"

#include <cmath>
#include <numbers>

#include "loopsim/errors.hpp"
#include "loopsim/quadrature.hpp"

namespace loopsim {

DiscretizedLoop discretize(double x0, const TrajectorySpec& traj, int N, SamplingRule rule) {
    if (N < 1) throw ContractError("discretize: N must be >= 1");
    DiscretizedLoop loop;
    loop.x0 = x0;
    loop.T = traj.duration();
    loop.delta_t = loop.T / N;
    loop.x_n.reserve(static_cast<std::size_t>(N));
    for (int n = 0; n < N; ++n) {
        const double t = rule == SamplingRule::Left ? n * loop.delta_t : (n + 0.5) * loop.delta_t;
        const double x = x0 + traj.eval(t).d;
        if (!(x > 0.0)) throw DomainError("discretize: nonpositive separation x0 + d(t)");
        loop.x_n.push_back(x);
    }
    return loop;
}

std::complex<double> loop_expectation(const DiscretizedLoop& loop, double gamma) {
    if (loop.x_n.empty()) throw ContractError("loop_expectation: empty loop");
    KahanSum sum;
    for (double x : loop.x_n) sum.add(x);
    return std::polar(1.0, -gamma * loop.delta_t * sum.value());
}

std::complex<double> continuum_loop(double gamma, double x0, const TrajectorySpec& traj,
                                    double tol) {
    const double area = x0 * traj.duration() + path_integral(traj, tol);
    return std::polar(1.0, -gamma * area);
}

CorrespondenceReport amplitude_correspondence(const StaticConfig& cfg, const PathPair& pair,
                                              double tol) {
    cfg.validate();
    if (cfg.beta != 1.0)
        throw ContractError("amplitude_correspondence: defined for beta = 1 only");

    const TwoBranchState state = evolve_static(cfg, pair, tol);
    constexpr double inv_sqrt2 = 1.0 / std::numbers::sqrt2;

    CorrespondenceReport report;
    report.up.amplitude = state.amp_up;
    report.up.loop_amplitude = inv_sqrt2 * continuum_loop(cfg.gamma, cfg.x0, pair.up(), tol);
    report.up.deviation = std::abs(report.up.amplitude - report.up.loop_amplitude);
    report.down.amplitude = state.amp_down;
    report.down.loop_amplitude = inv_sqrt2 * continuum_loop(cfg.gamma, cfg.x0, pair.down(), tol);
    report.down.deviation = std::abs(report.down.amplitude - report.down.loop_amplitude);
    report.correspondence_ok = report.up.deviation <= 1e-9 && report.down.deviation <= 1e-9;
    return report;
}

}  // namespace loopsim
