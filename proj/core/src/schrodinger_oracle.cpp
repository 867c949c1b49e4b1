#include "loopsim/schrodinger_oracle.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "loopsim/errors.hpp"
#include "loopsim/quadrature.hpp"

namespace loopsim {

namespace {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

double max_abs_d(const TrajectorySpec& traj) {
    const auto brk = traj.breakpoints();
    double best = 0.0;
    constexpr int samples = 256;
    for (std::size_t s = 0; s + 1 < brk.size(); ++s) {
        const double a = brk[s], h = (brk[s + 1] - brk[s]) / samples;
        for (int i = 0; i <= samples; ++i) best = std::max(best, std::abs(traj.eval(a + i * h).d));
    }
    return best;
}

// RAII wrapper around one in-place FFTW plan pair. FFTW_ESTIMATE keeps the
// chosen algorithm (and therefore the last few bits of every run) identical
// between executions.
class FftPair {
public:
    FftPair(std::complex<double>* data, int n) {
        // Accumulated wisdom would let later plans pick different algorithms
        // than a fresh process; forgetting it keeps every run bit-identical.
        fftw_forget_wisdom();
        fwd_ = fftw_plan_dft_1d(n, reinterpret_cast<fftw_complex*>(data),
                                reinterpret_cast<fftw_complex*>(data), FFTW_FORWARD, FFTW_ESTIMATE);
        bwd_ = fftw_plan_dft_1d(n, reinterpret_cast<fftw_complex*>(data),
                                reinterpret_cast<fftw_complex*>(data), FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    ~FftPair() {
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(bwd_);
    }
    FftPair(const FftPair&) = delete;
    FftPair& operator=(const FftPair&) = delete;

    void forward() { fftw_execute(fwd_); }
    void backward() { fftw_execute(bwd_); }

private:
    fftw_plan fwd_;
    fftw_plan bwd_;
};

std::vector<std::complex<double>> ground_state(const Grid& grid, const DynamicConfig& cfg,
                                               double center) {
    const double mw = cfg.m * cfg.omega;
    std::vector<std::complex<double>> psi(grid.n_points);
    for (int j = 0; j < grid.n_points; ++j) {
        const double y = grid.x(j) - center;
        psi[j] = std::exp(-0.5 * mw * y * y);
    }
    return psi;
}

void normalize(std::vector<std::complex<double>>& psi, double dx) {
    double s = 0.0;
    for (const auto& v : psi) s += std::norm(v);
    const double inv = 1.0 / std::sqrt(s * dx);
    for (auto& v : psi) v *= inv;
}

double edge_amplitude(const std::vector<std::complex<double>>& psi) {
    const std::size_t n = psi.size();
    double worst = 0.0;
    for (std::size_t j = 0; j < 4; ++j)
        worst = std::max({worst, std::abs(psi[j]), std::abs(psi[n - 1 - j])});
    return worst;
}

}  // namespace

Grid::Grid(double x_min_, double x_max_, int n_points_, double dt_)
    : x_min(x_min_), x_max(x_max_), n_points(n_points_), dt(dt_) {
    if (!(x_max > x_min)) throw ValidationError("grid: x_max must exceed x_min");
    if (!is_power_of_two(n_points) || n_points < 256)
        throw ValidationError("grid: n_points must be a power of two >= 256");
    if (!(dt > 0.0)) throw ValidationError("grid: dt must be positive");
}

std::vector<double> Grid::xs() const {
    std::vector<double> out(n_points);
    for (int j = 0; j < n_points; ++j) out[j] = x(j);
    return out;
}

double WavefunctionState::norm() const {
    double s = 0.0;
    for (const auto& v : samples) s += std::norm(v);
    return std::sqrt(s * grid.dx());
}

WavefunctionState evolve_branch(const DynamicConfig& cfg, const TrajectorySpec& traj,
                                const Grid& grid, EvolutionMode mode,
                                const SnapshotCallback& on_step) {
    cfg.validate();
    if (traj.duration() != cfg.T)
        throw ContractError("evolve_branch: trajectory duration differs from config T");
    if (cfg.omega * grid.dt > 0.05)
        throw ContractError("evolve_branch: omega * dt must be <= 0.05");

    const double center = cfg.equilibrium_center();
    const double width = 1.0 / std::sqrt(2.0 * cfg.m * cfg.omega);
    const double needed = max_abs_d(traj) + 8.0 * width;
    if (center - needed < grid.x_min || center + needed > grid.x_max)
        throw DomainError("evolve_branch: grid does not span the driven region");

    const int n = grid.n_points;
    const double dx = grid.dx();
    const double L = grid.x_max - grid.x_min;
    const long n_steps = std::max(1L, static_cast<long>(std::ceil(cfg.T / grid.dt - 1e-12)));
    const double h = cfg.T / static_cast<double>(n_steps);

    WavefunctionState state;
    state.grid = grid;
    state.samples = ground_state(grid, cfg, center);
    normalize(state.samples, dx);
    state.t = 0.0;

    // Kinetic full-step factor exp(-i k^2 h / 2m), with the FFT's 1/n folded in.
    std::vector<std::complex<double>> kinetic(n);
    for (int j = 0; j < n; ++j) {
        const int jj = j <= n / 2 ? j : j - n;
        const double k = 2.0 * std::numbers::pi * jj / L;
        kinetic[j] = std::polar(1.0 / n, -k * k * h / (2.0 * cfg.m));
    }

    // The grid potential is A x^2 + B(t) x + C(t) with A = m w^2 / 2; the
    // quadratic factor for a half step is time-independent.
    const double A = 0.5 * cfg.m * cfg.omega * cfg.omega;
    const double tau = 0.5 * h;
    std::vector<std::complex<double>> quad_half(n);
    for (int j = 0; j < n; ++j) {
        const double x = grid.x(j);
        quad_half[j] = std::polar(1.0, -tau * A * x * x);
    }

    auto linear_coeffs = [&](double t_mid, double& B, double& C) {
        const double d = traj.eval(t_mid).d;
        if (mode == EvolutionMode::CompletedSquare) {
            const double xs = center + d;
            B = -2.0 * A * xs;
            C = A * xs * xs;
        } else {
            const double G = -cfg.m * cfg.omega * cfg.omega * d;
            B = cfg.gamma + G - 2.0 * A * cfg.x0;
            C = A * cfg.x0 * cfg.x0;
        }
    };

    // Applies exp(-i tau (A x^2 + B x + C)) using one complex multiply per
    // point: the linear part is a geometric phase ramp, resynchronized every
    // 256 points to stop the multiplicative roundoff from drifting the norm.
    auto apply_potential_half = [&](double B, double C) {
        const std::complex<double> ratio = std::polar(1.0, -tau * B * dx);
        std::complex<double> lin{1.0, 0.0};
        for (int j = 0; j < n; ++j) {
            if ((j & 255) == 0) lin = std::polar(1.0, -tau * (B * grid.x(j) + C));
            state.samples[j] *= quad_half[j] * lin;
            lin *= ratio;
        }
    };

    // x-independent drive terms, integrated exactly alongside the grid.
    auto scalar_integrand = [&](double t) {
        const double d = traj.eval(t).d;
        const double mw2 = cfg.m * cfg.omega * cfg.omega;
        const double f = -mw2 * cfg.x0 * d - 0.5 * mw2 * d * d;
        return cfg.gamma * d + f;
    };

    FftPair fft(state.samples.data(), n);
    KahanSum scalar_sum;
    const std::vector<double> x_axis = grid.xs();
    if (on_step) on_step(0.0, x_axis, state.samples);

    for (long step = 0; step < n_steps; ++step) {
        const double t0 = h * static_cast<double>(step);
        const double t_mid = t0 + 0.5 * h;
        double B = 0.0, C = 0.0;
        linear_coeffs(t_mid, B, C);

        apply_potential_half(B, C);
        fft.forward();
        for (int j = 0; j < n; ++j) state.samples[j] *= kinetic[j];
        fft.backward();
        apply_potential_half(B, C);

        if (mode == EvolutionMode::CompletedSquare) {
            scalar_sum.add(-h / 6.0 *
                           (scalar_integrand(t0) + 4.0 * scalar_integrand(t_mid) +
                            scalar_integrand(t0 + h)));
        }

        state.t = h * static_cast<double>(step + 1);

        double norm2 = 0.0;
        for (const auto& v : state.samples) norm2 += std::norm(v);
        const double drift = std::abs(std::sqrt(norm2 * dx) - 1.0);
        state.norm_drift = std::max(state.norm_drift, drift);
        if (drift > 1e-6) throw NumericsError("evolve_branch: norm drift exceeds 1e-6");
        if (edge_amplitude(state.samples) > 1e-8)
            throw DomainError("evolve_branch: wavefunction reached the box edge");

        if (on_step) on_step(state.t, x_axis, state.samples);
    }
    state.t = cfg.T;
    state.scalar_phase = scalar_sum.value();
    return state;
}

std::complex<double> overlap(const WavefunctionState& bra, const WavefunctionState& ket) {
    if (!bra.grid.same_layout(ket.grid)) throw ContractError("overlap: grid mismatch");
    if (std::abs(bra.t - ket.t) > 1e-12) throw ContractError("overlap: states at different times");
    std::complex<double> acc{0.0, 0.0};
    for (std::size_t j = 0; j < bra.samples.size(); ++j)
        acc += std::conj(bra.samples[j]) * ket.samples[j];
    acc *= bra.grid.dx();
    // The states are unit-norm by definition; dividing out the residual
    // roundoff drift keeps |O| <= 1 meaningful.
    acc /= bra.norm() * ket.norm();
    acc *= std::polar(1.0, ket.scalar_phase - bra.scalar_phase);
    if (std::abs(acc) > 1.0 + 1e-9) throw NumericsError("overlap: |O| exceeds 1");
    return acc;
}

WavefunctionState coherent_state_on_grid(std::complex<double> alpha, double center,
                                         const DynamicConfig& cfg, const Grid& grid) {
    cfg.validate();
    const double q = std::sqrt(2.0 / (cfg.m * cfg.omega)) * alpha.real();
    const double p = std::sqrt(2.0 * cfg.m * cfg.omega) * alpha.imag();
    const double mw = cfg.m * cfg.omega;

    WavefunctionState state;
    state.grid = grid;
    state.samples.resize(grid.n_points);
    for (int j = 0; j < grid.n_points; ++j) {
        const double y = grid.x(j) - center;
        state.samples[j] = std::polar(std::exp(-0.5 * mw * (y - q) * (y - q)), p * y);
    }
    normalize(state.samples, grid.dx());
    if (edge_amplitude(state.samples) > 1e-8)
        throw DomainError("coherent_state_on_grid: state does not fit the grid");
    return state;
}

std::vector<double> hermite_functions(int n_max, double xi) {
    std::vector<double> phi(static_cast<std::size_t>(n_max) + 1);
    const double phi0 = std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * xi * xi);
    phi[0] = phi0;
    if (n_max >= 1) phi[1] = std::numbers::sqrt2 * xi * phi0;
    for (int k = 1; k + 1 <= n_max; ++k)
        phi[k + 1] = std::sqrt(2.0 / (k + 1.0)) * xi * phi[k] - std::sqrt(k / (k + 1.0)) * phi[k - 1];
    return phi;
}

std::vector<std::complex<double>> project_instantaneous_basis(const WavefunctionState& state,
                                                              const DynamicConfig& cfg,
                                                              const TrajectorySpec& traj,
                                                              int n_max) {
    if (n_max < 0 || n_max > 60)
        throw ContractError("project_instantaneous_basis: n_max must be in [0, 60]");
    const double x_c = cfg.equilibrium_center() + traj.eval(state.t).d;
    const double mw = cfg.m * cfg.omega;
    const double scale = std::pow(mw, 0.25);

    std::vector<std::complex<double>> c(static_cast<std::size_t>(n_max) + 1, {0.0, 0.0});
    const int n = state.grid.n_points;
    for (int j = 0; j < n; ++j) {
        const double xi = std::sqrt(mw) * (state.grid.x(j) - x_c);
        const std::vector<double> phi = hermite_functions(n_max, xi);
        for (int k = 0; k <= n_max; ++k) c[k] += scale * phi[k] * state.samples[j];
    }
    const double dx = state.grid.dx();
    double captured = 0.0;
    for (auto& v : c) {
        v *= dx;
        captured += std::norm(v);
    }
    if (captured < 1.0 - 1e-4)
        throw NumericsError("project_instantaneous_basis: n_max too small for this state");
    return c;
}

WavefunctionState analytic_branch_state(const DynamicConfig& cfg, const TrajectorySpec& traj,
                                        const BranchState& branch, const Grid& grid) {
    const double T = traj.duration();
    const PathPoint end = traj.eval(T);
    const double x_s = cfg.equilibrium_center() + end.d;
    const double p = cfg.m * (end.d_dot + branch.q_dot);
    const double mw = cfg.m * cfg.omega;
    const double total_phase = branch.phi0_tilde - 0.5 * cfg.omega * T + branch.gamma_phase;

    WavefunctionState state;
    state.grid = grid;
    state.t = T;
    state.samples.resize(grid.n_points);
    for (int j = 0; j < grid.n_points; ++j) {
        const double x = grid.x(j);
        const double y = x - x_s - branch.q;
        state.samples[j] = std::polar(std::exp(-0.5 * mw * y * y), total_phase + p * (x - x_s));
    }
    normalize(state.samples, grid.dx());
    return state;
}

Grid make_default_grid(const DynamicConfig& cfg, const PathPair& pair, double solver_tol) {
    const BranchState up = solve_branch(cfg, pair.up(), solver_tol);
    const BranchState down = solve_branch(cfg, pair.down(), solver_tol);
    const double width = 1.0 / std::sqrt(2.0 * cfg.m * cfg.omega);
    const double half = std::max(max_abs_d(pair.up()), max_abs_d(pair.down())) +
                        std::max(up.max_abs_q, down.max_abs_q) + 10.0 * width;
    const double center = cfg.equilibrium_center();
    return Grid(center - half, center + half, 2048, 5e-4 / cfg.omega);
}

Grid make_default_grid(const DynamicConfig& cfg, const TrajectorySpec& traj, double solver_tol) {
    const BranchState b = solve_branch(cfg, traj, solver_tol);
    const double width = 1.0 / std::sqrt(2.0 * cfg.m * cfg.omega);
    const double half = max_abs_d(traj) + b.max_abs_q + 10.0 * width;
    const double center = cfg.equilibrium_center();
    return Grid(center - half, center + half, 2048, 5e-4 / cfg.omega);
}

OracleComparison compare_oracle(const DynamicConfig& cfg, const PathPair& pair,
                                const Grid& grid, double solver_tol) {
    const BranchState up = solve_branch(cfg, pair.up(), solver_tol);
    const BranchState down = solve_branch(cfg, pair.down(), solver_tol);
    const InterferenceResult res = interference(up, down);

    const WavefunctionState num_up = evolve_branch(cfg, pair.up(), grid, EvolutionMode::CompletedSquare);
    const WavefunctionState num_down =
        evolve_branch(cfg, pair.down(), grid, EvolutionMode::CompletedSquare);
    const WavefunctionState ana_up = analytic_branch_state(cfg, pair.up(), up, grid);
    const WavefunctionState ana_down = analytic_branch_state(cfg, pair.down(), down, grid);

    OracleComparison cmp;
    const std::complex<double> ov_up = overlap(ana_up, num_up);
    const std::complex<double> ov_down = overlap(ana_down, num_down);
    cmp.fidelity_up = std::abs(ov_up);
    cmp.fidelity_down = std::abs(ov_down);
    cmp.phase_error_up = std::abs(std::arg(ov_up));
    cmp.phase_error_down = std::abs(std::arg(ov_down));
    cmp.overlap_numeric = overlap(num_down, num_up);
    cmp.overlap_analytic = std::polar(1.0, res.delta_phi) * res.B;
    cmp.overlap_abs_error = std::abs(cmp.overlap_numeric - cmp.overlap_analytic);
    cmp.norm_drift_up = num_up.norm_drift;
    cmp.norm_drift_down = num_down.norm_drift;
    cmp.p_up_numeric = 0.5 * (1.0 - cmp.overlap_numeric.real());
    return cmp;
}

ModeComparison compare_modes(const DynamicConfig& cfg, const TrajectorySpec& traj, const Grid& grid) {
    const WavefunctionState cs = evolve_branch(cfg, traj, grid, EvolutionMode::CompletedSquare);
    const WavefunctionState orig = evolve_branch(cfg, traj, grid, EvolutionMode::Original);

    // Completing the square drops the constant gamma x0 - gamma^2/(2 m w^2),
    // so psi_orig = exp(-i dropped T) psi_cs and <orig|cs> = exp(+i dropped T).
    const double dropped = cfg.gamma * cfg.x0 -
                           cfg.gamma * cfg.gamma / (2.0 * cfg.m * cfg.omega * cfg.omega);
    std::complex<double> ov = overlap(orig, cs);
    ov *= std::polar(1.0, -dropped * cfg.T);

    ModeComparison mc;
    mc.fidelity = std::abs(ov);
    mc.phase_error = std::abs(std::arg(ov));
    return mc;
}

}  // namespace loopsim
