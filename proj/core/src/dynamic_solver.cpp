#include "loopsim/dynamic_solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>

#include "loopsim/errors.hpp"
#include "loopsim/quadrature.hpp"
#include "loopsim/static_interferometer.hpp"

namespace loopsim {

void DynamicConfig::validate() const {
    if (!(m > 0.0)) throw ValidationError("dynamic config: m must be > 0");
    if (!(omega > 0.0)) throw ValidationError("dynamic config: omega must be > 0");
    if (!(gamma >= 0.0)) throw ValidationError("dynamic config: gamma must be >= 0");
    if (!(T > 0.0)) throw ValidationError("dynamic config: T must be > 0");
    if (!(x0 > gamma / (m * omega * omega)))
        throw ValidationError("dynamic config: x0 must exceed gamma/(m omega^2)");
}

namespace {

// c-number drive term produced by completing the square:
// f = G x0 - G^2 / (2 m omega^2) with G = -m omega^2 d.
inline double f_term(const DynamicConfig& cfg, double d) {
    const double mw2 = cfg.m * cfg.omega * cfg.omega;
    return -mw2 * cfg.x0 * d - 0.5 * mw2 * d * d;
}

inline std::complex<double> coherent_amp(const DynamicConfig& cfg, double q, double ddot_plus_qdot) {
    const double re = std::sqrt(0.5 * cfg.m * cfg.omega) * q;
    const double im = cfg.m * ddot_plus_qdot / std::sqrt(2.0 * cfg.m * cfg.omega);
    return {re, im};
}

// Uniform-per-segment node grid; segment boundaries are exact nodes so every
// integrand is smooth inside each interval.
struct UnionGrid {
    std::vector<double> nodes;
    std::vector<std::size_t> segment_start;  // node index of each segment start, plus end sentinel
};

UnionGrid build_union_grid(const std::vector<double>& breaks, int target_intervals) {
    UnionGrid g;
    const double T = breaks.back();
    g.nodes.push_back(breaks.front());
    for (std::size_t s = 0; s + 1 < breaks.size(); ++s) {
        g.segment_start.push_back(g.nodes.size() - 1);
        const double a = breaks[s], b = breaks[s + 1];
        const double len = b - a;
        if (len <= 0.0) continue;
        int n = std::max<int>(2, static_cast<int>(std::llround(target_intervals * len / T)));
        if (n % 2) ++n;
        for (int i = 1; i <= n; ++i)
            g.nodes.push_back(i == n ? b : a + len * static_cast<double>(i) / n);
    }
    g.segment_start.push_back(g.nodes.size() - 1);
    return g;
}

struct PassResult {
    double q_T = 0.0, q_dot_T = 0.0;
    double int_f = 0.0, int_ddot2 = 0.0, int_qq = 0.0, int_d = 0.0;
    double max_abs_q = 0.0;
    std::vector<double> t, q, q_dot;  // filled only when a trace is requested
};

PassResult run_pass(const DynamicConfig& cfg, const TrajectorySpec& traj,
                    const UnionGrid& grid, bool keep_trace) {
    const double w = cfg.omega;
    PassResult out;
    const std::size_t n_nodes = grid.nodes.size();

    std::vector<double> q(n_nodes, 0.0), q_dot(n_nodes, 0.0);
    KahanSum C, S, If, Idd2, Id;

    PathPoint left = traj.eval(grid.nodes[0]);
    for (std::size_t j = 1; j < n_nodes; ++j) {
        const double t0 = grid.nodes[j - 1], t1 = grid.nodes[j];
        const double h = t1 - t0;
        const double tm = 0.5 * (t0 + t1);
        const PathPoint mid = traj.eval(tm);
        const PathPoint right = traj.eval(t1);

        // Simpson over [t0, t1] with the interval midpoint; integrands are
        // analytic inside the segment.
        C.add(h / 6.0 * (std::cos(w * t0) * left.d_ddot + 4.0 * std::cos(w * tm) * mid.d_ddot +
                         std::cos(w * t1) * right.d_ddot));
        S.add(h / 6.0 * (std::sin(w * t0) * left.d_ddot + 4.0 * std::sin(w * tm) * mid.d_ddot +
                         std::sin(w * t1) * right.d_ddot));
        If.add(h / 6.0 * (f_term(cfg, left.d) + 4.0 * f_term(cfg, mid.d) + f_term(cfg, right.d)));
        Idd2.add(h / 6.0 *
                 (left.d_dot * left.d_dot + 4.0 * mid.d_dot * mid.d_dot + right.d_dot * right.d_dot));
        Id.add(h / 6.0 * (left.d + 4.0 * mid.d + right.d));

        const double sw = std::sin(w * t1), cw = std::cos(w * t1);
        q[j] = -(sw * C.value() - cw * S.value()) / w;
        q_dot[j] = -(cw * C.value() + sw * S.value());
        out.max_abs_q = std::max(out.max_abs_q, std::abs(q[j]));

        left = right;
    }

    // integral of (q_dot^2 - omega^2 q^2): composite Simpson per segment over
    // the same nodes the convolution produced.
    KahanSum Iqq;
    for (std::size_t s = 0; s + 1 < grid.segment_start.size(); ++s) {
        const std::size_t a = grid.segment_start[s], b = grid.segment_start[s + 1];
        if (b <= a) continue;
        const std::size_t n = b - a;  // even by construction
        const double h = (grid.nodes[b] - grid.nodes[a]) / static_cast<double>(n);
        auto integrand = [&](std::size_t j) { return q_dot[j] * q_dot[j] - w * w * q[j] * q[j]; };
        KahanSum seg;
        seg.add(integrand(a));
        seg.add(integrand(b));
        for (std::size_t j = a + 1; j < b; ++j) seg.add(((j - a) % 2 ? 4.0 : 2.0) * integrand(j));
        Iqq.add(seg.value() * h / 3.0);
    }

    out.q_T = q.back();
    out.q_dot_T = q_dot.back();
    out.int_f = If.value();
    out.int_ddot2 = Idd2.value();
    out.int_qq = Iqq.value();
    out.int_d = Id.value();
    if (keep_trace) {
        out.t = grid.nodes;
        out.q = std::move(q);
        out.q_dot = std::move(q_dot);
    }
    return out;
}

BranchState assemble_state(const DynamicConfig& cfg, const TrajectorySpec& traj,
                           double q_T, double q_dot_T, double int_f, double int_ddot2,
                           double int_qq, double d_integral, double max_abs_q) {
    const double T = traj.duration();
    const PathPoint end = traj.eval(T);
    BranchState st;
    st.q = q_T;
    st.q_dot = q_dot_T;
    st.d_dot_final = end.d_dot;
    st.alpha = coherent_amp(cfg, q_T, end.d_dot + q_dot_T);
    st.phi0_tilde = -int_f + 0.5 * cfg.m * int_ddot2 - 0.5 * cfg.m * int_qq;
    st.phi0 = st.phi0_tilde + 0.5 * cfg.m * (end.d_dot + q_dot_T) * q_T;
    st.d_integral = d_integral;
    st.gamma_phase = -cfg.gamma * d_integral;
    st.x_s_final = cfg.equilibrium_center() + end.d;
    st.f_integral = int_f;
    st.max_abs_q = max_abs_q;
    st.m = cfg.m;
    st.omega = cfg.omega;
    st.gamma = cfg.gamma;
    st.T = T;

    // Recompute the coherent amplitude from its definition as a consistency
    // check on the assembled record.
    const std::complex<double> recheck = coherent_amp(cfg, st.q, st.d_dot_final + st.q_dot);
    if (std::abs(recheck - st.alpha) > 1e-12 * std::max(1.0, std::abs(st.alpha)))
        throw NumericsError("solve_branch: alpha consistency recompute failed");
    return st;
}

void fill_trace(const DynamicConfig& cfg, const TrajectorySpec& traj,
                const PassResult& pass, BranchTrace* trace) {
    trace->t = pass.t;
    trace->q = pass.q;
    trace->q_dot = pass.q_dot;
    trace->alpha.resize(pass.t.size());
    for (std::size_t j = 0; j < pass.t.size(); ++j) {
        const PathPoint p = traj.eval(pass.t[j]);
        trace->alpha[j] = coherent_amp(cfg, pass.q[j], p.d_dot + pass.q_dot[j]);
    }
}

}  // namespace

BranchState solve_branch(const DynamicConfig& cfg, const TrajectorySpec& traj,
                         double tol, BranchTrace* trace) {
    cfg.validate();
    if (!(tol > 0.0)) throw ContractError("solve_branch: tol must be positive");
    if (traj.duration() != cfg.T)
        throw ContractError("solve_branch: trajectory duration differs from config T");

    const std::vector<double> breaks = traj.breakpoints();
    // Resolve the oscillator period from the start; the kernel oscillates at
    // omega regardless of how gentle the drive is.
    int target = 128;
    while (target < 16.0 * cfg.omega * cfg.T / std::numbers::pi && target < (1 << 14)) target *= 2;

    PassResult prev = run_pass(cfg, traj, build_union_grid(breaks, target), false);
    for (int level = 0; level < 16; ++level) {
        target *= 2;
        const bool last_chance = trace != nullptr;
        PassResult cur = run_pass(cfg, traj, build_union_grid(breaks, target), last_chance);
        const double diff = std::max({std::abs(cur.q_T - prev.q_T),
                                      std::abs(cur.q_dot_T - prev.q_dot_T),
                                      std::abs(cur.int_f - prev.int_f),
                                      std::abs(cur.int_ddot2 - prev.int_ddot2),
                                      std::abs(cur.int_qq - prev.int_qq),
                                      std::abs(cur.int_d - prev.int_d)});
        if (diff <= tol) {
            if (trace) fill_trace(cfg, traj, cur, trace);
            const double d_int = path_integral(traj, std::min(tol, 1e-10));
            return assemble_state(cfg, traj, cur.q_T, cur.q_dot_T, cur.int_f,
                                  cur.int_ddot2, cur.int_qq, d_int, cur.max_abs_q);
        }
        prev = std::move(cur);
    }
    throw NumericsError("solve_branch: quadrature did not converge to tol");
}

BranchState solve_branch_ode(const DynamicConfig& cfg, const TrajectorySpec& traj,
                             double dt, BranchTrace* trace) {
    cfg.validate();
    if (!(dt > 0.0) || dt > 0.1 / cfg.omega)
        throw ContractError("solve_branch_ode: require 0 < dt <= 0.1/omega");
    if (traj.duration() != cfg.T)
        throw ContractError("solve_branch_ode: trajectory duration differs from config T");

    const double w2 = cfg.omega * cfg.omega;

    // Mechanical state for the stepper; the phase integrals are accumulated
    // separately with compensation because they never feed back into the
    // equation of motion and can grow to thousands of radians.
    struct Y {
        double q, v;
    };
    struct Integrands {
        double f, dd2, qq, d;
    };
    auto rhs = [&](double t, const Y& y) -> Y {
        return {y.v, -w2 * y.q - traj.eval(t).d_ddot};
    };
    auto integrands_at = [&](double t, const Y& y) -> Integrands {
        const PathPoint p = traj.eval(t);
        return {f_term(cfg, p.d), p.d_dot * p.d_dot, y.v * y.v - w2 * y.q * y.q, p.d};
    };

    Y y{0, 0};
    KahanSum i_f, i_dd2, i_qq, i_d;
    double max_abs_q = 0.0;
    if (trace) {
        trace->t.clear();
        trace->q.clear();
        trace->q_dot.clear();
        trace->alpha.clear();
    }
    auto record = [&](double t, const Y& s) {
        max_abs_q = std::max(max_abs_q, std::abs(s.q));
        if (trace) {
            const PathPoint p = traj.eval(t);
            trace->t.push_back(t);
            trace->q.push_back(s.q);
            trace->q_dot.push_back(s.v);
            trace->alpha.push_back(coherent_amp(cfg, s.q, p.d_dot + s.v));
        }
    };
    record(0.0, y);
    // Step segment by segment so no RK4 stage straddles a ramp junction,
    // where the third derivative of d jumps.
    const std::vector<double> breaks = traj.breakpoints();
    for (std::size_t s = 0; s + 1 < breaks.size(); ++s) {
        const double a = breaks[s], b = breaks[s + 1];
        if (b <= a) continue;
        const long n_steps = std::max(1L, static_cast<long>(std::ceil((b - a) / dt - 1e-12)));
        const double h = (b - a) / static_cast<double>(n_steps);
        for (long i = 0; i < n_steps; ++i) {
            const double t = a + h * static_cast<double>(i);
            const Y k1 = rhs(t, y);
            const Y k2 = rhs(t + 0.5 * h, axpy(y, 0.5 * h, k1));
            const Y k3 = rhs(t + 0.5 * h, axpy(y, 0.5 * h, k2));
            const Y k4 = rhs(t + h, axpy(y, h, k3));
            y = {y.q + h / 6.0 * (k1.q + 2.0 * k2.q + 2.0 * k3.q + k4.q),
                 y.v + h / 6.0 * (k1.v + 2.0 * k2.v + 2.0 * k3.v + k4.v),
                 y.i_f + h / 6.0 * (k1.i_f + 2.0 * k2.i_f + 2.0 * k3.i_f + k4.i_f),
                 y.i_dd2 + h / 6.0 * (k1.i_dd2 + 2.0 * k2.i_dd2 + 2.0 * k3.i_dd2 + k4.i_dd2),
                 y.i_qq + h / 6.0 * (k1.i_qq + 2.0 * k2.i_qq + 2.0 * k3.i_qq + k4.i_qq),
                 y.i_d + h / 6.0 * (k1.i_d + 2.0 * k2.i_d + 2.0 * k3.i_d + k4.i_d)};
            record(i + 1 == n_steps ? b : t + h, y);
        }
    }
    return assemble_state(cfg, traj, y.q, y.v, y.i_f, y.i_dd2, y.i_qq, y.i_d, max_abs_q);
}

InterferenceResult interference(const BranchState& up, const BranchState& down) {
    if (up.m != down.m || up.omega != down.omega || up.gamma != down.gamma || up.T != down.T)
        throw ContractError("interference: branches were solved with different configs");

    InterferenceResult r;
    r.gamma = up.gamma;
    r.m = up.m;
    r.omega = up.omega;
    r.T = up.T;
    r.d_integral_up = up.d_integral;
    r.d_integral_down = down.d_integral;

    const double phi_up = up.phi0 + up.gamma_phase;
    const double phi_down = down.phi0 + down.gamma_phase;
    r.delta_phi = phi_up - phi_down;
    r.delta_phi_wrapped = wrap_phase(r.delta_phi);

    const std::complex<double> exponent =
        -0.5 * (std::norm(up.alpha) + std::norm(down.alpha)) + up.alpha * std::conj(down.alpha);
    r.B = std::exp(exponent);
    r.B0 = std::abs(r.B);
    r.delta = std::arg(r.B);
    r.visibility = r.B0;

    const std::complex<double> cross = std::polar(1.0, r.delta_phi) * r.B;
    r.p_up = 0.5 * (1.0 - cross.real());
    r.p_down = 0.5 * (1.0 + cross.real());
    return r;
}

double gamma_phase_difference(const InterferenceResult& at_gamma2,
                              const InterferenceResult& at_gamma1,
                              const PathPair& pair) {
    if (at_gamma2.m != at_gamma1.m || at_gamma2.omega != at_gamma1.omega ||
        at_gamma2.T != at_gamma1.T)
        throw ContractError("gamma_phase_difference: results come from different configs");

    const double i_up = path_integral(pair.up(), 1e-12);
    const double i_down = path_integral(pair.down(), 1e-12);
    const double scale = std::max({1.0, std::abs(i_up), std::abs(i_down)});
    for (const InterferenceResult* r : {&at_gamma2, &at_gamma1}) {
        if (std::abs(r->d_integral_up - i_up) > 1e-9 * scale ||
            std::abs(r->d_integral_down - i_down) > 1e-9 * scale)
            throw ContractError("gamma_phase_difference: results do not match the given pair");
    }
    return at_gamma2.delta_phi - at_gamma1.delta_phi;
}

AdiabaticityMargin adiabaticity_margin(const DynamicConfig& cfg, const PathPair& pair) {
    cfg.validate();
    const double a_max = std::max(max_acceleration(pair.up()), max_acceleration(pair.down()));
    AdiabaticityMargin m;
    m.margin = a_max * pair.duration() * std::sqrt(2.0 * cfg.m / cfg.omega);
    m.ok = m.margin < 0.1;
    return m;
}

}  // namespace loopsim
