#include "loopsim/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "loopsim/errors.hpp"
#include "loopsim/quadrature.hpp"
#include "loopsim/rng.hpp"

namespace loopsim {

namespace {

// Quintic smoothstep 10u^3 - 15u^4 + 6u^5 and derivatives.
inline double smoothstep(double u) { return u * u * u * (10.0 + u * (-15.0 + 6.0 * u)); }
inline double smoothstep_d1(double u) {
    const double w = u * (1.0 - u);
    return 30.0 * w * w;
}
inline double smoothstep_d2(double u) { return 60.0 * u * (1.0 - u) * (1.0 - 2.0 * u); }

PathPoint eval_quintic(const QuinticBumpHold& f, double T, double t) {
    if (t <= f.tau_r) {
        const double u = t / f.tau_r;
        return {f.D * smoothstep(u), f.D * smoothstep_d1(u) / f.tau_r,
                f.D * smoothstep_d2(u) / (f.tau_r * f.tau_r)};
    }
    if (t >= T - f.tau_r) {
        const double v = (T - t) / f.tau_r;
        return {f.D * smoothstep(v), -f.D * smoothstep_d1(v) / f.tau_r,
                f.D * smoothstep_d2(v) / (f.tau_r * f.tau_r)};
    }
    return {f.D, 0.0, 0.0};
}

PathPoint eval_sine4(const SineFourthBump& f, double T, double t) {
    const double c = std::numbers::pi / T;
    const double s = std::sin(c * t);
    const double co = std::cos(c * t);
    const double s2 = s * s;
    return {f.D * s2 * s2, 4.0 * f.D * c * s2 * s * co,
            4.0 * f.D * c * c * s2 * (3.0 * co * co - s2)};
}

// Quintic Hermite basis on u in [0, 1]: matches (value, slope, curvature) at
// both interval ends.
struct QuinticBasis {
    double A, B, C, D, E, F;
    double dA, dB, dC, dD, dE, dF;
    double d2A, d2B, d2C, d2D, d2E, d2F;
};

QuinticBasis quintic_basis(double u) {
    const double u2 = u * u, u3 = u2 * u, u4 = u3 * u, u5 = u4 * u;
    QuinticBasis b{};
    b.A = 1.0 - 10.0 * u3 + 15.0 * u4 - 6.0 * u5;
    b.B = u - 6.0 * u3 + 8.0 * u4 - 3.0 * u5;
    b.C = 0.5 * (u2 - 3.0 * u3 + 3.0 * u4 - u5);
    b.D = 10.0 * u3 - 15.0 * u4 + 6.0 * u5;
    b.E = -4.0 * u3 + 7.0 * u4 - 3.0 * u5;
    b.F = 0.5 * (u3 - 2.0 * u4 + u5);
    b.dA = -30.0 * u2 + 60.0 * u3 - 30.0 * u4;
    b.dB = 1.0 - 18.0 * u2 + 32.0 * u3 - 15.0 * u4;
    b.dC = 0.5 * (2.0 * u - 9.0 * u2 + 12.0 * u3 - 5.0 * u4);
    b.dD = 30.0 * u2 - 60.0 * u3 + 30.0 * u4;
    b.dE = -12.0 * u2 + 28.0 * u3 - 15.0 * u4;
    b.dF = 0.5 * (3.0 * u2 - 8.0 * u3 + 5.0 * u4);
    b.d2A = -60.0 * u + 180.0 * u2 - 120.0 * u3;
    b.d2B = -36.0 * u + 96.0 * u2 - 60.0 * u3;
    b.d2C = 0.5 * (2.0 - 18.0 * u + 36.0 * u2 - 20.0 * u3);
    b.d2D = 60.0 * u - 180.0 * u2 + 120.0 * u3;
    b.d2E = -24.0 * u + 84.0 * u2 - 60.0 * u3;
    b.d2F = 0.5 * (6.0 * u - 24.0 * u2 + 20.0 * u3);
    return b;
}

}  // namespace

TrajectorySpec::TrajectorySpec(QuinticBumpHold f, double T) : family_(f), T_(T) {
    if (!(T > 0.0) || !std::isfinite(T)) throw ValidationError("trajectory: T must be positive and finite");
    if (!std::isfinite(f.D)) throw ValidationError("trajectory: D must be finite");
    if (f.D != 0.0 && !(f.tau_r > 0.0 && 2.0 * f.tau_r <= T))
        throw ValidationError("trajectory: quintic ramp requires 0 < 2*tau_r <= T");
    if (f.D == 0.0 && !(f.tau_r > 0.0 && 2.0 * f.tau_r <= T)) {
        // Zero path: any legal ramp works, pick one so eval stays defined.
        std::get<QuinticBumpHold>(family_).tau_r = T / 4.0;
    }
}

TrajectorySpec::TrajectorySpec(SineFourthBump f, double T) : family_(f), T_(T) {
    if (!(T > 0.0) || !std::isfinite(T)) throw ValidationError("trajectory: T must be positive and finite");
    if (!std::isfinite(f.D)) throw ValidationError("trajectory: D must be finite");
}

TrajectorySpec::TrajectorySpec(SampledSpline f, double T) : family_(std::move(f)), T_(T) {
    if (!(T > 0.0) || !std::isfinite(T)) throw ValidationError("trajectory: T must be positive and finite");
    const auto& knots = std::get<SampledSpline>(family_).knots;
    if (knots.size() < 2) throw ValidationError("spline: need at least two knots");
    for (const auto& [t, y] : knots)
        if (!std::isfinite(t) || !std::isfinite(y)) throw ValidationError("spline: non-finite knot");
    for (std::size_t i = 0; i + 1 < knots.size(); ++i)
        if (!(knots[i].first < knots[i + 1].first))
            throw ValidationError("spline: knot times must be strictly increasing");
    const double scale = std::max(T, 1.0);
    if (std::abs(knots.front().first) > 1e-12 * scale || std::abs(knots.back().first - T) > 1e-12 * scale)
        throw ValidationError("spline: knots must span [0, T]");
    if (std::abs(knots.front().second) > 1e-12 || std::abs(knots.back().second) > 1e-12)
        throw ValidationError("spline: endpoint values must be zero");

    const std::size_t K = knots.size();
    knot_slope_.assign(K, 0.0);
    knot_curv_.assign(K, 0.0);
    for (std::size_t i = 1; i + 1 < K; ++i) {
        const double h0 = knots[i].first - knots[i - 1].first;
        const double h1 = knots[i + 1].first - knots[i].first;
        const double d0 = (knots[i].second - knots[i - 1].second) / h0;
        const double d1 = (knots[i + 1].second - knots[i].second) / h1;
        knot_slope_[i] = (h1 * d0 + h0 * d1) / (h0 + h1);
        knot_curv_[i] = 2.0 * (d1 - d0) / (h0 + h1);
    }
}

std::string TrajectorySpec::family_name() const {
    return std::visit(
        [](const auto& f) -> std::string {
            using F = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<F, QuinticBumpHold>) return "quintic_bump_hold";
            if constexpr (std::is_same_v<F, SineFourthBump>) return "sine_fourth_bump";
            return "sampled_spline";
        },
        family_);
}

PathPoint TrajectorySpec::eval(double t) const {
    if (t < 0.0 || t > T_) return {};
    return std::visit(
        [&](const auto& f) -> PathPoint {
            using F = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<F, QuinticBumpHold>) {
                return eval_quintic(f, T_, t);
            } else if constexpr (std::is_same_v<F, SineFourthBump>) {
                return eval_sine4(f, T_, t);
            } else {
                const auto& knots = f.knots;
                auto it = std::upper_bound(knots.begin(), knots.end(), t,
                                           [](double v, const auto& k) { return v < k.first; });
                std::size_t i = it == knots.begin() ? 0 : static_cast<std::size_t>(it - knots.begin()) - 1;
                if (i + 1 >= knots.size()) i = knots.size() - 2;
                const double h = knots[i + 1].first - knots[i].first;
                const double u = (t - knots[i].first) / h;
                const QuinticBasis b = quintic_basis(u);
                const double ya = knots[i].second, yb = knots[i + 1].second;
                const double ma = knot_slope_[i], mb = knot_slope_[i + 1];
                const double sa = knot_curv_[i], sb = knot_curv_[i + 1];
                PathPoint p;
                p.d = ya * b.A + ma * h * b.B + sa * h * h * b.C + yb * b.D + mb * h * b.E + sb * h * h * b.F;
                p.d_dot = (ya * b.dA + ma * h * b.dB + sa * h * h * b.dC + yb * b.dD + mb * h * b.dE +
                           sb * h * h * b.dF) /
                          h;
                p.d_ddot = (ya * b.d2A + ma * h * b.d2B + sa * h * h * b.d2C + yb * b.d2D + mb * h * b.d2E +
                            sb * h * h * b.d2F) /
                           (h * h);
                return p;
            }
        },
        family_);
}

std::vector<double> TrajectorySpec::breakpoints() const {
    return std::visit(
        [&](const auto& f) -> std::vector<double> {
            using F = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<F, QuinticBumpHold>) {
                if (2.0 * f.tau_r >= T_) return {0.0, f.tau_r, T_};
                return {0.0, f.tau_r, T_ - f.tau_r, T_};
            } else if constexpr (std::is_same_v<F, SineFourthBump>) {
                return {0.0, T_};
            } else {
                std::vector<double> b;
                b.reserve(f.knots.size());
                for (const auto& [t, y] : f.knots) b.push_back(t);
                b.front() = 0.0;
                b.back() = T_;
                return b;
            }
        },
        family_);
}

PathPair::PathPair(TrajectorySpec up, TrajectorySpec down)
    : up_(std::move(up)), down_(std::move(down)) {
    if (up_.duration() != down_.duration())
        throw ValidationError("path pair: branches must share the same T");
}

namespace {

// Merged breakpoint list of both branches, for integrands of (d_up - d_down).
std::vector<double> merged_breakpoints(const PathPair& pair) {
    std::vector<double> b = pair.up().breakpoints();
    const std::vector<double> b2 = pair.down().breakpoints();
    b.insert(b.end(), b2.begin(), b2.end());
    std::sort(b.begin(), b.end());
    b.erase(std::unique(b.begin(), b.end(),
                        [](double x, double y) { return std::abs(x - y) < 1e-14; }),
            b.end());
    return b;
}

struct Extremum {
    double t;
    double value;
};

// Extreme value of f over [0, T], by per-segment dense sampling plus
// golden-section refinement around every local maximum.
Extremum max_over_path(const TrajectorySpec& traj, const std::function<double(double)>& f) {
    Extremum best{0.0, f(0.0)};
    const std::vector<double> brk = traj.breakpoints();
    constexpr int samples = 256;
    for (std::size_t s = 0; s + 1 < brk.size(); ++s) {
        const double a = brk[s], b = brk[s + 1];
        if (b <= a) continue;
        const double h = (b - a) / samples;
        double prev2 = f(a), prev1 = f(a + h);
        if (prev2 > best.value) best = {a, prev2};
        for (int i = 2; i <= samples; ++i) {
            const double cur = f(a + i * h);
            if (prev1 >= prev2 && prev1 >= cur) {
                const double lo = a + (i - 2) * h;
                const double hi = a + i * h;
                const double t_star = golden_section_max(f, lo, hi, 1e-10);
                const double v = f(t_star);
                if (v > best.value) best = {t_star, v};
            }
            prev2 = prev1;
            prev1 = cur;
        }
        if (prev1 > best.value) best = {b, prev1};
    }
    return best;
}

}  // namespace

ValidationReport validate(const PathPair& pair, double x0) {
    ValidationReport report;
    const double T = pair.duration();

    auto endpoint_checks = [&](const TrajectorySpec& traj, const char* tag) {
        for (double t : {0.0, T}) {
            const PathPoint p = traj.eval(t);
            if (std::abs(p.d) > 1e-12)
                report.issues.push_back({std::string(tag) + ": d(endpoint) != 0", t, p.d});
            if (std::abs(p.d_dot) > 1e-12)
                report.issues.push_back({std::string(tag) + ": d_dot(endpoint) != 0", t, p.d_dot});
            if (std::abs(p.d_ddot) > 1e-12)
                report.issues.push_back({std::string(tag) + ": d_ddot(endpoint) != 0", t, p.d_ddot});
        }
    };
    endpoint_checks(pair.up(), "up");
    endpoint_checks(pair.down(), "down");

    const Extremum up_min =
        max_over_path(pair.up(), [&](double t) { return -pair.up().eval(t).d; });
    if (up_min.value > 1e-12)
        report.issues.push_back({"d_up >= 0", up_min.t, -up_min.value});

    const Extremum down_max =
        max_over_path(pair.down(), [&](double t) { return pair.down().eval(t).d; });
    if (down_max.value > 1e-12)
        report.issues.push_back({"d_down <= 0", down_max.t, down_max.value});

    const Extremum down_mag =
        max_over_path(pair.down(), [&](double t) { return std::abs(pair.down().eval(t).d); });
    if (!(down_mag.value < x0))
        report.issues.push_back({"|d_down| < x0", down_mag.t, down_mag.value});

    return report;
}

double path_integral(const TrajectorySpec& traj, double tol) {
    return integrate_piecewise([&](double t) { return traj.eval(t).d; },
                               traj.breakpoints(), tol)
        .value;
}

double enclosed_area(const PathPair& pair, double tol) {
    return integrate_piecewise(
               [&](double t) { return pair.up().eval(t).d - pair.down().eval(t).d; },
               merged_breakpoints(pair), tol)
        .value;
}

double max_acceleration(const TrajectorySpec& traj) {
    return max_over_path(traj, [&](double t) { return std::abs(traj.eval(t).d_ddot); }).value;
}

std::vector<PathPair> equal_area_family(double A_target, double x0, double T,
                                        int n, std::uint64_t seed) {
    if (n < 1) throw ContractError("equal_area_family: n must be >= 1");
    if (!(A_target >= 0.0)) throw ContractError("equal_area_family: A_target must be >= 0");
    if (!(x0 > 0.0) || !(T > 0.0)) throw ContractError("equal_area_family: x0 and T must be positive");

    // The generator assigns the down branch a share in [0.35, 0.65] of the
    // total area; the widest usable shape is a quintic with tau_r = T/10,
    // whose area per unit amplitude is 0.9 T. Anything needing more
    // amplitude than x0 on the down branch is unreachable.
    const double min_required_down_amp = 0.35 * A_target / (0.9 * T);
    if (!(min_required_down_amp < 0.999 * x0))
        throw ValidationError("equal_area_family: A_target infeasible under |d_down| < x0");

    std::vector<PathPair> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const CounterRng rng(seed, static_cast<std::uint64_t>(i));
        int kind_up = i % 2;
        int kind_down = (i / 2) % 2;
        double share_down = 0.35 + 0.30 * rng.uniform01(1);
        double tau_up = T * (0.10 + 0.30 * rng.uniform01(2));
        double tau_down = T * (0.10 + 0.30 * rng.uniform01(3));

        const double unit_up = kind_up == 0 ? (T - tau_up) : 0.375 * T;
        double unit_down = kind_down == 0 ? (T - tau_down) : 0.375 * T;

        if (A_target > 0.0) {
            double max_share = 0.999 * x0 * unit_down / A_target;
            if (max_share < 0.35) {
                // This pair's drawn down-shape is too narrow; fall back to the
                // widest quintic before declaring the target infeasible.
                kind_down = 0;
                tau_down = 0.10 * T;
                unit_down = 0.9 * T;
                max_share = 0.999 * x0 * unit_down / A_target;
                if (max_share < 0.35)
                    throw ValidationError("equal_area_family: A_target infeasible under |d_down| < x0");
            }
            share_down = std::min({share_down, 0.65, max_share});
        }

        const double area_up = (1.0 - share_down) * A_target;
        const double area_down = share_down * A_target;
        const double D_up = area_up / unit_up;
        const double D_down = -area_down / unit_down;

        TrajectorySpec up = kind_up == 0
                                ? TrajectorySpec(QuinticBumpHold{D_up, tau_up}, T)
                                : TrajectorySpec(SineFourthBump{D_up}, T);
        TrajectorySpec down = kind_down == 0
                                  ? TrajectorySpec(QuinticBumpHold{D_down, tau_down}, T)
                                  : TrajectorySpec(SineFourthBump{D_down}, T);
        out.emplace_back(std::move(up), std::move(down));
    }
    return out;
}

}  // namespace loopsim
