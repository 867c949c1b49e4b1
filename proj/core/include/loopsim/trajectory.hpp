#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace loopsim {

/// Quintic-smoothstep ramp to amplitude D over tau_r, hold, symmetric ramp
/// back. Lowest-degree polynomial ramp whose value, slope and curvature all
/// vanish at both ends.
struct QuinticBumpHold {
    double D = 0.0;
    double tau_r = 0.0;
};

/// d(t) = D sin^4(pi t / T); a single smooth bump with no hold.
struct SineFourthBump {
    double D = 0.0;
};

/// Clamped quintic Hermite interpolation of (t, d) knots. First and second
/// derivatives are pinned to zero at both end knots; interior derivatives are
/// parabolic finite-difference estimates, so the curve is C^2 everywhere.
struct SampledSpline {
    std::vector<std::pair<double, double>> knots;
};

struct PathPoint {
    double d = 0.0;
    double d_dot = 0.0;
    double d_ddot = 0.0;
};

/// A branch displacement path d(t) on [0, T], evaluable with analytic first
/// and second derivatives. Construction validates structural parameters
/// (ramp bounds, knot monotonicity); sign/bound physics checks live in
/// validate().
class TrajectorySpec {
public:
    using Family = std::variant<QuinticBumpHold, SineFourthBump, SampledSpline>;

    TrajectorySpec(QuinticBumpHold f, double T);
    TrajectorySpec(SineFourthBump f, double T);
    TrajectorySpec(SampledSpline f, double T);

    static TrajectorySpec zero(double T) { return TrajectorySpec(QuinticBumpHold{0.0, T / 4.0}, T); }

    double duration() const { return T_; }
    const Family& family() const { return family_; }
    std::string family_name() const;

    /// (d, d_dot, d_ddot) at t; identically zero outside [0, T].
    PathPoint eval(double t) const;

    /// Ascending times (including 0 and T) between which the path is smooth.
    std::vector<double> breakpoints() const;

private:
    Family family_;
    double T_;
    // SampledSpline only: per-knot derivative estimates, clamped at the ends.
    std::vector<double> knot_slope_, knot_curv_;
};

/// The two branch paths of one interference experiment; shares a single T.
class PathPair {
public:
    PathPair(TrajectorySpec up, TrajectorySpec down);

    const TrajectorySpec& up() const { return up_; }
    const TrajectorySpec& down() const { return down_; }
    double duration() const { return up_.duration(); }

private:
    TrajectorySpec up_;
    TrajectorySpec down_;
};

struct ValidationIssue {
    std::string constraint;  ///< which invariant failed, e.g. "d_up >= 0"
    double t = 0.0;          ///< offending time
    double value = 0.0;      ///< offending value
};

struct ValidationReport {
    std::vector<ValidationIssue> issues;
    bool valid() const { return issues.empty(); }
};

/// Checks sign conditions (d_up >= 0, d_down <= 0), the |d_down| < x0 bound,
/// and endpoint smoothness of both branches. Problems are report entries,
/// never exceptions.
ValidationReport validate(const PathPair& pair, double x0);

/// Integral of d over [0, T] by piecewise composite Simpson.
double path_integral(const TrajectorySpec& traj, double tol = 1e-10);

/// Enclosed spacetime area A = integral of (d_up - d_down) dt.
double enclosed_area(const PathPair& pair, double tol = 1e-10);

/// max over [0, T] of |d_ddot|, by dense sampling plus golden-section
/// refinement; relative accuracy better than 1e-6.
double max_acceleration(const TrajectorySpec& traj);

/// n valid pairs of visibly different shape, all with enclosed area A_target
/// (to 1e-9) under |d_down| < x0. Deterministic under seed. Throws
/// ValidationError when A_target is not achievable within the family's
/// down-branch share bounds.
std::vector<PathPair> equal_area_family(double A_target, double x0, double T,
                                        int n, std::uint64_t seed);

}  // namespace loopsim
