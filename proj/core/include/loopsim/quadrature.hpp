#pragma once

#include <functional>
#include <vector>

namespace loopsim {

struct QuadResult {
    double value = 0.0;        ///< Richardson-extrapolated integral
    double error_bound = 0.0;  ///< |S_k - S_{k-1}| / 15 at convergence
    int levels = 0;            ///< dyadic refinements performed
};

/// Composite Simpson with dyadic refinement. Refines until the Richardson
/// error estimate |S_k - S_{k-1}|/15 drops below tol (absolute); throws
/// NumericsError if max_levels is exhausted first.
QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     double tol = 1e-10, int max_levels = 24);

/// Same contract, but integrates piecewise between the given ascending
/// breakpoints so that integrands with interior derivative kinks still
/// converge at full order. The tolerance is apportioned per piece by length.
QuadResult integrate_piecewise(const std::function<double(double)>& f,
                               const std::vector<double>& breakpoints,
                               double tol = 1e-10, int max_levels = 24);

/// Golden-section search for the maximum of a unimodal f on [a, b];
/// rel_tol applies to the bracket width. Returns the abscissa.
double golden_section_max(const std::function<double(double)>& f, double a,
                          double b, double rel_tol = 1e-8);

/// Kahan compensated accumulator for long phase/norm sums.
class KahanSum {
public:
    void add(double x) {
        double y = x - c_;
        double t = s_ + y;
        c_ = (t - s_) - y;
        s_ = t;
    }
    double value() const { return s_; }

private:
    double s_ = 0.0;
    double c_ = 0.0;
};

}  // namespace loopsim
