#include "loopsim/quadrature.hpp"

#include <cmath>
#include <cstdint>

#include "loopsim/errors.hpp"

namespace loopsim {

QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     double tol, int max_levels) {
    if (!(b >= a)) throw ContractError("integrate: b < a");
    if (!(tol > 0.0)) throw ContractError("integrate: tol must be positive");
    if (a == b) return {0.0, 0.0, 0};

    // Trapezoid ladder; Simpson via the usual (4 T_{k+1} - T_k)/3 combination.
    const int n0 = 8;
    const double h0 = (b - a) / n0;
    KahanSum t0;
    t0.add(0.5 * f(a));
    t0.add(0.5 * f(b));
    for (int i = 1; i < n0; ++i) t0.add(f(a + i * h0));
    double trap_prev = t0.value() * h0;

    double simpson_prev = 0.0;
    bool have_prev = false;
    std::int64_t n = n0;
    for (int level = 1; level <= max_levels; ++level) {
        const double h = (b - a) / (2.0 * static_cast<double>(n));
        KahanSum mids;
        for (std::int64_t i = 0; i < n; ++i)
            mids.add(f(a + (2.0 * static_cast<double>(i) + 1.0) * h));
        const double trap = 0.5 * trap_prev + mids.value() * h;
        const double simpson = (4.0 * trap - trap_prev) / 3.0;
        if (have_prev) {
            const double err = std::abs(simpson - simpson_prev) / 15.0;
            if (err <= tol) {
                // One more Richardson step: the returned value is 6th-order.
                return {simpson + (simpson - simpson_prev) / 15.0, err, level};
            }
        }
        simpson_prev = simpson;
        have_prev = true;
        trap_prev = trap;
        n *= 2;
    }
    throw NumericsError("integrate: tolerance not reached within max refinement levels");
}

QuadResult integrate_piecewise(const std::function<double(double)>& f,
                               const std::vector<double>& breakpoints,
                               double tol, int max_levels) {
    if (breakpoints.size() < 2) throw ContractError("integrate_piecewise: need at least two breakpoints");
    const double total = breakpoints.back() - breakpoints.front();
    if (!(total >= 0.0)) throw ContractError("integrate_piecewise: breakpoints must ascend");

    QuadResult out;
    KahanSum value, error;
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
        const double a = breakpoints[i];
        const double b = breakpoints[i + 1];
        if (!(b >= a)) throw ContractError("integrate_piecewise: breakpoints must ascend");
        if (b == a) continue;
        const double piece_tol = total > 0.0 ? tol * (b - a) / total : tol;
        QuadResult r = integrate(f, a, b, piece_tol, max_levels);
        value.add(r.value);
        error.add(r.error_bound);
        out.levels = std::max(out.levels, r.levels);
    }
    out.value = value.value();
    out.error_bound = error.value();
    return out;
}

double golden_section_max(const std::function<double(double)>& f, double a,
                          double b, double rel_tol) {
    if (!(b >= a)) throw ContractError("golden_section_max: b < a");
    constexpr double inv_phi = 0.6180339887498949;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1);
    double f2 = f(x2);
    const double scale = std::max({std::abs(a), std::abs(b), 1.0});
    while (b - a > rel_tol * scale) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        }
    }
    return 0.5 * (a + b);
}

}  // namespace loopsim
