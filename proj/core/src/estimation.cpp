#include "loopsim/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include "loopsim/errors.hpp"
#include "loopsim/quadrature.hpp"
#include "loopsim/rng.hpp"

namespace loopsim {

std::vector<MeasurementRecord> simulate_counts(const StaticConfig& cfg,
                                               const std::vector<PathPair>& pairs,
                                               std::uint64_t shots, std::uint64_t seed) {
    cfg.validate();
    if (shots < 1) throw ContractError("simulate_counts: shots must be >= 1");

    std::vector<MeasurementRecord> records;
    records.reserve(pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const ValidationReport v = validate(pairs[i], cfg.x0);
        if (!v.valid())
            throw ValidationError("simulate_counts: invalid pair: " + v.issues.front().constraint);
        MeasurementRecord rec;
        rec.area = enclosed_area(pairs[i]);
        rec.shots = shots;
        const double p_up = ramsey(evolve_static(cfg, pairs[i])).p_up;
        const CounterRng rng(seed, i);
        rec.ups = binomial_draw(rng, 0, shots, p_up);
        records.push_back(rec);
    }
    return records;
}

namespace {

double log_likelihood_at(const std::vector<MeasurementRecord>& records, double gamma,
                         double phi0) {
    constexpr double eps = 1e-12;
    KahanSum ll;
    for (const auto& r : records) {
        const double s = std::sin(0.5 * (gamma * r.area - phi0));
        const double p = std::clamp(s * s, eps, 1.0 - eps);
        ll.add(static_cast<double>(r.ups) * std::log(p));
        ll.add(static_cast<double>(r.shots - r.ups) * std::log1p(-p));
    }
    return ll.value();
}

}  // namespace

FitResult fit_string_tension(const std::vector<MeasurementRecord>& records,
                             std::pair<double, double> gamma_range,
                             int grid_points, double phi0) {
    if (records.empty()) throw ContractError("fit_string_tension: no records");
    if (records.size() < 2)
        throw ContractError("fit_string_tension: need at least two records");
    if (!(gamma_range.second > gamma_range.first))
        throw ContractError("fit_string_tension: gamma_range must have positive length");
    if (grid_points < 8) throw ContractError("fit_string_tension: grid_points must be >= 8");

    bool any_shots = false, any_area = false;
    for (const auto& r : records) {
        if (r.ups > r.shots) throw ContractError("fit_string_tension: ups exceeds shots");
        any_shots |= r.shots > 0;
        any_area |= r.area != 0.0;
    }
    if (!any_shots) throw ContractError("fit_string_tension: all records have zero shots");
    if (!any_area)
        throw NumericsError("fit_string_tension: all areas are zero; likelihood is flat in gamma");

    auto ll = [&](double g) { return log_likelihood_at(records, g, phi0); };

    // Coarse scan, then refine every local maximum; aliasing is diagnosed from
    // the refined rivals.
    const double lo = gamma_range.first, hi = gamma_range.second;
    std::vector<double> grid_ll(static_cast<std::size_t>(grid_points));
    const double step = (hi - lo) / (grid_points - 1);
    for (int i = 0; i < grid_points; ++i) grid_ll[static_cast<std::size_t>(i)] = ll(lo + i * step);

    struct Candidate {
        double gamma, ll;
    };
    std::vector<Candidate> candidates;
    for (int i = 0; i < grid_points; ++i) {
        const double cur = grid_ll[static_cast<std::size_t>(i)];
        const bool left_ok = i == 0 || grid_ll[static_cast<std::size_t>(i - 1)] <= cur;
        const bool right_ok = i == grid_points - 1 || grid_ll[static_cast<std::size_t>(i + 1)] <= cur;
        if (!(left_ok && right_ok)) continue;
        const double a = lo + std::max(0, i - 1) * step;
        const double b = lo + std::min(grid_points - 1, i + 1) * step;
        const double g = golden_section_max(ll, a, b, 1e-8);
        candidates.push_back({g, ll(g)});
    }

    std::sort(candidates.begin(), candidates.end(),
              [](const Candidate& a, const Candidate& b) { return a.ll > b.ll; });
    const Candidate best = candidates.front();

    bool aliasing = false;
    for (std::size_t i = 1; i < candidates.size(); ++i) {
        if (std::abs(candidates[i].gamma - best.gamma) < 4.0 * step) continue;  // same peak
        if (best.ll - candidates[i].ll < 2.0) aliasing = true;
    }

    // Observed Fisher information by central second difference.
    const double h = std::max(1e-6 * (hi - lo), 1e-9);
    const double info = -(ll(best.gamma + h) - 2.0 * best.ll + ll(best.gamma - h)) / (h * h);

    FitResult fit;
    fit.gamma_hat = best.gamma;
    fit.log_likelihood = best.ll;
    fit.stderr_gamma = info > 0.0 ? 1.0 / std::sqrt(info) : std::numeric_limits<double>::infinity();
    fit.aliasing_warning = aliasing;
    fit.n_records = records.size();
    return fit;
}

AreaLawReport area_law_test_on(const StaticConfig& cfg, const std::vector<PathPair>& pairs,
                               double tol) {
    cfg.validate();
    if (pairs.size() < 2) throw ContractError("area_law_test: need at least two pairs");

    AreaLawReport report;
    report.phases.reserve(pairs.size());
    for (const auto& pair : pairs)
        report.phases.push_back(relative_phase(cfg, pair, 1e-12).unwrapped);

    const auto [mn, mx] = std::minmax_element(report.phases.begin(), report.phases.end());
    report.spread = *mx - *mn;
    report.confining = report.spread < tol;

    // Identical shapes make the test vacuous; flag them.
    double max_shape_diff = 0.0;
    const double T = pairs.front().duration();
    for (std::size_t i = 0; i < pairs.size(); ++i)
        for (std::size_t j = i + 1; j < pairs.size(); ++j)
            for (int k = 1; k < 64; ++k) {
                const double t = T * k / 64.0;
                max_shape_diff = std::max(max_shape_diff,
                                          std::abs(pairs[i].up().eval(t).d - pairs[j].up().eval(t).d));
            }
    report.degenerate_warning = max_shape_diff < 1e-9;
    return report;
}

AreaLawReport area_law_test(const StaticConfig& cfg, double A_target, int n_paths,
                            std::uint64_t seed, double tol) {
    if (n_paths < 3) throw ContractError("area_law_test: n_paths must be >= 3");
    return area_law_test_on(cfg, equal_area_family(A_target, cfg.x0, cfg.T, n_paths, seed), tol);
}

void write_records_csv(std::ostream& os, const std::vector<MeasurementRecord>& records) {
    os << "area,shots,ups\n";
    char buf[64];
    for (const auto& r : records) {
        std::snprintf(buf, sizeof(buf), "%.17g", r.area);
        os << buf << ',' << r.shots << ',' << r.ups << '\n';
    }
}

std::vector<MeasurementRecord> read_records_csv(std::istream& is) {
    std::vector<MeasurementRecord> records;
    std::string line;
    if (!std::getline(is, line)) throw ValidationError("records csv: empty file");
    if (line != "area,shots,ups")
        throw ValidationError("records csv: expected header 'area,shots,ups'");
    std::size_t line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string field;
        MeasurementRecord rec;
        try {
            if (!std::getline(row, field, ',')) throw std::invalid_argument("area");
            rec.area = std::stod(field);
            if (!std::getline(row, field, ',')) throw std::invalid_argument("shots");
            rec.shots = static_cast<std::uint64_t>(std::stoull(field));
            if (!std::getline(row, field, ',')) throw std::invalid_argument("ups");
            rec.ups = static_cast<std::uint64_t>(std::stoull(field));
        } catch (const std::exception&) {
            throw ValidationError("records csv: malformed row at line " + std::to_string(line_no));
        }
        if (rec.ups > rec.shots || rec.shots < 1 || rec.area < 0.0)
            throw ValidationError("records csv: invalid record at line " + std::to_string(line_no));
        records.push_back(rec);
    }
    return records;
}

}  // namespace loopsim
