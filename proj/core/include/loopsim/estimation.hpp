#pragma once

#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

#include "loopsim/static_interferometer.hpp"
#include "loopsim/trajectory.hpp"

namespace loopsim {

struct MeasurementRecord {
    double area = 0.0;
    std::uint64_t shots = 0;
    std::uint64_t ups = 0;
};

/// Binomial shot sampling of the Ramsey outcome for each pair. The RNG stream
/// is partitioned by record index, so results are reproducible even when
/// records are simulated in parallel.
std::vector<MeasurementRecord> simulate_counts(const StaticConfig& cfg,
                                               const std::vector<PathPair>& pairs,
                                               std::uint64_t shots, std::uint64_t seed);

struct FitResult {
    double gamma_hat = 0.0;
    double stderr_gamma = 0.0;  ///< from observed Fisher information
    double log_likelihood = 0.0;
    bool aliasing_warning = false;  ///< a rival maximum within 2 log-units
    std::size_t n_records = 0;
};

/// Maximum-likelihood fit of the string tension from fringe counts, assuming
/// P_up = sin^2((gamma A - phi0)/2). Coarse grid scan over gamma_range, then
/// golden-section refinement to 1e-8 relative.
FitResult fit_string_tension(const std::vector<MeasurementRecord>& records,
                             std::pair<double, double> gamma_range,
                             int grid_points = 512, double phi0 = 0.0);

struct AreaLawReport {
    double spread = 0.0;  ///< max pairwise |relative phase| difference (unwrapped)
    bool confining = false;
    bool degenerate_warning = false;  ///< all supplied shapes are identical
    std::vector<double> phases;       ///< per-pair unwrapped relative phases
};

/// Builds an equal-area family and tests whether the relative phase depends
/// on anything but the area: confining = (spread < tol).
AreaLawReport area_law_test(const StaticConfig& cfg, double A_target, int n_paths,
                            std::uint64_t seed, double tol);

/// Same classifier on caller-supplied pairs.
AreaLawReport area_law_test_on(const StaticConfig& cfg, const std::vector<PathPair>& pairs,
                               double tol);

/// CSV with header "area,shots,ups".
void write_records_csv(std::ostream& os, const std::vector<MeasurementRecord>& records);
std::vector<MeasurementRecord> read_records_csv(std::istream& is);

}  // namespace loopsim
