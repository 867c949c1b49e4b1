#pragma once

#include <string>
#include <vector>

namespace loopsim::selftest {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string details;
    double elapsed_s = 0.0;
};

struct Report {
    std::vector<CriterionResult> criteria;
    bool all_pass = false;
};

/// Runs acceptance criteria 1-7, writing deterministic artifact files under
/// output_dir. Progress lines go to stdout when verbose.
Report run_all(const std::string& output_dir, bool verbose = true);

/// Runs the full suite twice (output_dir/run_a and run_b) and appends the
/// determinism criterion (byte-identical result files) as criterion 8.
Report run_with_determinism(const std::string& output_dir, bool verbose = true);

/// Byte-compares the regular files under two directories (same relative
/// names, same contents). Fills detail with the first difference found.
bool compare_output_dirs(const std::string& dir_a, const std::string& dir_b,
                         std::string* detail = nullptr);

}  // namespace loopsim::selftest
