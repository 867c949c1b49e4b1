// Acceptance suite runner: executes every acceptance criterion at its stated
// tolerance, one pass/fail line each, and exits nonzero if any fail. The
// suite runs twice so the determinism criterion can compare the artifact
// trees byte for byte.

#include <cstdio>

#include "loopsim/selftest.hpp"

int main() {
    const loopsim::selftest::Report report =
        loopsim::selftest::run_with_determinism("acceptance_out");

    int failed = 0;
    for (const auto& c : report.criteria)
        if (!c.pass) ++failed;

    if (failed == 0) {
        std::printf("acceptance: all %zu criteria passed\n", report.criteria.size());
        return 0;
    }
    std::printf("acceptance: %d of %zu criteria FAILED\n", failed, report.criteria.size());
    return 1;
}
