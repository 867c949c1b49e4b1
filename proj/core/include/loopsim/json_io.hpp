#pragma once

#include <string>

#include "loopsim/dynamic_solver.hpp"
#include "loopsim/estimation.hpp"
#include "loopsim/static_interferometer.hpp"
#include "loopsim/trajectory.hpp"

namespace loopsim {

// Trajectory documents look like
//   {"family": "quintic_bump_hold", "params": {"D": 1.0, "tau_r": 2.0}, "T": 10.0}
// with families "quintic_bump_hold" (D, tau_r), "sine_fourth_bump" (D) and
// "sampled_spline" (knots: [[t, d], ...]).
std::string trajectory_to_json(const TrajectorySpec& traj);
TrajectorySpec trajectory_from_json(const std::string& text);

// {"up": <trajectory>, "down": <trajectory>}
std::string pair_to_json(const PathPair& pair);
PathPair pair_from_json(const std::string& text);

std::string static_result_to_json(const StaticRunResult& result);

std::string dynamic_result_to_json(const DynamicConfig& cfg, const PathPair& pair,
                                   const BranchState& up, const BranchState& down,
                                   const InterferenceResult& result, double margin);

std::string fit_to_json(const FitResult& fit);

std::string area_law_report_to_json(const AreaLawReport& report);

}  // namespace loopsim
