#include "loopsim/json_io.hpp"

#include <json.hpp>

#include "loopsim/errors.hpp"

namespace loopsim {

using ordered_json = nlohmann::ordered_json;

namespace {

ordered_json trajectory_doc(const TrajectorySpec& traj) {
    ordered_json doc;
    doc["family"] = traj.family_name();
    ordered_json params;
    std::visit(
        [&](const auto& f) {
            using F = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<F, QuinticBumpHold>) {
                params["D"] = f.D;
                params["tau_r"] = f.tau_r;
            } else if constexpr (std::is_same_v<F, SineFourthBump>) {
                params["D"] = f.D;
            } else {
                ordered_json knots = ordered_json::array();
                for (const auto& [t, d] : f.knots) knots.push_back({t, d});
                params["knots"] = std::move(knots);
            }
        },
        traj.family());
    doc["params"] = std::move(params);
    doc["T"] = traj.duration();
    return doc;
}

TrajectorySpec trajectory_from_doc(const ordered_json& doc) {
    if (!doc.is_object() || !doc.contains("family") || !doc.contains("params") || !doc.contains("T"))
        throw ValidationError("trajectory json: need fields family, params, T");
    const std::string family = doc.at("family").get<std::string>();
    const double T = doc.at("T").get<double>();
    const auto& params = doc.at("params");
    if (family == "quintic_bump_hold") {
        return TrajectorySpec(
            QuinticBumpHold{params.at("D").get<double>(), params.at("tau_r").get<double>()}, T);
    }
    if (family == "sine_fourth_bump") {
        return TrajectorySpec(SineFourthBump{params.at("D").get<double>()}, T);
    }
    if (family == "sampled_spline") {
        SampledSpline spline;
        for (const auto& knot : params.at("knots")) {
            if (!knot.is_array() || knot.size() != 2)
                throw ValidationError("trajectory json: spline knots must be [t, d] pairs");
            spline.knots.emplace_back(knot[0].get<double>(), knot[1].get<double>());
        }
        return TrajectorySpec(std::move(spline), T);
    }
    throw ValidationError("trajectory json: unknown family '" + family + "'");
}

ordered_json pair_doc(const PathPair& pair) {
    ordered_json doc;
    doc["up"] = trajectory_doc(pair.up());
    doc["down"] = trajectory_doc(pair.down());
    return doc;
}

ordered_json parse(const std::string& text) {
    try {
        return ordered_json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("json parse error: ") + e.what());
    }
}

}  // namespace

std::string trajectory_to_json(const TrajectorySpec& traj) { return trajectory_doc(traj).dump(); }

TrajectorySpec trajectory_from_json(const std::string& text) {
    try {
        return trajectory_from_doc(parse(text));
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("trajectory json: ") + e.what());
    }
}

std::string pair_to_json(const PathPair& pair) { return pair_doc(pair).dump(); }

PathPair pair_from_json(const std::string& text) {
    const ordered_json doc = parse(text);
    try {
        if (!doc.contains("up") || !doc.contains("down"))
            throw ValidationError("pair json: need fields up, down");
        return PathPair(trajectory_from_doc(doc.at("up")), trajectory_from_doc(doc.at("down")));
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("pair json: ") + e.what());
    }
}

std::string static_result_to_json(const StaticRunResult& r) {
    ordered_json doc;
    doc["gamma"] = r.gamma;
    doc["beta"] = r.beta;
    doc["x0"] = r.x0;
    doc["T"] = r.T;
    doc["area"] = r.area;
    doc["phase_unwrapped"] = r.phase_unwrapped;
    doc["phase_wrapped"] = r.phase_wrapped;
    doc["P_up"] = r.p_up;
    doc["P_down"] = r.p_down;
    return doc.dump(2) + "\n";
}

std::string dynamic_result_to_json(const DynamicConfig& cfg, const PathPair& pair,
                                   const BranchState& up, const BranchState& down,
                                   const InterferenceResult& result, double margin) {
    ordered_json doc;
    doc["cfg"] = {{"m", cfg.m}, {"omega", cfg.omega}, {"gamma", cfg.gamma},
                  {"x0", cfg.x0}, {"T", cfg.T}};
    doc["pair"] = pair_doc(pair);
    doc["q_up"] = up.q;
    doc["qdot_up"] = up.q_dot;
    doc["q_down"] = down.q;
    doc["qdot_down"] = down.q_dot;
    doc["alpha_up"] = {up.alpha.real(), up.alpha.imag()};
    doc["alpha_down"] = {down.alpha.real(), down.alpha.imag()};
    doc["delta_phi"] = result.delta_phi;
    doc["B"] = {result.B.real(), result.B.imag()};
    doc["P_up"] = result.p_up;
    doc["P_down"] = result.p_down;
    doc["margin"] = margin;
    return doc.dump(2) + "\n";
}

std::string fit_to_json(const FitResult& fit) {
    ordered_json doc;
    doc["gamma_hat"] = fit.gamma_hat;
    doc["stderr"] = fit.stderr_gamma;
    doc["log_likelihood"] = fit.log_likelihood;
    doc["aliasing_warning"] = fit.aliasing_warning;
    doc["n_records"] = fit.n_records;
    return doc.dump(2) + "\n";
}

std::string area_law_report_to_json(const AreaLawReport& report) {
    ordered_json doc;
    doc["spread"] = report.spread;
    doc["confining"] = report.confining;
    doc["degenerate_warning"] = report.degenerate_warning;
    doc["phases"] = report.phases;
    return doc.dump(2) + "\n";
}

}  // namespace loopsim
