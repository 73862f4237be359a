#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "tilq/feedback.hpp"
#include "tilq/fixtures.hpp"
#include "tilq/open_loop.hpp"
#include "tilq/simulation.hpp"
#include "tilq/verifier.hpp"

namespace tilq {

using Json = nlohmann::ordered_json;

Json to_json(const Matrix& m);  // row-major nested arrays
Json to_json(const Vector& v);
// Family as rows per t: [M_{t,t}, ..., M_{t,last}].
Json to_json(const Family& f);

struct Report {
    std::string command;
    bool feasible = false;
    Json solution = Json::object();
    Json diagnostics = Json::object();
    double timing_ms = 0.0;

    Json json() const;
};

Report open_loop_report(const OpenLoopSolution& s);
Report feedback_report(const FeedbackSolution& s);
Report standard_report(const StandardLQSolution& s);
Report verification_report(const VerificationReport& r);
Report inconsistency_report(const InconsistencyReport& r);
Report examples_report(const std::vector<FixtureRow>& rows);

struct SimulationSummary {
    Trajectory trajectory;
    std::string policy;  // "open_loop" or "feedback"
    std::string noise;
    std::uint64_t seed = 0;
    double path_cost = 0.0;
    double expected_cost = 0.0;
    bool expected_exact = true;   // false: Monte Carlo estimate
    double expected_std_error = 0.0;
};

Report simulation_report(const SimulationSummary& s);

std::string render_json(const Report& r, int indent = 2);
// Key/value text, matrices at 4 decimals.
std::string render_text(const Report& r);
// step, x0.., u0.., w, probability; the last row has no control or draw.
std::string trajectory_csv(const Trajectory& traj, const NoiseModel& noise);
std::string examples_csv(const std::vector<FixtureRow>& rows);

std::string format_matrix(const Matrix& m, int indent = 0);

}  // namespace tilq
