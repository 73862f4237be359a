#include "tilq/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace tilq {

namespace {

std::string fixed4(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f", v == 0.0 ? 0.0 : v);
    return buf;
}

Json bools(const std::vector<bool>& v) {
    Json a = Json::array();
    for (bool b : v) a.push_back(b);
    return a;
}

Json matrices(const std::vector<Matrix>& v) {
    Json a = Json::array();
    for (const auto& m : v) a.push_back(m.size() ? to_json(m) : Json(nullptr));
    return a;
}

Json vectors(const std::vector<Vector>& v) {
    Json a = Json::array();
    for (const auto& x : v) a.push_back(to_json(x));
    return a;
}

bool is_number_row(const Json& j) {
    if (!j.is_array() || j.empty()) return false;
    for (const auto& x : j)
        if (!x.is_number()) return false;
    return true;
}

bool is_matrix(const Json& j) {
    if (!j.is_array() || j.empty()) return false;
    for (const auto& r : j)
        if (!is_number_row(r) || r.size() != j[0].size()) return false;
    return true;
}

std::string scalar_text(const Json& j) {
    if (j.is_number_float()) return fixed4(j.get<double>());
    if (j.is_string()) return j.get<std::string>();
    return j.dump();
}

void render(std::ostringstream& os, const std::string& key, const Json& j, int indent) {
    std::string pad(indent, ' ');
    if (is_matrix(j)) {
        Matrix m(j.size(), j[0].size());
        for (Eigen::Index r = 0; r < m.rows(); ++r)
            for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = j[r][c].get<double>();
        os << pad << key << ":\n" << format_matrix(m, indent + 2);
    } else if (is_number_row(j)) {
        os << pad << key << ": [";
        for (std::size_t i = 0; i < j.size(); ++i) os << (i ? ", " : "") << scalar_text(j[i]);
        os << "]\n";
    } else if (j.is_object()) {
        os << pad << key << ":\n";
        for (auto it = j.begin(); it != j.end(); ++it) render(os, it.key(), it.value(), indent + 2);
    } else if (j.is_array() && j.empty()) {
        os << pad << key << ": []\n";
    } else if (j.is_array()) {
        os << pad << key << ":\n";
        for (std::size_t i = 0; i < j.size(); ++i) render(os, "[" + std::to_string(i) + "]", j[i], indent + 2);
    } else {
        os << pad << key << ": " << scalar_text(j) << "\n";
    }
}

}  // namespace

Json to_json(const Matrix& m) {
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

Json to_json(const Vector& v) {
    Json a = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

Json to_json(const Family& f) {
    Json out = Json::array();
    for (int t = 0; t < f.horizon(); ++t) {
        Json row = Json::array();
        for (int k = t; k <= f.last_k(); ++k) row.push_back(to_json(f.at(t, k)));
        out.push_back(std::move(row));
    }
    return out;
}

Json Report::json() const {
    Json j;
    j["command"] = command;
    j["feasible"] = feasible;
    j["solution"] = solution;
    j["diagnostics"] = diagnostics;
    j["timing_ms"] = timing_ms;
    return j;
}

Report open_loop_report(const OpenLoopSolution& s) {
    Report r;
    r.command = "solve-open-loop";
    r.feasible = s.feasible;
    r.solution["P"] = to_json(s.P);
    r.solution["S"] = to_json(s.S);
    r.solution["W_diag"] = matrices(s.W_diag);
    r.solution["H_diag"] = matrices(s.H_diag);
    r.solution["gains"] = matrices(s.gains);
    const auto& d = s.diagnostics;
    r.diagnostics["constraint_residual"] = d.constraint_residual;
    r.diagnostics["constraint_scale"] = d.constraint_scale;
    r.diagnostics["constraint_ok"] = bools(d.constraint_ok);
    r.diagnostics["convexity"] = matrices(d.convexity);
    r.diagnostics["convexity_min_eig"] = d.convexity_min_eig;
    r.diagnostics["convexity_ok"] = bools(d.convexity_ok);
    r.diagnostics["gain_residual"] = d.gain_residual;
    return r;
}

Report feedback_report(const FeedbackSolution& s) {
    Report r;
    r.command = "solve-feedback";
    r.feasible = s.feasible;
    r.solution["P_tilde"] = to_json(s.P_tilde);
    r.solution["W_tilde"] = to_json(s.W_tilde);
    r.solution["H_tilde"] = to_json(s.H_tilde);
    r.solution["Phi"] = matrices(s.Phi);
    const auto& d = s.diagnostics;
    r.diagnostics["first_failure"] = s.first_failure ? Json(*s.first_failure) : Json(nullptr);
    r.diagnostics["constraint_residual"] = d.constraint_residual;
    r.diagnostics["constraint_scale"] = d.constraint_scale;
    r.diagnostics["constraint_ok"] = bools(d.constraint_ok);
    r.diagnostics["W_eigenvalues"] = vectors(d.W_eigenvalues);
    r.diagnostics["W_min_eig"] = d.W_min_eig;
    r.diagnostics["psd_ok"] = bools(d.psd_ok);
    r.diagnostics["stationarity_residual"] = d.stationarity_residual;
    return r;
}

Report standard_report(const StandardLQSolution& s) {
    Report r;
    r.command = "solve-standard";
    r.feasible = s.feasible;
    r.solution["t_start"] = s.t_start;
    r.solution["P"] = matrices(s.P);
    r.solution["W"] = matrices(s.W);
    r.solution["H"] = matrices(s.H);
    r.solution["gains"] = matrices(s.gains);
    r.diagnostics["W_min_eig"] = s.W_min_eig;
    return r;
}

Report verification_report(const VerificationReport& v) {
    Report r;
    r.command = "verify";
    r.feasible = v.pass;
    r.solution["concept"] = v.kind;
    r.solution["start"] = {{"t", v.start.t}, {"x", to_json(v.start.x)}};
    r.solution["noise"] = v.noise;
    r.solution["pass"] = v.pass;
    r.solution["failing"] = v.failing;
    Json steps = Json::array();
    for (const auto& s : v.steps) {
        Json j;
        j["k"] = s.k;
        j["stationarity_residual"] = s.stationarity_residual;
        j["stationarity_scale"] = s.stationarity_scale;
        j["stationarity_ok"] = s.stationarity_ok;
        j["hessian"] = to_json(s.hessian);
        j["convexity_margin"] = s.convexity_margin;
        j["convexity_scale"] = s.convexity_scale;
        j["convexity_ok"] = s.convexity_ok;
        j["min_slack"] = s.min_slack;
        j["slack_scale"] = s.slack_scale;
        j["slack_ok"] = s.slack_ok;
        j["worst_probe"] = s.worst_probe;
        j["probes_evaluated"] = s.probes_evaluated;
        steps.push_back(std::move(j));
    }
    r.diagnostics["steps"] = std::move(steps);
    return r;
}

Report inconsistency_report(const InconsistencyReport& v) {
    Report r;
    r.command = "demo-inconsistency";
    r.feasible = v.feasible;
    r.solution["t0"] = v.t0;
    r.solution["t1"] = v.t1;
    r.solution["gain_from_t0"] = to_json(v.gain_from_t0);
    r.solution["gain_from_t1"] = to_json(v.gain_from_t1);
    r.solution["difference"] = v.difference;
    r.diagnostics["gains_from_t0"] = matrices(v.from_t0.gains);
    r.diagnostics["gains_from_t1"] = matrices(v.from_t1.gains);
    r.diagnostics["feasible_from_t0"] = v.from_t0.feasible;
    r.diagnostics["feasible_from_t1"] = v.from_t1.feasible;
    return r;
}

Report examples_report(const std::vector<FixtureRow>& rows) {
    Report r;
    r.command = "examples";
    r.feasible = true;
    Json table = Json::array();
    int passed = 0;
    for (const auto& row : rows) {
        r.feasible = r.feasible && row.pass;
        passed += row.pass;
        table.push_back({{"name", row.name}, {"pass", row.pass}, {"checked", row.checked}, {"failures", row.failures}});
    }
    r.solution["rows"] = std::move(table);
    r.solution["passed"] = passed;
    r.solution["total"] = rows.size();
    for (const auto& row : rows)
        if (row.name == "example-1-1" && row.observed.count("inconsistency.gain_from_t0")) {
            r.diagnostics["example-1-1"] = {
                {"gain_from_t0", row.observed.at("inconsistency.gain_from_t0")(0, 0)},
                {"gain_from_t1", row.observed.at("inconsistency.gain_from_t1")(0, 0)}};
        }
    return r;
}

Report simulation_report(const SimulationSummary& s) {
    Report r;
    r.command = "simulate";
    r.feasible = true;
    const Trajectory& tr = s.trajectory;
    r.solution["policy"] = s.policy;
    r.solution["start"] = {{"t", tr.start.t}, {"x", to_json(tr.start.x)}};
    r.solution["noise"] = s.noise;
    r.solution["seed"] = s.seed;
    r.solution["path"] = tr.path.values;
    r.solution["states"] = vectors(tr.states);
    r.solution["controls"] = vectors(tr.controls);
    r.solution["path_cost"] = s.path_cost;
    r.solution["expected_cost"] = s.expected_cost;
    r.diagnostics["expected_exact"] = s.expected_exact;
    r.diagnostics["expected_std_error"] = s.expected_std_error;
    r.diagnostics["path_probability"] = tr.path.probability;
    return r;
}

std::string render_json(const Report& r, int indent) { return r.json().dump(indent) + "\n"; }

std::string render_text(const Report& r) {
    std::ostringstream os;
    os << "command: " << r.command << "\n";
    os << "feasible: " << (r.feasible ? "true" : "false") << "\n";
    render(os, "solution", r.solution, 0);
    render(os, "diagnostics", r.diagnostics, 0);
    os << "timing_ms: " << fixed4(r.timing_ms) << "\n";
    return os.str();
}

std::string format_matrix(const Matrix& m, int indent) {
    std::vector<std::string> cells(m.size());
    std::size_t width = 0;
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            auto& s = cells[r * m.cols() + c];
            s = fixed4(m(r, c));
            width = std::max(width, s.size());
        }
    std::ostringstream os;
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        os << std::string(indent, ' ') << "[";
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            const auto& s = cells[r * m.cols() + c];
            os << (c ? "  " : "") << std::string(width - s.size(), ' ') << s;
        }
        os << "]\n";
    }
    return os.str();
}

std::string trajectory_csv(const Trajectory& traj, const NoiseModel& noise) {
    std::ostringstream os;
    os.precision(17);
    const int n = traj.states.empty() ? 0 : static_cast<int>(traj.states[0].size());
    const int m = traj.controls.empty() ? 0 : static_cast<int>(traj.controls[0].size());
    os << "step";
    for (int i = 0; i < n; ++i) os << ",x" << i;
    for (int i = 0; i < m; ++i) os << ",u" << i;
    os << ",w,probability\n";
    // probability: of the draws up to and including this step's w
    double prob = 1.0;
    for (std::size_t s = 0; s < traj.states.size(); ++s) {
        os << traj.start.t + static_cast<int>(s);
        for (int i = 0; i < n; ++i) os << "," << traj.states[s][i];
        const bool last = s == traj.controls.size();
        for (int i = 0; i < m; ++i) {
            os << ",";
            if (!last) os << traj.controls[s][i];
        }
        os << ",";
        if (!last) {
            double w = traj.path.values[s];
            os << w;
            if (noise.finite()) prob *= noise.probabilities()[noise.index_of(w)];
        }
        os << ",";
        if (noise.finite()) os << prob;
        os << "\n";
    }
    return os.str();
}

std::string examples_csv(const std::vector<FixtureRow>& rows) {
    std::ostringstream os;
    os << "name,pass,checked,failures\n";
    for (const auto& r : rows) {
        std::string f;
        for (const auto& s : r.failures) f += (f.empty() ? "" : "; ") + s;
        std::string quoted = "\"";
        for (char c : f) quoted += c == '"' ? std::string("\"\"") : std::string(1, c);
        quoted += "\"";
        os << r.name << "," << (r.pass ? "true" : "false") << "," << r.checked << "," << quoted << "\n";
    }
    return os.str();
}

}  // namespace tilq
