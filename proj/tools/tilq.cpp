// tilq: solve, verify and simulate time-inconsistent stochastic LQ problems.

#include <CLI11.hpp>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "tilq/errors.hpp"
#include "tilq/feedback.hpp"
#include "tilq/fixtures.hpp"
#include "tilq/open_loop.hpp"
#include "tilq/problem_io.hpp"
#include "tilq/report.hpp"
#include "tilq/verifier.hpp"

using namespace tilq;

namespace {

constexpr int kOk = 0;
constexpr int kError = 1;
constexpr int kInfeasible = 2;

struct Config {
    std::string command;
    std::string input, output, format = "json";
    std::string candidate;
    std::string concept_name = "open_loop";
    std::string noise = "rademacher";
    std::string x;
    std::string export_dir;
    int t = 0, t0 = 0, t1 = 1;
    int probes = 16;
    std::uint64_t seed = 0;
    std::size_t samples = 10000;
    std::optional<double> rcond;
    double residual_tol = 1e-8, psd_margin = 1e-9;
    bool timing = false;
};

Tolerances tolerances(const Config& c) {
    Tolerances tol;
    tol.pinv_rcond = c.rcond;
    tol.residual_tol = c.residual_tol;
    tol.psd_margin = c.psd_margin;
    tol.validate();
    return tol;
}

ProblemData load(const Config& c, const Tolerances& tol) {
    if (c.input.empty()) throw InvalidInput("--input is required for " + c.command);
    return load_problem_file(c.input, tol);
}

Vector parse_x(const Config& c, int n) {
    if (c.x.empty()) return Vector::Ones(n);
    std::vector<double> vals;
    std::stringstream ss(c.x);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            vals.push_back(std::stod(item, &used));
            if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
        } catch (const std::logic_error&) {
            throw InvalidInput("--x: '" + item + "' is not a number");
        }
    }
    if (static_cast<int>(vals.size()) != n)
        throw InvalidInput("--x has " + std::to_string(vals.size()) + " entries, state dimension is " + std::to_string(n));
    return Eigen::Map<Vector>(vals.data(), n);
}

std::vector<Matrix> load_candidate_from(const Json& src, const std::string& path, int N, int m, int n) {
    Json doc = src;
    if (doc.is_object()) {
        if (doc.contains("gains")) doc = doc["gains"];
        else if (doc.contains("Phi")) doc = doc["Phi"];
    }
    if (!doc.is_array() || static_cast<int>(doc.size()) != N)
        throw ParseError(path + ": expected " + std::to_string(N) + " matrices");
    std::vector<Matrix> out;
    for (std::size_t k = 0; k < doc.size(); ++k) {
        const Json& mj = doc[k];
        if (!mj.is_array() || static_cast<int>(mj.size()) != m)
            throw ParseError(path + ": /" + std::to_string(k) + ": expected " + std::to_string(m) + " rows");
        Matrix M(m, n);
        for (int r = 0; r < m; ++r) {
            if (!mj[r].is_array() || static_cast<int>(mj[r].size()) != n)
                throw ParseError(path + ": /" + std::to_string(k) + "/" + std::to_string(r) + ": expected " +
                                 std::to_string(n) + " columns");
            for (int c = 0; c < n; ++c) {
                if (!mj[r][c].is_number())
                    throw ParseError(path + ": /" + std::to_string(k) + "/" + std::to_string(r) + "/" +
                                     std::to_string(c) + ": expected a number");
                M(r, c) = mj[r][c].get<double>();
            }
        }
        out.push_back(std::move(M));
    }
    return out;
}

// A bare array of matrices, {"gains": ...}, {"Phi": ...} or a solver report.
std::vector<Matrix> load_candidate(const std::string& path, int N, int m, int n) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open candidate file '" + path + "'");
    Json doc;
    try {
        doc = Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ParseError(path + ": " + e.what());
    }
    if (doc.is_object() && doc.contains("solution")) doc = doc["solution"];
    return load_candidate_from(doc, path, N, m, n);
}

Concept parse_concept(const std::string& s) {
    if (s == "open_loop" || s == "open-loop") return Concept::open_loop;
    if (s == "feedback") return Concept::feedback;
    throw InvalidInput("--concept must be open_loop or feedback");
}

struct Outcome {
    Outcome() = default;
    Outcome(Report r, int c = kOk) : report(std::move(r)), code(c) {}

    Report report;
    int code = kOk;
    std::string csv;  // set when the command has a CSV form
    std::string text;  // overrides the generic text rendering
};

Outcome run_solve_open_loop(const Config& c) {
    Tolerances tol = tolerances(c);
    OpenLoopSolution s = solve_open_loop(load(c, tol), tol);
    Outcome o{open_loop_report(s)};
    o.code = s.feasible ? kOk : kInfeasible;
    return o;
}

Outcome run_solve_feedback(const Config& c) {
    Tolerances tol = tolerances(c);
    FeedbackSolution s = solve_feedback(load(c, tol), tol);
    Outcome o{feedback_report(s)};
    o.code = s.feasible ? kOk : kInfeasible;
    return o;
}

Outcome run_solve_standard(const Config& c) {
    Tolerances tol = tolerances(c);
    ProblemData p = load(c, tol);
    if (c.t < 0 || c.t >= p.N) throw InvalidInput("--t must lie in [0, N)");
    StandardLQSolution s = solve_standard_lq(precommitment_data(p, c.t), c.t, tol);
    Outcome o{standard_report(s)};
    o.code = s.feasible ? kOk : kInfeasible;
    return o;
}

Outcome run_verify(const Config& c) {
    Tolerances tol = tolerances(c);
    ProblemData p = load(c, tol);
    Concept which = parse_concept(c.concept_name);
    VerifyOptions opts;
    opts.probes = c.probes;
    opts.seed = c.seed;
    opts.noise = NoiseModel::parse(c.noise);
    opts.tol = tol;
    InitialPair start{c.t, parse_x(c, p.n)};

    std::vector<Matrix> candidate;
    if (!c.candidate.empty()) {
        candidate = load_candidate(c.candidate, p.N, p.m, p.n);
    } else if (which == Concept::open_loop) {
        OpenLoopSolution s = solve_open_loop(p, tol);
        if (!s.feasible) {
            Outcome o{open_loop_report(s), kInfeasible};
            o.report.command = "verify";
            return o;
        }
        candidate = s.gains;
    } else {
        FeedbackSolution s = solve_feedback(p, tol);
        if (!s.feasible) {
            Outcome o{feedback_report(s), kInfeasible};
            o.report.command = "verify";
            return o;
        }
        candidate = s.Phi;
    }
    VerificationReport r = which == Concept::open_loop
                               ? verify_open_loop(p, start, GainSequence{candidate}, opts)
                               : verify_feedback(p, Strategy{candidate}, start, opts);
    Outcome o{verification_report(r)};
    o.code = r.pass ? kOk : kInfeasible;
    return o;
}

Outcome run_simulate(const Config& c) {
    Tolerances tol = tolerances(c);
    ProblemData p = load(c, tol);
    Concept which = parse_concept(c.concept_name);
    NoiseModel noise = NoiseModel::parse(c.noise);
    InitialPair start{c.t, parse_x(c, p.n)};
    p.check_pair(start);

    std::vector<Matrix> gains;
    if (!c.candidate.empty()) {
        gains = load_candidate(c.candidate, p.N, p.m, p.n);
    } else if (which == Concept::open_loop) {
        OpenLoopSolution s = solve_open_loop(p, tol);
        if (!s.feasible) return {open_loop_report(s), kInfeasible};
        gains = s.gains;
    } else {
        FeedbackSolution s = solve_feedback(p, tol);
        if (!s.feasible) return {feedback_report(s), kInfeasible};
        gains = s.Phi;
    }
    PolicySpec policy = which == Concept::open_loop ? PolicySpec(GainSequence{gains}) : PolicySpec(Strategy{gains});

    std::mt19937_64 rng(c.seed);
    NoisePath path;
    path.probability = noise.finite() ? 1.0 : 0.0;
    for (int k = start.t; k < p.N; ++k) {
        double w = noise.sample(rng);
        path.values.push_back(w);
        if (noise.finite()) path.probability *= noise.probabilities()[noise.index_of(w)];
    }

    SimulationSummary sum;
    sum.trajectory = simulate(p, start, policy, path);
    sum.policy = which == Concept::open_loop ? "open_loop" : "feedback";
    sum.noise = noise.name();
    sum.seed = c.seed;
    sum.path_cost = evaluate_cost(p, start.t, sum.trajectory);
    const int steps = p.N - start.t;
    if (noise.finite() && steps <= kEnumerationCap) {
        sum.expected_cost = exact_expected_cost(p, start.t, start, policy, noise, CoefficientRow::diagonal());
    } else {
        MonteCarloResult mc =
            monte_carlo_cost(p, start.t, start, policy, noise, c.samples, c.seed, CoefficientRow::diagonal());
        sum.expected_cost = mc.mean;
        sum.expected_exact = false;
        sum.expected_std_error = mc.std_error;
    }
    Outcome o{simulation_report(sum)};
    o.csv = trajectory_csv(sum.trajectory, noise);
    return o;
}

Outcome run_demo(const Config& c) {
    Tolerances tol = tolerances(c);
    ProblemData p = c.input.empty() ? example_1_1() : load(c, tol);
    InconsistencyReport r = demonstrate_inconsistency(p, c.t0, c.t1, tol);
    Outcome o{inconsistency_report(r)};
    o.code = r.feasible ? kOk : kInfeasible;
    return o;
}

Outcome run_examples_cmd(const Config& c) {
    Tolerances tol = tolerances(c);
    if (!c.export_dir.empty()) {
        std::filesystem::create_directories(c.export_dir);
        for (const auto& f : example_fixtures()) {
            std::ofstream out(std::filesystem::path(c.export_dir) / (f.name + ".json"));
            if (!out) throw ResourceError("cannot write to '" + c.export_dir + "'");
            out << serialize(f.data) << "\n";
        }
    }
    std::vector<FixtureRow> rows = run_examples(tol);
    Outcome o{examples_report(rows)};
    o.code = o.report.feasible ? kOk : kInfeasible;
    o.csv = examples_csv(rows);
    std::ostringstream os;
    int passed = 0;
    for (const auto& r : rows) {
        passed += r.pass;
        os << (r.pass ? "PASS " : "FAIL ") << r.name << " (" << r.checked << " values)\n";
        for (const auto& f : r.failures) os << "     " << f << "\n";
    }
    if (o.report.diagnostics.contains("example-1-1")) {
        const auto& e = o.report.diagnostics["example-1-1"];
        char buf[128];
        std::snprintf(buf, sizeof buf, "example-1-1 gains at step 1: %.4f (anchored at 0), %.4f (anchored at 1)\n",
                      e["gain_from_t0"].get<double>(), e["gain_from_t1"].get<double>());
        os << buf;
    }
    os << passed << "/" << rows.size() << " examples pass\n";
    o.text = os.str();
    return o;
}

void write(const Config& c, const std::string& body) {
    if (c.output.empty()) {
        std::cout << body;
        return;
    }
    std::ofstream out(c.output, std::ios::binary);
    if (!out) throw ResourceError("cannot write '" + c.output + "'");
    out << body;
}

int dispatch(const Config& c) {
    auto begin = std::chrono::steady_clock::now();
    Outcome o;
    if (c.command == "solve-open-loop") o = run_solve_open_loop(c);
    else if (c.command == "solve-feedback") o = run_solve_feedback(c);
    else if (c.command == "solve-standard") o = run_solve_standard(c);
    else if (c.command == "verify") o = run_verify(c);
    else if (c.command == "simulate") o = run_simulate(c);
    else if (c.command == "demo-inconsistency") o = run_demo(c);
    else o = run_examples_cmd(c);
    if (c.timing)
        o.report.timing_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - begin).count();

    if (c.format == "json") {
        write(c, render_json(o.report));
    } else if (c.format == "text") {
        write(c, o.text.empty() ? render_text(o.report) : o.text);
    } else {
        if (o.csv.empty()) throw InvalidInput("--format csv is only available for simulate and examples");
        write(c, o.csv);
    }
    return o.code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Equilibrium solver for time-inconsistent stochastic LQ control"};
    app.require_subcommand(1);
    Config c;
    double rcond = 0.0;

    auto common = [&](CLI::App* sub, bool needs_input) {
        auto* in = sub->add_option("--input", c.input, "problem file (JSON)");
        if (needs_input) in->required();
        sub->add_option("--output", c.output, "write the report here instead of stdout");
        sub->add_option("--format", c.format, "json, text or csv")->check(CLI::IsMember({"json", "text", "csv"}));
        sub->add_option("--rcond", rcond, "pseudoinverse cutoff relative to the largest singular value");
        sub->add_option("--residual-tol", c.residual_tol, "relative residual tolerance");
        sub->add_option("--psd-margin", c.psd_margin, "relative eigenvalue margin for PSD tests");
        sub->add_flag("--timing", c.timing, "record wall time in timing_ms");
    };
    auto start_opts = [&](CLI::App* sub) {
        sub->add_option("--t", c.t, "initial time");
        sub->add_option("--x", c.x, "initial state, comma separated (default all ones)");
        sub->add_option("--noise", c.noise, "rademacher, gaussian or two_point:<p>");
        sub->add_option("--seed", c.seed, "random seed");
        sub->add_option("--concept", c.concept_name, "open_loop or feedback");
        sub->add_option("--candidate", c.candidate, "gain/strategy file instead of the solver output");
    };

    common(app.add_subcommand("solve-open-loop", "coupled GDREs and LDEs, open-loop equilibrium gains"), true);
    common(app.add_subcommand("solve-feedback", "feedback equilibrium strategy"), true);
    auto* standard = app.add_subcommand("solve-standard", "pre-commitment Riccati solve seen from --t");
    common(standard, true);
    standard->add_option("--t", c.t, "initial time");
    auto* verify = app.add_subcommand("verify", "certify a candidate on the enumerated noise tree");
    common(verify, true);
    start_opts(verify);
    verify->add_option("--probes", c.probes, "random deviations per node");
    auto* sim = app.add_subcommand("simulate", "one sampled path plus the expected cost");
    common(sim, true);
    start_opts(sim);
    sim->add_option("--samples", c.samples, "Monte Carlo samples for continuous noise");
    auto* demo = app.add_subcommand("demo-inconsistency", "compare pre-commitment gains from two initial times");
    common(demo, false);
    demo->add_option("--t0", c.t0, "first initial time");
    demo->add_option("--t1", c.t1, "second initial time");
    auto* ex = app.add_subcommand("examples", "run the embedded examples");
    common(ex, false);
    ex->add_option("--export", c.export_dir, "also write the example problems as JSON files here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kOk : kError;
    }
    c.command = app.get_subcommands().front()->get_name();
    for (auto* sub : app.get_subcommands())
        if (sub->count("--rcond")) c.rcond = rcond;

    try {
        return dispatch(c);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        for (const auto& v : e.violations()) std::cerr << "  " << v << "\n";
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
    }
    return kError;
}
