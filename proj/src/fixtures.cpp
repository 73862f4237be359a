#include "tilq/fixtures.hpp"

#include <cstdio>
#include <exception>

#include "tilq/feedback.hpp"
#include "tilq/open_loop.hpp"
#include "tilq/verifier.hpp"

namespace tilq {

namespace {

// Tolerances follow the precision of the reference values: 4 decimals, 1 decimal, whole numbers.
constexpr double kFine = 5e-4;
constexpr double kCoarse = 5e-2;
constexpr double kWhole = 10.0;

Matrix mat2(double a, double b, double c, double d) {
    Matrix m(2, 2);
    m << a, b, c, d;
    return m;
}

Matrix scalar(double v) { return Matrix::Constant(1, 1, v); }

Matrix column(double a, double b) {
    Matrix m(2, 1);
    m << a, b;
    return m;
}

std::string idx(const std::string& base, int i) { return base + "[" + std::to_string(i) + "]"; }
std::string idx(const std::string& base, int i, int j) {
    return base + "[" + std::to_string(i) + "," + std::to_string(j) + "]";
}

}  // namespace

std::vector<ExampleFixture> example_fixtures() {
    std::vector<ExampleFixture> out;

    out.push_back({"example-1-1",
                   example_1_1(),
                   {{"inconsistency.gain_from_t0", scalar(-0.6038), kFine},
                    {"inconsistency.gain_from_t1", scalar(-0.4979), kFine},
                    {"inconsistency.difference", scalar(0.1059), kFine}}});

    // The P_1, P_0, S_1, S_0 references do not agree with the W_0 and
    // convexity matrices, so they are left out here.
    out.push_back({"example-5-1",
                   example_5_1(),
                   {{idx("open_loop.P", 2), mat2(16.6571, 5.8520, 5.8520, 11.5436), kFine},
                    {idx("open_loop.S", 2), mat2(43.0612, -12.3922, -12.3922, 87.4900), kFine},
                    {idx("open_loop.W", 2), mat2(117.6727, -34.9725, -34.9725, 146.0623), kFine},
                    {idx("open_loop.W", 1), mat2(287.3160, 153.0623, 153.0623, 447.2115), kFine},
                    {idx("open_loop.W", 0), mat2(1138.3, -410.9, -410.9, 915.8), kCoarse},
                    {idx("open_loop.gain", 0), mat2(-0.2183, 0.0031, 0.0023, -0.3286), kFine},
                    {idx("open_loop.gain", 1), mat2(-0.5138, 0.1973, 0.0026, -1.1339), kFine},
                    {idx("open_loop.gain", 2), mat2(0.4889, -0.2601, 0.1605, -0.7474), kFine},
                    {idx("open_loop.convexity", 2), mat2(117.6727, -34.9725, -34.9725, 146.0623), kFine},
                    {idx("open_loop.convexity", 1), mat2(857.9, -426.0, -426.0, 2909.6), kCoarse},
                    {idx("open_loop.convexity", 0), mat2(17940, -54740, -54740, 331470), kWhole},
                    {"open_loop.feasible", scalar(1), 0.0},
                    {"verify.open_loop", scalar(1), 0.0},
                    {"feedback.feasible", scalar(0), 0.0},
                    {idx("feedback.W_tilde", 1, 1), mat2(239.0218, 247.7565, 247.7565, 224.5117), kFine},
                    {idx("feedback.W_tilde_eigenvalues", 1), column(-16.096, 479.6294), 5e-3},
                    {"verify.gains_as_strategy", scalar(0), 0.0}}});

    out.push_back({"example-5-2",
                   example_5_2(),
                   {{"feedback.feasible", scalar(1), 0.0},
                    {idx("feedback.Phi", 0), mat2(-0.0368, 0.0884, 0.6555, -0.0192), kFine},
                    {idx("feedback.Phi", 1), mat2(-0.5094, 0.1935, -0.0021, -1.1301), kFine},
                    {idx("feedback.Phi", 2), mat2(0.4889, -0.2601, 0.1605, -0.7474), kFine},
                    {idx("feedback.P_tilde", 0, 0), mat2(6.1615, 4.3853, 4.3853, 3.2889), kFine},
                    {idx("feedback.P_tilde", 0, 1), mat2(39.7057, -11.0096, -11.0096, 3.2054), kFine},
                    {idx("feedback.P_tilde", 0, 2), mat2(17.9435, 3.9449, 3.9449, 14.2605), kFine},
                    {idx("feedback.P_tilde", 1, 1), mat2(37.3769, -10.7301, -10.7301, 12.7823), kFine},
                    {idx("feedback.P_tilde", 1, 2), mat2(16.3775, 6.1187, 6.1187, 10.8526), kFine},
                    {idx("feedback.P_tilde", 2, 2), mat2(16.6571, 5.8520, 5.8520, 11.5436), kFine},
                    {idx("feedback.W_tilde", 2, 2), mat2(117.6727, -34.9725, -34.9725, 146.0623), kFine},
                    {idx("feedback.W_tilde", 1, 1), mat2(281.0078, 160.6675, 160.6675, 425.5062), kFine},
                    {idx("feedback.W_tilde", 0, 0), mat2(1178.0, -334.5, -334.5, 143.3), kCoarse},
                    {"verify.feedback", scalar(1), 0.0}}});

    out.push_back({"example-5-3",
                   example_5_3(),
                   {{"feedback.feasible", scalar(1), 0.0},
                    {idx("feedback.Phi", 0), mat2(-0.4665, -0.0206, 0.0269, -0.3965), kFine},
                    {idx("feedback.Phi", 1), mat2(-1.4499, -0.4726, 0.6369, -1.8700), kFine},
                    {idx("feedback.W_tilde", 0, 0), mat2(1282.7, -1027.0, -1027.0, 3582.2), kCoarse},
                    {idx("feedback.W_tilde", 1, 1), mat2(86.9155, 11.0531, 11.0531, 103.2478), kFine},
                    {idx("feedback.P_tilde", 1, 1), mat2(18.8304, -11.9513, -11.9513, 46.5418), kFine},
                    {idx("feedback.P_tilde", 0, 1), mat2(40.6027, -28.7266, -28.7266, 50.9647), kFine},
                    {idx("feedback.P_tilde", 0, 0), mat2(99.6787, 14.1112, 14.1112, 8.3265), kFine},
                    {"verify.feedback", scalar(1), 0.0}}});
    return out;
}

namespace {

void observe_open_loop(const ProblemData& p, const Tolerances& tol, FixtureRow& row) {
    if (p.mode == Mode::general) return;
    OpenLoopSolution s = solve_open_loop(p, tol);
    auto& o = row.observed;
    o["open_loop.feasible"] = scalar(s.feasible ? 1 : 0);
    for (int k = 0; k < p.N; ++k) {
        o[idx("open_loop.P", k)] = s.P.at(0, k);
        o[idx("open_loop.S", k)] = s.S.at(0, k);
        o[idx("open_loop.W", k)] = s.W_diag[k];
        o[idx("open_loop.gain", k)] = s.gains[k];
        o[idx("open_loop.convexity", k)] = s.diagnostics.convexity[k];
    }
    if (!s.feasible) return;
    VerifyOptions opts;
    opts.tol = tol;
    InitialPair start{0, Vector::Ones(p.n)};
    bool ok = verify_open_loop(p, start, GainSequence{s.gains}, opts).pass;
    o["verify.open_loop"] = scalar(ok ? 1 : 0);
    if (!ok) row.failures.push_back("open-loop solution failed verification");
    o["verify.gains_as_strategy"] = scalar(verify_feedback(p, Strategy{s.gains}, start, opts).pass ? 1 : 0);
}

void observe_feedback(const ProblemData& p, const Tolerances& tol, FixtureRow& row) {
    FeedbackSolution s = solve_feedback(p, tol);
    auto& o = row.observed;
    o["feedback.feasible"] = scalar(s.feasible ? 1 : 0);
    for (int t = 0; t < p.N; ++t) {
        o[idx("feedback.Phi", t)] = s.Phi[t];
        o[idx("feedback.W_tilde_eigenvalues", t)] = s.diagnostics.W_eigenvalues[t];
        for (int k = t; k <= p.N; ++k) {
            o[idx("feedback.P_tilde", t, k)] = s.P_tilde.at(t, k);
            if (k < p.N) o[idx("feedback.W_tilde", t, k)] = s.W_tilde.at(t, k);
        }
    }
    if (!s.feasible) return;
    VerifyOptions opts;
    opts.tol = tol;
    bool ok = verify_feedback(p, Strategy{s.Phi}, {0, Vector::Ones(p.n)}, opts).pass;
    o["verify.feedback"] = scalar(ok ? 1 : 0);
    if (!ok) row.failures.push_back("feedback solution failed verification");
}

void observe_inconsistency(const ProblemData& p, const Tolerances& tol, FixtureRow& row) {
    if (p.N < 2) return;
    InconsistencyReport r = demonstrate_inconsistency(p, 0, 1, tol);
    row.observed["inconsistency.gain_from_t0"] = r.gain_from_t0;
    row.observed["inconsistency.gain_from_t1"] = r.gain_from_t1;
    row.observed["inconsistency.difference"] = scalar(r.difference);
}

}  // namespace

FixtureRow run_fixture(const ExampleFixture& f, const Tolerances& tol) {
    FixtureRow row;
    row.name = f.name;
    try {
        observe_open_loop(f.data, tol, row);
        observe_feedback(f.data, tol, row);
        observe_inconsistency(f.data, tol, row);
    } catch (const std::exception& e) {
        row.failures.push_back(std::string("error: ") + e.what());
    }
    for (const ExpectedValue& e : f.expected) {
        ++row.checked;
        auto it = row.observed.find(e.key);
        if (it == row.observed.end()) {
            row.failures.push_back(e.key + ": not computed");
            continue;
        }
        const Matrix& got = it->second;
        if (got.rows() != e.value.rows() || got.cols() != e.value.cols()) {
            row.failures.push_back(e.key + ": shape mismatch");
            continue;
        }
        double dev = (got - e.value).cwiseAbs().maxCoeff();
        if (!(dev <= e.tol)) {
            char buf[128];
            std::snprintf(buf, sizeof buf, ": deviation %.3g exceeds %.3g", dev, e.tol);
            row.failures.push_back(e.key + buf);
        }
    }
    row.pass = row.failures.empty();
    return row;
}

std::vector<FixtureRow> run_examples(const Tolerances& tol) {
    std::vector<FixtureRow> rows;
    for (const auto& f : example_fixtures()) rows.push_back(run_fixture(f, tol));
    return rows;
}

}  // namespace tilq
