#include <doctest.h>

#include "support/random_problems.hpp"
#include "tilq/errors.hpp"
#include "tilq/fixtures.hpp"
#include "tilq/open_loop.hpp"

using namespace tilq;

namespace {

Matrix mat2(double a, double b, double c, double d) {
    Matrix m(2, 2);
    m << a, b, c, d;
    return m;
}

double max_abs(const Matrix& a, const Matrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("open loop on the indefinite N=3 example") {
    OpenLoopSolution s = solve_open_loop(example_5_1());
    CHECK(s.feasible);
    for (int t = 0; t < 3; ++t) CHECK(max_abs(s.P.at(t, 2), mat2(16.6571, 5.8520, 5.8520, 11.5436)) < 5e-4);
    CHECK(max_abs(s.S.at(0, 2), mat2(43.0612, -12.3922, -12.3922, 87.4900)) < 5e-4);
    CHECK(max_abs(s.W_diag[2], mat2(117.6727, -34.9725, -34.9725, 146.0623)) < 5e-4);
    CHECK(max_abs(s.W_diag[1], mat2(287.3160, 153.0623, 153.0623, 447.2115)) < 5e-4);
    CHECK(max_abs(s.W_diag[0], mat2(1138.3, -410.9, -410.9, 915.8)) < 5e-2);
    CHECK(max_abs(s.gains[0], mat2(-0.2183, 0.0031, 0.0023, -0.3286)) < 5e-4);
    CHECK(max_abs(s.gains[1], mat2(-0.5138, 0.1973, 0.0026, -1.1339)) < 5e-4);
    CHECK(max_abs(s.gains[2], mat2(0.4889, -0.2601, 0.1605, -0.7474)) < 5e-4);
    CHECK(max_abs(s.diagnostics.convexity[2], mat2(117.6727, -34.9725, -34.9725, 146.0623)) < 5e-4);
    CHECK(max_abs(s.diagnostics.convexity[1], mat2(857.9, -426.0, -426.0, 2909.6)) < 5e-2);
    CHECK(max_abs(s.diagnostics.convexity[0], mat2(17940, -54740, -54740, 331470)) < 10);
}

TEST_CASE("terminal conditions and diagonal consistency") {
    ProblemData p = example_5_1();
    OpenLoopSolution s = solve_open_loop(p);
    for (int t = 0; t < p.N; ++t) {
        CHECK(s.P.at(t, p.N) == p.G[t]);
        CHECK(s.S.at(t, p.N) == p.G[t]);
        Matrix Pn = s.P.at(t, t + 1);
        Matrix W = p.R.at(t, t) + p.B.at(t, t).transpose() * Pn * p.B.at(t, t) +
                   p.D.at(t, t).transpose() * Pn * p.D.at(t, t);
        CHECK(W == s.W_diag[t]);
        CHECK(s.H_cross.at(t, t) == s.H_diag[t]);
    }
}

TEST_CASE("stationary mode collapses P across t and makes it symmetric") {
    OpenLoopSolution s = solve_open_loop(example_5_1());
    for (int k = 0; k < 3; ++k) {
        for (int t = 0; t < k; ++t) CHECK((s.P.at(t, k) - s.P.at(k, k)).norm() <= 1e-8 * s.P.at(k, k).norm());
        CHECK(asymmetry(s.P.at(k, k)) <= 1e-8 * s.P.at(k, k).norm());
    }
}

TEST_CASE("off-diagonal R does not enter the open-loop solve") {
    OpenLoopSolution a = solve_open_loop(example_5_1());
    OpenLoopSolution b = solve_open_loop(example_5_2());
    CHECK(a.P == b.P);
    CHECK(a.S == b.S);
    CHECK(a.gains == b.gains);
    CHECK(a.W_diag == b.W_diag);

    std::mt19937_64 rng(9);
    for (int i = 0; i < 20; ++i) {
        ProblemData p = testing::random_problem(rng, {});
        ProblemData q = p;
        for (int t = 0; t < p.N; ++t)
            for (int k = t + 1; k < p.N; ++k) q.R.at(t, k) = testing::random_symmetric(rng, p.m, 5.0);
        OpenLoopSolution sp = solve_open_loop(p), sq = solve_open_loop(q);
        CHECK(sp.P == sq.P);
        CHECK(sp.S == sq.S);
        CHECK(sp.gains == sq.gains);
        CHECK(sp.feasible == sq.feasible);
    }
}

TEST_CASE("single step with zero weights") {
    ProblemData p = ProblemData::zeros(1, 2, 2);
    for (auto* f : {&p.A, &p.B, &p.C, &p.D}) f->at(0, 0) = Matrix::Identity(2, 2);
    p.R.at(0, 0) = Matrix::Identity(2, 2);
    finalize(p);
    OpenLoopSolution s = solve_open_loop(p);
    CHECK(s.feasible);
    CHECK(s.P.at(0, 0).norm() == 0.0);
    CHECK(s.W_diag[0] == Matrix::Identity(2, 2));
    CHECK(s.H_diag[0].norm() == 0.0);
    CHECK(s.gains[0].norm() == 0.0);
}

TEST_CASE("zero B and D give zero gains") {
    std::mt19937_64 rng(1);
    ProblemData p = testing::random_problem(rng, {.N = 4, .n = 2, .m = 2});
    for (int t = 0; t < 4; ++t)
        for (int k = t; k < 4; ++k) {
            p.B.at(t, k).setZero();
            p.D.at(t, k).setZero();
        }
    OpenLoopSolution s = solve_open_loop(p);
    for (const Matrix& K : s.gains) CHECK(K.norm() == 0.0);
}

TEST_CASE("gains solve W K + H = 0 on feasible random instances") {
    std::mt19937_64 rng(2);
    int feasible = 0;
    for (int i = 0; i < 60; ++i) {
        ProblemData p = testing::random_problem(rng, {});
        OpenLoopSolution s = solve_open_loop(p);
        if (!s.feasible) continue;
        ++feasible;
        auto K = open_loop_gains(s);
        for (int k = 0; k < p.N; ++k) {
            double scale = residual_scale(s.W_diag[k], s.H_diag[k]);
            CHECK((s.W_diag[k] * K[k] + s.H_diag[k]).norm() <= 1e-8 * scale);
        }
        for (int t = 0; t < p.N; ++t)
            for (int k = t; k <= p.N; ++k) CHECK(asymmetry(s.S.at(t, k)) <= 1e-10 * std::max(1.0, s.S.at(t, k).norm()));
    }
    CHECK(feasible > 20);
}

TEST_CASE("definite stationary instances are feasible") {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 30; ++i) {
        ProblemData p = testing::random_problem(rng, {.N = 3, .n = 2, .m = 2, .definite = true});
        for (int t = 1; t < p.N; ++t) {
            for (int k = t; k < p.N; ++k) p.Q.at(t, k) = p.Q.at(0, k);
            p.G[t] = p.G[0];
        }
        finalize(p);
        REQUIRE(p.mode == Mode::stationary);
        CHECK(solve_open_loop(p).feasible);
    }
}

TEST_CASE("general dynamics are rejected") {
    CHECK_THROWS_AS(solve_open_loop(example_5_3()), UnsupportedStructure);
}

TEST_CASE("infeasibility is a verdict") {
    ProblemData p = ProblemData::zeros(2, 1, 1);
    for (int t = 0; t < 2; ++t)
        for (int k = t; k < 2; ++k) {
            p.A.at(t, k)(0, 0) = 1;
            p.B.at(t, k)(0, 0) = 1;
            p.R.at(t, k)(0, 0) = -5;
        }
    p.G = {Matrix::Constant(1, 1, 1.0), Matrix::Constant(1, 1, 1.0)};
    finalize(p);
    OpenLoopSolution s = solve_open_loop(p);
    CHECK_FALSE(s.feasible);
    CHECK_FALSE(s.diagnostics.convexity_ok[1]);
    CHECK_THROWS_AS(open_loop_gains(s), FeasibilityError);
}

TEST_CASE("consistency failure is detected") {
    // W = 0 while H != 0.
    ProblemData p = ProblemData::zeros(1, 1, 1);
    p.A.at(0, 0)(0, 0) = 1;
    p.B.at(0, 0)(0, 0) = 1;
    p.D.at(0, 0)(0, 0) = 1;
    p.G[0](0, 0) = 1;
    p.R.at(0, 0)(0, 0) = -2;
    finalize(p);
    OpenLoopSolution s = solve_open_loop(p);
    CHECK(s.W_diag[0].norm() == 0.0);
    CHECK_FALSE(s.diagnostics.constraint_ok[0]);
    CHECK_FALSE(s.feasible);
}

TEST_CASE("standard GDRE on the scalar hyperbolic example") {
    ProblemData p = example_1_1();
    StandardLQSolution s0 = solve_standard_lq(precommitment_data(p, 0), 0);
    StandardLQSolution s1 = solve_standard_lq(precommitment_data(p, 1), 1);
    CHECK(s0.feasible);
    CHECK(s1.feasible);
    CHECK(std::abs(s0.gains[1](0, 0) - (-0.6038)) < 5e-4);
    CHECK(std::abs(s1.gains[1](0, 0) - (-0.4979)) < 5e-4);
    CHECK(s0.P[4](0, 0) == 2.0 / 5.0);
    CHECK(s1.P[4](0, 0) == 2.0 / 4.0);

    InconsistencyReport r = demonstrate_inconsistency(p, 0, 1);
    CHECK(std::abs(r.difference - 0.1059) < 5e-4);
    CHECK_THROWS_AS(demonstrate_inconsistency(p, 1, 1), InvalidInput);
    CHECK_THROWS_AS(demonstrate_inconsistency(p, 0, 4), InvalidInput);
}

TEST_CASE("standard GDRE with zero weights") {
    std::mt19937_64 rng(4);
    ProblemData p = testing::random_problem(rng, {.N = 3, .n = 2, .m = 1, .definite = true});
    StandardLQData d = precommitment_data(p, 0);
    for (auto& q : d.Q) q.setZero();
    d.G.setZero();
    StandardLQSolution s = solve_standard_lq(d, 0);
    for (int k = 0; k <= 3; ++k) CHECK(s.P[k].norm() == 0.0);
    for (int k = 0; k < 3; ++k) CHECK(s.gains[k].norm() == 0.0);
    for (int k = 0; k <= 3; ++k) CHECK(asymmetry(s.P[k]) == 0.0);
}

TEST_CASE("time-consistent discounting shows no inconsistency") {
    std::mt19937_64 rng(5);
    for (double rate : {0.0, 0.3, 1.2}) {
        SharedDynamics d;
        for (int k = 0; k < 4; ++k) {
            d.A.push_back(testing::random_matrix(rng, 2, 2));
            d.B.push_back(testing::random_matrix(rng, 2, 1));
            d.C.push_back(testing::random_matrix(rng, 2, 2, 0.5));
            d.D.push_back(testing::random_matrix(rng, 2, 1, 0.5));
        }
        DiscountSpec spec;
        spec.kind = DiscountKind::exponential;
        spec.rate = rate;
        spec.base_Q = testing::random_psd(rng, 2, 2);
        spec.base_R = testing::random_pd(rng, 1);
        spec.base_G = testing::random_psd(rng, 2, 2);
        ProblemData p = from_discounting(spec, d, 4);
        for (int t1 = 1; t1 < 4; ++t1) {
            InconsistencyReport r = demonstrate_inconsistency(p, 0, t1);
            CHECK(r.difference <= 1e-8 * std::max(1.0, r.gain_from_t1.norm()));
        }
    }
}

TEST_CASE("standard GDRE rejects bad dimensions") {
    StandardLQData d = precommitment_data(example_5_1(), 0);
    d.B[1] = Matrix::Zero(3, 2);
    CHECK_THROWS_AS(solve_standard_lq(d, 0), InvalidInput);
}
