#pragma once

#include <map>
#include <string>
#include <vector>

#include "tilq/problem.hpp"

namespace tilq {

// Worked examples: the scalar hyperbolic-discount problem (N=4) and three
// two-dimensional problems with N=3, N=3 and N=2.
ProblemData example_1_1();
ProblemData example_5_1();
ProblemData example_5_2();
ProblemData example_5_3();

struct ExpectedValue {
    std::string key;
    Matrix value;
    double tol;  // absolute, per entry
};

struct ExampleFixture {
    std::string name;
    ProblemData data;
    std::vector<ExpectedValue> expected;
};

std::vector<ExampleFixture> example_fixtures();

struct FixtureRow {
    std::string name;
    bool pass = false;
    int checked = 0;
    std::vector<std::string> failures;
    std::map<std::string, Matrix> observed;
};

// Solve, verify and compare one fixture. Never throws for data mismatches.
FixtureRow run_fixture(const ExampleFixture& f, const Tolerances& tol = {});
std::vector<FixtureRow> run_examples(const Tolerances& tol = {});

}  // namespace tilq
