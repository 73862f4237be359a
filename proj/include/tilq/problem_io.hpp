#pragma once

#include <string>

#include "tilq/problem.hpp"

namespace tilq {

// Parses a problem document. Throws ParseError (with a JSON path) on schema
// problems and ValidationError when the data violates an invariant.
ProblemData load_problem(const std::string& document, const Tolerances& tol = {});
ProblemData load_problem_file(const std::string& path, const Tolerances& tol = {});

// Always writes the full (t, k) layout.
std::string serialize(const ProblemData& p, int indent = 2);

}  // namespace tilq
