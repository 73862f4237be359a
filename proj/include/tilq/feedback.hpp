#pragma once

#include <optional>
#include <vector>

#include "tilq/problem.hpp"

namespace tilq {

struct FeedbackDiagnostics {
    std::vector<double> constraint_residual;  // per t
    std::vector<double> constraint_scale;
    std::vector<bool> constraint_ok;
    std::vector<Vector> W_eigenvalues;  // per t, ascending, of W~_{t,t}
    std::vector<double> W_min_eig;
    std::vector<bool> psd_ok;
    std::vector<double> stationarity_residual;  // |W~_tt Phi_t + H~_tt|
};

struct FeedbackSolution {
    int N = 0, n = 0, m = 0;
    Family P_tilde;  // k in [t, N]
    Family W_tilde;  // k in [t, N)
    Family H_tilde;
    std::vector<Matrix> Phi;
    bool feasible = false;
    std::optional<int> first_failure;  // largest t that fails (found first in the sweep)
    FeedbackDiagnostics diagnostics;
};

FeedbackSolution solve_feedback(const ProblemData& p, const Tolerances& tol = {});

// Same sweep written with the W~/H~ cross terms instead of the closed-loop
// quadratic form. Used as a cross-check only.
Family solve_feedback_expanded(const ProblemData& p, const Tolerances& tol = {});

// Requires Q >= 0, R > 0, G >= 0 (InvalidInput otherwise). True iff the
// solution is feasible, every W~_{t,k} > 0 and every P~_{t,k} >= 0.
bool assert_definite_case(const ProblemData& p, const FeedbackSolution& sol, const Tolerances& tol = {});

// Requires every family to be t-independent (InvalidInput otherwise). True iff
// P~_{t,k} does not depend on t and matches the standard GDRE.
bool reduce_to_standard(const ProblemData& p, const FeedbackSolution& sol, const Tolerances& tol = {});

}  // namespace tilq
