#pragma once

#include <vector>

#include "tilq/problem.hpp"

namespace tilq {

struct OpenLoopDiagnostics {
    // Per t: |W_tt W_tt^+ H_tt - H_tt| and the scale it is compared against.
    std::vector<double> constraint_residual;
    std::vector<double> constraint_scale;
    std::vector<bool> constraint_ok;
    // Per t: R_tt + B_t^T S_{t,t+1} B_t + D_t^T S_{t,t+1} D_t and its smallest eigenvalue.
    std::vector<Matrix> convexity;
    std::vector<double> convexity_min_eig;
    std::vector<bool> convexity_ok;
    // Per k: |W_kk K_k + H_kk|.
    std::vector<double> gain_residual;
};

struct OpenLoopSolution {
    int N = 0, n = 0, m = 0;
    Family P;  // nonsymmetric in general, k in [t, N]
    Family S;  // symmetric, k in [t, N]
    std::vector<Matrix> W_diag, H_diag;
    Family H_cross;  // H_{t,k}, k in [t, N)
    std::vector<Matrix> gains;
    bool feasible = false;
    OpenLoopDiagnostics diagnostics;
};

// Requires t-independent dynamics; general problems raise UnsupportedStructure.
OpenLoopSolution solve_open_loop(const ProblemData& p, const Tolerances& tol = {});

// Throws FeasibilityError for an infeasible solution.
std::vector<Matrix> open_loop_gains(const OpenLoopSolution& sol);

struct StandardLQData {
    int N = 0;
    std::vector<Matrix> A, B, C, D, Q, R;  // indexed by absolute k in [0, N)
    Matrix G;
};

struct StandardLQSolution {
    int t_start = 0;
    std::vector<Matrix> P;      // indexed by k, entries k < t_start empty; P[N] = G
    std::vector<Matrix> W, H;   // indexed by k
    std::vector<Matrix> gains;  // indexed by k
    std::vector<double> W_min_eig;
    bool feasible = false;
};

StandardLQSolution solve_standard_lq(const StandardLQData& data, int t_start, const Tolerances& tol = {});

// The pre-commitment problem seen from initial time `anchor`: row `anchor`
// of every coefficient family and terminal weight G_anchor.
StandardLQData precommitment_data(const ProblemData& p, int anchor);

struct InconsistencyReport {
    int t0 = 0, t1 = 0;
    Matrix gain_from_t0;  // gain at step t1 of the problem anchored at t0
    Matrix gain_from_t1;  // gain at step t1 of the problem anchored at t1
    double difference = 0.0;
    bool feasible = false;
    StandardLQSolution from_t0, from_t1;
};

InconsistencyReport demonstrate_inconsistency(const ProblemData& p, int t0, int t1, const Tolerances& tol = {});

}  // namespace tilq
