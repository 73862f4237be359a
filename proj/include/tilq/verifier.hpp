#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tilq/feedback.hpp"
#include "tilq/noise.hpp"
#include "tilq/open_loop.hpp"
#include "tilq/simulation.hpp"

namespace tilq {

struct VerifyOptions {
    int probes = 16;  // random node-wise deviations per node, on top of the fixed probes
    std::uint64_t seed = 0;
    double slack_tol = 1e-9;
    NoiseModel noise = NoiseModel::rademacher();
    int cap = kEnumerationCap;
    Tolerances tol;
};

struct StepCertificate {
    int k = 0;
    // max over F_{k-1} nodes of the first-order condition
    double stationarity_residual = 0.0;
    double stationarity_scale = 1.0;
    bool stationarity_ok = false;
    // Hessian of the deviated cost in u_k (the same at every node)
    Matrix hessian;
    double convexity_margin = 0.0;
    double convexity_scale = 1.0;
    bool convexity_ok = false;
    // min over nodes and probes of J(deviated) - J(candidate)
    double min_slack = 0.0;
    double slack_scale = 1.0;
    bool slack_ok = false;
    std::string worst_probe;
    std::size_t probes_evaluated = 0;
};

struct VerificationReport {
    std::string kind;  // "open_loop" or "feedback"
    InitialPair start;
    std::string noise;
    std::vector<StepCertificate> steps;
    bool pass = false;
    std::vector<int> failing;
};

// Continuation controls stay fixed as processes when u_k deviates.
VerificationReport verify_open_loop(const ProblemData& p, const InitialPair& start, const PolicySpec& candidate,
                                    const VerifyOptions& opts = {});

// Continuation controls Phi_l X_l respond to the deviated state.
VerificationReport verify_feedback(const ProblemData& p, const Strategy& strategy, const InitialPair& start,
                                   const VerifyOptions& opts = {});

enum class Concept { open_loop, feedback };

struct DirectionalDerivatives {
    double first = 0.0;      // from the adjoint-free Y-system formula
    double second = 0.0;
    double fd_first = 0.0;   // (f(1) - f(-1)) / 2
    double fd_second = 0.0;  // f(1) + f(-1) - 2 f(0)
    double f0 = 0.0, f_plus = 0.0, f_minus = 0.0, f_two = 0.0;
    // f(2) equals f(0) + 2 first + 2 second within 1e-9 relative
    bool quadratic = false;
};

// Derivatives of lambda -> E[J(k, X_k; u_k + lambda * direction, continuation)]
// where the expectation runs over the F_{k-1} nodes reached from start.
DirectionalDerivatives directional_derivative_check(const ProblemData& p, const InitialPair& start,
                                                    const PolicySpec& candidate, Concept which, int k,
                                                    const Vector& direction,
                                                    const NoiseModel& noise = NoiseModel::rademacher());

struct DecouplingReport {
    double max_error = 0.0;
    double scale = 1.0;
    bool ok = false;
};

// Max over k, levels l >= k and nodes of |Z^k_l - P_{k,l} X_l|.
DecouplingReport check_open_loop_decoupling(const ProblemData& p, const OpenLoopSolution& sol, const InitialPair& start,
                                            const NoiseModel& noise = NoiseModel::rademacher(),
                                            const Tolerances& tol = {});
// Same with P~_{k,l} and the state seen from k under the strategy.
DecouplingReport check_feedback_decoupling(const ProblemData& p, const FeedbackSolution& sol, const InitialPair& start,
                                           const NoiseModel& noise = NoiseModel::rademacher(),
                                           const Tolerances& tol = {});

}  // namespace tilq
