#pragma once

#include <functional>
#include <vector>

#include "tilq/noise.hpp"
#include "tilq/problem.hpp"
#include "tilq/simulation.hpp"

namespace tilq {

// Noise tree from level t0 (root) to level N. A node at level l is the
// history w_{t0}, ..., w_{l-1}; its index is that history read as base-S
// digits, oldest draw most significant, so the children of node i at level
// l are i*S + j.
class ScenarioTree {
public:
    ScenarioTree(int t0, int N, const NoiseModel& noise, int cap = kEnumerationCap);

    int t0() const { return t0_; }
    int horizon() const { return N_; }
    int support() const { return S_; }
    std::size_t size(int level) const;
    double probability(int level, std::size_t node) const;
    double value(int j) const { return values_[j]; }
    double branch_probability(int j) const { return probs_[j]; }
    std::size_t child(std::size_t node, int j) const { return node * S_ + j; }
    std::vector<double> history(int level, std::size_t node) const;

private:
    int t0_, N_, S_;
    std::vector<double> values_, probs_;
    std::vector<std::size_t> sizes_;
};

// Values per node for levels first..last.
struct NodeProcess {
    int first = 0;
    std::vector<std::vector<Vector>> levels;

    int last() const { return first + static_cast<int>(levels.size()) - 1; }
    Vector& at(int level, std::size_t node) { return levels[level - first][node]; }
    const Vector& at(int level, std::size_t node) const { return levels[level - first][node]; }
};

using NodeControl = std::function<Vector(int level, std::size_t node, const Vector& x)>;

struct TreeRun {
    NodeProcess X;  // levels from..N
    NodeProcess U;  // levels from..N-1
};

// X_{l+1} = A X + B u + (C X + D u) w from `from`, with the given row of
// coefficients and u = control(l, node, X_l).
TreeRun propagate(const ProblemData& p, const ScenarioTree& tree, int from, const std::vector<Vector>& x_from,
                  const NodeControl& control, CoefficientRow row);

TreeRun forward_on_tree(const ProblemData& p, const ScenarioTree& tree, const Vector& x0, const PolicySpec& policy,
                        CoefficientRow row = CoefficientRow::diagonal());

struct ConditionalMoments {
    Vector mean;           // E(Z_{l+1} | F_{l-1})
    Vector noise_weighted; // E(Z_{l+1} w_l | F_{l-1})
};

ConditionalMoments conditional_moments(const ScenarioTree& tree, const NodeProcess& Z, int level, std::size_t node);

// Backward adjoint anchored at k with row-k coefficients, over levels k..N:
// Z_N = G_k X_N, Z_l = A^T E(Z_{l+1}) + C^T E(Z_{l+1} w_l) + Q_{k,l} X_l.
// X must cover levels k..N. Needs finitely supported noise.
NodeProcess solve_adjoint(const ProblemData& p, const ScenarioTree& tree, int anchor, const NodeProcess& X);

// Same with closed-loop coefficients A + B Phi_l, C + D Phi_l and weight Q + Phi^T R Phi.
NodeProcess solve_feedback_adjoint(const ProblemData& p, const ScenarioTree& tree, int anchor, const Strategy& s,
                                   const NodeProcess& X);

}  // namespace tilq
