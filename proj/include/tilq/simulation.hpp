#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "tilq/noise.hpp"
#include "tilq/problem.hpp"

namespace tilq {

struct GainSequence {
    std::vector<Matrix> K;  // u_k = K_k X_k, indexed by absolute k
};

struct Strategy {
    std::vector<Matrix> Phi;  // u_k = Phi_k X_k, indexed by absolute k
};

// u_k as a function of the draws w_t, ..., w_{k-1} since the start and the
// current state. Called concurrently by the parallel kernels.
using ControlFn = std::function<Vector(int k, std::span<const double> history, const Vector& state)>;

struct PathControls {
    ControlFn fn;
};

using PolicySpec = std::variant<GainSequence, PathControls, Strategy>;

Vector policy_control(const PolicySpec& policy, int k, std::span<const double> history, const Vector& x);

// Which coefficient row drives step k: the diagonal A_{k,k} (equilibrium
// state) or a fixed initial time t (A_{t,k}, the system seen from t).
struct CoefficientRow {
    enum class Kind { diagonal, anchored };
    Kind kind = Kind::diagonal;
    int t = 0;

    static CoefficientRow diagonal() { return {}; }
    static CoefficientRow anchored(int t) { return {Kind::anchored, t}; }
    int row(int k) const { return kind == Kind::diagonal ? k : t; }
};

struct Trajectory {
    InitialPair start;
    std::vector<Vector> states;    // X_t, ..., X_N
    std::vector<Vector> controls;  // u_t, ..., u_{N-1}
    NoisePath path;
};

Trajectory simulate(const ProblemData& p, const InitialPair& start, const PolicySpec& policy, const NoisePath& path,
                    CoefficientRow row = CoefficientRow::diagonal());

// Pathwise cost with weights Q_{anchor,k}, R_{anchor,k}, G_anchor summed
// over steps k >= max(anchor, start.t).
double evaluate_cost(const ProblemData& p, int anchor, const Trajectory& traj);

constexpr int kEnumerationCap = 20;

// All support^steps paths, oldest draw most significant in the index.
std::vector<NoisePath> enumerate_paths(const NoiseModel& noise, int steps, int cap = kEnumerationCap);

// E[cost] by enumerating every noise path. The row defaults to anchored(anchor).
// The tree is cut at a fixed depth and the subtrees are walked in parallel;
// the reduction order is fixed, so the result does not depend on the thread count.
double exact_expected_cost(const ProblemData& p, int anchor, const InitialPair& start, const PolicySpec& policy,
                           const NoiseModel& noise, std::optional<CoefficientRow> row = std::nullopt,
                           int cap = kEnumerationCap);

// Depth-first reference walk of the same tree.
double exact_expected_cost_serial(const ProblemData& p, int anchor, const InitialPair& start, const PolicySpec& policy,
                                  const NoiseModel& noise, std::optional<CoefficientRow> row = std::nullopt,
                                  int cap = kEnumerationCap);

struct MonteCarloResult {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t samples = 0;
};

// Samples are drawn in fixed blocks, each with its own generator derived from
// (seed, block), so results are identical for any thread count.
MonteCarloResult monte_carlo_cost(const ProblemData& p, int anchor, const InitialPair& start, const PolicySpec& policy,
                                  const NoiseModel& noise, std::size_t samples, std::uint64_t seed,
                                  std::optional<CoefficientRow> row = std::nullopt);

MonteCarloResult monte_carlo_cost_serial(const ProblemData& p, int anchor, const InitialPair& start,
                                         const PolicySpec& policy, const NoiseModel& noise, std::size_t samples,
                                         std::uint64_t seed, std::optional<CoefficientRow> row = std::nullopt);

namespace detail {

constexpr std::size_t kMinSubtrees = 256;
constexpr std::size_t kSampleBlock = 4096;

void check_policy(const ProblemData& p, const InitialPair& start, const PolicySpec& policy);
CoefficientRow resolve_row(const ProblemData& p, int anchor, const InitialPair& start, std::optional<CoefficientRow> row);
std::size_t path_count(const NoiseModel& noise, int steps, int cap);
void fill_path(const NoiseModel& noise, std::size_t index, int steps, std::vector<double>& w, double& prob);
std::mt19937_64 block_rng(std::uint64_t seed, std::size_t block);

// Probability-weighted cost of the subtree below (k, x); `history` holds the
// draws from the start to k and is restored on return.
double subtree_cost(const ProblemData& p, int anchor, const PolicySpec& policy, const NoiseModel& noise,
                    CoefficientRow row, int k, const Vector& x, double prob, std::vector<double>& history);

// Cost of one path, without building a Trajectory.
double path_cost(const ProblemData& p, int anchor, const InitialPair& start, const PolicySpec& policy,
                 CoefficientRow row, std::span<const double> w);

struct Moments {
    std::size_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;
    void add(double x);
    void merge(const Moments& o);
};

Moments sample_block(const ProblemData& p, int anchor, const InitialPair& start, const PolicySpec& policy,
                     const NoiseModel& noise, CoefficientRow row, std::uint64_t seed, std::size_t block,
                     std::size_t count);
MonteCarloResult finish(const Moments& m);

}  // namespace detail

}  // namespace tilq
