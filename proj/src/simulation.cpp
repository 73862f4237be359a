#include "tilq/simulation.hpp"

#include <exception>
#include <string>

#include "tilq/errors.hpp"

namespace tilq {

Vector policy_control(const PolicySpec& policy, int k, std::span<const double> history, const Vector& x) {
    if (const auto* g = std::get_if<GainSequence>(&policy)) return g->K[k] * x;
    if (const auto* s = std::get_if<Strategy>(&policy)) return s->Phi[k] * x;
    return std::get<PathControls>(policy).fn(k, history, x);
}

namespace detail {

void check_policy(const ProblemData& p, const InitialPair& start, const PolicySpec& policy) {
    p.check_pair(start);
    const std::vector<Matrix>* mats = nullptr;
    if (const auto* g = std::get_if<GainSequence>(&policy)) mats = &g->K;
    if (const auto* s = std::get_if<Strategy>(&policy)) mats = &s->Phi;
    if (mats) {
        if (static_cast<int>(mats->size()) < p.N) throw InvalidInput("policy needs a matrix for every step up to N-1");
        for (int k = start.t; k < p.N; ++k) {
            const Matrix& M = (*mats)[k];
            if (M.rows() != p.m || M.cols() != p.n)
                throw InvalidInput("policy matrix at step " + std::to_string(k) + " must be m x n");
        }
    } else if (!std::get<PathControls>(policy).fn) {
        throw InvalidInput("path controls need a control function");
    }
}

CoefficientRow resolve_row(const ProblemData& p, int anchor, const InitialPair& start, std::optional<CoefficientRow> row) {
    if (anchor < 0 || anchor >= p.N) throw InvalidInput("anchor outside [0, N)");
    CoefficientRow r = row.value_or(CoefficientRow::anchored(anchor));
    if (r.kind == CoefficientRow::Kind::anchored && (r.t < 0 || r.t > start.t))
        throw InvalidInput("coefficient row " + std::to_string(r.t) + " is undefined from start time " +
                           std::to_string(start.t));
    return r;
}

std::size_t path_count(const NoiseModel& noise, int steps, int cap) {
    if (!noise.finite()) throw UnsupportedNoise("exact enumeration needs finitely supported noise, got " + noise.name());
    if (steps > cap)
        throw ResourceError("enumeration of " + std::to_string(steps) + " steps exceeds the cap of " + std::to_string(cap));
    std::size_t total = 1;
    for (int i = 0; i < steps; ++i) total *= static_cast<std::size_t>(noise.support());
    return total;
}

void fill_path(const NoiseModel& noise, std::size_t index, int steps, std::vector<double>& w, double& prob) {
    const std::size_t S = static_cast<std::size_t>(noise.support());
    w.resize(steps);
    prob = 1.0;
    for (int j = steps - 1; j >= 0; --j) {
        std::size_t d = index % S;
        index /= S;
        w[j] = noise.values()[d];
        prob *= noise.probabilities()[d];
    }
}

std::mt19937_64 block_rng(std::uint64_t seed, std::size_t block) {
    std::uint64_t b = block;
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
    return std::mt19937_64(seq);
}

double path_cost(const ProblemData& p, int anchor, const InitialPair& start, const PolicySpec& policy,
                 CoefficientRow row, std::span<const double> w) {
    Vector x = start.x;
    double cost = 0.0;
    for (int k = start.t; k < p.N; ++k) {
        const int i = k - start.t;
        Vector u = policy_control(policy, k, w.first(i), x);
        if (u.size() != p.m) throw InvalidInput("control at step " + std::to_string(k) + " has the wrong dimension");
        if (k >= anchor) cost += x.dot(p.Q.at(anchor, k) * x) + u.dot(p.R.at(anchor, k) * u);
        const int r = row.row(k);
        x = p.A.at(r, k) * x + p.B.at(r, k) * u + (p.C.at(r, k) * x + p.D.at(r, k) * u) * w[i];
    }
    return cost + x.dot(p.G[anchor] * x);
}

void Moments::add(double x) {
    ++n;
    double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
}

void Moments::merge(const Moments& o) {
    if (o.n == 0) return;
    if (n == 0) {
        *this = o;
        return;
    }
    double na = static_cast<double>(n), nb = static_cast<double>(o.n), tot = na + nb;
    double d = o.mean - mean;
    mean += d * nb / tot;
    m2 += o.m2 + d * d * na * nb / tot;
    n += o.n;
}

Moments sample_block(const ProblemData& p, int anchor, const InitialPair& start, const PolicySpec& policy,
                     const NoiseModel& noise, CoefficientRow row, std::uint64_t seed, std::size_t block,
                     std::size_t count) {
    std::mt19937_64 rng = block_rng(seed, block);
    const int steps = p.N - start.t;
    std::vector<double> w(steps);
    Moments m;
    for (std::size_t s = 0; s < count; ++s) {
        for (int j = 0; j < steps; ++j) w[j] = noise.sample(rng);
        m.add(path_cost(p, anchor, start, policy, row, w));
    }
    return m;
}

MonteCarloResult finish(const Moments& m) {
    MonteCarloResult r;
    r.samples = m.n;
    r.mean = m.mean;
    if (m.n > 1) r.std_error = std::sqrt(m.m2 / static_cast<double>(m.n - 1) / static_cast<double>(m.n));
    return r;
}

}  // namespace detail

namespace {

double pairwise_sum(const std::vector<double>& v, std::size_t lo, std::size_t hi) {
    if (hi - lo == 1) return v[lo];
    std::size_t mid = lo + (hi - lo) / 2;
    return pairwise_sum(v, lo, mid) + pairwise_sum(v, mid, hi);
}

}  // namespace

Trajectory simulate(const ProblemData& p, const InitialPair& start, const PolicySpec& policy, const NoisePath& path,
                    CoefficientRow row) {
    detail::check_policy(p, start, policy);
    const int steps = p.N - start.t;
    if (static_cast<int>(path.values.size()) != steps)
        throw InvalidInput("noise path has " + std::to_string(path.values.size()) + " values, expected " +
                           std::to_string(steps));
    if (row.kind == CoefficientRow::Kind::anchored && (row.t < 0 || row.t > start.t))
        throw InvalidInput("coefficient row is undefined from this start time");

    Trajectory tr;
    tr.start = start;
    tr.path = path;
    tr.states.reserve(steps + 1);
    tr.controls.reserve(steps);
    tr.states.push_back(start.x);
    std::span<const double> w(path.values);
    for (int k = start.t; k < p.N; ++k) {
        const int i = k - start.t;
        const Vector& x = tr.states.back();
        Vector u = policy_control(policy, k, w.first(i), x);
        if (u.size() != p.m) throw InvalidInput("control at step " + std::to_string(k) + " has the wrong dimension");
        const int r = row.row(k);
        Vector next = p.A.at(r, k) * x + p.B.at(r, k) * u + (p.C.at(r, k) * x + p.D.at(r, k) * u) * w[i];
        tr.controls.push_back(std::move(u));
        tr.states.push_back(std::move(next));
    }
    return tr;
}

double evaluate_cost(const ProblemData& p, int anchor, const Trajectory& traj) {
    if (anchor < 0 || anchor >= p.N) throw InvalidInput("anchor outside [0, N)");
    const int t = traj.start.t;
    if (t < 0 || t >= p.N || static_cast<int>(traj.states.size()) != p.N - t + 1 ||
        static_cast<int>(traj.controls.size()) != p.N - t)
        throw InvalidInput("trajectory does not cover its start time through N");
    double cost = 0.0;
    for (int k = std::max(anchor, t); k < p.N; ++k) {
        const Vector& x = traj.states[k - t];
        const Vector& u = traj.controls[k - t];
        cost += x.dot(p.Q.at(anchor, k) * x) + u.dot(p.R.at(anchor, k) * u);
    }
    const Vector& xN = traj.states.back();
    return cost + xN.dot(p.G[anchor] * xN);
}

std::vector<NoisePath> enumerate_paths(const NoiseModel& noise, int steps, int cap) {
    std::size_t total = detail::path_count(noise, steps, cap);
    std::vector<NoisePath> out(total);
    for (std::size_t i = 0; i < total; ++i) detail::fill_path(noise, i, steps, out[i].values, out[i].probability);
    return out;
}

double exact_expected_cost(const ProblemData& p, int anchor, const InitialPair& start, const PolicySpec& policy,
                           const NoiseModel& noise, std::optional<CoefficientRow> row, int cap) {
    detail::check_policy(p, start, policy);
    CoefficientRow r = detail::resolve_row(p, anchor, start, row);
    const int steps = p.N - start.t;
    detail::path_count(noise, steps, cap);
    const int S = noise.support();
    // Cut depth: the first level with at least kMinSubtrees nodes.
    int depth = 0;
    std::size_t subtrees = 1;
    while (depth < steps && subtrees < detail::kMinSubtrees) {
        subtrees *= S;
        ++depth;
    }
    std::vector<double> partial(subtrees, 0.0);
    std::exception_ptr error;

#pragma omp parallel for schedule(dynamic, 4)
    for (long long i = 0; i < static_cast<long long>(subtrees); ++i) {
        try {
            std::vector<double> history;
            double prob = 1.0;
            detail::fill_path(noise, static_cast<std::size_t>(i), depth, history, prob);
            // Stage costs along the prefix, each carried with this prefix's probability.
            Vector x = start.x;
            double sum = 0.0;
            for (int d = 0; d < depth; ++d) {
                const int k = start.t + d;
                std::span<const double> h(history.data(), d);
                Vector u = policy_control(policy, k, h, x);
                if (u.size() != p.m) throw InvalidInput("control has the wrong dimension");
                if (k >= anchor) sum += x.dot(p.Q.at(anchor, k) * x) + u.dot(p.R.at(anchor, k) * u);
                const int rr = r.row(k);
                const double w = history[d];
                x = p.A.at(rr, k) * x + p.B.at(rr, k) * u + (p.C.at(rr, k) * x + p.D.at(rr, k) * u) * w;
            }
            partial[i] = prob * sum + detail::subtree_cost(p, anchor, policy, noise, r, start.t + depth, x, prob, history);
        } catch (...) {
#pragma omp critical(tilq_exact_error)
            if (!error) error = std::current_exception();
        }
    }
    if (error) std::rethrow_exception(error);
    return pairwise_sum(partial, 0, subtrees);
}

MonteCarloResult monte_carlo_cost(const ProblemData& p, int anchor, const InitialPair& start, const PolicySpec& policy,
                                  const NoiseModel& noise, std::size_t samples, std::uint64_t seed,
                                  std::optional<CoefficientRow> row) {
    detail::check_policy(p, start, policy);
    CoefficientRow r = detail::resolve_row(p, anchor, start, row);
    if (samples == 0) throw InvalidInput("Monte Carlo needs at least one sample");
    const std::size_t blocks = (samples + detail::kSampleBlock - 1) / detail::kSampleBlock;
    std::vector<detail::Moments> partial(blocks);
    std::exception_ptr error;

#pragma omp parallel for schedule(static)
    for (long long b = 0; b < static_cast<long long>(blocks); ++b) {
        try {
            std::size_t lo = static_cast<std::size_t>(b) * detail::kSampleBlock;
            std::size_t count = std::min(samples, lo + detail::kSampleBlock) - lo;
            partial[b] = detail::sample_block(p, anchor, start, policy, noise, r, seed, b, count);
        } catch (...) {
#pragma omp critical(tilq_mc_error)
            if (!error) error = std::current_exception();
        }
    }
    if (error) std::rethrow_exception(error);
    detail::Moments total;
    for (const auto& m : partial) total.merge(m);
    return detail::finish(total);
}

}  // namespace tilq
