#include "tilq/scenario_tree.hpp"

#include <string>

#include "tilq/errors.hpp"

namespace tilq {

ScenarioTree::ScenarioTree(int t0, int N, const NoiseModel& noise, int cap) : t0_(t0), N_(N) {
    if (t0 < 0 || t0 > N) throw InvalidInput("scenario tree root outside [0, N]");
    detail::path_count(noise, N - t0, cap);
    S_ = noise.support();
    values_ = noise.values();
    probs_ = noise.probabilities();
    sizes_.resize(N - t0 + 1);
    sizes_[0] = 1;
    for (int l = 1; l <= N - t0; ++l) sizes_[l] = sizes_[l - 1] * S_;
}

std::size_t ScenarioTree::size(int level) const {
    if (level < t0_ || level > N_) throw InvalidInput("tree level out of range");
    return sizes_[level - t0_];
}

double ScenarioTree::probability(int level, std::size_t node) const {
    double prob = 1.0;
    for (int l = level; l > t0_; --l) {
        prob *= probs_[node % S_];
        node /= S_;
    }
    return prob;
}

std::vector<double> ScenarioTree::history(int level, std::size_t node) const {
    std::vector<double> h(level - t0_);
    for (int i = level - t0_ - 1; i >= 0; --i) {
        h[i] = values_[node % S_];
        node /= S_;
    }
    return h;
}

TreeRun propagate(const ProblemData& p, const ScenarioTree& tree, int from, const std::vector<Vector>& x_from,
                  const NodeControl& control, CoefficientRow row) {
    const int N = tree.horizon();
    if (N != p.N) throw InvalidInput("scenario tree horizon does not match the problem");
    if (x_from.size() != tree.size(from)) throw InvalidInput("initial states do not match the tree level");
    if (row.kind == CoefficientRow::Kind::anchored && row.t > from)
        throw InvalidInput("coefficient row is undefined before its initial time");
    TreeRun run;
    run.X.first = from;
    run.U.first = from;
    run.X.levels.resize(N - from + 1);
    run.U.levels.resize(N - from);
    run.X.levels[0] = x_from;
    for (int l = from; l < N; ++l) {
        const int r = row.row(l);
        const Matrix &A = p.A.at(r, l), &B = p.B.at(r, l), &C = p.C.at(r, l), &D = p.D.at(r, l);
        auto& xs = run.X.levels[l - from];
        auto& us = run.U.levels[l - from];
        auto& next = run.X.levels[l - from + 1];
        us.resize(xs.size());
        next.resize(tree.size(l + 1));
        for (std::size_t i = 0; i < xs.size(); ++i) {
            us[i] = control(l, i, xs[i]);
            if (us[i].size() != p.m) throw InvalidInput("control at level " + std::to_string(l) + " has the wrong dimension");
            Vector drift = A * xs[i] + B * us[i];
            Vector diffusion = C * xs[i] + D * us[i];
            for (int j = 0; j < tree.support(); ++j) next[tree.child(i, j)] = drift + diffusion * tree.value(j);
        }
    }
    return run;
}

TreeRun forward_on_tree(const ProblemData& p, const ScenarioTree& tree, const Vector& x0, const PolicySpec& policy,
                        CoefficientRow row) {
    detail::check_policy(p, {tree.t0(), x0}, policy);
    NodeControl control = [&](int l, std::size_t node, const Vector& x) {
        if (std::holds_alternative<PathControls>(policy)) {
            std::vector<double> h = tree.history(l, node);
            return policy_control(policy, l, h, x);
        }
        return policy_control(policy, l, {}, x);
    };
    return propagate(p, tree, tree.t0(), {x0}, control, row);
}

ConditionalMoments conditional_moments(const ScenarioTree& tree, const NodeProcess& Z, int level, std::size_t node) {
    ConditionalMoments cm;
    for (int j = 0; j < tree.support(); ++j) {
        const Vector& z = Z.at(level + 1, tree.child(node, j));
        double pj = tree.branch_probability(j);
        if (j == 0) {
            cm.mean = pj * z;
            cm.noise_weighted = (pj * tree.value(j)) * z;
        } else {
            cm.mean += pj * z;
            cm.noise_weighted += (pj * tree.value(j)) * z;
        }
    }
    return cm;
}

namespace {

NodeProcess backward(const ProblemData& p, const ScenarioTree& tree, int anchor, const NodeProcess& X,
                     const Strategy* strategy) {
    const int N = p.N;
    if (anchor < tree.t0() || anchor >= N) throw InvalidInput("adjoint anchor outside the tree");
    if (X.first > anchor || X.last() != N) throw InvalidInput("state process must cover the anchor through N");
    NodeProcess Z;
    Z.first = anchor;
    Z.levels.resize(N - anchor + 1);
    auto& last = Z.levels[N - anchor];
    last.resize(tree.size(N));
    for (std::size_t i = 0; i < last.size(); ++i) last[i] = p.G[anchor] * X.at(N, i);

    for (int l = N - 1; l >= anchor; --l) {
        Matrix A = p.A.at(anchor, l), C = p.C.at(anchor, l), Q = p.Q.at(anchor, l);
        if (strategy) {
            const Matrix& F = strategy->Phi[l];
            A += p.B.at(anchor, l) * F;
            C += p.D.at(anchor, l) * F;
            Q += F.transpose() * p.R.at(anchor, l) * F;
        }
        auto& zs = Z.levels[l - anchor];
        zs.resize(tree.size(l));
        for (std::size_t i = 0; i < zs.size(); ++i) {
            ConditionalMoments cm = conditional_moments(tree, Z, l, i);
            zs[i] = A.transpose() * cm.mean + C.transpose() * cm.noise_weighted + Q * X.at(l, i);
        }
    }
    return Z;
}

}  // namespace

NodeProcess solve_adjoint(const ProblemData& p, const ScenarioTree& tree, int anchor, const NodeProcess& X) {
    return backward(p, tree, anchor, X, nullptr);
}

NodeProcess solve_feedback_adjoint(const ProblemData& p, const ScenarioTree& tree, int anchor, const Strategy& s,
                                   const NodeProcess& X) {
    if (static_cast<int>(s.Phi.size()) < p.N) throw InvalidInput("strategy needs a matrix for every step");
    return backward(p, tree, anchor, X, &s);
}

}  // namespace tilq
