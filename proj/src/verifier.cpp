#include "tilq/verifier.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "tilq/errors.hpp"
#include "tilq/scenario_tree.hpp"

namespace tilq {

namespace {

// Continuation control at (level, node, state) for levels after the deviation.
using Continuation = std::function<Vector(int l, std::size_t node, const Vector& x)>;

struct StepSetup {
    int k;
    std::vector<Vector> x_k;     // equilibrium state at level-k nodes
    std::vector<Vector> u_k;     // candidate control at level-k nodes
    Continuation continuation;
    const Strategy* strategy;    // closed-loop continuation, or null
};

// Cost seen from level k at one node: row-k coefficients, u_k given,
// the continuation afterwards, conditional on the node.
double node_cost(const ProblemData& p, const ScenarioTree& tree, const StepSetup& s, std::size_t node,
                 const Vector& u_k) {
    const int k = s.k;
    const int N = p.N;
    std::function<double(int, std::size_t, const Vector&)> walk = [&](int l, std::size_t i, const Vector& x) {
        if (l == N) return x.dot(p.G[k] * x);
        Vector u = l == k ? u_k : s.continuation(l, i, x);
        double c = x.dot(p.Q.at(k, l) * x) + u.dot(p.R.at(k, l) * u);
        Vector drift = p.A.at(k, l) * x + p.B.at(k, l) * u;
        Vector diffusion = p.C.at(k, l) * x + p.D.at(k, l) * u;
        for (int j = 0; j < tree.support(); ++j)
            c += tree.branch_probability(j) * walk(l + 1, tree.child(i, j), drift + diffusion * tree.value(j));
        return c;
    };
    return walk(k, node, s.x_k[node]);
}

// Closed-loop (or plain) coefficients of row k at level l.
struct RowCoefficients {
    Matrix A, C, Q;
};

RowCoefficients row_coefficients(const ProblemData& p, int k, int l, const Strategy* strategy) {
    RowCoefficients r{p.A.at(k, l), p.C.at(k, l), p.Q.at(k, l)};
    if (strategy) {
        const Matrix& F = strategy->Phi[l];
        r.A += p.B.at(k, l) * F;
        r.C += p.D.at(k, l) * F;
        r.Q += F.transpose() * p.R.at(k, l) * F;
    }
    return r;
}

// E over one subtree of the second variation in u_k. Enumerates the
// branches, carrying M = dX/du_k.
Matrix deviation_hessian(const ProblemData& p, const ScenarioTree& tree, int k, const Strategy* strategy) {
    const int N = p.N;
    std::vector<RowCoefficients> rows;
    for (int l = k + 1; l < N; ++l) rows.push_back(row_coefficients(p, k, l, strategy));
    Matrix H = p.R.at(k, k);
    std::function<void(int, const Matrix&, double)> walk = [&](int l, const Matrix& M, double prob) {
        if (l == N) {
            H += prob * (M.transpose() * p.G[k] * M);
            return;
        }
        const RowCoefficients& r = rows[l - k - 1];
        H += prob * (M.transpose() * r.Q * M);
        for (int j = 0; j < tree.support(); ++j)
            walk(l + 1, (r.A + r.C * tree.value(j)) * M, prob * tree.branch_probability(j));
    };
    for (int j = 0; j < tree.support(); ++j)
        walk(k + 1, p.B.at(k, k) + p.D.at(k, k) * tree.value(j), tree.branch_probability(j));
    return symmetrize(H);
}

struct Equilibrium {
    ScenarioTree tree;
    TreeRun run;  // diagonal-row state and candidate controls from the start
};

Equilibrium build_equilibrium(const ProblemData& p, const InitialPair& start, const PolicySpec& candidate,
                              const NoiseModel& noise, int cap) {
    p.check_pair(start);
    if (start.t >= p.N) throw InvalidInput("initial time must be before the horizon");
    if (!noise.finite()) throw UnsupportedNoise("verification needs finitely supported noise");
    ScenarioTree tree(start.t, p.N, noise, cap);
    TreeRun run = forward_on_tree(p, tree, start.x, candidate, CoefficientRow::diagonal());
    return {std::move(tree), std::move(run)};
}

StepSetup make_setup(const Equilibrium& eq, int k, const Strategy* strategy) {
    StepSetup s;
    s.k = k;
    s.x_k = eq.run.X.levels[k - eq.run.X.first];
    s.u_k = eq.run.U.levels[k - eq.run.U.first];
    s.strategy = strategy;
    if (strategy) {
        s.continuation = [strategy](int l, std::size_t, const Vector& x) -> Vector { return strategy->Phi[l] * x; };
    } else {
        const NodeProcess* U = &eq.run.U;
        s.continuation = [U](int l, std::size_t i, const Vector&) -> Vector { return U->at(l, i); };
    }
    return s;
}

// State of the row-k system from the level-k equilibrium states under the continuation.
TreeRun row_state(const ProblemData& p, const ScenarioTree& tree, const StepSetup& s) {
    NodeControl control = [&](int l, std::size_t i, const Vector& x) -> Vector {
        return l == s.k ? s.u_k[i] : s.continuation(l, i, x);
    };
    return propagate(p, tree, s.k, s.x_k, control, CoefficientRow::anchored(s.k));
}

struct Probe {
    std::string name;
    Vector v;
};

std::vector<Probe> make_probes(const Vector& u, const Vector& g, const Matrix& H, const PsdReport& curv,
                               const VerifyOptions& opts, int k, std::size_t node) {
    const int m = static_cast<int>(u.size());
    const double s = std::max(1.0, u.norm());
    std::vector<Probe> probes;
    for (int j = 0; j < m; ++j) {
        probes.push_back({"basis+" + std::to_string(j), Vector::Unit(m, j) * s});
        probes.push_back({"basis-" + std::to_string(j), -Vector::Unit(m, j) * s});
    }
    std::seed_seq seq{static_cast<std::uint32_t>(opts.seed), static_cast<std::uint32_t>(opts.seed >> 32),
                      static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(node),
                      static_cast<std::uint32_t>(static_cast<std::uint64_t>(node) >> 32)};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> normal;
    for (int i = 0; i < opts.probes; ++i) {
        Vector z(m);
        for (int j = 0; j < m; ++j) z[j] = normal(rng);
        probes.push_back({"random", z * s});
    }
    const double threshold = opts.tol.psd_margin * curv.scale;
    if (curv.min_eigenvalue > threshold) {
        probes.push_back({"minimizer", -H.ldlt().solve(g)});
    } else if (curv.min_eigenvalue < -threshold) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(H);
        Vector d = es.eigenvectors().col(0);
        if (g.dot(d) > 0) d = -d;
        probes.push_back({"negative_curvature", d * s});
    }
    const double gn = g.norm();
    if (gn > 0) {
        double curvature = g.dot(H * g);
        double alpha = curvature > 0 ? gn * gn / curvature : s / gn;
        probes.push_back({"steepest_descent", -alpha * g});
    }
    return probes;
}

VerificationReport verify(const ProblemData& p, const InitialPair& start, const PolicySpec& candidate,
                          const Strategy* strategy, const VerifyOptions& opts) {
    opts.tol.validate();
    if (opts.probes < 0) throw InvalidInput("probe count must be non-negative");
    Equilibrium eq = build_equilibrium(p, start, candidate, opts.noise, opts.cap);
    const ScenarioTree& tree = eq.tree;

    VerificationReport report;
    report.kind = strategy ? "feedback" : "open_loop";
    report.start = start;
    report.noise = opts.noise.name();

    for (int k = start.t; k < p.N; ++k) {
        StepSetup s = make_setup(eq, k, strategy);
        TreeRun rowk = row_state(p, tree, s);
        NodeProcess Z = strategy ? solve_feedback_adjoint(p, tree, k, *strategy, rowk.X)
                                 : solve_adjoint(p, tree, k, rowk.X);

        StepCertificate c;
        c.k = k;
        c.hessian = deviation_hessian(p, tree, k, strategy);
        PsdReport curv = is_psd(c.hessian, opts.tol);
        c.convexity_margin = curv.min_eigenvalue;
        c.convexity_scale = curv.scale;
        c.convexity_ok = curv.psd;

        const Matrix& R = p.R.at(k, k);
        const Matrix& B = p.B.at(k, k);
        const Matrix& D = p.D.at(k, k);
        double worst_ratio = std::numeric_limits<double>::infinity();
        c.min_slack = 0.0;
        c.slack_scale = 1.0;
        c.worst_probe.clear();
        for (std::size_t i = 0; i < tree.size(k); ++i) {
            ConditionalMoments cm = conditional_moments(tree, Z, k, i);
            Vector Ru = R * s.u_k[i];
            Vector Bz = B.transpose() * cm.mean;
            Vector Dz = D.transpose() * cm.noise_weighted;
            Vector g = Ru + Bz + Dz;
            c.stationarity_residual = std::max(c.stationarity_residual, g.norm());
            c.stationarity_scale = std::max({c.stationarity_scale, Ru.norm(), Bz.norm(), Dz.norm()});

            const double j0 = node_cost(p, tree, s, i, s.u_k[i]);
            const double scale = std::max(1.0, std::abs(j0));
            for (const Probe& probe : make_probes(s.u_k[i], g, c.hessian, curv, opts, k, i)) {
                double slack = node_cost(p, tree, s, i, s.u_k[i] + probe.v) - j0;
                ++c.probes_evaluated;
                if (slack / scale < worst_ratio) {
                    worst_ratio = slack / scale;
                    c.min_slack = slack;
                    c.slack_scale = scale;
                    c.worst_probe = probe.name;
                }
            }
        }
        c.stationarity_ok = c.stationarity_residual <= opts.tol.residual_tol * c.stationarity_scale;
        c.slack_ok = c.probes_evaluated == 0 || c.min_slack >= -opts.slack_tol * c.slack_scale;
        if (!(c.stationarity_ok && c.convexity_ok && c.slack_ok)) report.failing.push_back(k);
        report.steps.push_back(std::move(c));
    }
    report.pass = report.failing.empty();
    return report;
}

}  // namespace

VerificationReport verify_open_loop(const ProblemData& p, const InitialPair& start, const PolicySpec& candidate,
                                    const VerifyOptions& opts) {
    return verify(p, start, candidate, nullptr, opts);
}

VerificationReport verify_feedback(const ProblemData& p, const Strategy& strategy, const InitialPair& start,
                                   const VerifyOptions& opts) {
    if (static_cast<int>(strategy.Phi.size()) < p.N) throw InvalidInput("strategy needs a matrix for every step");
    return verify(p, start, strategy, &strategy, opts);
}

DirectionalDerivatives directional_derivative_check(const ProblemData& p, const InitialPair& start,
                                                    const PolicySpec& candidate, Concept which, int k,
                                                    const Vector& direction, const NoiseModel& noise) {
    const Strategy* strategy = nullptr;
    if (which == Concept::feedback) {
        strategy = std::get_if<Strategy>(&candidate);
        if (!strategy) throw InvalidInput("feedback derivatives need a strategy candidate");
    }
    Equilibrium eq = build_equilibrium(p, start, candidate, noise, kEnumerationCap);
    const ScenarioTree& tree = eq.tree;
    if (k < start.t || k >= p.N) throw InvalidInput("deviation step outside [t, N)");
    if (direction.size() != p.m) throw InvalidInput("direction has the wrong dimension");

    StepSetup s = make_setup(eq, k, strategy);
    DirectionalDerivatives d;
    auto f = [&](double lambda) {
        double total = 0.0;
        for (std::size_t i = 0; i < tree.size(k); ++i)
            total += tree.probability(k, i) * node_cost(p, tree, s, i, s.u_k[i] + lambda * direction);
        return total;
    };
    d.f0 = f(0.0);
    d.f_plus = f(1.0);
    d.f_minus = f(-1.0);
    d.f_two = f(2.0);
    d.fd_first = (d.f_plus - d.f_minus) / 2.0;
    d.fd_second = d.f_plus + d.f_minus - 2.0 * d.f0;

    // Y-system: first variation of the row-k state along the direction.
    TreeRun rowk = row_state(p, tree, s);
    const int N = p.N;
    std::vector<Vector> Y(tree.size(k), Vector::Zero(p.n));
    const Matrix& R = p.R.at(k, k);
    for (std::size_t i = 0; i < tree.size(k); ++i) {
        double prob = tree.probability(k, i);
        d.first += 2.0 * prob * s.u_k[i].dot(R * direction);
        d.second += 2.0 * prob * direction.dot(R * direction);
    }
    for (int l = k; l < N; ++l) {
        std::vector<Vector> next(tree.size(l + 1));
        Matrix A, C;
        if (l == k) {
            A = p.B.at(k, k);
            C = p.D.at(k, k);
        } else {
            RowCoefficients r = row_coefficients(p, k, l, strategy);
            A = r.A;
            C = r.C;
        }
        for (std::size_t i = 0; i < tree.size(l); ++i) {
            const Vector& src = l == k ? direction : Y[i];
            Vector drift = A * src, diffusion = C * src;
            for (int j = 0; j < tree.support(); ++j) next[tree.child(i, j)] = drift + diffusion * tree.value(j);
        }
        Y = std::move(next);
        const int lv = l + 1;
        const Matrix W = lv == N ? p.G[k] : row_coefficients(p, k, lv, strategy).Q;
        for (std::size_t i = 0; i < tree.size(lv); ++i) {
            double prob = tree.probability(lv, i);
            d.first += 2.0 * prob * rowk.X.at(lv, i).dot(W * Y[i]);
            d.second += 2.0 * prob * Y[i].dot(W * Y[i]);
        }
    }
    const double predicted = d.f0 + 2.0 * d.first + 2.0 * d.second;
    d.quadratic = std::abs(d.f_two - predicted) <= 1e-9 * std::max({1.0, std::abs(d.f_two), std::abs(predicted)});
    return d;
}

namespace {

template <class PFamily>
DecouplingReport decoupling(const ProblemData& p, const PFamily& P, const PolicySpec& candidate,
                            const Strategy* strategy, const InitialPair& start, const NoiseModel& noise,
                            const Tolerances& tol) {
    Equilibrium eq = build_equilibrium(p, start, candidate, noise, kEnumerationCap);
    const ScenarioTree& tree = eq.tree;
    DecouplingReport r;
    for (int k = start.t; k < p.N; ++k) {
        StepSetup s = make_setup(eq, k, strategy);
        TreeRun rowk = row_state(p, tree, s);
        NodeProcess Z = strategy ? solve_feedback_adjoint(p, tree, k, *strategy, rowk.X)
                                 : solve_adjoint(p, tree, k, rowk.X);
        for (int l = k; l <= p.N; ++l) {
            const Matrix& Pkl = P.at(k, l);
            for (std::size_t i = 0; i < tree.size(l); ++i) {
                const Vector& x = rowk.X.at(l, i);
                r.max_error = std::max(r.max_error, (Z.at(l, i) - Pkl * x).norm());
                r.scale = std::max(r.scale, Pkl.norm() * x.norm());
            }
        }
    }
    r.ok = r.max_error <= tol.residual_tol * r.scale;
    return r;
}

}  // namespace

DecouplingReport check_open_loop_decoupling(const ProblemData& p, const OpenLoopSolution& sol, const InitialPair& start,
                                            const NoiseModel& noise, const Tolerances& tol) {
    if (!sol.feasible) throw FeasibilityError("open-loop solution is infeasible");
    return decoupling(p, sol.P, GainSequence{sol.gains}, nullptr, start, noise, tol);
}

DecouplingReport check_feedback_decoupling(const ProblemData& p, const FeedbackSolution& sol, const InitialPair& start,
                                           const NoiseModel& noise, const Tolerances& tol) {
    if (!sol.feasible) throw FeasibilityError("feedback solution is infeasible");
    Strategy s{sol.Phi};
    return decoupling(p, sol.P_tilde, s, &s, start, noise, tol);
}

}  // namespace tilq
