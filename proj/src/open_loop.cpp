#include "tilq/open_loop.hpp"

#include <string>

#include "tilq/errors.hpp"

namespace tilq {

namespace {

void require_valid(const ProblemData& p, const Tolerances& tol) {
    tol.validate();
    auto v = p.validate(tol);
    if (!v.empty()) throw InvalidInput("invalid problem data: " + v.front());
}

}  // namespace

OpenLoopSolution solve_open_loop(const ProblemData& p, const Tolerances& tol) {
    require_valid(p, tol);
    if (detect_mode(p, tol) == Mode::general || p.mode == Mode::general)
        throw UnsupportedStructure(
            "open-loop Riccati solve needs dynamics independent of the initial time; "
            "use the verifier for general coefficients");

    const int N = p.N;
    OpenLoopSolution s;
    s.N = N;
    s.n = p.n;
    s.m = p.m;
    s.P = Family(N, true);
    s.S = Family(N, true);
    s.H_cross = Family(N, false);
    s.W_diag.resize(N);
    s.H_diag.resize(N);
    s.gains.resize(N);
    auto& dg = s.diagnostics;
    dg.constraint_residual.assign(N, 0.0);
    dg.constraint_scale.assign(N, 1.0);
    dg.constraint_ok.assign(N, false);
    dg.convexity.resize(N);
    dg.convexity_min_eig.assign(N, 0.0);
    dg.convexity_ok.assign(N, false);
    dg.gain_residual.assign(N, 0.0);

    // Dynamics are the diagonal rows.
    auto A = [&](int k) -> const Matrix& { return p.A.at(k, k); };
    auto B = [&](int k) -> const Matrix& { return p.B.at(k, k); };
    auto C = [&](int k) -> const Matrix& { return p.C.at(k, k); };
    auto D = [&](int k) -> const Matrix& { return p.D.at(k, k); };

    for (int t = N - 1; t >= 0; --t) {
        s.P.at(t, N) = p.G[t];
        for (int k = N - 1; k >= t; --k) {
            const Matrix& Pn = s.P.at(t, k + 1);
            Matrix H = B(k).transpose() * Pn * A(k) + D(k).transpose() * Pn * C(k);
            if (k == t) {
                Matrix W = p.R.at(t, t) + B(t).transpose() * Pn * B(t) + D(t).transpose() * Pn * D(t);
                s.gains[t] = -pinv(W, tol) * H;
                s.W_diag[t] = W;
                s.H_diag[t] = H;
            }
            s.H_cross.at(t, k) = H;
            // Coupling term (A^T P B + C^T P D) K. Equals H^T K only when P_{t,k+1} is
            // symmetric; this form keeps Z = P X for nonsymmetric P.
            Matrix coupling = (A(k).transpose() * Pn * B(k) + C(k).transpose() * Pn * D(k)) * s.gains[k];
            s.P.at(t, k) = p.Q.at(t, k) + A(k).transpose() * Pn * A(k) + C(k).transpose() * Pn * C(k) + coupling;
        }
    }

    for (int t = N - 1; t >= 0; --t) {
        s.S.at(t, N) = p.G[t];
        for (int k = N - 1; k >= t; --k) {
            const Matrix& Sn = s.S.at(t, k + 1);
            s.S.at(t, k) = symmetrize(p.Q.at(t, k) + A(k).transpose() * Sn * A(k) + C(k).transpose() * Sn * C(k));
        }
    }

    bool feasible = true;
    for (int t = 0; t < N; ++t) {
        const Matrix& W = s.W_diag[t];
        const Matrix& H = s.H_diag[t];
        dg.constraint_scale[t] = residual_scale(W, H);
        dg.constraint_residual[t] = consistency_residual(W, H, tol);
        dg.constraint_ok[t] = dg.constraint_residual[t] <= tol.residual_tol * dg.constraint_scale[t];
        dg.gain_residual[t] = (W * s.gains[t] + H).norm();

        const Matrix& Sn = s.S.at(t, t + 1);
        dg.convexity[t] = p.R.at(t, t) + B(t).transpose() * Sn * B(t) + D(t).transpose() * Sn * D(t);
        PsdReport r = is_psd(dg.convexity[t], tol);
        dg.convexity_min_eig[t] = r.min_eigenvalue;
        dg.convexity_ok[t] = r.psd;
        feasible = feasible && dg.constraint_ok[t] && dg.convexity_ok[t];
    }
    s.feasible = feasible;
    return s;
}

std::vector<Matrix> open_loop_gains(const OpenLoopSolution& sol) {
    if (!sol.feasible) throw FeasibilityError("open-loop GDRE/LDE system is not solvable; no equilibrium gains");
    return sol.gains;
}

StandardLQData precommitment_data(const ProblemData& p, int anchor) {
    if (anchor < 0 || anchor >= p.N) throw InvalidInput("anchor outside [0, N)");
    StandardLQData d;
    d.N = p.N;
    d.A.resize(p.N);
    d.B.resize(p.N);
    d.C.resize(p.N);
    d.D.resize(p.N);
    d.Q.resize(p.N);
    d.R.resize(p.N);
    for (int k = anchor; k < p.N; ++k) {
        d.A[k] = p.A.at(anchor, k);
        d.B[k] = p.B.at(anchor, k);
        d.C[k] = p.C.at(anchor, k);
        d.D[k] = p.D.at(anchor, k);
        d.Q[k] = p.Q.at(anchor, k);
        d.R[k] = p.R.at(anchor, k);
    }
    d.G = p.G[anchor];
    return d;
}

StandardLQSolution solve_standard_lq(const StandardLQData& d, int t_start, const Tolerances& tol) {
    tol.validate();
    const int N = d.N;
    if (N <= 0 || t_start < 0 || t_start >= N) throw InvalidInput("standard LQ: start outside [0, N)");
    auto sized = [&](const std::vector<Matrix>& v) { return static_cast<int>(v.size()) == N; };
    if (!(sized(d.A) && sized(d.B) && sized(d.C) && sized(d.D) && sized(d.Q) && sized(d.R)))
        throw InvalidInput("standard LQ: every coefficient needs N entries");
    const Eigen::Index n = d.G.rows(), m = d.R[t_start].rows();
    if (d.G.cols() != n || n == 0) throw InvalidInput("standard LQ: terminal weight must be square");
    for (int k = t_start; k < N; ++k) {
        bool ok = d.A[k].rows() == n && d.A[k].cols() == n && d.C[k].rows() == n && d.C[k].cols() == n &&
                  d.B[k].rows() == n && d.B[k].cols() == m && d.D[k].rows() == n && d.D[k].cols() == m &&
                  d.Q[k].rows() == n && d.Q[k].cols() == n && d.R[k].rows() == m && d.R[k].cols() == m;
        if (!ok) throw InvalidInput("standard LQ: dimension mismatch at k=" + std::to_string(k));
    }

    StandardLQSolution s;
    s.t_start = t_start;
    s.P.resize(N + 1);
    s.W.resize(N);
    s.H.resize(N);
    s.gains.resize(N);
    s.W_min_eig.assign(N, 0.0);
    s.P[N] = d.G;
    bool feasible = true;
    for (int k = N - 1; k >= t_start; --k) {
        const Matrix& Pn = s.P[k + 1];
        Matrix W = d.R[k] + d.B[k].transpose() * Pn * d.B[k] + d.D[k].transpose() * Pn * d.D[k];
        Matrix H = d.B[k].transpose() * Pn * d.A[k] + d.D[k].transpose() * Pn * d.C[k];
        Matrix Wp = pinv(W, tol);
        s.W[k] = W;
        s.H[k] = H;
        s.gains[k] = -Wp * H;
        s.P[k] = symmetrize(d.Q[k] + d.A[k].transpose() * Pn * d.A[k] + d.C[k].transpose() * Pn * d.C[k] -
                            H.transpose() * Wp * H);
        PsdReport r = is_psd(W, tol);
        s.W_min_eig[k] = r.min_eigenvalue;
        feasible = feasible && r.psd && solve_consistency(W, H, tol);
    }
    s.feasible = feasible;
    return s;
}

InconsistencyReport demonstrate_inconsistency(const ProblemData& p, int t0, int t1, const Tolerances& tol) {
    if (!(0 <= t0 && t0 < t1 && t1 < p.N)) throw InvalidInput("need 0 <= t0 < t1 < N");
    InconsistencyReport r;
    r.t0 = t0;
    r.t1 = t1;
    r.from_t0 = solve_standard_lq(precommitment_data(p, t0), t0, tol);
    r.from_t1 = solve_standard_lq(precommitment_data(p, t1), t1, tol);
    r.gain_from_t0 = r.from_t0.gains[t1];
    r.gain_from_t1 = r.from_t1.gains[t1];
    r.difference = (r.gain_from_t0 - r.gain_from_t1).norm();
    r.feasible = r.from_t0.feasible && r.from_t1.feasible;
    return r;
}

}  // namespace tilq
