#include "tilq/feedback.hpp"

#include "tilq/errors.hpp"
#include "tilq/open_loop.hpp"

namespace tilq {

namespace {

void require_valid(const ProblemData& p, const Tolerances& tol) {
    tol.validate();
    auto v = p.validate(tol);
    if (!v.empty()) throw InvalidInput("invalid problem data: " + v.front());
}

struct Aggregates {
    Matrix W, H;
};

Aggregates aggregates(const ProblemData& p, int t, int k, const Matrix& Pn) {
    const Matrix &A = p.A.at(t, k), &B = p.B.at(t, k), &C = p.C.at(t, k), &D = p.D.at(t, k);
    Matrix PB = Pn * B, PD = Pn * D;
    return {p.R.at(t, k) + B.transpose() * PB + D.transpose() * PD,
            PB.transpose() * A + PD.transpose() * C};
}

}  // namespace

FeedbackSolution solve_feedback(const ProblemData& p, const Tolerances& tol) {
    require_valid(p, tol);
    const int N = p.N;
    FeedbackSolution s;
    s.N = N;
    s.n = p.n;
    s.m = p.m;
    s.P_tilde = Family(N, true);
    s.W_tilde = Family(N, false);
    s.H_tilde = Family(N, false);
    s.Phi.resize(N);
    auto& dg = s.diagnostics;
    dg.constraint_residual.assign(N, 0.0);
    dg.constraint_scale.assign(N, 1.0);
    dg.constraint_ok.assign(N, false);
    dg.W_eigenvalues.resize(N);
    dg.W_min_eig.assign(N, 0.0);
    dg.psd_ok.assign(N, false);
    dg.stationarity_residual.assign(N, 0.0);

    bool feasible = true;
    for (int t = N - 1; t >= 0; --t) {
        s.P_tilde.at(t, N) = p.G[t];
        for (int k = N - 1; k >= t; --k) {
            const Matrix& Pn = s.P_tilde.at(t, k + 1);
            Aggregates ag = aggregates(p, t, k, Pn);
            s.W_tilde.at(t, k) = ag.W;
            s.H_tilde.at(t, k) = ag.H;
            if (k == t) {
                s.Phi[t] = -pinv(ag.W, tol) * ag.H;
                dg.constraint_scale[t] = residual_scale(ag.W, ag.H);
                dg.constraint_residual[t] = consistency_residual(ag.W, ag.H, tol);
                dg.constraint_ok[t] = dg.constraint_residual[t] <= tol.residual_tol * dg.constraint_scale[t];
                dg.W_eigenvalues[t] = sym_eigenvalues(ag.W);
                PsdReport r = is_psd(ag.W, tol);
                dg.W_min_eig[t] = r.min_eigenvalue;
                dg.psd_ok[t] = r.psd;
                dg.stationarity_residual[t] = (ag.W * s.Phi[t] + ag.H).norm();
                if (!(dg.constraint_ok[t] && dg.psd_ok[t])) {
                    if (feasible) s.first_failure = t;
                    feasible = false;
                }
            }
            const Matrix& F = s.Phi[k];
            Matrix Acl = p.A.at(t, k) + p.B.at(t, k) * F;
            Matrix Ccl = p.C.at(t, k) + p.D.at(t, k) * F;
            Matrix next = p.Q.at(t, k) + F.transpose() * p.R.at(t, k) * F + Acl.transpose() * Pn * Acl +
                          Ccl.transpose() * Pn * Ccl;
            s.P_tilde.at(t, k) = symmetrize(next);
        }
    }
    s.feasible = feasible;
    return s;
}

Family solve_feedback_expanded(const ProblemData& p, const Tolerances& tol) {
    require_valid(p, tol);
    const int N = p.N;
    Family P(N, true);
    std::vector<Matrix> Wkk_pinv(N), Hkk(N);
    for (int t = N - 1; t >= 0; --t) {
        P.at(t, N) = p.G[t];
        for (int k = N - 1; k >= t; --k) {
            const Matrix& Pn = P.at(t, k + 1);
            Aggregates ag = aggregates(p, t, k, Pn);
            if (k == t) {
                Wkk_pinv[t] = pinv(ag.W, tol);
                Hkk[t] = ag.H;
            }
            const Matrix &Wp = Wkk_pinv[k], &Hd = Hkk[k];
            const Matrix &A = p.A.at(t, k), &C = p.C.at(t, k);
            Matrix next = p.Q.at(t, k) + A.transpose() * Pn * A + C.transpose() * Pn * C -
                          Hd.transpose() * Wp * ag.H - ag.H.transpose() * Wp * Hd +
                          Hd.transpose() * Wp.transpose() * ag.W * Wp * Hd;
            P.at(t, k) = symmetrize(next);
        }
    }
    return P;
}

bool assert_definite_case(const ProblemData& p, const FeedbackSolution& sol, const Tolerances& tol) {
    for (int t = 0; t < p.N; ++t) {
        for (int k = t; k < p.N; ++k) {
            if (!is_psd(p.Q.at(t, k), tol).psd)
                throw InvalidInput("definite case needs Q >= 0; fails at (" + std::to_string(t) + "," + std::to_string(k) + ")");
            PsdReport r = is_psd(p.R.at(t, k), tol);
            if (!(r.min_eigenvalue > tol.psd_margin * r.scale))
                throw InvalidInput("definite case needs R > 0; fails at (" + std::to_string(t) + "," + std::to_string(k) + ")");
        }
        if (!is_psd(p.G[t], tol).psd) throw InvalidInput("definite case needs G >= 0; fails at t=" + std::to_string(t));
    }
    if (!sol.feasible) return false;
    for (int t = 0; t < p.N; ++t) {
        for (int k = t; k < p.N; ++k) {
            PsdReport w = is_psd(sol.W_tilde.at(t, k), tol);
            if (!(w.min_eigenvalue > tol.psd_margin * w.scale)) return false;
        }
        for (int k = t; k <= p.N; ++k)
            if (!is_psd(sol.P_tilde.at(t, k), tol).psd) return false;
    }
    return true;
}

bool reduce_to_standard(const ProblemData& p, const FeedbackSolution& sol, const Tolerances& tol) {
    if (!fully_t_independent(p, tol)) throw InvalidInput("reduction needs every coefficient family to be t-independent");
    StandardLQSolution std_sol = solve_standard_lq(precommitment_data(p, 0), 0, tol);
    for (int k = 0; k <= p.N; ++k) {
        const Matrix& ref = std_sol.P[k];
        double scale = std::max(1.0, ref.norm());
        for (int t = 0; t <= std::min(k, p.N - 1); ++t)
            if ((sol.P_tilde.at(t, k) - ref).norm() > tol.residual_tol * scale) return false;
    }
    return true;
}

}  // namespace tilq
