#include "tilq/problem.hpp"

#include <cmath>
#include <sstream>

#include "tilq/errors.hpp"

namespace tilq {

Family::Family(int horizon, bool with_terminal) : N_(horizon), terminal_(with_terminal) {
    if (horizon < 0) throw InvalidInput("family horizon must be non-negative");
    rows_.resize(horizon);
    for (int t = 0; t < horizon; ++t) rows_[t].resize(last_k() - t + 1);
}

bool Family::in_range(int t, int k) const { return t >= 0 && t < N_ && k >= t && k <= last_k(); }

bool Family::has(int t, int k) const { return in_range(t, k) && at(t, k).size() > 0; }

Matrix& Family::at(int t, int k) {
    if (!in_range(t, k)) throw InvalidInput("family index out of range");
    return rows_[t][k - t];
}

const Matrix& Family::at(int t, int k) const {
    if (!in_range(t, k)) throw InvalidInput("family index out of range");
    return rows_[t][k - t];
}

Family Family::from_per_k(const std::vector<Matrix>& per_k, bool with_terminal) {
    int N = static_cast<int>(per_k.size()) - (with_terminal ? 1 : 0);
    Family f(N, with_terminal);
    for (int t = 0; t < N; ++t)
        for (int k = t; k <= f.last_k(); ++k) f.at(t, k) = per_k[k];
    return f;
}

Family Family::constant(int horizon, const Matrix& m) {
    Family f(horizon, false);
    for (int t = 0; t < horizon; ++t)
        for (int k = t; k < horizon; ++k) f.at(t, k) = m;
    return f;
}

bool Family::operator==(const Family& o) const {
    if (N_ != o.N_ || terminal_ != o.terminal_) return false;
    for (int t = 0; t < N_; ++t)
        for (int k = t; k <= last_k(); ++k) {
            const Matrix &a = at(t, k), &b = o.at(t, k);
            if (a.rows() != b.rows() || a.cols() != b.cols() || a != b) return false;
        }
    return true;
}

std::string to_string(Mode m) {
    switch (m) {
        case Mode::general: return "general";
        case Mode::t_independent_dynamics: return "t_independent_dynamics";
        case Mode::stationary: return "stationary";
    }
    return "general";
}

Mode mode_from_string(const std::string& s) {
    if (s == "general") return Mode::general;
    if (s == "t_independent_dynamics") return Mode::t_independent_dynamics;
    if (s == "stationary") return Mode::stationary;
    throw InvalidInput("unknown mode '" + s + "'");
}

int specificity(Mode m) { return static_cast<int>(m); }

ProblemData ProblemData::zeros(int N, int n, int m) {
    if (N <= 0 || n <= 0 || m <= 0) throw InvalidInput("N, n and m must be positive");
    ProblemData p;
    p.N = N;
    p.n = n;
    p.m = m;
    p.A = Family::constant(N, Matrix::Zero(n, n));
    p.B = Family::constant(N, Matrix::Zero(n, m));
    p.C = Family::constant(N, Matrix::Zero(n, n));
    p.D = Family::constant(N, Matrix::Zero(n, m));
    p.Q = Family::constant(N, Matrix::Zero(n, n));
    p.R = Family::constant(N, Matrix::Zero(m, m));
    p.G.assign(N, Matrix::Zero(n, n));
    return p;
}

namespace {

void check_family(std::vector<std::string>& out, const char* name, const Family& f, int N, int rows,
                  int cols, bool symmetric, double sym_tol) {
    if (f.horizon() != N) {
        std::ostringstream os;
        os << name << ": horizon " << f.horizon() << " does not match N=" << N;
        out.push_back(os.str());
        return;
    }
    for (int t = 0; t < N; ++t)
        for (int k = t; k < N; ++k) {
            std::ostringstream at;
            at << name << "(" << t << "," << k << ")";
            const Matrix& m = f.at(t, k);
            if (m.size() == 0) {
                out.push_back(at.str() + ": missing");
                continue;
            }
            if (m.rows() != rows || m.cols() != cols) {
                std::ostringstream os;
                os << at.str() << ": shape " << m.rows() << "x" << m.cols() << ", expected " << rows
                   << "x" << cols;
                out.push_back(os.str());
                continue;
            }
            if (!m.allFinite()) {
                out.push_back(at.str() + ": non-finite entry");
                continue;
            }
            if (symmetric && !is_symmetric(m, sym_tol)) out.push_back(at.str() + ": not symmetric");
        }
}

bool same(const Matrix& a, const Matrix& b, double tol) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
    return (a - b).norm() <= tol * std::max(1.0, b.norm());
}

bool row_independent(const Family& f, int N, double tol) {
    for (int k = 0; k < N; ++k)
        for (int t = 0; t < k; ++t)
            if (!same(f.at(t, k), f.at(k, k), tol)) return false;
    return true;
}

}  // namespace

std::vector<std::string> ProblemData::validate(const Tolerances& tol) const {
    std::vector<std::string> out;
    if (N <= 0) out.push_back("N: must be positive");
    if (n <= 0) out.push_back("n: must be positive");
    if (m <= 0) out.push_back("m: must be positive");
    if (!out.empty()) return out;

    check_family(out, "A", A, N, n, n, false, tol.symmetry_tol);
    check_family(out, "B", B, N, n, m, false, tol.symmetry_tol);
    check_family(out, "C", C, N, n, n, false, tol.symmetry_tol);
    check_family(out, "D", D, N, n, m, false, tol.symmetry_tol);
    check_family(out, "Q", Q, N, n, n, true, tol.symmetry_tol);
    check_family(out, "R", R, N, m, m, true, tol.symmetry_tol);

    if (static_cast<int>(G.size()) != N) {
        out.push_back("G: expected " + std::to_string(N) + " entries, got " + std::to_string(G.size()));
    } else {
        for (int t = 0; t < N; ++t) {
            std::string at = "G(" + std::to_string(t) + ")";
            if (G[t].size() == 0)
                out.push_back(at + ": missing");
            else if (G[t].rows() != n || G[t].cols() != n)
                out.push_back(at + ": wrong shape");
            else if (!G[t].allFinite())
                out.push_back(at + ": non-finite entry");
            else if (!is_symmetric(G[t], tol.symmetry_tol))
                out.push_back(at + ": not symmetric");
        }
    }
    return out;
}

ProblemData ProblemData::tail(int t) const {
    if (t < 0 || t >= N) throw InvalidInput("tail: start index out of range");
    ProblemData p = zeros(N - t, n, m);
    for (int s = t; s < N; ++s)
        for (int k = s; k < N; ++k) {
            p.A.at(s - t, k - t) = A.at(s, k);
            p.B.at(s - t, k - t) = B.at(s, k);
            p.C.at(s - t, k - t) = C.at(s, k);
            p.D.at(s - t, k - t) = D.at(s, k);
            p.Q.at(s - t, k - t) = Q.at(s, k);
            p.R.at(s - t, k - t) = R.at(s, k);
        }
    for (int s = t; s < N; ++s) p.G[s - t] = G[s];
    p.mode = detect_mode(p);
    return p;
}

void ProblemData::check_pair(const InitialPair& start) const {
    if (start.t < 0 || start.t >= N)
        throw InvalidInput("initial time " + std::to_string(start.t) + " outside [0, " + std::to_string(N) + ")");
    if (start.x.size() != n)
        throw InvalidInput("initial state has dimension " + std::to_string(start.x.size()) + ", expected " +
                           std::to_string(n));
    if (!start.x.allFinite()) throw InvalidInput("initial state has non-finite entries");
}

bool ProblemData::operator==(const ProblemData& o) const {
    if (N != o.N || n != o.n || m != o.m || mode != o.mode) return false;
    if (!(A == o.A && B == o.B && C == o.C && D == o.D && Q == o.Q && R == o.R)) return false;
    if (G.size() != o.G.size()) return false;
    for (std::size_t i = 0; i < G.size(); ++i)
        if (G[i].rows() != o.G[i].rows() || G[i].cols() != o.G[i].cols() || G[i] != o.G[i]) return false;
    return true;
}

Mode detect_mode(const ProblemData& p, const Tolerances& tol) {
    double e = tol.residual_tol;
    bool dyn = row_independent(p.A, p.N, e) && row_independent(p.B, p.N, e) && row_independent(p.C, p.N, e) &&
               row_independent(p.D, p.N, e);
    if (!dyn) return Mode::general;
    bool weights = row_independent(p.Q, p.N, e);
    for (int t = 1; t < p.N && weights; ++t) weights = same(p.G[t], p.G[0], e);
    return weights ? Mode::stationary : Mode::t_independent_dynamics;
}

void finalize(ProblemData& p, const Tolerances& tol, bool keep_declared_mode) {
    std::vector<std::string> v = p.validate(tol);
    if (!v.empty()) throw ValidationError("problem data failed validation (" + std::to_string(v.size()) + " violations)", v);
    Mode detected = detect_mode(p, tol);
    if (keep_declared_mode && specificity(p.mode) > specificity(detected)) {
        throw ValidationError("declared mode is not satisfied",
                              {"mode: declared " + to_string(p.mode) + " but data is " + to_string(detected)});
    }
    if (!keep_declared_mode) p.mode = detected;
}

bool fully_t_independent(const ProblemData& p, const Tolerances& tol) {
    return detect_mode(p, tol) == Mode::stationary && row_independent(p.R, p.N, tol.residual_tol);
}

ProblemData from_shared(const SharedDynamics& dyn, const Family& Q, const Family& R, const std::vector<Matrix>& G,
                        const Tolerances& tol) {
    int N = static_cast<int>(dyn.A.size());
    if (N == 0 || dyn.B.size() != dyn.A.size() || dyn.C.size() != dyn.A.size() || dyn.D.size() != dyn.A.size())
        throw InvalidInput("shared dynamics need one A, B, C, D per step");
    ProblemData p;
    p.N = N;
    p.n = static_cast<int>(dyn.A[0].rows());
    p.m = static_cast<int>(dyn.B[0].cols());
    p.A = Family::from_per_k(dyn.A);
    p.B = Family::from_per_k(dyn.B);
    p.C = Family::from_per_k(dyn.C);
    p.D = Family::from_per_k(dyn.D);
    p.Q = Q;
    p.R = R;
    p.G = G;
    finalize(p, tol);
    return p;
}

double DiscountSpec::weight(int lag) const {
    if (lag < 0) throw InvalidInput("negative discount lag");
    switch (kind) {
        case DiscountKind::exponential: return std::exp(-rate * lag);
        case DiscountKind::hyperbolic: return 1.0 / (1.0 + lag);
        case DiscountKind::custom:
            if (lag >= static_cast<int>(weights.size()))
                throw InvalidInput("custom discount weights missing lag " + std::to_string(lag));
            return weights[lag];
    }
    return 1.0;
}

ProblemData from_discounting(const DiscountSpec& spec, const SharedDynamics& dyn, int N, const Tolerances& tol) {
    if (static_cast<int>(dyn.A.size()) != N) throw InvalidInput("dynamics must provide one entry per step");
    for (int lag = 0; lag <= N; ++lag) {
        double w = spec.weight(lag);
        if (!(w > 0.0) || !std::isfinite(w)) throw InvalidInput("discount weight at lag " + std::to_string(lag) + " is not positive");
    }
    if (std::abs(spec.weight(0) - 1.0) > 0.0) throw InvalidInput("discount weight at lag 0 must equal 1");

    Family Q(N, false), R(N, false);
    std::vector<Matrix> G(N);
    for (int t = 0; t < N; ++t) {
        for (int k = t; k < N; ++k) {
            Q.at(t, k) = spec.weight(k - t) * spec.base_Q;
            R.at(t, k) = spec.weight(k - t) * spec.base_R;
        }
        G[t] = spec.weight(N - t) * spec.base_G;
    }
    return from_shared(dyn, Q, R, G, tol);
}

}  // namespace tilq
