#pragma once

#include <string>
#include <vector>

#include "tilq/linalg.hpp"

namespace tilq {

// Coefficients indexed by (t, k), t in [0, N), k in [t, N) or [t, N] when the
// terminal column is included. An empty matrix marks a missing entry.
class Family {
public:
    Family() = default;
    Family(int horizon, bool with_terminal);

    int horizon() const { return N_; }
    bool with_terminal() const { return terminal_; }
    int last_k() const { return terminal_ ? N_ : N_ - 1; }

    bool in_range(int t, int k) const;
    bool has(int t, int k) const;
    Matrix& at(int t, int k);
    const Matrix& at(int t, int k) const;

    // Family with every entry equal to the per-k matrices (t-independent).
    static Family from_per_k(const std::vector<Matrix>& per_k, bool with_terminal = false);
    static Family constant(int horizon, const Matrix& m);

    bool operator==(const Family& o) const;

private:
    int N_ = 0;
    bool terminal_ = false;
    std::vector<std::vector<Matrix>> rows_;
};

enum class Mode { general, t_independent_dynamics, stationary };

std::string to_string(Mode m);
Mode mode_from_string(const std::string& s);
// Larger is more specific.
int specificity(Mode m);

struct InitialPair {
    int t = 0;
    Vector x;
};

struct ProblemData {
    int N = 0;
    int n = 0;
    int m = 0;
    Family A, B, C, D, Q, R;
    std::vector<Matrix> G;
    Mode mode = Mode::general;

    // Families allocated to the right shape, entries zero.
    static ProblemData zeros(int N, int n, int m);

    // Read-only: every violation with its coordinates.
    std::vector<std::string> validate(const Tolerances& tol = {}) const;

    // Sub-problem on {t, ..., N}, re-indexed to start at 0.
    ProblemData tail(int t) const;

    void check_pair(const InitialPair& start) const;

    bool operator==(const ProblemData& o) const;
};

Mode detect_mode(const ProblemData& p, const Tolerances& tol = {});

// Validate (throws ValidationError) and set mode. A declared mode less
// specific than the detected one is kept; a more specific one is a violation.
void finalize(ProblemData& p, const Tolerances& tol = {}, bool keep_declared_mode = false);

// Every family, including Q, R and G, is t-independent.
bool fully_t_independent(const ProblemData& p, const Tolerances& tol = {});

struct SharedDynamics {
    std::vector<Matrix> A, B, C, D;  // per k
};

ProblemData from_shared(const SharedDynamics& dyn, const Family& Q, const Family& R,
                        const std::vector<Matrix>& G, const Tolerances& tol = {});

enum class DiscountKind { exponential, hyperbolic, custom };

struct DiscountSpec {
    DiscountKind kind = DiscountKind::exponential;
    double rate = 0.0;
    std::vector<double> weights;  // custom: one per lag 0..N
    Matrix base_Q, base_R, base_G;

    double weight(int lag) const;
};

ProblemData from_discounting(const DiscountSpec& spec, const SharedDynamics& dyn, int N,
                             const Tolerances& tol = {});

}  // namespace tilq
