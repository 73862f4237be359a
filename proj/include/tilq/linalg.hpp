#pragma once

#include <optional>

#include <Eigen/Dense>

namespace tilq {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct Tolerances {
    // Relative singular-value cutoff; empty means max(rows, cols) * eps.
    std::optional<double> pinv_rcond;
    double psd_margin = 1e-9;
    double residual_tol = 1e-8;
    double symmetry_tol = 1e-10;

    void validate() const;
};

struct PsdReport {
    bool psd = false;
    double min_eigenvalue = 0.0;
    double scale = 1.0;
};

struct PenroseResiduals {
    double mpm = 0.0;   // M P M - M
    double pmp = 0.0;   // P M P - P
    double mp_sym = 0.0;
    double pm_sym = 0.0;

    double max() const;
};

bool all_finite(const Matrix& m);

Matrix pinv(const Matrix& m, const Tolerances& tol = {});

PsdReport is_psd(const Matrix& m, const Tolerances& tol = {});

// Sorted eigenvalues of the symmetric part.
Vector sym_eigenvalues(const Matrix& m);

// Whether L X = N is solvable, i.e. L L^+ N = N.
bool solve_consistency(const Matrix& L, const Matrix& N, const Tolerances& tol = {});
double consistency_residual(const Matrix& L, const Matrix& N, const Tolerances& tol = {});

Matrix symmetrize(const Matrix& m);
double asymmetry(const Matrix& m);
bool is_symmetric(const Matrix& m, double tol);

PenroseResiduals penrose_residuals(const Matrix& m, const Matrix& p);

// max(1, |a|_F, |b|_F)
double residual_scale(const Matrix& a, const Matrix& b);

}  // namespace tilq
