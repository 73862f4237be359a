#include "tilq/linalg.hpp"

#include <algorithm>
#include <limits>

#include "tilq/errors.hpp"

namespace tilq {

void Tolerances::validate() const {
    if (pinv_rcond && !(*pinv_rcond > 0.0)) throw InvalidInput("pinv_rcond must be positive");
    if (!(psd_margin > 0.0)) throw InvalidInput("psd_margin must be positive");
    if (!(residual_tol > 0.0)) throw InvalidInput("residual_tol must be positive");
    if (!(symmetry_tol > 0.0)) throw InvalidInput("symmetry_tol must be positive");
}

double PenroseResiduals::max() const { return std::max({mpm, pmp, mp_sym, pm_sym}); }

bool all_finite(const Matrix& m) { return m.allFinite(); }

Matrix pinv(const Matrix& m, const Tolerances& tol) {
    if (!m.allFinite()) throw InvalidInput("pinv: non-finite entry");
    if (m.size() == 0) return Matrix::Zero(m.cols(), m.rows());

    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vector& s = svd.singularValues();
    double rcond = tol.pinv_rcond.value_or(std::max(m.rows(), m.cols()) *
                                           std::numeric_limits<double>::epsilon());
    double cut = rcond * (s.size() ? s(0) : 0.0);

    Vector inv = Vector::Zero(s.size());
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > cut && s(i) > 0.0) inv(i) = 1.0 / s(i);
    return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

Vector sym_eigenvalues(const Matrix& m) {
    if (m.rows() != m.cols()) throw InvalidInput("eigenvalues: matrix not square");
    if (m.size() == 0) return Vector();
    Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(m), Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

PsdReport is_psd(const Matrix& m, const Tolerances& tol) {
    if (m.rows() != m.cols()) throw InvalidInput("is_psd: matrix not square");
    if (!m.allFinite()) throw InvalidInput("is_psd: non-finite entry");
    PsdReport r;
    if (m.size() == 0) {
        r.psd = true;
        return r;
    }
    Vector ev = sym_eigenvalues(m);
    r.min_eigenvalue = ev(0);
    r.scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
    r.psd = r.min_eigenvalue >= -tol.psd_margin * r.scale;
    return r;
}

double consistency_residual(const Matrix& L, const Matrix& N, const Tolerances& tol) {
    if (L.rows() != N.rows()) throw InvalidInput("consistency: row mismatch");
    return (L * pinv(L, tol) * N - N).norm();
}

bool solve_consistency(const Matrix& L, const Matrix& N, const Tolerances& tol) {
    return consistency_residual(L, N, tol) <= tol.residual_tol * residual_scale(L, N);
}

Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

double asymmetry(const Matrix& m) {
    if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
    return (m - m.transpose()).norm();
}

bool is_symmetric(const Matrix& m, double tol) { return asymmetry(m) <= tol * std::max(1.0, m.norm()); }

PenroseResiduals penrose_residuals(const Matrix& m, const Matrix& p) {
    PenroseResiduals r;
    Matrix mp = m * p, pm = p * m;
    r.mpm = (mp * m - m).norm();
    r.pmp = (pm * p - p).norm();
    r.mp_sym = (mp - mp.transpose()).norm();
    r.pm_sym = (pm - pm.transpose()).norm();
    return r;
}

double residual_scale(const Matrix& a, const Matrix& b) { return std::max({1.0, a.norm(), b.norm()}); }

}  // namespace tilq
