#include "support/random_problems.hpp"

namespace tilq::testing {

Matrix random_matrix(std::mt19937_64& rng, int r, int c, double scale) {
    std::normal_distribution<double> nd(0.0, scale);
    Matrix m(r, c);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) m(i, j) = nd(rng);
    return m;
}

Matrix random_symmetric(std::mt19937_64& rng, int n, double scale) {
    Matrix m = random_matrix(rng, n, n, scale);
    return 0.5 * (m + m.transpose());
}

Matrix random_psd(std::mt19937_64& rng, int n, int rank) {
    Matrix f = random_matrix(rng, n, std::max(1, rank));
    return f * f.transpose();
}

Matrix random_pd(std::mt19937_64& rng, int n, double floor) {
    return random_psd(rng, n, n) + floor * Matrix::Identity(n, n);
}

Vector random_vector(std::mt19937_64& rng, int n, double scale) {
    return random_matrix(rng, n, 1, scale).col(0);
}

ProblemData random_problem(std::mt19937_64& rng, const RandomSpec& spec) {
    std::uniform_int_distribution<int> pickN(1, spec.max_N), pickDim(1, 2), pickRank(0, 2);
    int N = spec.N > 0 ? spec.N : pickN(rng);
    int n = spec.n > 0 ? spec.n : pickDim(rng);
    int m = spec.m > 0 ? spec.m : pickDim(rng);
    ProblemData p = ProblemData::zeros(N, n, m);

    auto weight_nn = [&]() {
        return spec.definite ? Matrix(random_psd(rng, n, pickRank(rng))) : random_symmetric(rng, n);
    };
    auto weight_mm = [&]() {
        return spec.definite ? random_pd(rng, m) : Matrix(random_symmetric(rng, m) + 1.5 * Matrix::Identity(m, m));
    };

    for (int k = 0; k < N; ++k) {
        Matrix a = random_matrix(rng, n, n, spec.dyn_scale) + 0.8 * Matrix::Identity(n, n);
        Matrix b = random_matrix(rng, n, m, spec.dyn_scale);
        Matrix c = random_matrix(rng, n, n, spec.dyn_scale * 0.5);
        Matrix d = random_matrix(rng, n, m, spec.dyn_scale * 0.5);
        Matrix q = weight_nn(), r = weight_mm();
        for (int t = 0; t <= k; ++t) {
            bool vary = spec.general && t < k;
            p.A.at(t, k) = vary ? Matrix(a + random_matrix(rng, n, n, 0.2)) : a;
            p.B.at(t, k) = vary ? Matrix(b + random_matrix(rng, n, m, 0.2)) : b;
            p.C.at(t, k) = vary ? Matrix(c + random_matrix(rng, n, n, 0.1)) : c;
            p.D.at(t, k) = vary ? Matrix(d + random_matrix(rng, n, m, 0.1)) : d;
            if (spec.fully_t_independent) {
                p.Q.at(t, k) = q;
                p.R.at(t, k) = r;
            } else {
                p.Q.at(t, k) = weight_nn();
                p.R.at(t, k) = weight_mm();
            }
        }
    }
    Matrix g = spec.definite ? Matrix(random_psd(rng, n, n)) : Matrix(random_symmetric(rng, n) + Matrix::Identity(n, n));
    for (int t = 0; t < N; ++t)
        p.G[t] = spec.fully_t_independent ? g : (spec.definite ? Matrix(random_psd(rng, n, n)) : g + random_symmetric(rng, n, 0.3));
    finalize(p);
    return p;
}

}  // namespace tilq::testing
