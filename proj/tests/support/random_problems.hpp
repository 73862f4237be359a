#pragma once

#include <random>

#include "tilq/problem.hpp"

namespace tilq::testing {

struct RandomSpec {
    int N = 0;  // 0 picks 1..max_N
    int n = 0;  // 0 picks 1..2
    int m = 0;
    int max_N = 5;
    bool general = false;              // t-dependent dynamics
    bool definite = false;             // Q, G psd and R pd everywhere
    bool fully_t_independent = false;  // R and G shared across t as well
    double dyn_scale = 0.6;
};

Matrix random_matrix(std::mt19937_64& rng, int r, int c, double scale = 1.0);
Matrix random_symmetric(std::mt19937_64& rng, int n, double scale = 1.0);
// F F^T with F of rank <= rank, so often singular.
Matrix random_psd(std::mt19937_64& rng, int n, int rank);
Matrix random_pd(std::mt19937_64& rng, int n, double floor = 0.2);
Vector random_vector(std::mt19937_64& rng, int n, double scale = 1.0);

ProblemData random_problem(std::mt19937_64& rng, const RandomSpec& spec);

}  // namespace tilq::testing
