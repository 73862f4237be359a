#include "tilq/errors.hpp"
#include "tilq/simulation.hpp"

namespace tilq {

namespace detail {

double subtree_cost(const ProblemData& p, int anchor, const PolicySpec& policy, const NoiseModel& noise,
                    CoefficientRow row, int k, const Vector& x, double prob, std::vector<double>& history) {
    if (k == p.N) return prob * x.dot(p.G[anchor] * x);
    Vector u = policy_control(policy, k, history, x);
    if (u.size() != p.m) throw InvalidInput("control has the wrong dimension");
    double sum = k >= anchor ? prob * (x.dot(p.Q.at(anchor, k) * x) + u.dot(p.R.at(anchor, k) * u)) : 0.0;
    const int r = row.row(k);
    Vector drift = p.A.at(r, k) * x + p.B.at(r, k) * u;
    Vector diffusion = p.C.at(r, k) * x + p.D.at(r, k) * u;
    for (int j = 0; j < noise.support(); ++j) {
        double w = noise.values()[j];
        history.push_back(w);
        sum += subtree_cost(p, anchor, policy, noise, row, k + 1, drift + diffusion * w,
                            prob * noise.probabilities()[j], history);
        history.pop_back();
    }
    return sum;
}

}  // namespace detail

double exact_expected_cost_serial(const ProblemData& p, int anchor, const InitialPair& start, const PolicySpec& policy,
                                  const NoiseModel& noise, std::optional<CoefficientRow> row, int cap) {
    detail::check_policy(p, start, policy);
    CoefficientRow r = detail::resolve_row(p, anchor, start, row);
    detail::path_count(noise, p.N - start.t, cap);
    std::vector<double> history;
    return detail::subtree_cost(p, anchor, policy, noise, r, start.t, start.x, 1.0, history);
}

MonteCarloResult monte_carlo_cost_serial(const ProblemData& p, int anchor, const InitialPair& start,
                                         const PolicySpec& policy, const NoiseModel& noise, std::size_t samples,
                                         std::uint64_t seed, std::optional<CoefficientRow> row) {
    detail::check_policy(p, start, policy);
    CoefficientRow r = detail::resolve_row(p, anchor, start, row);
    if (samples == 0) throw InvalidInput("Monte Carlo needs at least one sample");
    detail::Moments total;
    for (std::size_t b = 0, lo = 0; lo < samples; ++b, lo += detail::kSampleBlock) {
        std::size_t count = std::min(samples, lo + detail::kSampleBlock) - lo;
        total.merge(detail::sample_block(p, anchor, start, policy, noise, r, seed, b, count));
    }
    return detail::finish(total);
}

}  // namespace tilq
