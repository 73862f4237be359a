#pragma once

#include <random>
#include <string>
#include <vector>

namespace tilq {

// Scalar noise with zero mean and unit variance.
class NoiseModel {
public:
    enum class Kind { rademacher, gaussian, two_point };

    static NoiseModel rademacher();
    static NoiseModel gaussian();
    // Value a with probability p, b otherwise; throws unless the moments are (0, 1).
    static NoiseModel two_point(double p, double a, double b);
    // The two-point law with P(w = a) = p and a > 0 implied by the moments.
    static NoiseModel two_point(double p);
    // "rademacher", "gaussian" or "two_point:<p>".
    static NoiseModel parse(const std::string& s);

    Kind kind() const { return kind_; }
    bool finite() const { return kind_ != Kind::gaussian; }
    int support() const { return finite() ? 2 : 0; }
    const std::vector<double>& values() const { return values_; }
    const std::vector<double>& probabilities() const { return probs_; }
    std::string name() const;

    double sample(std::mt19937_64& rng) const;
    // Index into values() of a drawn value; exact comparison.
    int index_of(double w) const;

private:
    Kind kind_ = Kind::rademacher;
    std::vector<double> values_, probs_;
};

struct NoisePath {
    std::vector<double> values;  // w_t, ..., w_{N-1}
    double probability = 0.0;    // 0 for continuous laws
};

}  // namespace tilq
