#include "tilq/noise.hpp"

#include <cmath>
#include <sstream>

#include "tilq/errors.hpp"

namespace tilq {

NoiseModel NoiseModel::rademacher() {
    NoiseModel m;
    m.kind_ = Kind::rademacher;
    m.values_ = {1.0, -1.0};
    m.probs_ = {0.5, 0.5};
    return m;
}

NoiseModel NoiseModel::gaussian() {
    NoiseModel m;
    m.kind_ = Kind::gaussian;
    return m;
}

NoiseModel NoiseModel::two_point(double p, double a, double b) {
    if (!(p > 0.0 && p < 1.0)) throw InvalidInput("two-point noise needs 0 < p < 1");
    double mean = p * a + (1 - p) * b;
    double second = p * a * a + (1 - p) * b * b;
    if (std::abs(mean) > 1e-12 || std::abs(second - 1.0) > 1e-12)
        throw InvalidInput("two-point noise must have mean 0 and second moment 1");
    if (a == b) throw InvalidInput("two-point noise needs distinct values");
    NoiseModel m;
    m.kind_ = Kind::two_point;
    m.values_ = {a, b};
    m.probs_ = {p, 1 - p};
    return m;
}

NoiseModel NoiseModel::two_point(double p) {
    if (!(p > 0.0 && p < 1.0)) throw InvalidInput("two-point noise needs 0 < p < 1");
    return two_point(p, std::sqrt((1 - p) / p), -std::sqrt(p / (1 - p)));
}

NoiseModel NoiseModel::parse(const std::string& s) {
    if (s == "rademacher") return rademacher();
    if (s == "gaussian") return gaussian();
    const std::string prefix = "two_point:";
    if (s.rfind(prefix, 0) == 0) {
        std::istringstream in(s.substr(prefix.size()));
        double p;
        if (in >> p && in.eof()) return two_point(p);
    }
    throw InvalidInput("unknown noise model '" + s + "'");
}

std::string NoiseModel::name() const {
    switch (kind_) {
        case Kind::rademacher: return "rademacher";
        case Kind::gaussian: return "gaussian";
        case Kind::two_point: {
            std::ostringstream os;
            os << "two_point:" << probs_[0];
            return os.str();
        }
    }
    return "";
}

double NoiseModel::sample(std::mt19937_64& rng) const {
    if (kind_ == Kind::gaussian) {
        std::normal_distribution<double> nd(0.0, 1.0);
        return nd(rng);
    }
    std::uniform_real_distribution<double> u(0.0, 1.0);
    return u(rng) < probs_[0] ? values_[0] : values_[1];
}

int NoiseModel::index_of(double w) const {
    for (std::size_t i = 0; i < values_.size(); ++i)
        if (values_[i] == w) return static_cast<int>(i);
    throw InvalidInput("value is not in the noise support");
}

}  // namespace tilq
