#include "hebbsim/weights.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace hebbsim {

WeightVector::WeightVector(std::vector<double> values, double norm_exponent)
    : w_(std::move(values)), l_(norm_exponent) {
    if (w_.empty()) throw std::invalid_argument("weights: empty vector");
    if (!(l_ >= 1.0)) throw std::invalid_argument("weights: norm exponent must be >= 1");
    for (double v : w_) {
        if (!(v >= 0.0)) throw std::invalid_argument("weights: entries must be >= 0");
    }
}

WeightVector WeightVector::uniform(int n, double norm_exponent) {
    WeightVector wv(std::vector<double>(static_cast<std::size_t>(n), 1.0), norm_exponent);
    wv.normalize();
    return wv;
}

double WeightVector::norm_mass() const {
    double s = 0.0;
    if (l_ == 1.0) {
        for (double v : w_) s += v;
    } else if (l_ == 2.0) {
        for (double v : w_) s += v * v;
    } else {
        for (double v : w_) s += std::pow(v, l_);
    }
    return s;
}

double WeightVector::norm() const {
    const double mass = norm_mass();
    return l_ == 1.0 ? mass : std::pow(mass, 1.0 / l_);
}

double WeightVector::sum() const {
    double s = 0.0;
    for (double v : w_) s += v;
    return s;
}

double WeightVector::moment(int i) const {
    const double v = w_[static_cast<std::size_t>(i)];
    if (l_ == 1.0) return 1.0;
    if (l_ == 2.0) return v;
    return std::pow(v, l_ - 1.0);
}

void WeightVector::normalize() {
    const double n = norm();
    if (!(n > 0.0)) {
        throw std::domain_error("weights: cannot normalize an all-zero vector");
    }
    for (double& v : w_) v /= n;
}

bool WeightVector::is_normalized(double tol) const {
    return std::abs(norm() - 1.0) <= tol;
}

WeightVector normalize(WeightVector weights) {
    weights.normalize();
    return weights;
}

}  // namespace hebbsim
