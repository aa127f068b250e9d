#pragma once

#include <cstddef>
#include <vector>

#include "hebbsim/types.hpp"

namespace hebbsim {

/// Non-negative channel weights with an l-norm normalisation contract:
/// after normalize(), (sum_j w_j^l)^(1/l) == 1 to within 1e-12.
class WeightVector {
public:
    WeightVector() = default;
    WeightVector(std::vector<double> values, double norm_exponent);

    /// n channels, all weights equal and normalised.
    static WeightVector uniform(int n, double norm_exponent);

    int size() const { return static_cast<int>(w_.size()); }
    double operator[](int i) const { return w_[static_cast<std::size_t>(i)]; }
    double& at(int i) { return w_[static_cast<std::size_t>(i)]; }
    const std::vector<double>& values() const { return w_; }
    double norm_exponent() const { return l_; }

    /// sum_j w_j^l
    double norm_mass() const;
    /// (sum_j w_j^l)^(1/l)
    double norm() const;
    double sum() const;

    /// w_i^(l-1) of a single channel, the moment entering the first-order
    /// normalisation factors.
    double moment(int i) const;

    /// Rescale so the l-norm is exactly 1. Throws on an all-zero vector
    /// rather than producing NaNs.
    void normalize();

    bool is_normalized(double tol = 1e-12) const;

private:
    std::vector<double> w_;
    double l_ = 1.0;
};

/// Value-returning form of WeightVector::normalize().
WeightVector normalize(WeightVector weights);

}  // namespace hebbsim
