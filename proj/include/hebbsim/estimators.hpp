#pragma once

#include <deque>
#include <vector>

#include "hebbsim/plasticity.hpp"
#include "hebbsim/types.hpp"
#include "hebbsim/weights.hpp"

namespace hebbsim {

enum class WindowMode { Cumulative, Sliding, Exponential };

struct EstimatorConfig {
    WindowMode mode = WindowMode::Cumulative;
    std::size_t window_length = 5000;  // Sliding: number of update events kept
    double decay_factor = 0.999;       // Exponential: per-event multiplier
};

/// Online per-channel statistics over update events: promotion/demotion
/// counts and the epsilon / weight-moment accumulators the steady-state
/// constraints average over. Weight moments are taken from the pre-update
/// weights of the affected channel.
///
/// In Cumulative and Sliding modes all counters hold exact integers, so the
/// probability identities (sum of channel counts == total) are exact.
class EstimatorState {
public:
    EstimatorState() = default;
    EstimatorState(int n_channels, double norm_exponent,
                   EstimatorConfig config = EstimatorConfig{});

    void record(const UpdateEvent& event, const WeightVector& weights_before);

    int channels() const { return n_; }
    double norm_exponent() const { return l_; }

    double total_promotions() const { return tot_[0]; }
    double total_demotions() const { return tot_[1]; }
    double total_events() const { return tot_[0] + tot_[1]; }

    double count(Direction d, int i) const { return bin(d, i).count; }

    /// p_hat_i / q_hat_i: conditional channel probabilities.
    double p_hat(int i) const;
    double q_hat(int i) const;
    std::vector<double> p_hat() const;
    std::vector<double> q_hat() const;

    /// Unconditional promotion / demotion probabilities; k_p + k_d == 1.
    double k_p() const;
    double k_d() const;

    /// <w^(l-1)> averaged over all events of one direction.
    double mean_moment(Direction d) const;
    /// <w^(l-1) * eps> averaged over all events of one direction.
    double mean_moment_eps(Direction d) const;
    /// <w^(l-1) * eps^2> averaged over all events of one direction.
    double mean_moment_eps2(Direction d) const;
    /// <eps> over all events of one direction.
    double mean_eps(Direction d) const;

    /// Per-channel <eps> and <eps^2> conditioned on direction; zero counts
    /// yield zero (callers that need a division guard check count()).
    double mean_eps(Direction d, int i) const;
    double mean_eps2(Direction d, int i) const;

private:
    struct Bin {
        double count = 0.0;
        double eps = 0.0;
        double eps2 = 0.0;
        double moment = 0.0;
        double moment_eps = 0.0;
        double moment_eps2 = 0.0;
    };
    struct Entry {
        int channel;
        Direction direction;
        double eps;
        double moment;
    };

    Bin& bin(Direction d, int i) {
        return (d == Direction::Promotion ? promo_ : demo_)[static_cast<std::size_t>(i)];
    }
    const Bin& bin(Direction d, int i) const {
        return (d == Direction::Promotion ? promo_ : demo_)[static_cast<std::size_t>(i)];
    }
    void add(const Entry& e, double sign);

    int n_ = 0;
    double l_ = 1.0;
    EstimatorConfig cfg_;
    std::vector<Bin> promo_, demo_;
    double tot_[2] = {0.0, 0.0};  // [promotions, demotions]
    std::deque<Entry> window_;    // Sliding mode only
};

/// Evaluation of one steady-state constraint. `L` is the side built from
/// the estimated probabilities; `delta` is the accumulated absolute gap
/// between L and the stored normalised weights. `predicted_p` is the
/// promotion probability implied by the constraint given the current
/// weights (the quantity plotted against `estimated_p` to check
/// convergence).
struct ConstraintReport {
    std::vector<double> L;
    std::vector<double> normalized_weights;
    std::vector<double> predicted_p;
    std::vector<double> estimated_p;
    std::vector<double> zero_order_L;
    double delta = 0.0;
    double weight_sum_predicted = 0.0;
    double weight_sum_actual = 0.0;
};

/// Pure Hebbian steady-state relation. `predicted_p` carries the
/// first-order prediction <w^(l-1)>_p * w_i / (1 - w_i^(l-1) eps); the
/// weight-sum prediction is (1 - <w^(l-1)>_p eps) / <w^(l-1)>_p.
ConstraintReport hebbian_constraint(const EstimatorState& state,
                                    const WeightVector& weights, double eps, double l);

/// Constant-step STDP relation: L_i compares the promotion/demotion
/// statistics against the normalised weights. Throws
/// DegenerateConstraintError when the denominator vanishes.
ConstraintReport stdp_constraint(const EstimatorState& state,
                                 const WeightVector& weights, double eps, double l);

/// Offset-dependent-kernel STDP relation, built from the per-channel
/// epsilon moments. Reduces to stdp_constraint when the applied epsilon is
/// constant. delta here is sum_i |p_hat_i - predicted_p_i|.
ConstraintReport kernel_stdp_constraint(const EstimatorState& state,
                                        const WeightVector& weights, double l);

/// Decay-model relation: weights equal (eps/delta) * p_i, weight sum
/// eps/delta.
ConstraintReport decay_constraint(const EstimatorState& state,
                                  const WeightVector& weights, double eps,
                                  double decay_delta);

/// Learning rate as a function of the distance-from-steady-state indicator:
/// min(cap, exp(-1/(4 delta))), monotone nondecreasing, 0 at delta == 0.
double adaptive_epsilon(double delta, double cap = 1e-3);

}  // namespace hebbsim
