#include "hebbsim/plasticity.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace hebbsim {

double epsilon_at(const EpsilonKernel& kernel, double offset, Rng* rng) {
    if (std::abs(offset) > kernel.support) return 0.0;
    switch (kernel.shape) {
        case EpsilonKernel::Shape::Constant:
            if (kernel.uniform_random) {
                if (rng == nullptr) {
                    throw std::invalid_argument(
                        "epsilon_at: uniform_random kernel needs an RNG");
                }
                return rng->uniform(0.0, kernel.amplitude);
            }
            return kernel.amplitude;
        case EpsilonKernel::Shape::TruncatedExponential:
            return kernel.amplitude * std::exp(-std::abs(offset) / kernel.time_constant);
    }
    return 0.0;
}

void PlasticityRule::validate() const {
    if (!(epsilon.amplitude > 0.0)) {
        throw std::invalid_argument("rule: epsilon amplitude must be > 0");
    }
    if (epsilon.support < 0.0) {
        throw std::invalid_argument("rule: window tau must be >= 0");
    }
    if (epsilon.shape == EpsilonKernel::Shape::TruncatedExponential &&
        !(epsilon.time_constant > 0.0)) {
        throw std::invalid_argument("rule: kernel time constant must be > 0");
    }
    if (kind == RuleKind::DecayModel) {
        if (!(decay_delta > 0.0 && decay_delta < 1.0)) {
            throw std::invalid_argument("rule: decay delta must be in (0,1)");
        }
    } else if (!(norm_exponent >= 1.0)) {
        throw std::invalid_argument("rule: norm exponent must be >= 1");
    }
}

UpdateEvent apply_promotion(WeightVector& weights, int channel, double eps, double offset) {
    weights.at(channel) += eps;
    weights.normalize();
    return UpdateEvent{channel, Direction::Promotion, offset, eps};
}

UpdateEvent apply_demotion(WeightVector& weights, int channel, double eps, double offset) {
    double& w = weights.at(channel);
    w = std::max(0.0, w - eps);  // floor before renormalisation
    weights.normalize();
    return UpdateEvent{channel, Direction::Demotion, offset, eps};
}

UpdateEvent apply_decay_promotion(WeightVector& weights, int channel, double eps,
                                  double decay_delta) {
    for (int i = 0; i < weights.size(); ++i) weights.at(i) *= (1.0 - decay_delta);
    weights.at(channel) += eps;
    return UpdateEvent{channel, Direction::Promotion, 0.0, eps};
}

namespace {

void check_window(const SpikeEvent& s, const OutputSpike& out, double tau, bool pre) {
    const double offset = s.time - out.time;
    const bool ok = pre ? (offset >= -tau && offset <= 0.0) : (offset > 0.0 && offset <= tau);
    if (!ok) {
        throw std::invalid_argument("plasticity: spike at t=" + std::to_string(s.time) +
                                    " outside the " + (pre ? "pre" : "post") +
                                    " window of output at t=" + std::to_string(out.time));
    }
}

}  // namespace

std::pair<WeightVector, std::vector<UpdateEvent>> hebbian_update(
    const WeightVector& weights, const PlasticityRule& rule,
    const std::vector<SpikeEvent>& pre_window_spikes, const OutputSpike& output,
    Rng* rng) {
    return stdp_update(weights, rule, pre_window_spikes, {}, output, rng);
}

std::pair<WeightVector, std::vector<UpdateEvent>> stdp_update(
    const WeightVector& weights, const PlasticityRule& rule,
    const std::vector<SpikeEvent>& pre_window_spikes,
    const std::vector<SpikeEvent>& post_window_spikes, const OutputSpike& output,
    Rng* rng) {
    const double tau = rule.tau();
    WeightVector w = weights;
    std::vector<UpdateEvent> events;
    events.reserve(pre_window_spikes.size() + post_window_spikes.size());
    // Pre spikes all precede post spikes, so chronological order within each
    // list gives chronological order overall.
    for (const SpikeEvent& s : pre_window_spikes) {
        check_window(s, output, tau, true);
        const double offset = s.time - output.time;
        events.push_back(apply_promotion(w, s.channel, epsilon_at(rule.epsilon, offset, rng),
                                         offset));
    }
    for (const SpikeEvent& s : post_window_spikes) {
        check_window(s, output, tau, false);
        const double offset = s.time - output.time;
        events.push_back(apply_demotion(w, s.channel, epsilon_at(rule.epsilon, offset, rng),
                                        offset));
    }
    return {std::move(w), std::move(events)};
}

WeightVector decay_model_update(const WeightVector& weights, const PlasticityRule& rule,
                                int promoted_channel) {
    if (rule.kind != RuleKind::DecayModel) {
        throw std::invalid_argument("decay_model_update: rule kind is not DecayModel");
    }
    if (promoted_channel < 0 || promoted_channel >= weights.size()) {
        throw std::out_of_range("decay_model_update: channel out of range");
    }
    WeightVector w = weights;
    apply_decay_promotion(w, promoted_channel, rule.epsilon.amplitude, rule.decay_delta);
    return w;
}

}  // namespace hebbsim
