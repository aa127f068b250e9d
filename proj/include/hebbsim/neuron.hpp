#pragma once

#include <optional>

#include "hebbsim/types.hpp"
#include "hebbsim/weights.hpp"

namespace hebbsim {

/// Leaky integrate-and-fire state in continuous time. The potential decays
/// exponentially with rate `decay_rate` between events and jumps by the
/// channel weight at every input spike; on reaching `threshold` it resets
/// to exactly 0.
struct NeuronState {
    double potential = 0.0;
    double threshold = 1.0;
    double decay_rate = 0.0;       // per time unit
    Time last_event_time = 0.0;

    NeuronState() = default;
    NeuronState(double theta, double d, Time t0 = 0.0)
        : potential(0.0), threshold(theta), decay_rate(d), last_event_time(t0) {
        if (!(theta > 0.0)) throw std::invalid_argument("neuron: threshold must be > 0");
        if (d < 0.0) throw std::invalid_argument("neuron: decay rate must be >= 0");
    }
};

/// Advance the potential to time `t` with the closed-form exponential decay.
/// Rejects time running backward.
NeuronState decay_potential(const NeuronState& state, Time t);

/// Decay to the event time, add the channel weight, and fire/reset if the
/// threshold is reached (equality counts as a crossing).
std::pair<NeuronState, std::optional<OutputSpike>> deliver_spike(
    const NeuronState& state, const WeightVector& weights, const SpikeEvent& event);

}  // namespace hebbsim
