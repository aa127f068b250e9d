#include "hebbsim/neuron.hpp"

#include <cmath>

namespace hebbsim {

NeuronState decay_potential(const NeuronState& state, Time t) {
    if (t < state.last_event_time) {
        throw std::invalid_argument("decay_potential: time must not run backward (t=" +
                                    std::to_string(t) + " < " +
                                    std::to_string(state.last_event_time) + ")");
    }
    NeuronState out = state;
    if (state.decay_rate > 0.0 && t > state.last_event_time) {
        out.potential = state.potential *
                        std::exp(-state.decay_rate * (t - state.last_event_time));
    }
    if (out.potential < 0.0) out.potential = 0.0;  // guard against fp drift
    out.last_event_time = t;
    return out;
}

std::pair<NeuronState, std::optional<OutputSpike>> deliver_spike(
    const NeuronState& state, const WeightVector& weights, const SpikeEvent& event) {
    if (event.channel < 0 || event.channel >= weights.size()) {
        throw std::out_of_range("deliver_spike: channel " + std::to_string(event.channel) +
                                " out of range [0, " + std::to_string(weights.size()) + ")");
    }
    NeuronState next = decay_potential(state, event.time);
    next.potential += weights[event.channel];
    if (next.potential >= next.threshold) {
        next.potential = 0.0;
        return {next, OutputSpike{event.time, event.channel}};
    }
    return {next, std::nullopt};
}

}  // namespace hebbsim
