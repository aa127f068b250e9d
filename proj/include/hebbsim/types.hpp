#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace hebbsim {

/// Continuous simulation time, in the same abstract units the input rates
/// are expressed in (spikes per time unit).
using Time = double;

/// One input spike on a channel. Streams delivered to the neuron must be
/// nondecreasing in time; simultaneous spikes are ordered by channel index.
struct SpikeEvent {
    int channel = 0;
    Time time = 0.0;

    friend bool operator==(const SpikeEvent&, const SpikeEvent&) = default;
};

/// Emitted when the membrane potential reaches the threshold.
/// `triggering_channel` is the channel of the input spike that caused the
/// crossing.
struct OutputSpike {
    Time time = 0.0;
    int triggering_channel = 0;

    friend bool operator==(const OutputSpike&, const OutputSpike&) = default;
};

class SimulationError : public std::runtime_error {
public:
    explicit SimulationError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Thrown when a steady-state constraint cannot be evaluated because its
/// denominator vanishes (promotion and demotion statistics balance out).
class DegenerateConstraintError : public std::runtime_error {
public:
    explicit DegenerateConstraintError(const std::string& msg)
        : std::runtime_error(msg) {}
};

}  // namespace hebbsim
