#pragma once

#include <deque>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "hebbsim/estimators.hpp"
#include "hebbsim/inputs.hpp"
#include "hebbsim/neuron.hpp"
#include "hebbsim/plasticity.hpp"
#include "hebbsim/types.hpp"
#include "hebbsim/weights.hpp"

namespace hebbsim {

struct DeltaSample {
    Time time = 0.0;
    double delta = 0.0;
    double epsilon = 0.0;
};

struct TraceOptions {
    bool record_inputs = false;
    bool record_outputs = false;
    Time snapshot_cadence = 0.0;   // 0 disables periodic weight snapshots
    Time delta_cadence = 0.0;      // 0 disables the delta time series
};

/// Everything one run produces. Immutable once returned.
struct RunTrace {
    std::vector<SpikeEvent> inputs;
    std::vector<OutputSpike> outputs;
    std::vector<std::pair<Time, std::vector<double>>> weight_snapshots;
    std::vector<DeltaSample> delta_series;

    std::uint64_t n_inputs = 0;
    std::uint64_t n_outputs = 0;
    std::uint64_t n_promotions = 0;
    std::uint64_t n_demotions = 0;

    WeightVector final_weights;
    NeuronState final_state;
    EstimatorState cumulative;  // whole-run statistics
    EstimatorState monitor;     // windowed statistics (delta monitoring)
    Time end_time = 0.0;
};

struct SimulationConfig {
    NeuronState neuron;
    WeightVector weights;
    std::optional<PlasticityRule> rule;   // nullopt: no attribution at all
    bool learning_enabled = true;         // false: attribute events, freeze weights
    bool adaptive_epsilon = false;        // modulate step size by delta
    double adaptive_cap = 1e-3;
    EstimatorConfig monitor_window{WindowMode::Sliding, 5000, 0.999};
    TraceOptions trace;
    std::uint64_t seed = 1;
};

/// Event-driven single-neuron run. Drains a generator in time order,
/// updating the membrane potential, collecting promotion/demotion windows
/// around output spikes, applying the configured plasticity rule, and
/// feeding every update event into the cumulative and windowed estimators.
///
/// Demotions of an output spike can only be applied once the stream has
/// advanced past output.time + tau, so STDP output spikes wait in a pending
/// buffer until their post window closes (or the stream ends). A spike that
/// falls into the post window of one output and the pre window of a later
/// one contributes one event to each.
class Simulation {
public:
    explicit Simulation(SimulationConfig config);

    /// Optional observer, called after each output spike has been emitted.
    std::function<void(const OutputSpike&)> on_output;

    /// Run until the generator is exhausted or `t_end` is passed, whichever
    /// comes first. May be bounded by `max_outputs` for frozen-weight
    /// probability estimation.
    RunTrace run(SpikeGenerator& events,
                 Time t_end = std::numeric_limits<Time>::infinity(),
                 std::uint64_t max_outputs = 0);

    /// Convenience overload for a pre-built stream.
    RunTrace run(const std::vector<SpikeEvent>& events,
                 Time t_end = std::numeric_limits<Time>::infinity());

    /// Distance-from-steady-state indicator of the monitor estimator under
    /// the configured rule; 0 when no events have been recorded yet.
    double current_delta() const;

    const WeightVector& weights() const { return weights_; }
    double current_epsilon() const { return current_eps_; }

private:
    struct PendingOutput {
        OutputSpike spike;
        std::vector<SpikeEvent> pre;
        std::vector<SpikeEvent> post;
    };

    void deliver(const SpikeEvent& ev, RunTrace& trace);
    void handle_output(const OutputSpike& out, RunTrace& trace);
    void close_windows_before(Time t, RunTrace& trace);
    void apply_window(const PendingOutput& w, RunTrace& trace);
    void apply_event(Direction dir, const SpikeEvent& spike, const OutputSpike& out,
                     RunTrace& trace);
    void after_update_batch(Time now, RunTrace& trace);
    void snapshot(Time t, RunTrace& trace);
    double event_epsilon(double offset);

    SimulationConfig cfg_;
    NeuronState neuron_;
    WeightVector weights_;
    Rng rng_;
    double current_eps_ = 0.0;

    std::deque<SpikeEvent> recent_;        // inputs within [now - tau, now]
    std::deque<PendingOutput> pending_;    // STDP windows not yet closed
    EstimatorState cumulative_;
    EstimatorState monitor_;
    Time next_snapshot_ = 0.0;
    Time next_delta_sample_ = 0.0;
    Time last_seen_ = 0.0;
};

/// Frozen-weight promotion-probability estimate: runs the neuron without
/// learning until `n_output_spikes` outputs occurred and returns the
/// per-channel promotion fractions under the same window rule tau.
/// Throws if no output spike happens within `max_events` inputs.
std::vector<double> monte_carlo_p(const WeightVector& weights, const NeuronState& neuron,
                                  const RateSpec& rates, double tau,
                                  std::uint64_t n_output_spikes, std::uint64_t seed,
                                  std::uint64_t max_events = 50'000'000);

}  // namespace hebbsim
