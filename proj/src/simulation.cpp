#include "hebbsim/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hebbsim {

Simulation::Simulation(SimulationConfig config)
    : cfg_(std::move(config)), neuron_(cfg_.neuron), weights_(cfg_.weights),
      rng_(mix64(cfg_.seed, 0x9d2c5680u)) {
    if (weights_.size() <= 0) throw std::invalid_argument("simulation: no channels");
    if (cfg_.rule) {
        cfg_.rule->validate();
        if (cfg_.rule->kind != RuleKind::DecayModel &&
            cfg_.rule->norm_exponent != weights_.norm_exponent()) {
            throw std::invalid_argument(
                "simulation: rule and weight vector disagree on the norm exponent");
        }
        current_eps_ = cfg_.rule->epsilon.amplitude;
        const double l = cfg_.rule->kind == RuleKind::DecayModel
                             ? 1.0
                             : cfg_.rule->norm_exponent;
        cumulative_ = EstimatorState(weights_.size(), l,
                                     EstimatorConfig{WindowMode::Cumulative, 0, 0.0});
        monitor_ = EstimatorState(weights_.size(), l, cfg_.monitor_window);
    }
    next_snapshot_ = cfg_.trace.snapshot_cadence;
    next_delta_sample_ = cfg_.trace.delta_cadence;
}

double Simulation::event_epsilon(double offset) {
    if (!cfg_.rule) return 0.0;
    EpsilonKernel kernel = cfg_.rule->epsilon;
    if (cfg_.adaptive_epsilon) kernel.amplitude = current_eps_;
    return epsilon_at(kernel, offset, &rng_);
}

void Simulation::apply_event(Direction dir, const SpikeEvent& spike, const OutputSpike& out,
                             RunTrace& trace) {
    const double offset = spike.time - out.time;
    const double eps = event_epsilon(offset);
    UpdateEvent ev{spike.channel, dir, offset, eps};
    cumulative_.record(ev, weights_);
    monitor_.record(ev, weights_);
    if (dir == Direction::Promotion) {
        ++trace.n_promotions;
    } else {
        ++trace.n_demotions;
    }
    if (!cfg_.learning_enabled) return;
    switch (cfg_.rule->kind) {
        case RuleKind::PureHebbian:
        case RuleKind::Stdp:
            if (dir == Direction::Promotion) {
                apply_promotion(weights_, spike.channel, eps, offset);
            } else {
                apply_demotion(weights_, spike.channel, eps, offset);
            }
            break;
        case RuleKind::DecayModel:
            apply_decay_promotion(weights_, spike.channel, eps, cfg_.rule->decay_delta);
            break;
    }
}

void Simulation::apply_window(const PendingOutput& w, RunTrace& trace) {
    for (const SpikeEvent& s : w.pre) apply_event(Direction::Promotion, s, w.spike, trace);
    for (const SpikeEvent& s : w.post) apply_event(Direction::Demotion, s, w.spike, trace);
}

double Simulation::current_delta() const {
    if (!cfg_.rule || monitor_.total_events() <= 0.0) return 0.0;
    const PlasticityRule& rule = *cfg_.rule;
    try {
        switch (rule.kind) {
            case RuleKind::DecayModel:
                return decay_constraint(monitor_, weights_, current_eps_, rule.decay_delta)
                    .delta;
            case RuleKind::PureHebbian:
            case RuleKind::Stdp:
                if (!rule.epsilon.is_constant()) {
                    return kernel_stdp_constraint(monitor_, weights_, rule.norm_exponent)
                        .delta;
                }
                return stdp_constraint(monitor_, weights_, current_eps_, rule.norm_exponent)
                    .delta;
        }
    } catch (const DegenerateConstraintError&) {
        // A balanced promotion/demotion mix carries no steady-state
        // information; report the largest possible distance instead of
        // aborting the run.
        return std::numeric_limits<double>::infinity();
    } catch (const std::domain_error&) {
        return 0.0;
    }
    return 0.0;
}

void Simulation::after_update_batch(Time now, RunTrace& trace) {
    const bool want_sample =
        cfg_.trace.delta_cadence > 0.0 && now >= next_delta_sample_;
    if (!cfg_.adaptive_epsilon && !want_sample) return;
    const double delta = current_delta();
    if (cfg_.adaptive_epsilon) {
        const double d = std::isfinite(delta) ? delta : 1e9;
        current_eps_ = adaptive_epsilon(d, cfg_.adaptive_cap);
    }
    if (want_sample) {
        trace.delta_series.push_back(DeltaSample{now, delta, current_eps_});
        while (next_delta_sample_ <= now) next_delta_sample_ += cfg_.trace.delta_cadence;
    }
}

void Simulation::handle_output(const OutputSpike& out, RunTrace& trace) {
    ++trace.n_outputs;
    if (cfg_.trace.record_outputs) trace.outputs.push_back(out);
    if (on_output) on_output(out);
    if (!cfg_.rule) return;

    const double tau = cfg_.rule->tau();
    std::vector<SpikeEvent> pre;
    for (const SpikeEvent& s : recent_) {
        if (s.time >= out.time - tau && s.time <= out.time) pre.push_back(s);
    }
    if (cfg_.rule->kind == RuleKind::Stdp) {
        pending_.push_back(PendingOutput{out, std::move(pre), {}});
    } else {
        // Promotion-only rules have no post window; apply immediately.
        PendingOutput w{out, std::move(pre), {}};
        apply_window(w, trace);
        after_update_batch(out.time, trace);
    }
}

void Simulation::close_windows_before(Time t, RunTrace& trace) {
    if (!cfg_.rule) return;
    const double tau = cfg_.rule->tau();
    while (!pending_.empty() && pending_.front().spike.time + tau < t) {
        apply_window(pending_.front(), trace);
        after_update_batch(pending_.front().spike.time + tau, trace);
        pending_.pop_front();
    }
}

void Simulation::snapshot(Time t, RunTrace& trace) {
    trace.weight_snapshots.emplace_back(t, weights_.values());
}

void Simulation::deliver(const SpikeEvent& ev, RunTrace& trace) {
    if (ev.time < last_seen_) {
        throw SimulationError("simulation: event stream not sorted (t=" +
                              std::to_string(ev.time) + " after t=" +
                              std::to_string(last_seen_) + ")");
    }
    last_seen_ = ev.time;

    close_windows_before(ev.time, trace);
    while (cfg_.trace.snapshot_cadence > 0.0 && ev.time >= next_snapshot_) {
        snapshot(next_snapshot_, trace);
        next_snapshot_ += cfg_.trace.snapshot_cadence;
    }

    // Feed open post windows before the membrane update so the spike's
    // demotion offset bookkeeping is independent of what it triggers next.
    if (cfg_.rule && cfg_.rule->kind == RuleKind::Stdp) {
        const double tau = cfg_.rule->tau();
        for (PendingOutput& w : pending_) {
            if (ev.time > w.spike.time && ev.time <= w.spike.time + tau) {
                w.post.push_back(ev);
            }
        }
    }

    ++trace.n_inputs;
    if (cfg_.trace.record_inputs) trace.inputs.push_back(ev);
    if (cfg_.rule) {
        recent_.push_back(ev);
        const double tau = cfg_.rule->tau();
        while (!recent_.empty() && recent_.front().time < ev.time - tau) {
            recent_.pop_front();
        }
    }

    auto [next, out] = deliver_spike(neuron_, weights_, ev);
    neuron_ = next;
    if (out) handle_output(*out, trace);
}

RunTrace Simulation::run(SpikeGenerator& events, Time t_end, std::uint64_t max_outputs) {
    RunTrace trace;
    trace.final_weights = weights_;
    snapshot(0.0, trace);
    while (auto ev = events.next()) {
        if (ev->time > t_end) break;
        deliver(*ev, trace);
        if (max_outputs > 0 && trace.n_outputs >= max_outputs) break;
    }
    // Close whatever windows are still pending with the inputs seen so far.
    close_windows_before(std::numeric_limits<Time>::infinity(), trace);
    trace.end_time = std::isfinite(t_end) ? t_end : last_seen_;
    snapshot(trace.end_time, trace);
    trace.final_weights = weights_;
    trace.final_state = neuron_;
    if (cfg_.rule) {
        trace.cumulative = cumulative_;
        trace.monitor = monitor_;
    }
    return trace;
}

RunTrace Simulation::run(const std::vector<SpikeEvent>& events, Time t_end) {
    VectorGenerator gen(events);
    return run(gen, t_end);
}

namespace {

/// Caps a source at a fixed number of events.
class LimitGenerator : public SpikeGenerator {
public:
    LimitGenerator(SpikeGenerator& inner, std::uint64_t limit)
        : inner_(inner), left_(limit) {}
    std::optional<SpikeEvent> next() override {
        if (left_ == 0) return std::nullopt;
        --left_;
        return inner_.next();
    }

private:
    SpikeGenerator& inner_;
    std::uint64_t left_;
};

}  // namespace

std::vector<double> monte_carlo_p(const WeightVector& weights, const NeuronState& neuron,
                                  const RateSpec& rates, double tau,
                                  std::uint64_t n_output_spikes, std::uint64_t seed,
                                  std::uint64_t max_events) {
    SimulationConfig cfg;
    cfg.neuron = neuron;
    cfg.weights = weights;
    PlasticityRule rule;
    rule.kind = RuleKind::PureHebbian;
    rule.norm_exponent = weights.norm_exponent();
    rule.epsilon.amplitude = 1.0;  // never applied: learning is disabled
    rule.epsilon.support = tau;
    cfg.rule = rule;
    cfg.learning_enabled = false;
    cfg.seed = seed;
    Simulation sim(cfg);
    PoissonGenerator poisson(rates, std::numeric_limits<Time>::infinity(), mix64(seed, 77));
    LimitGenerator gen(poisson, max_events);
    RunTrace trace = sim.run(gen, std::numeric_limits<Time>::infinity(), n_output_spikes);
    if (trace.n_outputs == 0) {
        throw SimulationError(
            "monte_carlo_p: no output spike within the event budget; weights and "
            "threshold are incompatible");
    }
    return trace.cumulative.p_hat();
}

}  // namespace hebbsim
