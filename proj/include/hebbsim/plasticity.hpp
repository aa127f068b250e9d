#pragma once

#include <optional>
#include <vector>

#include "hebbsim/rng.hpp"
#include "hebbsim/types.hpp"
#include "hebbsim/weights.hpp"

namespace hebbsim {

enum class RuleKind { PureHebbian, Stdp, DecayModel };
enum class Direction { Promotion, Demotion };

/// Learning-rate profile over the +-tau window around an output spike.
/// Constant returns the amplitude everywhere inside the support; the
/// truncated exponential peaks at offset 0 and falls off with
/// `time_constant`. With `uniform_random` set, each update event draws its
/// step uniformly from (0, amplitude).
struct EpsilonKernel {
    enum class Shape { Constant, TruncatedExponential };

    Shape shape = Shape::Constant;
    double amplitude = 1e-4;
    double time_constant = 0.02;   // TruncatedExponential only
    double support = 0.07;         // window half-width tau, >= 0
    bool uniform_random = false;   // Constant only

    bool is_constant() const { return shape == Shape::Constant && !uniform_random; }
};

/// Kernel value at a signed offset from the output spike (negative =
/// before). Zero outside [-tau, tau]. `rng` is consulted only for the
/// uniform_random variant.
double epsilon_at(const EpsilonKernel& kernel, double offset, Rng* rng = nullptr);

/// Tagged configuration of one weight-update rule.
struct PlasticityRule {
    RuleKind kind = RuleKind::PureHebbian;
    EpsilonKernel epsilon;
    double norm_exponent = 1.0;   // l >= 1; unused by DecayModel
    double decay_delta = 0.01;    // DecayModel only, in (0,1)

    double tau() const { return epsilon.support; }

    void validate() const;
};

/// One applied weight change. Promotions have offsets in [-tau, 0],
/// demotions in (0, tau].
struct UpdateEvent {
    int channel = 0;
    Direction direction = Direction::Promotion;
    double offset = 0.0;
    double applied_epsilon = 0.0;
};

/// In-place single-event updates. These are the atomic operations the
/// window-based rules below (and the simulation engine) are built from.
UpdateEvent apply_promotion(WeightVector& weights, int channel, double eps, double offset);
UpdateEvent apply_demotion(WeightVector& weights, int channel, double eps, double offset);
UpdateEvent apply_decay_promotion(WeightVector& weights, int channel, double eps,
                                  double decay_delta);

/// Pure Hebbian update: each spike in [output.time - tau, output.time]
/// promotes its channel by epsilon(offset), weights renormalised after every
/// single change. Spikes outside the window are a caller error.
std::pair<WeightVector, std::vector<UpdateEvent>> hebbian_update(
    const WeightVector& weights, const PlasticityRule& rule,
    const std::vector<SpikeEvent>& pre_window_spikes, const OutputSpike& output,
    Rng* rng = nullptr);

/// Symmetric STDP update: pre-window spikes promote, post-window spikes
/// demote (floored at zero before renormalisation), processed in
/// chronological order with a normalisation after each event.
std::pair<WeightVector, std::vector<UpdateEvent>> stdp_update(
    const WeightVector& weights, const PlasticityRule& rule,
    const std::vector<SpikeEvent>& pre_window_spikes,
    const std::vector<SpikeEvent>& post_window_spikes, const OutputSpike& output,
    Rng* rng = nullptr);

/// Decay-model update for a single promotion event: every weight shrinks by
/// the fraction delta, then the promoted channel gains epsilon. No
/// normalisation; boundedness comes from the decay itself.
WeightVector decay_model_update(const WeightVector& weights, const PlasticityRule& rule,
                                int promoted_channel);

}  // namespace hebbsim
