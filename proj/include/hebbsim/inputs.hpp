#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hebbsim/idx.hpp"
#include "hebbsim/rng.hpp"
#include "hebbsim/types.hpp"

namespace hebbsim {

/// Channel firing rates, either as independent per-channel rates or as one
/// combined rate split by a bias vector (bias entries >= 0, summing to 1).
struct RateSpec {
    std::vector<double> per_channel_rates;  // empty when the bias form is used
    double combined_rate = 0.0;
    std::vector<double> bias;

    static RateSpec per_channel(std::vector<double> rates);
    static RateSpec biased(double combined_rate, std::vector<double> bias);

    bool is_biased() const { return !bias.empty(); }
    int channels() const;
    double total_rate() const;
    void validate() const;
};

/// Per-channel rates drawn from Normal(mu, sigma), truncated below at
/// `floor` so every channel remains a valid Poisson process.
RateSpec gaussian_rates(int n_channels, double mu, double sigma, std::uint64_t seed,
                        double floor = 0.01);

/// Pull-style deterministic spike source. Generators own their RNG; equal
/// seeds give equal streams.
class SpikeGenerator {
public:
    virtual ~SpikeGenerator() = default;
    /// Next spike, or nullopt when the source is exhausted.
    virtual std::optional<SpikeEvent> next() = 0;
};

/// Independent Poisson processes per channel, merged in time order
/// (ties broken by channel index). With the bias form, a single merged
/// process at combined_rate is thinned into channels by the bias weights,
/// which keeps the combined frequency exactly constant.
///
/// `phases` switches the rate specification at fixed times; at a switch all
/// pending arrivals are redrawn from the boundary (memorylessness keeps
/// this exact).
class PoissonGenerator : public SpikeGenerator {
public:
    struct Phase {
        RateSpec rates;
        Time start = 0.0;
    };

    PoissonGenerator(RateSpec rates, Time t_end, std::uint64_t seed);
    PoissonGenerator(std::vector<Phase> phases, Time t_end, std::uint64_t seed);

    std::optional<SpikeEvent> next() override;

private:
    void enter_phase(std::size_t idx, Time from);
    std::optional<SpikeEvent> peek_in_phase();

    std::vector<Phase> phases_;
    Time t_end_;
    Rng rng_;
    std::size_t phase_ = 0;
    // per-channel mode: next arrival time per channel; biased mode: one clock
    std::vector<Time> next_arrival_;
    Time clock_ = 0.0;
};

/// Replays a pre-recorded stream.
class VectorGenerator : public SpikeGenerator {
public:
    explicit VectorGenerator(std::vector<SpikeEvent> events)
        : events_(std::move(events)) {}

    std::optional<SpikeEvent> next() override {
        if (pos_ >= events_.size()) return std::nullopt;
        return events_[pos_++];
    }

private:
    std::vector<SpikeEvent> events_;
    std::size_t pos_ = 0;
};

/// Materialised Poisson stream (merged, time-sorted).
std::vector<SpikeEvent> poisson_stream(const RateSpec& rates, Time t_end,
                                       std::uint64_t seed);

// ---------------------------------------------------------------------------
// MNIST row-intensity encoding
// ---------------------------------------------------------------------------

struct MnistEncoderConfig {
    std::string images_path;
    std::string labels_path;
    int row_index = 14;                      // in [0, 28)
    std::vector<int> digit_filter;           // empty = all digits
    double combined_rate = 0.9 * 28;
    std::uint64_t seed = 1;
};

/// Draw one channel index from the normalised intensities of an image row.
/// Throws on an all-zero row.
int mnist_encode_spike(const std::vector<double>& row_intensities, Rng& rng);

/// Spike stream from scheduled digit classes: global Poisson clock at
/// combined_rate; each spike picks a random image of the scheduled digit and
/// encodes one channel from the configured image row. Images whose row is
/// all zero are rejected and redrawn.
class MnistStreamGenerator : public SpikeGenerator {
public:
    struct ScheduleEntry {
        int digit = 0;
        Time duration = 0.0;
    };

    MnistStreamGenerator(const IdxImages& images, const IdxLabels& labels,
                         const MnistEncoderConfig& config,
                         std::vector<ScheduleEntry> schedule);

    std::optional<SpikeEvent> next() override;

    /// Row intensities of one image (raw greyscale values).
    static std::vector<double> image_row(const IdxImages& images, std::size_t index,
                                         int row_index);

private:
    const IdxImages& images_;
    MnistEncoderConfig cfg_;
    std::vector<ScheduleEntry> schedule_;
    std::vector<std::vector<std::size_t>> by_digit_;  // image indices per digit
    Rng rng_;
    Time clock_ = 0.0;
    std::size_t phase_ = 0;
    Time phase_end_ = 0.0;
};

}  // namespace hebbsim
