#include "hebbsim/inputs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace hebbsim {

RateSpec RateSpec::per_channel(std::vector<double> rates) {
    RateSpec spec;
    spec.per_channel_rates = std::move(rates);
    spec.validate();
    return spec;
}

RateSpec RateSpec::biased(double combined_rate, std::vector<double> bias) {
    RateSpec spec;
    spec.combined_rate = combined_rate;
    spec.bias = std::move(bias);
    spec.validate();
    return spec;
}

int RateSpec::channels() const {
    return static_cast<int>(is_biased() ? bias.size() : per_channel_rates.size());
}

double RateSpec::total_rate() const {
    if (is_biased()) return combined_rate;
    double s = 0.0;
    for (double r : per_channel_rates) s += r;
    return s;
}

void RateSpec::validate() const {
    if (is_biased()) {
        if (!(combined_rate > 0.0)) {
            throw std::invalid_argument("rates: combined rate must be > 0");
        }
        double s = 0.0;
        for (double b : bias) {
            if (b < 0.0) throw std::invalid_argument("rates: bias entries must be >= 0");
            s += b;
        }
        if (std::abs(s - 1.0) > 1e-12) {
            throw std::invalid_argument("rates: bias must sum to 1 (got " +
                                        std::to_string(s) + ")");
        }
    } else {
        if (per_channel_rates.empty()) {
            throw std::invalid_argument("rates: no channels configured");
        }
        for (double r : per_channel_rates) {
            if (!(r > 0.0)) throw std::invalid_argument("rates: rates must be > 0");
        }
    }
}

RateSpec gaussian_rates(int n_channels, double mu, double sigma, std::uint64_t seed,
                        double floor) {
    if (n_channels < 1) throw std::invalid_argument("gaussian_rates: need >= 1 channel");
    Rng rng(seed);
    std::vector<double> rates(static_cast<std::size_t>(n_channels));
    for (double& r : rates) r = std::max(floor, rng.normal(mu, sigma));
    return RateSpec::per_channel(std::move(rates));
}

// ---------------------------------------------------------------------------
// PoissonGenerator
// ---------------------------------------------------------------------------

PoissonGenerator::PoissonGenerator(RateSpec rates, Time t_end, std::uint64_t seed)
    : PoissonGenerator(std::vector<Phase>{Phase{std::move(rates), 0.0}}, t_end, seed) {}

PoissonGenerator::PoissonGenerator(std::vector<Phase> phases, Time t_end,
                                   std::uint64_t seed)
    : phases_(std::move(phases)), t_end_(t_end), rng_(seed) {
    if (phases_.empty()) throw std::invalid_argument("poisson: no phases");
    for (std::size_t i = 0; i < phases_.size(); ++i) {
        phases_[i].rates.validate();
        if (i > 0 && !(phases_[i].start > phases_[i - 1].start)) {
            throw std::invalid_argument("poisson: phase starts must increase");
        }
    }
    if (phases_[0].start != 0.0) {
        throw std::invalid_argument("poisson: first phase must start at 0");
    }
    enter_phase(0, 0.0);
}

void PoissonGenerator::enter_phase(std::size_t idx, Time from) {
    phase_ = idx;
    clock_ = from;
    const RateSpec& spec = phases_[idx].rates;
    next_arrival_.clear();
    if (!spec.is_biased()) {
        next_arrival_.resize(spec.per_channel_rates.size());
        for (std::size_t i = 0; i < next_arrival_.size(); ++i) {
            next_arrival_[i] = from + rng_.exponential(spec.per_channel_rates[i]);
        }
    }
}

std::optional<SpikeEvent> PoissonGenerator::peek_in_phase() {
    const RateSpec& spec = phases_[phase_].rates;
    if (spec.is_biased()) {
        const Time t = clock_ + rng_.exponential(spec.combined_rate);
        const int ch = rng_.categorical(spec.bias, 1.0);
        return SpikeEvent{ch, t};
    }
    int best = 0;
    for (std::size_t i = 1; i < next_arrival_.size(); ++i) {
        // strict < keeps ties on the lowest channel index
        if (next_arrival_[i] < next_arrival_[static_cast<std::size_t>(best)]) {
            best = static_cast<int>(i);
        }
    }
    return SpikeEvent{best, next_arrival_[static_cast<std::size_t>(best)]};
}

std::optional<SpikeEvent> PoissonGenerator::next() {
    while (true) {
        std::optional<SpikeEvent> ev = peek_in_phase();
        const Time phase_end =
            phase_ + 1 < phases_.size() ? phases_[phase_ + 1].start : t_end_;
        if (!ev || ev->time > phase_end) {
            if (phase_ + 1 < phases_.size()) {
                enter_phase(phase_ + 1, phases_[phase_ + 1].start);
                continue;
            }
            return std::nullopt;
        }
        // commit the draw
        const RateSpec& spec = phases_[phase_].rates;
        if (spec.is_biased()) {
            clock_ = ev->time;
        } else {
            const std::size_t ch = static_cast<std::size_t>(ev->channel);
            next_arrival_[ch] = ev->time + rng_.exponential(spec.per_channel_rates[ch]);
            clock_ = ev->time;
        }
        if (ev->time > t_end_) return std::nullopt;
        return ev;
    }
}

std::vector<SpikeEvent> poisson_stream(const RateSpec& rates, Time t_end,
                                       std::uint64_t seed) {
    if (!(t_end >= 0.0)) throw std::invalid_argument("poisson_stream: t_end must be >= 0");
    RateSpec copy = rates;
    copy.validate();
    PoissonGenerator gen(copy, t_end, seed);
    std::vector<SpikeEvent> out;
    while (auto ev = gen.next()) out.push_back(*ev);
    return out;
}

// ---------------------------------------------------------------------------
// MNIST encoding
// ---------------------------------------------------------------------------

int mnist_encode_spike(const std::vector<double>& row_intensities, Rng& rng) {
    double total = 0.0;
    for (double v : row_intensities) {
        if (v < 0.0) throw std::invalid_argument("encoder: negative intensity");
        total += v;
    }
    if (!(total > 0.0)) {
        throw std::domain_error("encoder: all-zero intensity row cannot be normalised");
    }
    return rng.categorical(row_intensities, total);
}

std::vector<double> MnistStreamGenerator::image_row(const IdxImages& images,
                                                    std::size_t index, int row_index) {
    const std::uint8_t* img = images.image(index);
    std::vector<double> row(static_cast<std::size_t>(images.cols));
    for (int c = 0; c < images.cols; ++c) {
        row[static_cast<std::size_t>(c)] =
            static_cast<double>(img[static_cast<std::size_t>(row_index) *
                                        static_cast<std::size_t>(images.cols) +
                                    static_cast<std::size_t>(c)]);
    }
    return row;
}

MnistStreamGenerator::MnistStreamGenerator(const IdxImages& images, const IdxLabels& labels,
                                           const MnistEncoderConfig& config,
                                           std::vector<ScheduleEntry> schedule)
    : images_(images), cfg_(config), schedule_(std::move(schedule)), by_digit_(10),
      rng_(config.seed) {
    if (images.count != static_cast<int>(labels.labels.size())) {
        throw std::invalid_argument("mnist: image/label count mismatch");
    }
    if (cfg_.row_index < 0 || cfg_.row_index >= images.rows) {
        throw std::invalid_argument("mnist: row index out of range");
    }
    if (!(cfg_.combined_rate > 0.0)) {
        throw std::invalid_argument("mnist: combined rate must be > 0");
    }
    if (schedule_.empty()) throw std::invalid_argument("mnist: empty schedule");
    for (int i = 0; i < images.count; ++i) {
        const int digit = labels.labels[static_cast<std::size_t>(i)];
        if (digit > 9) throw std::invalid_argument("mnist: label out of range [0,9]");
        if (!cfg_.digit_filter.empty() &&
            std::find(cfg_.digit_filter.begin(), cfg_.digit_filter.end(), digit) ==
                cfg_.digit_filter.end()) {
            continue;
        }
        by_digit_[static_cast<std::size_t>(digit)].push_back(static_cast<std::size_t>(i));
    }
    for (const ScheduleEntry& e : schedule_) {
        if (e.digit < 0 || e.digit > 9 ||
            by_digit_[static_cast<std::size_t>(e.digit)].empty()) {
            throw std::invalid_argument("mnist: scheduled digit " + std::to_string(e.digit) +
                                        " not present in the dataset");
        }
        if (!(e.duration > 0.0)) {
            throw std::invalid_argument("mnist: schedule durations must be > 0");
        }
    }
    phase_end_ = schedule_[0].duration;
}

std::optional<SpikeEvent> MnistStreamGenerator::next() {
    clock_ += rng_.exponential(cfg_.combined_rate);
    while (clock_ > phase_end_) {
        if (phase_ + 1 >= schedule_.size()) return std::nullopt;
        ++phase_;
        phase_end_ += schedule_[phase_].duration;
    }
    const auto& pool = by_digit_[static_cast<std::size_t>(schedule_[phase_].digit)];
    // redraw images whose configured row carries no intensity
    for (int attempt = 0; attempt < 10000; ++attempt) {
        const std::size_t idx = pool[rng_.below(pool.size())];
        const std::vector<double> row = image_row(images_, idx, cfg_.row_index);
        double total = 0.0;
        for (double v : row) total += v;
        if (total > 0.0) {
            return SpikeEvent{mnist_encode_spike(row, rng_), clock_};
        }
    }
    throw std::runtime_error("mnist: digit " + std::to_string(schedule_[phase_].digit) +
                             " has no image with intensity in row " +
                             std::to_string(cfg_.row_index));
}

}  // namespace hebbsim
