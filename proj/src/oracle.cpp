#include "hebbsim/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

#include "hebbsim/rng.hpp"

namespace hebbsim {
namespace oracle {

void EnumerationConfig::validate() const {
    if (!(w1 >= 0.0 && w1 <= 1.0)) {
        throw std::invalid_argument("oracle: w1 must lie in [0,1]");
    }
    if (!(threshold > 0.0)) throw std::invalid_argument("oracle: threshold must be > 0");
    if (decay < 0.0) throw std::invalid_argument("oracle: decay must be >= 0");
    if (max_sequence_length < 1 || max_sequence_length > 30) {
        throw std::invalid_argument("oracle: sequence length must be in [1,30]");
    }
    if (!(rate > 0.0)) throw std::invalid_argument("oracle: rate must be > 0");
    if (!(bias >= 0.0 && bias <= 1.0)) {
        throw std::invalid_argument("oracle: bias must lie in [0,1]");
    }
}

namespace {

std::string sequence_to_string(std::uint64_t s, int length) {
    std::string out;
    for (int k = 0; k < length; ++k) {
        out += ((s >> k) & 1u) ? '2' : '1';
        if (k + 1 < length) out += ' ';
    }
    return out;
}

}  // namespace

double enumerate_p1(const EnumerationConfig& config) {
    config.validate();
    // Zero-weight channels can never trigger a crossing.
    if (config.w1 == 0.0) return 0.0;
    if (config.w1 == 1.0) return 1.0;

    const int L = config.max_sequence_length;
    const double w[2] = {config.w1, 1.0 - config.w1};
    const double theta = config.threshold;
    const double d = config.decay;
    const std::uint64_t base = mix64(config.seed);
    const std::uint64_t n_sequences = 1ull << L;

    double c1 = 0.0, c2 = 0.0, unresolved = 0.0;
    std::uint64_t first_unresolved = 0;
    bool have_unresolved = false;

    for (std::uint64_t s = 0; s < n_sequences; ++s) {
        // Full-length sequence probability (bit 1 = channel 2).
        const int ones = std::popcount(s);
        const double prob =
            config.bias == 0.5
                ? std::ldexp(1.0, -L)
                : std::pow(1.0 - config.bias, ones) * std::pow(config.bias, L - ones);
        double V = 0.0;
        std::uint64_t h = mix64(base ^ s);
        int crossed_at = -1;
        for (int k = 0; k < L; ++k) {
            const int bit = static_cast<int>((s >> k) & 1u);
            if (d > 0.0) {
                h = mix64(h);
                V *= std::exp(-d * exponential_from_hash(h, config.rate));
            }
            V += w[bit];
            if (V >= theta) {
                crossed_at = bit;
                break;
            }
        }
        if (crossed_at == 0) {
            c1 += prob;
        } else if (crossed_at == 1) {
            c2 += prob;
        } else {
            unresolved += prob;
            if (!have_unresolved) {
                first_unresolved = s;
                have_unresolved = true;
            }
        }
    }
    if (unresolved > config.unresolved_tolerance) {
        throw std::runtime_error(
            "enumerate_p1: probability mass " + std::to_string(unresolved) +
            " of sequences never crosses the threshold within " + std::to_string(L) +
            " events (first: " + sequence_to_string(first_unresolved, L) +
            "); increase max_sequence_length");
    }
    return c1 / (c1 + c2);
}

const char* to_string(Classification c) {
    switch (c) {
        case Classification::None: return "none";
        case Classification::Stable: return "stable";
        case Classification::Unstable: return "unstable";
        case Classification::Absorbing: return "absorbing";
    }
    return "none";
}

namespace {

constexpr double kMinWidth = 5e-4;    // refinement floor in w1
constexpr double kRefineBand = 0.10;  // |p1-w1| window that triggers refinement

struct Sample {
    double w;
    double g;  // p1(w) - w
};

double eval_g(EnumerationConfig& cfg, double w1) {
    cfg.w1 = w1;
    return enumerate_p1(cfg) - w1;
}

void emit(std::vector<Crossing>& out, double w, Classification kind) {
    // refinement cells share edges; drop duplicate roots
    for (const Crossing& c : out) {
        if (std::abs(c.w1 - w) < kMinWidth) return;
    }
    out.push_back(Crossing{w, w, kind});
}

void refine(EnumerationConfig& cfg, Sample a, Sample b, int depth,
            std::vector<Crossing>& out) {
    const bool sign_change = (a.g > 0.0 && b.g < 0.0) || (a.g < 0.0 && b.g > 0.0);
    const bool zero_edge = a.g == 0.0 || b.g == 0.0;
    if (depth == 0 || b.w - a.w < kMinWidth) {
        if (sign_change) {
            const double root = a.w + (b.w - a.w) * (a.g / (a.g - b.g));
            emit(out, root, a.g > 0.0 ? Classification::Stable : Classification::Unstable);
        } else if (a.g == 0.0 && b.g != 0.0) {
            emit(out, a.w, b.g < 0.0 ? Classification::Stable : Classification::Unstable);
        } else if (b.g == 0.0 && a.g != 0.0) {
            emit(out, b.w, a.g > 0.0 ? Classification::Stable : Classification::Unstable);
        }
        return;
    }
    if (!sign_change && !zero_edge && std::min(std::abs(a.g), std::abs(b.g)) > kRefineBand) {
        return;  // far from the diagonal on both ends; nothing to find
    }
    const Sample m{(a.w + b.w) / 2.0, eval_g(cfg, (a.w + b.w) / 2.0)};
    refine(cfg, a, m, depth - 1, out);
    refine(cfg, m, b, depth - 1, out);
}

}  // namespace

ScanResult fixed_point_scan(EnumerationConfig config, int resolution, double lo, double hi,
                            double merge_radius) {
    if (resolution < 2) throw std::invalid_argument("scan: resolution must be >= 2");
    if (!(lo >= 0.0 && hi <= 1.0 && lo < hi)) {
        throw std::invalid_argument("scan: range must satisfy 0 <= lo < hi <= 1");
    }
    ScanResult result;
    std::vector<Sample> grid(static_cast<std::size_t>(resolution));
    for (int k = 0; k < resolution; ++k) {
        const double w1 = lo + (hi - lo) * k / (resolution - 1);
        config.w1 = w1;
        const double p1 = enumerate_p1(config);
        grid[static_cast<std::size_t>(k)] = Sample{w1, p1 - w1};
        result.curve.push_back(ScanPoint{w1, p1, Classification::None});
    }

    std::vector<Crossing> raw;
    for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
        refine(config, grid[k], grid[k + 1], 6, raw);
    }
    // Absorbing endpoints are constraint points by definition.
    if (lo == 0.0) raw.push_back(Crossing{0.0, 0.0, Classification::Absorbing});
    if (hi == 1.0) raw.push_back(Crossing{1.0, 1.0, Classification::Absorbing});
    std::sort(raw.begin(), raw.end(),
              [](const Crossing& x, const Crossing& y) { return x.w1 < y.w1; });

    // Collapse crossings closer than merge_radius. An absorbing endpoint
    // subsumes the enumeration-granularity crossing right next to it; a
    // cluster containing an unstable member is dynamically unstable (escape
    // through the jump dominates the micro-basin beside it).
    std::vector<Crossing> merged;
    for (std::size_t i = 0; i < raw.size();) {
        std::size_t j = i + 1;
        while (j < raw.size() && raw[j].w1 - raw[j - 1].w1 < merge_radius) ++j;
        Crossing rep = raw[i];
        for (std::size_t k = i; k < j; ++k) {
            if (raw[k].classification == Classification::Unstable &&
                rep.classification != Classification::Absorbing) {
                rep = raw[k];
            }
            if (raw[k].classification == Classification::Absorbing) {
                rep = raw[k];
            }
        }
        merged.push_back(rep);
        i = j;
    }
    result.crossings = std::move(merged);

    // Tag the nearest grid row of each constraint point for the CSV output.
    for (const Crossing& c : result.crossings) {
        std::size_t best = 0;
        for (std::size_t k = 1; k < result.curve.size(); ++k) {
            if (std::abs(result.curve[k].w1 - c.w1) <
                std::abs(result.curve[best].w1 - c.w1)) {
                best = k;
            }
        }
        result.curve[best].classification = c.classification;
    }
    return result;
}

}  // namespace oracle
}  // namespace hebbsim
