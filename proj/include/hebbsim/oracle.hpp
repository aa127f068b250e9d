#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hebbsim/types.hpp"

namespace hebbsim {
namespace oracle {

/// Exhaustive-enumeration setup for the two-channel neuron. All channel
/// sequences of length `max_sequence_length` are played against frozen
/// weights [w1, 1-w1]; waiting times between spikes are hashed from
/// (seed, sequence, position) so the whole p1(w1) curve shares one set of
/// waits (common random numbers across a grid scan).
struct EnumerationConfig {
    double w1 = 0.5;
    double threshold = 0.94;
    double decay = 0.0;
    int max_sequence_length = 13;
    double rate = 1.8;                 // merged inter-spike rate
    double bias = 0.5;                 // probability a spike is channel 1
    std::uint64_t seed = 12345;
    /// Largest admissible probability mass of sequences that never cross
    /// the threshold within max_sequence_length events.
    double unresolved_tolerance = 1e-3;

    void validate() const;
};

/// Exact (enumeration) probability that channel 1 triggers the output
/// spike. Deterministic given the seed. Throws when the non-crossing
/// sequence mass exceeds the tolerance, naming the first offending
/// sequence so the caller can increase the length.
double enumerate_p1(const EnumerationConfig& config);

enum class Classification { None, Stable, Unstable, Absorbing };

const char* to_string(Classification c);

struct ScanPoint {
    double w1 = 0.0;
    double p1 = 0.0;
    Classification classification = Classification::None;
};

struct Crossing {
    double w1 = 0.0;      // diagonal-constraint point p1(w1) == w1
    double p1 = 0.0;
    Classification classification = Classification::None;
};

struct ScanResult {
    std::vector<ScanPoint> curve;       // one row per grid point
    std::vector<Crossing> crossings;    // constraint points incl. absorbing ends
};

/// Evaluate p1(w1) on a uniform grid and classify the diagonal-constraint
/// points: sign changes of p1(w1) - w1 from above are stable, from below
/// unstable; the endpoints w1 = 0 and w1 = 1 are absorbing. Near-diagonal
/// intervals are refined adaptively so constraint points hiding between
/// grid nodes (the curve is a step function for zero decay) are still
/// found; crossings closer than `merge_radius` collapse into one reported
/// point, which is unstable if any member is.
ScanResult fixed_point_scan(EnumerationConfig config, int resolution,
                            double lo = 0.0, double hi = 1.0,
                            double merge_radius = 0.005);

}  // namespace oracle
}  // namespace hebbsim
