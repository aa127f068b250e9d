#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hebbsim/config.hpp"
#include "hebbsim/estimators.hpp"
#include "hebbsim/inputs.hpp"
#include "hebbsim/oracle.hpp"
#include "hebbsim/simulation.hpp"

namespace hebbsim {

/// A fully resolved run description. Two runs built from equal
/// configurations are bit-identical.
struct RunConfig {
    SimulationConfig sim;
    Time duration = 0.0;
    std::string output_dir;
    KeyValueConfig resolved;  // every effective key, defaults included

    // input description (exactly one source is active)
    std::optional<RateSpec> rates;
    std::vector<Time> redraw_times;            // gaussian rates re-drawn here
    struct Gaussian {
        int channels = 0;
        double mu = 0.9;
        double sigma = 0.15;
    };
    std::optional<Gaussian> gaussian;
    std::optional<MnistEncoderConfig> mnist;
    std::vector<MnistStreamGenerator::ScheduleEntry> mnist_schedule;
    std::string replay_path;
};

/// Validate and resolve a key=value config into a RunConfig. Collects every
/// validation failure before throwing, so a bad file is reported in full.
RunConfig resolve_run_config(const KeyValueConfig& cfg);

/// Build the input generator a RunConfig describes. MNIST data is loaded on
/// demand; gaussian specs derive phase rates from the run seed.
std::unique_ptr<SpikeGenerator> make_generator(const RunConfig& rc);

struct RunArtifacts {
    RunTrace trace;
    std::string output_dir;
};

/// One run plus persisted artifacts: spikes.csv / weights.csv /
/// constraints.csv / delta.csv / final_weights.csv and a manifest echoing
/// the resolved config.
RunArtifacts cmd_simulate(const RunConfig& rc);

/// Grid over initial w1 x step sizes for the two-channel neuron; emits
/// sweep.csv (w1_init, epsilon, w1_final). Grid cells run in parallel but
/// are written in grid order.
struct SweepSpec {
    double w1_lo = 0.5;
    double w1_hi = 1.0;
    double w1_step = 0.02;
    /// Entries are either a constant step size or "uniform:<amplitude>".
    std::vector<std::string> epsilons;
    int jobs = 0;  // 0 = hardware concurrency
};
struct SweepCell {
    double w1_init = 0.0;
    std::string epsilon;
    double w1_final = 0.0;
};
std::vector<SweepCell> cmd_sweep_initial_weights(const RunConfig& base,
                                                 const SweepSpec& spec);

/// Oracle p1(w1) scans for a set of decay rates; emits p_curve_d<d>.csv.
struct OracleScanSpec {
    std::vector<double> decays{0.0, 0.1, 0.2};
    int resolution = 101;
    double lo = 0.0;
    double hi = 1.0;
};
std::vector<oracle::ScanResult> cmd_oracle_scan(const RunConfig& base,
                                                const OracleScanSpec& spec);

/// Novelty run: delta monitoring with adaptive learning rate; emits
/// delta.csv plus alerts.csv with the times where delta exceeded
/// `alert_factor` times its trailing median.
struct NoveltyAlert {
    Time time = 0.0;
    double delta = 0.0;
    double trailing_median = 0.0;
};
struct NoveltyResult {
    RunTrace trace;
    std::vector<NoveltyAlert> alerts;
};
NoveltyResult cmd_novelty(const RunConfig& rc, double alert_factor = 5.0);

/// Steady-state verification of a finished run: evaluates the
/// rule-appropriate constraint and prints one machine-readable pass/fail
/// line per check. Returns false when any check fails.
struct VerifyCheck {
    std::string name;
    double measured = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};
struct VerifyResult {
    std::vector<VerifyCheck> checks;
    bool pass = true;
};
VerifyResult cmd_verify(const RunConfig& rc, double tolerance);

int cli_main(int argc, char** argv);

}  // namespace hebbsim
