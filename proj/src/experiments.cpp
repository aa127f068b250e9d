#include "hebbsim/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <thread>

#include "hebbsim/csvio.hpp"

namespace hebbsim {

namespace {

constexpr std::uint64_t kWeightSalt = 0xF00Dull;
constexpr std::uint64_t kGeneratorSalt = 0x12D687ull;
constexpr std::uint64_t kPhaseSalt = 1000ull;

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto a = item.find_first_not_of(" \t");
        const auto b = item.find_last_not_of(" \t");
        if (a == std::string::npos) continue;
        out.push_back(item.substr(a, b - a + 1));
    }
    return out;
}

struct ErrorCollector {
    std::vector<std::string> errors;

    template <typename F>
    auto collect(F&& f, const std::string& context) -> decltype(f()) {
        try {
            return f();
        } catch (const std::exception& e) {
            errors.push_back(context + ": " + e.what());
            return {};
        }
    }
    void require(bool ok, const std::string& msg) {
        if (!ok) errors.push_back(msg);
    }
    void finish() const {
        if (errors.empty()) return;
        std::string joined = "invalid configuration:";
        for (const std::string& e : errors) joined += "\n  - " + e;
        throw std::invalid_argument(joined);
    }
};

WindowMode parse_window_mode(const std::string& spec, std::size_t* length, double* decay) {
    if (spec == "cumulative") return WindowMode::Cumulative;
    if (spec.rfind("sliding:", 0) == 0) {
        *length = static_cast<std::size_t>(std::stoll(spec.substr(8)));
        return WindowMode::Sliding;
    }
    if (spec.rfind("exponential:", 0) == 0) {
        *decay = std::stod(spec.substr(12));
        return WindowMode::Exponential;
    }
    throw std::invalid_argument("estimator.window must be cumulative, sliding:<n> or "
                                "exponential:<factor>, got '" + spec + "'");
}

std::string mnist_default_path(const char* filename) {
    const char* dir = std::getenv("HEBBSIM_MNIST_DIR");
    if (dir == nullptr || *dir == '\0') return "";
    return std::string(dir) + "/" + filename;
}

}  // namespace

RunConfig resolve_run_config(const KeyValueConfig& cfg) {
    ErrorCollector ec;
    RunConfig rc;
    KeyValueConfig full = cfg;  // echo every effective key back

    // --- neuron ---
    const double theta = ec.collect([&] { return cfg.get_double("neuron.theta"); },
                                    "neuron.theta");
    const double decay = ec.collect([&] { return cfg.get_double_or("neuron.decay", 0.0); },
                                    "neuron.decay");
    const int channels = static_cast<int>(
        ec.collect([&] { return cfg.get_int("neuron.channels"); }, "neuron.channels"));
    ec.require(theta > 0.0, "neuron.theta must be > 0");
    ec.require(decay >= 0.0, "neuron.decay must be >= 0");
    ec.require(channels >= 1, "neuron.channels must be >= 1");
    full.set("neuron.decay", format_double(decay));

    // --- rule ---
    const std::string kind = cfg.get_or("rule.kind", "none");
    full.set("rule.kind", kind);
    double l = 1.0;
    if (kind != "none") {
        PlasticityRule rule;
        if (kind == "hebbian") {
            rule.kind = RuleKind::PureHebbian;
        } else if (kind == "stdp") {
            rule.kind = RuleKind::Stdp;
        } else if (kind == "decay") {
            rule.kind = RuleKind::DecayModel;
        } else {
            ec.require(false, "rule.kind must be none, hebbian, stdp or decay");
        }
        rule.epsilon.amplitude =
            ec.collect([&] { return cfg.get_double("rule.epsilon"); }, "rule.epsilon");
        rule.epsilon.support =
            ec.collect([&] { return cfg.get_double("rule.tau"); }, "rule.tau");
        const std::string shape = cfg.get_or("rule.epsilon_shape", "constant");
        if (shape == "constant") {
            rule.epsilon.shape = EpsilonKernel::Shape::Constant;
        } else if (shape == "truncexp") {
            rule.epsilon.shape = EpsilonKernel::Shape::TruncatedExponential;
        } else {
            ec.require(false, "rule.epsilon_shape must be constant or truncexp");
        }
        rule.epsilon.time_constant =
            ec.collect([&] { return cfg.get_double_or("rule.epsilon_time_constant", 0.02); },
                       "rule.epsilon_time_constant");
        rule.epsilon.uniform_random =
            ec.collect([&] { return cfg.get_bool_or("rule.epsilon_uniform", false); },
                       "rule.epsilon_uniform");
        l = ec.collect([&] { return cfg.get_double_or("rule.l", 1.0); }, "rule.l");
        rule.norm_exponent = l;
        if (rule.kind == RuleKind::DecayModel) {
            rule.decay_delta =
                ec.collect([&] { return cfg.get_double("rule.delta"); }, "rule.delta");
            full.set("rule.delta", format_double(rule.decay_delta));
        }
        if (ec.errors.empty()) {
            try {
                rule.validate();
            } catch (const std::exception& e) {
                ec.errors.push_back(e.what());
            }
        }
        rc.sim.rule = rule;
        full.set("rule.epsilon_shape", shape);
        full.set("rule.epsilon_time_constant", format_double(rule.epsilon.time_constant));
        full.set("rule.epsilon_uniform", rule.epsilon.uniform_random ? "true" : "false");
        full.set("rule.l", format_double(l));
        rc.sim.adaptive_epsilon =
            ec.collect([&] { return cfg.get_bool_or("rule.adaptive", false); },
                       "rule.adaptive");
        rc.sim.adaptive_cap =
            ec.collect([&] { return cfg.get_double_or("rule.adaptive_cap", 1e-3); },
                       "rule.adaptive_cap");
        full.set("rule.adaptive", rc.sim.adaptive_epsilon ? "true" : "false");
        full.set("rule.adaptive_cap", format_double(rc.sim.adaptive_cap));
    }
    rc.sim.learning_enabled =
        ec.collect([&] { return cfg.get_bool_or("learning.enabled", true); },
                   "learning.enabled");
    full.set("learning.enabled", rc.sim.learning_enabled ? "true" : "false");

    // --- estimator window ---
    {
        const std::string window = cfg.get_or("estimator.window", "sliding:5000");
        full.set("estimator.window", window);
        std::size_t len = 5000;
        double ewm = 0.999;
        try {
            rc.sim.monitor_window.mode = parse_window_mode(window, &len, &ewm);
            rc.sim.monitor_window.window_length = len;
            rc.sim.monitor_window.decay_factor = ewm;
        } catch (const std::exception& e) {
            ec.errors.push_back(e.what());
        }
    }

    // --- run basics ---
    rc.duration = ec.collect([&] { return cfg.get_double("run.duration"); }, "run.duration");
    ec.require(rc.duration >= 0.0, "run.duration must be >= 0");
    const std::uint64_t seed = static_cast<std::uint64_t>(
        ec.collect([&] { return cfg.get_int_or("run.seed", 1); }, "run.seed"));
    rc.sim.seed = seed;
    full.set("run.seed", std::to_string(seed));
    rc.output_dir = cfg.get_or("run.output_dir", "out");
    full.set("run.output_dir", rc.output_dir);

    // --- inputs ---
    const std::string ikind = ec.collect([&] { return cfg.get("inputs.kind"); },
                                         "inputs.kind");
    if (ikind == "per_channel") {
        std::vector<double> rates;
        if (cfg.has("inputs.rates")) {
            rates = ec.collect([&] { return cfg.get_double_list("inputs.rates"); },
                               "inputs.rates");
            ec.require(static_cast<int>(rates.size()) == channels,
                       "inputs.rates length must equal neuron.channels");
        } else {
            const double r = ec.collect([&] { return cfg.get_double("inputs.rate"); },
                                        "inputs.rate (or inputs.rates)");
            rates.assign(static_cast<std::size_t>(std::max(channels, 1)), r);
        }
        if (ec.errors.empty()) {
            try {
                rc.rates = RateSpec::per_channel(rates);
            } catch (const std::exception& e) {
                ec.errors.push_back(e.what());
            }
        }
    } else if (ikind == "biased") {
        const double combined =
            ec.collect([&] { return cfg.get_double("inputs.combined_rate"); },
                       "inputs.combined_rate");
        const std::vector<double> bias =
            ec.collect([&] { return cfg.get_double_list("inputs.bias"); }, "inputs.bias");
        ec.require(static_cast<int>(bias.size()) == channels,
                   "inputs.bias length must equal neuron.channels");
        if (ec.errors.empty()) {
            try {
                rc.rates = RateSpec::biased(combined, bias);
            } catch (const std::exception& e) {
                ec.errors.push_back(e.what());
            }
        }
    } else if (ikind == "gaussian") {
        RunConfig::Gaussian g;
        g.channels = channels;
        g.mu = ec.collect([&] { return cfg.get_double_or("inputs.gaussian_mu", 0.9); },
                          "inputs.gaussian_mu");
        g.sigma = ec.collect([&] { return cfg.get_double_or("inputs.gaussian_sigma", 0.15); },
                             "inputs.gaussian_sigma");
        rc.gaussian = g;
        full.set("inputs.gaussian_mu", format_double(g.mu));
        full.set("inputs.gaussian_sigma", format_double(g.sigma));
        if (cfg.has("inputs.redraw_times")) {
            const auto times =
                ec.collect([&] { return cfg.get_double_list("inputs.redraw_times"); },
                           "inputs.redraw_times");
            for (double t : times) {
                ec.require(t > 0.0 && t < rc.duration,
                           "inputs.redraw_times must lie inside (0, run.duration)");
                rc.redraw_times.push_back(t);
            }
        }
    } else if (ikind == "mnist") {
        MnistEncoderConfig mc;
        mc.images_path =
            cfg.get_or("inputs.mnist_images", mnist_default_path("train-images-idx3-ubyte"));
        mc.labels_path =
            cfg.get_or("inputs.mnist_labels", mnist_default_path("train-labels-idx1-ubyte"));
        ec.require(!mc.images_path.empty(),
                   "inputs.mnist_images missing (set the key or HEBBSIM_MNIST_DIR)");
        ec.require(!mc.labels_path.empty(),
                   "inputs.mnist_labels missing (set the key or HEBBSIM_MNIST_DIR)");
        mc.row_index = static_cast<int>(
            ec.collect([&] { return cfg.get_int_or("inputs.mnist_row", 14); },
                       "inputs.mnist_row"));
        mc.combined_rate =
            ec.collect([&] { return cfg.get_double_or("inputs.combined_rate", 0.9 * 28); },
                       "inputs.combined_rate");
        mc.seed = mix64(seed, kGeneratorSalt);
        const std::string sched =
            ec.collect([&] { return cfg.get("inputs.mnist_schedule"); },
                       "inputs.mnist_schedule");
        for (const std::string& tok : split_list(sched)) {
            const auto colon = tok.find(':');
            if (colon == std::string::npos) {
                ec.require(false, "inputs.mnist_schedule entries must be digit:duration");
                continue;
            }
            try {
                MnistStreamGenerator::ScheduleEntry e;
                e.digit = std::stoi(tok.substr(0, colon));
                e.duration = std::stod(tok.substr(colon + 1));
                rc.mnist_schedule.push_back(e);
            } catch (const std::exception&) {
                ec.require(false, "inputs.mnist_schedule entry not parseable: '" + tok + "'");
            }
        }
        rc.mnist = mc;
        full.set("inputs.mnist_images", mc.images_path);
        full.set("inputs.mnist_labels", mc.labels_path);
        full.set("inputs.mnist_row", std::to_string(mc.row_index));
        full.set("inputs.combined_rate", format_double(mc.combined_rate));
    } else if (ikind == "replay") {
        rc.replay_path = ec.collect([&] { return cfg.get("inputs.replay_path"); },
                                    "inputs.replay_path");
    } else if (!ikind.empty()) {
        ec.require(false,
                   "inputs.kind must be per_channel, biased, gaussian, mnist or replay");
    }

    // --- initial weights ---
    {
        const std::string init = cfg.get_or("run.initial_weights", "uniform");
        full.set("run.initial_weights", init);
        const bool normalized_rule =
            rc.sim.rule && rc.sim.rule->kind != RuleKind::DecayModel;
        try {
            if (init == "uniform") {
                rc.sim.weights = WeightVector::uniform(channels, normalized_rule ? l : 1.0);
            } else if (init == "random") {
                Rng wr(mix64(seed, kWeightSalt));
                std::vector<double> w(static_cast<std::size_t>(channels));
                for (double& v : w) v = wr.uniform(0.05, 1.0);
                rc.sim.weights = WeightVector(w, normalized_rule ? l : 1.0);
                rc.sim.weights.normalize();
            } else {
                KeyValueConfig tmp;
                tmp.set("w", init);
                std::vector<double> w = tmp.get_double_list("w");
                if (static_cast<int>(w.size()) != channels) {
                    throw std::invalid_argument(
                        "run.initial_weights list length must equal neuron.channels");
                }
                rc.sim.weights = WeightVector(w, normalized_rule ? l : 1.0);
                if (normalized_rule) rc.sim.weights.normalize();
            }
        } catch (const std::exception& e) {
            ec.errors.push_back(std::string("run.initial_weights: ") + e.what());
        }
    }

    // --- trace options ---
    rc.sim.trace.record_inputs =
        ec.collect([&] { return cfg.get_bool_or("trace.record_inputs", false); },
                   "trace.record_inputs");
    rc.sim.trace.record_outputs =
        ec.collect([&] { return cfg.get_bool_or("trace.record_outputs", false); },
                   "trace.record_outputs");
    rc.sim.trace.snapshot_cadence =
        ec.collect([&] { return cfg.get_double_or("trace.snapshot_cadence", 0.0); },
                   "trace.snapshot_cadence");
    rc.sim.trace.delta_cadence =
        ec.collect([&] { return cfg.get_double_or("trace.delta_cadence", 0.0); },
                   "trace.delta_cadence");
    full.set("trace.record_inputs", rc.sim.trace.record_inputs ? "true" : "false");
    full.set("trace.record_outputs", rc.sim.trace.record_outputs ? "true" : "false");
    full.set("trace.snapshot_cadence", format_double(rc.sim.trace.snapshot_cadence));
    full.set("trace.delta_cadence", format_double(rc.sim.trace.delta_cadence));

    if (ec.errors.empty()) {
        try {
            rc.sim.neuron = NeuronState(theta, decay);
        } catch (const std::exception& e) {
            ec.errors.push_back(e.what());
        }
    }
    ec.finish();
    rc.resolved = full;
    return rc;
}

std::unique_ptr<SpikeGenerator> make_generator(const RunConfig& rc) {
    const std::uint64_t gen_seed = mix64(rc.sim.seed, kGeneratorSalt);
    if (rc.rates) {
        return std::make_unique<PoissonGenerator>(*rc.rates, rc.duration, gen_seed);
    }
    if (rc.gaussian) {
        std::vector<PoissonGenerator::Phase> phases;
        Time start = 0.0;
        std::size_t idx = 0;
        phases.push_back(PoissonGenerator::Phase{
            gaussian_rates(rc.gaussian->channels, rc.gaussian->mu, rc.gaussian->sigma,
                           mix64(rc.sim.seed, kPhaseSalt)),
            start});
        for (Time t : rc.redraw_times) {
            ++idx;
            phases.push_back(PoissonGenerator::Phase{
                gaussian_rates(rc.gaussian->channels, rc.gaussian->mu, rc.gaussian->sigma,
                               mix64(rc.sim.seed, kPhaseSalt + idx)),
                t});
        }
        return std::make_unique<PoissonGenerator>(std::move(phases), rc.duration, gen_seed);
    }
    if (rc.mnist) {
        // Loaded per run; the generator keeps references.
        auto images = std::make_shared<IdxImages>(load_idx_images(rc.mnist->images_path));
        auto labels = std::make_shared<IdxLabels>(load_idx_labels(rc.mnist->labels_path));
        struct OwningMnistGen : SpikeGenerator {
            std::shared_ptr<IdxImages> images;
            std::shared_ptr<IdxLabels> labels;
            std::unique_ptr<MnistStreamGenerator> inner;
            std::optional<SpikeEvent> next() override { return inner->next(); }
        };
        auto gen = std::make_unique<OwningMnistGen>();
        gen->images = images;
        gen->labels = labels;
        gen->inner = std::make_unique<MnistStreamGenerator>(*images, *labels, *rc.mnist,
                                                            rc.mnist_schedule);
        return gen;
    }
    if (!rc.replay_path.empty()) {
        return std::make_unique<VectorGenerator>(read_spikes_csv(rc.replay_path));
    }
    throw std::invalid_argument("run config describes no input source");
}

namespace {

std::string manifest_comment(const RunConfig& rc) {
    // The hash identifies the run's dynamics; where the artifacts land is
    // not part of it.
    KeyValueConfig hashed = rc.resolved;
    hashed.erase("run.output_dir");
    return "hebbsim config=" + hashed.hash() + " seed=" + std::to_string(rc.sim.seed);
}

void write_artifacts(const RunConfig& rc, const RunTrace& trace) {
    namespace fs = std::filesystem;
    fs::create_directories(rc.output_dir);
    const std::string comment = manifest_comment(rc);
    const std::string dir = rc.output_dir + "/";

    rc.resolved.write_file(dir + "manifest.cfg");

    {
        CsvWriter csv(dir + "spikes.csv", comment, {"time", "channel", "kind"});
        std::size_t i = 0, o = 0;
        while (i < trace.inputs.size() || o < trace.outputs.size()) {
            const bool take_input =
                o >= trace.outputs.size() ||
                (i < trace.inputs.size() &&
                 trace.inputs[i].time <= trace.outputs[o].time);
            if (take_input) {
                csv.row({format_double(trace.inputs[i].time),
                         std::to_string(trace.inputs[i].channel), "input"});
                ++i;
            } else {
                csv.row({format_double(trace.outputs[o].time),
                         std::to_string(trace.outputs[o].triggering_channel), "output"});
                ++o;
            }
        }
    }
    {
        std::vector<std::string> header{"time"};
        for (int c = 0; c < trace.final_weights.size(); ++c) {
            header.push_back("w_" + std::to_string(c));
        }
        CsvWriter csv(dir + "weights.csv", comment, header);
        for (const auto& [t, w] : trace.weight_snapshots) {
            std::vector<double> row{t};
            row.insert(row.end(), w.begin(), w.end());
            csv.row(row);
        }
    }
    {
        CsvWriter csv(dir + "delta.csv", comment, {"time", "delta", "epsilon_current"});
        for (const DeltaSample& s : trace.delta_series) {
            csv.row(std::vector<double>{s.time, s.delta, s.epsilon});
        }
    }
    {
        CsvWriter csv(dir + "constraints.csv", comment,
                      {"time", "channel", "L_i", "w_norm_i"});
        if (rc.sim.rule && trace.monitor.total_events() > 0.0) {
            try {
                const PlasticityRule& rule = *rc.sim.rule;
                ConstraintReport rep;
                if (rule.kind == RuleKind::DecayModel) {
                    rep = decay_constraint(trace.monitor, trace.final_weights,
                                           rule.epsilon.amplitude, rule.decay_delta);
                } else if (!rule.epsilon.is_constant()) {
                    rep = kernel_stdp_constraint(trace.monitor, trace.final_weights,
                                                 rule.norm_exponent);
                } else {
                    rep = stdp_constraint(trace.monitor, trace.final_weights,
                                          rule.epsilon.amplitude, rule.norm_exponent);
                }
                for (int c = 0; c < trace.final_weights.size(); ++c) {
                    const std::size_t u = static_cast<std::size_t>(c);
                    csv.row(std::vector<double>{trace.end_time, static_cast<double>(c),
                                                rep.L[u], rep.normalized_weights[u]});
                }
            } catch (const DegenerateConstraintError&) {
                // leave the table empty; delta.csv still records the run
            }
        }
    }
    {
        CsvWriter csv(dir + "final_weights.csv", comment, {"channel", "weight"});
        for (int c = 0; c < trace.final_weights.size(); ++c) {
            csv.row(std::vector<double>{static_cast<double>(c), trace.final_weights[c]});
        }
    }
}

}  // namespace

RunArtifacts cmd_simulate(const RunConfig& rc) {
    Simulation sim(rc.sim);
    auto gen = make_generator(rc);
    RunTrace trace = sim.run(*gen, rc.duration);
    write_artifacts(rc, trace);
    return RunArtifacts{std::move(trace), rc.output_dir};
}

std::vector<SweepCell> cmd_sweep_initial_weights(const RunConfig& base,
                                                 const SweepSpec& spec) {
    if (base.sim.weights.size() != 2) {
        throw std::invalid_argument("sweep: the initial-weight sweep needs 2 channels");
    }
    if (!base.sim.rule) throw std::invalid_argument("sweep: no learning rule configured");
    std::vector<SweepCell> cells;
    for (double w1 = spec.w1_lo; w1 <= spec.w1_hi + 1e-9; w1 += spec.w1_step) {
        for (const std::string& eps : spec.epsilons) {
            cells.push_back(SweepCell{std::min(w1, 1.0), eps, 0.0});
        }
    }

    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::string error_msg;
    std::mutex error_mutex;
    const unsigned n_jobs =
        spec.jobs > 0 ? static_cast<unsigned>(spec.jobs)
                      : std::max(1u, std::thread::hardware_concurrency());

    auto worker = [&] {
        while (true) {
            const std::size_t idx = next.fetch_add(1);
            if (idx >= cells.size() || failed.load()) break;
            SweepCell& cell = cells[idx];
            try {
                RunConfig rc = base;
                rc.sim.weights =
                    WeightVector({cell.w1_init, 1.0 - cell.w1_init},
                                 base.sim.rule->kind == RuleKind::DecayModel
                                     ? 1.0
                                     : base.sim.rule->norm_exponent);
                PlasticityRule rule = *base.sim.rule;
                if (cell.epsilon.rfind("uniform:", 0) == 0) {
                    rule.epsilon.uniform_random = true;
                    rule.epsilon.amplitude = std::stod(cell.epsilon.substr(8));
                } else {
                    rule.epsilon.uniform_random = false;
                    rule.epsilon.amplitude = std::stod(cell.epsilon);
                }
                rc.sim.rule = rule;
                rc.sim.seed = mix64(base.sim.seed, idx);
                rc.sim.trace = TraceOptions{};  // sweeps keep no per-run traces
                Simulation sim(rc.sim);
                auto gen = make_generator(rc);
                const RunTrace trace = sim.run(*gen, rc.duration);
                cell.w1_final = trace.final_weights[0];
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!failed.exchange(true)) error_msg = e.what();
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < n_jobs; ++i) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
    if (failed.load()) throw std::runtime_error("sweep: " + error_msg);

    if (!base.output_dir.empty()) {
        std::filesystem::create_directories(base.output_dir);
        CsvWriter csv(base.output_dir + "/sweep.csv", manifest_comment(base),
                      {"w1_init", "epsilon", "w1_final"});
        for (const SweepCell& c : cells) {
            csv.row({format_double(c.w1_init), c.epsilon, format_double(c.w1_final)});
        }
    }
    return cells;
}

std::vector<oracle::ScanResult> cmd_oracle_scan(const RunConfig& base,
                                                const OracleScanSpec& spec) {
    oracle::EnumerationConfig ec;
    ec.threshold = base.sim.neuron.threshold;
    ec.seed = base.sim.seed;
    if (base.rates) ec.rate = base.rates->total_rate();
    std::vector<oracle::ScanResult> results;
    std::filesystem::create_directories(base.output_dir);
    for (double d : spec.decays) {
        ec.decay = d;
        oracle::ScanResult res =
            oracle::fixed_point_scan(ec, spec.resolution, spec.lo, spec.hi);
        std::ostringstream name;
        name << base.output_dir << "/p_curve_d" << format_double(d) << ".csv";
        CsvWriter csv(name.str(), manifest_comment(base), {"w_1", "p_1", "classification"});
        for (const oracle::ScanPoint& pt : res.curve) {
            csv.row({format_double(pt.w1), format_double(pt.p1),
                     oracle::to_string(pt.classification)});
        }
        results.push_back(std::move(res));
    }
    return results;
}

NoveltyResult cmd_novelty(const RunConfig& rc, double alert_factor) {
    RunConfig run = rc;
    if (run.sim.trace.delta_cadence <= 0.0) run.sim.trace.delta_cadence = 10.0;
    run.sim.adaptive_epsilon = true;
    NoveltyResult result;
    result.trace = cmd_simulate(run).trace;

    // Alert where delta exceeds the trailing median by the given factor.
    const Time window = 20000.0;
    const auto& series = result.trace.delta_series;
    std::vector<double> scratch;
    for (std::size_t i = 0; i < series.size(); ++i) {
        scratch.clear();
        for (std::size_t j = i; j-- > 0;) {
            if (series[j].time < series[i].time - window) break;
            scratch.push_back(series[j].delta);
        }
        if (scratch.size() < 16) continue;
        std::nth_element(scratch.begin(), scratch.begin() + scratch.size() / 2,
                         scratch.end());
        const double median = scratch[scratch.size() / 2];
        if (median > 0.0 && series[i].delta > alert_factor * median) {
            result.alerts.push_back(
                NoveltyAlert{series[i].time, series[i].delta, median});
        }
    }
    if (!rc.output_dir.empty()) {
        CsvWriter csv(rc.output_dir + "/alerts.csv", manifest_comment(rc),
                      {"time", "delta", "trailing_median"});
        for (const NoveltyAlert& a : result.alerts) {
            csv.row(std::vector<double>{a.time, a.delta, a.trailing_median});
        }
    }
    return result;
}

VerifyResult cmd_verify(const RunConfig& rc, double tolerance) {
    if (!rc.sim.rule) {
        throw std::invalid_argument("verify: a learning rule is required");
    }
    Simulation sim(rc.sim);
    auto gen = make_generator(rc);
    const RunTrace trace = sim.run(*gen, rc.duration);
    const PlasticityRule& rule = *rc.sim.rule;
    VerifyResult vr;
    auto add = [&](const std::string& name, double measured, double tol) {
        vr.checks.push_back(VerifyCheck{name, measured, tol, measured <= tol});
        vr.pass = vr.pass && measured <= tol;
    };

    const EstimatorState& est = trace.monitor;
    if (est.total_events() <= 0.0) {
        throw SimulationError("verify: the run produced no update events");
    }
    const WeightVector& w = trace.final_weights;
    if (rule.kind == RuleKind::DecayModel) {
        const double target_sum = rule.epsilon.amplitude / rule.decay_delta;
        const ConstraintReport rep =
            decay_constraint(est, w, rule.epsilon.amplitude, rule.decay_delta);
        double max_dev = 0.0;
        for (int i = 0; i < w.size(); ++i) {
            const std::size_t u = static_cast<std::size_t>(i);
            max_dev = std::max(max_dev,
                               std::abs(w[i] - target_sum * rep.estimated_p[u]));
        }
        add("decay_weights_vs_p", max_dev, tolerance * target_sum);
        add("decay_weight_sum", std::abs(w.sum() - target_sum), tolerance * target_sum);
    } else {
        ConstraintReport rep;
        if (!rule.epsilon.is_constant()) {
            rep = kernel_stdp_constraint(est, w, rule.norm_exponent);
        } else {
            rep = stdp_constraint(est, w, rule.epsilon.amplitude, rule.norm_exponent);
        }
        double max_dev = 0.0;
        for (std::size_t u = 0; u < rep.L.size(); ++u) {
            max_dev = std::max(max_dev, std::abs(rep.L[u] - rep.normalized_weights[u]));
        }
        add("constraint_L_vs_weights", max_dev, tolerance);
        double p_dev = 0.0;
        for (std::size_t u = 0; u < rep.predicted_p.size(); ++u) {
            if (std::isnan(rep.predicted_p[u])) continue;
            p_dev = std::max(p_dev, std::abs(rep.predicted_p[u] - rep.estimated_p[u]));
        }
        add("constraint_p_diagonal", p_dev, tolerance);
    }
    return vr;
}

// ---------------------------------------------------------------------------
// CLI
// ---------------------------------------------------------------------------

namespace {

int usage() {
    std::cerr <<
        "usage: hebbsim <simulate|sweep|oracle-scan|novelty|verify|replay> "
        "[--config FILE] [--key=value ...]\n"
        "\n"
        "Every configuration key is also a flag; later assignments win.\n"
        "Exit codes: 0 ok, 1 runtime error, 2 verification failure.\n";
    return 1;
}

KeyValueConfig gather_config(const std::vector<std::string>& args) {
    KeyValueConfig cfg;
    // --config files first, remaining flags override in order.
    std::vector<std::string> rest;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            const KeyValueConfig file = KeyValueConfig::from_file(args[i + 1]);
            for (const auto& [k, v] : file.entries()) cfg.set(k, v);
            ++i;
        } else if (args[i].rfind("--config=", 0) == 0) {
            const KeyValueConfig file =
                KeyValueConfig::from_file(args[i].substr(std::string("--config=").size()));
            for (const auto& [k, v] : file.entries()) cfg.set(k, v);
        } else {
            rest.push_back(args[i]);
        }
    }
    cfg.apply_args(rest);
    return cfg;
}

}  // namespace

int cli_main(int argc, char** argv) {
    if (argc < 2) return usage();
    const std::string cmd = argv[1];
    std::vector<std::string> args(argv + 2, argv + argc);
    try {
        KeyValueConfig cfg = gather_config(args);
        if (cmd == "simulate" || cmd == "replay") {
            if (cmd == "replay") cfg.set("inputs.kind", "replay");
            const RunConfig rc = resolve_run_config(cfg);
            const RunArtifacts art = cmd_simulate(rc);
            std::cout << "run finished: " << art.trace.n_inputs << " inputs, "
                      << art.trace.n_outputs << " outputs, " << art.trace.n_promotions
                      << " promotions, " << art.trace.n_demotions << " demotions -> "
                      << art.output_dir << "\n";
            return 0;
        }
        if (cmd == "sweep") {
            const RunConfig rc = resolve_run_config(cfg);
            SweepSpec spec;
            spec.w1_lo = cfg.get_double_or("sweep.w1_lo", 0.5);
            spec.w1_hi = cfg.get_double_or("sweep.w1_hi", 1.0);
            spec.w1_step = cfg.get_double_or("sweep.w1_step", 0.02);
            spec.jobs = static_cast<int>(cfg.get_int_or("sweep.jobs", 0));
            for (const std::string& tok : split_list(cfg.get_or(
                     "sweep.epsilons", format_double(rc.sim.rule
                                                         ? rc.sim.rule->epsilon.amplitude
                                                         : 0.0005)))) {
                spec.epsilons.push_back(tok);
            }
            const auto cells = cmd_sweep_initial_weights(rc, spec);
            std::cout << "sweep finished: " << cells.size() << " runs -> "
                      << rc.output_dir << "/sweep.csv\n";
            return 0;
        }
        if (cmd == "oracle-scan") {
            const RunConfig rc = resolve_run_config(cfg);
            OracleScanSpec spec;
            if (cfg.has("oracle.decays")) {
                spec.decays = cfg.get_double_list("oracle.decays");
            }
            spec.resolution = static_cast<int>(cfg.get_int_or("oracle.resolution", 101));
            spec.lo = cfg.get_double_or("oracle.lo", 0.0);
            spec.hi = cfg.get_double_or("oracle.hi", 1.0);
            const auto results = cmd_oracle_scan(rc, spec);
            for (std::size_t i = 0; i < results.size(); ++i) {
                std::cout << "d=" << format_double(spec.decays[i]) << ": "
                          << results[i].crossings.size() << " constraint points\n";
                for (const auto& c : results[i].crossings) {
                    std::cout << "  w1=" << format_double(c.w1) << " ("
                              << oracle::to_string(c.classification) << ")\n";
                }
            }
            return 0;
        }
        if (cmd == "novelty") {
            const RunConfig rc = resolve_run_config(cfg);
            const double factor = cfg.get_double_or("novelty.alert_factor", 5.0);
            const NoveltyResult res = cmd_novelty(rc, factor);
            std::cout << "novelty run finished: " << res.alerts.size() << " alerts -> "
                      << rc.output_dir << "\n";
            return 0;
        }
        if (cmd == "verify") {
            const RunConfig rc = resolve_run_config(cfg);
            const double tol = cfg.get_double_or("verify.tolerance", 0.05);
            const VerifyResult res = cmd_verify(rc, tol);
            for (const VerifyCheck& c : res.checks) {
                std::cout << (c.pass ? "PASS" : "FAIL") << " " << c.name
                          << " measured=" << format_double(c.measured)
                          << " tolerance=" << format_double(c.tolerance) << "\n";
            }
            return res.pass ? 0 : 2;
        }
        return usage();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace hebbsim
