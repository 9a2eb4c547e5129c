#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nusrec/encoders.hpp"
#include "nusrec/multichannel.hpp"
#include "nusrec/recon.hpp"
#include "nusrec/signal.hpp"
#include "nusrec/toml_lite.hpp"

namespace nusrec {

struct InstantSpec {
    enum class Kind { UniformGap, Cluster, Explicit };
    Kind kind = Kind::UniformGap;
    UniformGapSpec uniform;
    ClusterSpec cluster;
    std::vector<double> fixed;
};

// How samples are physically taken. Fire and Crossing encoders choose their
// own instants, so scenarios using them need no instant generator.
struct EncoderSpec {
    enum class Kind { Point, Integral, Leaky, Fire, Crossing };
    Kind kind = Kind::Point;
    double leak = 1.0;      // Leaky
    double bias = 0.0;      // Fire
    double threshold = 0.0; // Fire
    double spacing = 0.0;   // Crossing
    double offset = 0.0;    // Crossing
};

// Algorithms: frame, kaczmarz_cyclic, kaczmarz_random, grochenig,
// grochenig_relaxed, pocs, pocs_discrete. An empty relaxation list picks the
// algorithm's default.
struct AlgorithmSpec {
    std::string name;
    std::vector<double> relaxation;
};

struct ScenarioConfig {
    std::string id;
    double period = 63.0;
    std::size_t trials = 20;
    double rms = 1.0;
    std::uint64_t seed = 1;
    std::size_t iters = 40;
    InstantSpec instants;
    EncoderSpec encoder;
    std::optional<double> snr_db;
    std::vector<AlgorithmSpec> algorithms;
};

// Maps a parsed config onto ScenarioConfig, rejecting unknown keys with
// line-numbered errors.
ScenarioConfig scenario_from_toml(const toml::Document& doc);

// The built-in scenarios fig2a, fig2b, fig2c; `full` lifts the desk scale
// (period 63, 20 trials) to period 315 with 100 trials.
ScenarioConfig builtin_scenario(const std::string& name, bool full);

// One trial's acquisition: the generated input, the kernel family the
// encoder induces, and the (possibly noise-corrupted) samples.
struct TrialData {
    Signal input;
    KernelFamily family;
    SampleSequence samples;
};
TrialData make_trial(const ScenarioConfig& cfg, std::size_t trial_index);

// csv: k, t_prev, t_k, s_k, w_k
void write_samples_csv(const TrialData& trial, std::ostream& os);

// Runs one algorithm on one trial; history errors are against the input.
ReconResult run_algorithm(const AlgorithmSpec& alg, const ScenarioConfig& cfg,
                          const TrialData& trial, std::uint64_t seed);

struct ScenarioTable {
    std::string scenario;
    std::size_t trials = 0;
    struct Row {
        std::string algorithm;
        std::size_t iter = 0;
        double mse_l2 = 0.0;      // mean over trials of squared relative error
        double mse_sobolev = 0.0; // same in the Sobolev seminorm
    };
    std::vector<Row> rows; // algorithm-major, iterations ascending
    // csv: scenario, algorithm, iter, mse_l2, mse_sobolev, trials
    void write_csv(std::ostream& os) const;
};

// Runs every algorithm over `trials` independently seeded inputs in a work
// pool and averages the per-iteration squared errors. Deterministic in
// cfg.seed regardless of thread scheduling.
ScenarioTable run_scenario(const ScenarioConfig& cfg);

// Sub-Nyquist level-crossing study: the level spacing is bisected until the
// crossing count lands in [ratio_lo, ratio_hi] as a fraction of the space
// dimension, then the relaxed projection iteration runs from the zero start
// and from the staircase warm start against the closed-form limit.
struct Fig3Config {
    double period = 63.0;
    double rms = 1.0;
    std::uint64_t seed = 28; // canonical draw: both starts shrink >10x, warm start wins
    double ratio_lo = 0.755;
    double ratio_hi = 0.785;
    std::size_t iters = 400;
    std::vector<std::size_t> snapshot_iters{10, 60, 400};
};

struct Fig3Run {
    Signal limit;              // closed-form limit for this run's start
    IterationHistory vs_limit; // errors measured against that limit
    double final_err_vs_input = 0.0;
    std::vector<Signal> snapshots;
};

struct Fig3Result {
    Fig3Config cfg;
    Signal input;
    CrossingSet crossings;
    double spacing = 0.0;  // tuned level spacing
    double ratio = 0.0;    // crossings / space dimension
    double gamma_sq = 0.0; // lower spectral bound of the crossing operator
    double relaxation = 0.0;
    Signal limit; // minimum-norm reconstruction (the zero-start limit)
    Fig3Run from_zero;
    Fig3Run from_staircase;
};

Fig3Result run_fig3(const Fig3Config& cfg);

// csv: waveform columns on a uniform grid (input, limit, snapshots) plus the
// two iteration histories appended as separate sections.
void write_fig3_csv(const Fig3Result& r, std::ostream& os);

// Self-contained SVG, log-scale MSE against iteration, one polyline per
// algorithm. Byte-identical output for identical tables.
void emit_plot(const ScenarioTable& table, const std::string& path);

// Waveform overlay: input, limit and the snapshot iterates of both starts.
void emit_fig3_plot(const Fig3Result& r, const std::string& path);

// Multi-source acquisition configs: a [multichannel] table carrying the
// mixing matrix plus one [[channel]] table per row describing that channel's
// encoder (integral sampling with generated or explicit instants, or an
// integrate-and-fire device).
struct MultiChannelConfig {
    std::string id;
    double period = 63.0;
    double rms = 1.0;
    std::uint64_t seed = 1;
    std::size_t iters = 40;
    Eigen::MatrixXd a;
    struct Channel {
        EncoderSpec encoder;
        InstantSpec instants;
    };
    std::vector<Channel> channels;
};

// Empty optional when the document has no [multichannel] table.
std::optional<MultiChannelConfig> multichannel_from_toml(const toml::Document& doc);

struct MultiChannelTrial {
    std::vector<Signal> sources;
    MultiChannelSamples samples;
};
MultiChannelTrial make_multichannel_trial(const MultiChannelConfig& cfg);

// csv: channel, j, t_prev, t_j, s_ij
void write_multichannel_csv(const MultiChannelSamples& samples, std::ostream& os);

} // namespace nusrec
