#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "covert/adversary.hpp"
#include "covert/model.hpp"
#include "covert/ppm_link.hpp"
#include "covert/rng.hpp"

namespace covert {

enum class Regime {
    careful,       // zeta = 0.25 sqrt(Q/n)
    careless,      // zeta = 0.03 (Q/n)^(1/4)
    fixed_0003,    // zeta = 0.003
    fixed_0008,    // zeta = 0.008
    explicit_zeta  // zeta taken from the session
};

double regime_zeta(Regime regime, std::int64_t n, int Q, double explicit_zeta);
std::string regime_label(Regime regime);
Regime parse_regime(const std::string& name);

struct TrialOutcome {
    double llr_h0 = 0.0;
    double llr_h1 = 0.0;
    std::int64_t bob_decoded_bits = 0;
    std::int64_t bob_symbol_errors = 0;  // data symbols lost vs ground truth
    std::int64_t bob_erasures = 0;
    std::int64_t rs_block_failures = 0;
    std::int64_t blocks_sent = 0;
    std::int64_t data_symbols_sent = 0;
};

struct ExperimentConfig {
    PpmSession session;
    ChannelParams params;
    std::int64_t trials = 1000;
    std::uint64_t master_seed = 1;
    Regime regime = Regime::explicit_zeta;
    int workers = 1;
    bool run_bob = true;
    PulseDetectionModel pr_model = PulseDetectionModel::detected_mean;
};

// H0 record: n/Q i.i.d. Binomial(Q, p_D_w) frame counts, drawn directly as a
// multinomial over the Q+1 count classes. O(Q) work per call.
FrameClickCounts sample_h0_histogram(const PpmSession& session, const ChannelParams& params,
                                     Rng& rng);
FrameClickCounts sample_h0_histogram(const PpmSession& session, const ChannelParams& params,
                                     std::uint64_t seed);

struct H1Trial {
    FrameClickCounts willie;                      // counts over all n/Q frames
    std::vector<BobFrameObservation> bob_frames;  // one per selected frame
};

// Adversary's side of an H1 trial alone. Pulse positions never enter the
// count distribution, so only the number of selected frames matters.
FrameClickCounts sample_h1_willie_counts(const PpmSession& session, const ChannelParams& params,
                                         std::int64_t selected, Rng& willie_rng,
                                         PulseDetectionModel pr_model);

// One transmit-side trial: every selected frame carries one pulse (data or
// filler); the adversary sees only counts, Bob sees click positions for the
// frames in S. Willie/Bob detections are independent streams.
H1Trial sample_h1_trial(const PpmSession& session, const ChannelParams& params,
                        const SecretKey& key, std::span<const std::uint16_t> coded_payload,
                        Rng& willie_rng, Rng& bob_rng,
                        PulseDetectionModel pr_model = PulseDetectionModel::detected_mean);
H1Trial sample_h1_trial(const PpmSession& session, const ChannelParams& params,
                        const SecretKey& key, std::span<const std::uint16_t> coded_payload,
                        std::uint64_t seed,
                        PulseDetectionModel pr_model = PulseDetectionModel::detected_mean);

struct BobThroughputSummary {
    double bits_mean = 0.0;           // decoded data bits per trial
    double symbol_error_rate = 0.0;   // lost data symbols / transmitted data symbols
    double capacity_bits_per_frame = 0.0;
    double max_throughput_bits = 0.0;
    std::int64_t blocks_sent = 0;
    std::int64_t blocks_failed = 0;
    std::int64_t data_symbols_sent = 0;
    std::int64_t data_symbols_lost = 0;
    std::int64_t erasures = 0;
};

struct ExperimentResult {
    DetectionResult detection;
    double pe_gauss = 0.0;  // NaN when p_D_w = 0 (SPD regime)
    BobThroughputSummary bob;
    double zeta = 0.0;
    std::int64_t trials = 0;
    std::vector<TrialOutcome> trial_log;
};

// m paired H0/H1 trials with per-trial counter-derived seeds; reduction is
// trial-ordered, so results are identical for any worker count.
ExperimentResult run_experiment(const ExperimentConfig& config);

}  // namespace covert
