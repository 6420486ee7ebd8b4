#include "covert/simkit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <thread>

#include "covert/errors.hpp"
#include "covert/rs.hpp"

namespace covert {

double regime_zeta(Regime regime, std::int64_t n, int Q, double explicit_zeta) {
    const double ratio = static_cast<double>(Q) / static_cast<double>(n);
    switch (regime) {
        case Regime::careful:
            return 0.25 * std::sqrt(ratio);
        case Regime::careless:
            return 0.03 * std::pow(ratio, 0.25);
        case Regime::fixed_0003:
            return 0.003;
        case Regime::fixed_0008:
            return 0.008;
        case Regime::explicit_zeta:
            return explicit_zeta;
    }
    throw ValidationError(Errc::regime_invalid, "unknown regime");
}

std::string regime_label(Regime regime) {
    switch (regime) {
        case Regime::careful: return "careful";
        case Regime::careless: return "careless";
        case Regime::fixed_0003: return "fixed_0.003";
        case Regime::fixed_0008: return "fixed_0.008";
        case Regime::explicit_zeta: return "explicit";
    }
    return "?";
}

Regime parse_regime(const std::string& name) {
    if (name == "careful") return Regime::careful;
    if (name == "careless") return Regime::careless;
    if (name == "fixed-0.003" || name == "fixed_0.003") return Regime::fixed_0003;
    if (name == "fixed-0.008" || name == "fixed_0.008") return Regime::fixed_0008;
    if (name == "explicit") return Regime::explicit_zeta;
    throw ValidationError(Errc::regime_invalid,
                          "unknown regime '" + name +
                              "' (careful, careless, fixed-0.003, fixed-0.008, explicit)");
}

FrameClickCounts sample_h0_histogram(const PpmSession& session, const ChannelParams& params,
                                     Rng& rng) {
    const std::vector<double> classes = binomial_pmf(session.Q, params.p_D_w);
    FrameClickCounts counts = FrameClickCounts::zero(session.Q);
    multinomial(rng, session.frames(), classes, counts.histogram);
    return counts;
}

FrameClickCounts sample_h0_histogram(const PpmSession& session, const ChannelParams& params,
                                     std::uint64_t seed) {
    Rng rng = Rng::from_seed(seed);
    return sample_h0_histogram(session, params, rng);
}

namespace {

// Click positions of one selected frame at Bob: the pulse slot fires with
// probability 1-(1-p_r)(1-p_D), every other slot is dark-only.
BobFrameObservation sample_bob_frame(Rng& rng, int Q, int pulse_pos, double p_pulse,
                                     double p_dark) {
    BobFrameObservation obs;
    const bool pulse_click = rng.bernoulli(p_pulse);
    std::int64_t darks = rng.binomial(Q - 1, p_dark);
    if (pulse_click) obs.clicks.push_back(pulse_pos);
    while (darks > 0) {
        const int r = static_cast<int>(rng.below(static_cast<std::uint64_t>(Q - 1)));
        const int mode = r < pulse_pos ? r : r + 1;
        bool dup = false;
        for (int c : obs.clicks) dup = dup || c == mode;
        if (dup) continue;
        obs.clicks.push_back(mode);
        --darks;
    }
    std::sort(obs.clicks.begin(), obs.clicks.end());
    return obs;
}

}  // namespace

// Adversary's counts under transmission, drawn as two multinomials (O(Q)
// regardless of how many frames are selected). A selected frame's count is
// a pulse-slot Bernoulli(1-(1-p_r)(1-p_D)) plus Binomial(Q-1, p_D) darks.
FrameClickCounts sample_h1_willie_counts(const PpmSession& session, const ChannelParams& params,
                                         std::int64_t selected, Rng& willie_rng,
                                         PulseDetectionModel pr_model) {
    const double p_r_w = derive_click_probs(params, session.zeta, pr_model).p_r_w;
    const double p_pulse_w = 1.0 - (1.0 - p_r_w) * (1.0 - params.p_D_w);
    const std::vector<double> h0_classes = binomial_pmf(session.Q, params.p_D_w);
    FrameClickCounts counts = FrameClickCounts::zero(session.Q);
    multinomial(willie_rng, session.frames() - selected, h0_classes, counts.histogram);

    const std::vector<double> darks = binomial_pmf(session.Q - 1, params.p_D_w);
    std::vector<double> sel_classes(static_cast<std::size_t>(session.Q) + 1, 0.0);
    for (int k = 0; k < session.Q; ++k) {
        sel_classes[static_cast<std::size_t>(k)] += (1.0 - p_pulse_w) * darks[static_cast<std::size_t>(k)];
        sel_classes[static_cast<std::size_t>(k) + 1] += p_pulse_w * darks[static_cast<std::size_t>(k)];
    }
    std::vector<std::int64_t> sel_counts(static_cast<std::size_t>(session.Q) + 1, 0);
    multinomial(willie_rng, selected, sel_classes, sel_counts);
    for (int k = 0; k <= session.Q; ++k) {
        counts.histogram[static_cast<std::size_t>(k)] += sel_counts[static_cast<std::size_t>(k)];
    }
    return counts;
}

H1Trial sample_h1_trial(const PpmSession& session, const ChannelParams& params,
                        const SecretKey& key, std::span<const std::uint16_t> coded_payload,
                        Rng& willie_rng, Rng& bob_rng, PulseDetectionModel pr_model) {
    const std::int64_t selected = static_cast<std::int64_t>(key.selected.size());
    const std::int64_t usable = usable_data_frames(selected, session.rs_n);
    if (static_cast<std::int64_t>(coded_payload.size()) != usable) {
        throw ValidationError(Errc::length_mismatch,
                              "sample_h1_trial: coded payload must cover the usable frames");
    }
    H1Trial trial;
    trial.willie = sample_h1_willie_counts(session, params, selected, willie_rng, pr_model);

    const double p_r_b = -std::expm1(-params.nbar_det_b);
    const double p_pulse_b = 1.0 - (1.0 - p_r_b) * (1.0 - params.p_D_b);
    trial.bob_frames.reserve(static_cast<std::size_t>(selected));
    for (std::int64_t j = 0; j < selected; ++j) {
        const int symbol =
            j < usable ? static_cast<int>(coded_payload[static_cast<std::size_t>(j)]) : 0;
        const int pos = (symbol + key.key[static_cast<std::size_t>(j)]) % session.Q;
        trial.bob_frames.push_back(
            sample_bob_frame(bob_rng, session.Q, pos, p_pulse_b, params.p_D_b));
    }
    return trial;
}

H1Trial sample_h1_trial(const PpmSession& session, const ChannelParams& params,
                        const SecretKey& key, std::span<const std::uint16_t> coded_payload,
                        std::uint64_t seed, PulseDetectionModel pr_model) {
    Rng willie_rng = Rng::stream(seed, 0, 0);
    Rng bob_rng = Rng::stream(seed, 0, 1);
    return sample_h1_trial(session, params, key, coded_payload, willie_rng, bob_rng, pr_model);
}

namespace {

// Substream indices of the per-trial seed space.
enum Substream : std::uint64_t {
    kH0 = 0,
    kSecret = 1,
    kPayload = 2,
    kWillieH1 = 3,
    kBobClicks = 4,
    kBobResolve = 5,
};

struct TrialContext {
    const ExperimentConfig* config;
    const RsCodec* codec;  // null when Bob's pipeline is off
    double p_r_w;
    bool llr_mode;  // false: SPD regime statistic = total click count
};

TrialOutcome run_one_trial(const TrialContext& ctx, std::int64_t t) {
    const ExperimentConfig& cfg = *ctx.config;
    const PpmSession& session = cfg.session;
    TrialOutcome out;

    const auto statistic = [&](const FrameClickCounts& counts) {
        if (ctx.llr_mode) {
            return llr_statistic(counts, session.zeta, ctx.p_r_w, cfg.params.p_D_w);
        }
        return static_cast<double>(counts.total_clicks());
    };

    Rng h0_rng = Rng::stream(cfg.master_seed, static_cast<std::uint64_t>(t), kH0);
    out.llr_h0 = statistic(sample_h0_histogram(session, cfg.params, h0_rng));

    Rng secret_rng = Rng::stream(cfg.master_seed, static_cast<std::uint64_t>(t), kSecret);
    const SecretKey key = generate_secret(session, secret_rng);
    const std::int64_t usable =
        usable_data_frames(static_cast<std::int64_t>(key.selected.size()), session.rs_n);
    const std::int64_t blocks = usable / session.rs_n;

    Rng willie_rng = Rng::stream(cfg.master_seed, static_cast<std::uint64_t>(t), kWillieH1);
    if (ctx.codec == nullptr) {
        // Detection-only run: the pulse positions are irrelevant to the
        // adversary's counts, so Bob's side is not materialized at all.
        out.llr_h1 = statistic(sample_h1_willie_counts(
            session, cfg.params, static_cast<std::int64_t>(key.selected.size()), willie_rng,
            cfg.pr_model));
        return out;
    }

    Rng payload_rng = Rng::stream(cfg.master_seed, static_cast<std::uint64_t>(t), kPayload);
    std::vector<std::uint16_t> data(static_cast<std::size_t>(blocks * session.rs_k));
    for (auto& s : data) {
        s = static_cast<std::uint16_t>(payload_rng.below(static_cast<std::uint64_t>(session.Q)));
    }
    std::vector<std::uint16_t> coded;
    coded.reserve(static_cast<std::size_t>(usable));
    for (std::int64_t b = 0; b < blocks; ++b) {
        const auto cw = ctx.codec->encode(std::span<const std::uint16_t>(data).subspan(
            static_cast<std::size_t>(b * session.rs_k), static_cast<std::size_t>(session.rs_k)));
        coded.insert(coded.end(), cw.begin(), cw.end());
    }

    Rng bob_rng = Rng::stream(cfg.master_seed, static_cast<std::uint64_t>(t), kBobClicks);
    const H1Trial h1 =
        sample_h1_trial(session, cfg.params, key, coded, willie_rng, bob_rng, cfg.pr_model);
    out.llr_h1 = statistic(h1.willie);

    {
        Rng resolve_rng = Rng::stream(cfg.master_seed, static_cast<std::uint64_t>(t), kBobResolve);
        const BobDecodeResult decoded =
            bob_decode(h1.bob_frames, key, session, *ctx.codec, resolve_rng);
        out.bob_erasures = decoded.erasures;
        out.rs_block_failures = decoded.blocks_failed;
        out.blocks_sent = blocks;
        out.data_symbols_sent = blocks * session.rs_k;
        const double bits_per_symbol = std::log2(static_cast<double>(session.Q));
        out.bob_decoded_bits = static_cast<std::int64_t>(
            std::llround(static_cast<double>(decoded.decoded_symbols(session.rs_k)) *
                         bits_per_symbol));
        for (std::int64_t b = 0; b < blocks; ++b) {
            const auto& block = decoded.blocks[static_cast<std::size_t>(b)];
            if (!block.has_value()) {
                out.bob_symbol_errors += session.rs_k;
                continue;
            }
            for (int i = 0; i < session.rs_k; ++i) {
                if ((*block)[static_cast<std::size_t>(i)] !=
                    data[static_cast<std::size_t>(b * session.rs_k + i)]) {
                    ++out.bob_symbol_errors;
                }
            }
        }
    }
    return out;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
    ExperimentConfig cfg = config;
    cfg.session.zeta = regime_zeta(cfg.regime, cfg.session.n, cfg.session.Q, cfg.session.zeta);
    validate_session(cfg.session, cfg.params);
    if (cfg.trials < 1) throw ValidationError(Errc::bad_argument, "run_experiment: trials >= 1");

    TrialContext ctx;
    ctx.config = &cfg;
    ctx.p_r_w = derive_click_probs(cfg.params, cfg.session.zeta, cfg.pr_model).p_r_w;
    ctx.llr_mode = cfg.params.p_D_w > 0.0;

    // The RS pipeline needs Q = 2^m so PPM symbols are field elements.
    RsCodec* codec = nullptr;
    std::unique_ptr<RsCodec> codec_holder;
    if (cfg.run_bob) {
        int m = 0;
        while ((1 << m) < cfg.session.Q) ++m;
        if ((1 << m) != cfg.session.Q) {
            throw ValidationError(Errc::rs_length_mismatch,
                                  "run_experiment: Bob's RS pipeline requires Q = 2^m");
        }
        codec_holder = std::make_unique<RsCodec>(m, cfg.session.rs_k);
        codec = codec_holder.get();
    }
    ctx.codec = codec;

    ExperimentResult result;
    result.zeta = cfg.session.zeta;
    result.trials = cfg.trials;
    result.trial_log.resize(static_cast<std::size_t>(cfg.trials));

    const int workers = std::max(1, cfg.workers);
    if (workers == 1) {
        for (std::int64_t t = 0; t < cfg.trials; ++t) {
            result.trial_log[static_cast<std::size_t>(t)] = run_one_trial(ctx, t);
        }
    } else {
        std::vector<std::thread> pool;
        std::int64_t chunk = (cfg.trials + workers - 1) / workers;
        for (int w = 0; w < workers; ++w) {
            const std::int64_t lo = w * chunk;
            const std::int64_t hi = std::min(cfg.trials, lo + chunk);
            if (lo >= hi) break;
            pool.emplace_back([&, lo, hi]() {
                for (std::int64_t t = lo; t < hi; ++t) {
                    result.trial_log[static_cast<std::size_t>(t)] = run_one_trial(ctx, t);
                }
            });
        }
        for (auto& th : pool) th.join();
    }

    // Trial-ordered reduction.
    result.detection.llr_h0.resize(result.trial_log.size());
    result.detection.llr_h1.resize(result.trial_log.size());
    for (std::size_t i = 0; i < result.trial_log.size(); ++i) {
        result.detection.llr_h0[i] = result.trial_log[i].llr_h0;
        result.detection.llr_h1[i] = result.trial_log[i].llr_h1;
    }
    const PeEstimate pe = empirical_pe(result.detection.llr_h0, result.detection.llr_h1);
    result.detection.pe_hat = pe.pe_hat;
    result.detection.threshold = pe.threshold;
    result.detection.dkw = dkw_halfwidth(cfg.trials, 0.05);
    result.pe_gauss = ctx.llr_mode ? gaussian_pe(cfg.session, cfg.params).pe_tilde
                                   : std::numeric_limits<double>::quiet_NaN();

    if (cfg.run_bob) {
        BobThroughputSummary& bob = result.bob;
        double bits_total = 0.0;
        for (const TrialOutcome& t : result.trial_log) {
            bits_total += static_cast<double>(t.bob_decoded_bits);
            bob.blocks_sent += t.blocks_sent;
            bob.blocks_failed += t.rs_block_failures;
            bob.data_symbols_sent += t.data_symbols_sent;
            bob.data_symbols_lost += t.bob_symbol_errors;
            bob.erasures += t.bob_erasures;
        }
        bob.bits_mean = bits_total / static_cast<double>(cfg.trials);
        bob.symbol_error_rate =
            bob.data_symbols_sent > 0
                ? static_cast<double>(bob.data_symbols_lost) /
                      static_cast<double>(bob.data_symbols_sent)
                : 0.0;
        bob.capacity_bits_per_frame =
            dmc_capacity(cfg.session.Q, cfg.params.p_D_b, cfg.params.nbar_det_b);
        bob.max_throughput_bits =
            max_throughput(bob.capacity_bits_per_frame, cfg.session.zeta,
                           static_cast<double>(cfg.session.n), cfg.session.Q);
    }
    return result;
}

}  // namespace covert
