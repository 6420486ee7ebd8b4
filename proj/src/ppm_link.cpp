#include "covert/ppm_link.hpp"

#include <cmath>
#include <fstream>

#include "covert/errors.hpp"

namespace covert {

SecretKey generate_secret(const PpmSession& session, std::uint64_t seed) {
    Rng rng = Rng::from_seed(seed);
    return generate_secret(session, rng);
}

SecretKey generate_secret(const PpmSession& session, Rng& rng) {
    if (!(session.zeta >= 0.0 && session.zeta <= 1.0)) {
        throw ValidationError(Errc::zeta_out_of_range, "zeta must lie in [0, 1]");
    }
    SecretKey out;
    const std::int64_t frames = session.frames();
    if (session.zeta <= 0.0) return out;
    if (session.zeta >= 1.0) {
        out.selected.resize(static_cast<std::size_t>(frames));
        for (std::int64_t i = 0; i < frames; ++i) out.selected[static_cast<std::size_t>(i)] = i;
    } else {
        // Geometric skips through the Bernoulli(zeta) process.
        const double denom = std::log1p(-session.zeta);
        std::int64_t i = -1;
        for (;;) {
            const double u = rng.uniform();
            const double skip = std::floor(std::log1p(-u) / denom);
            if (skip >= static_cast<double>(frames - i)) break;
            i += 1 + static_cast<std::int64_t>(skip);
            if (i >= frames) break;
            out.selected.push_back(i);
        }
    }
    out.key.resize(out.selected.size());
    for (std::size_t j = 0; j < out.key.size(); ++j) {
        out.key[j] = static_cast<int>(rng.below(static_cast<std::uint64_t>(session.Q)));
    }
    return out;
}

std::int64_t usable_data_frames(std::int64_t selected_frames, int rs_n) {
    return (selected_frames / rs_n) * rs_n;
}

BinarySequence alice_encode(std::span<const std::uint16_t> coded_symbols, const SecretKey& key,
                            const PpmSession& session) {
    key.validate(session);
    const std::int64_t selected = static_cast<std::int64_t>(key.selected.size());
    const std::int64_t usable = usable_data_frames(selected, session.rs_n);
    if (static_cast<std::int64_t>(coded_symbols.size()) != usable) {
        throw ValidationError(Errc::length_mismatch,
                              "alice_encode: expected " + std::to_string(usable) +
                                  " coded symbols for " + std::to_string(selected) +
                                  " selected frames");
    }
    BinarySequence seq(static_cast<std::size_t>(session.n), 0);
    for (std::int64_t j = 0; j < selected; ++j) {
        const int symbol =
            j < usable ? static_cast<int>(coded_symbols[static_cast<std::size_t>(j)]) : 0;
        if (symbol < 0 || symbol >= session.Q) {
            throw ValidationError(Errc::bad_argument, "alice_encode: symbol outside {0..Q-1}");
        }
        const int pos = (symbol + key.key[static_cast<std::size_t>(j)]) % session.Q;
        const std::int64_t frame = key.selected[static_cast<std::size_t>(j)];
        seq[static_cast<std::size_t>(frame * session.Q + pos)] = 1;
    }
    return seq;
}

BinarySequence alice_encode_payload(std::span<const std::uint16_t> data, const SecretKey& key,
                                    const PpmSession& session, const RsCodec& codec) {
    const std::int64_t usable =
        usable_data_frames(static_cast<std::int64_t>(key.selected.size()), session.rs_n);
    const std::int64_t blocks = usable / session.rs_n;
    if (static_cast<std::int64_t>(data.size()) != blocks * session.rs_k) {
        throw ValidationError(Errc::length_mismatch,
                              "alice_encode_payload: expected rs_k * " + std::to_string(blocks) +
                                  " data symbols");
    }
    std::vector<std::uint16_t> coded;
    coded.reserve(static_cast<std::size_t>(usable));
    for (std::int64_t b = 0; b < blocks; ++b) {
        const auto block = data.subspan(static_cast<std::size_t>(b * session.rs_k),
                                        static_cast<std::size_t>(session.rs_k));
        const std::vector<std::uint16_t> cw = codec.encode(block);
        coded.insert(coded.end(), cw.begin(), cw.end());
    }
    return alice_encode(coded, key, session);
}

BinarySequence interleave_with_silence(std::span<const std::uint8_t> seq) {
    BinarySequence out(seq.size() * 2, 0);
    std::copy(seq.begin(), seq.end(), out.begin());
    return out;
}

std::vector<int> demodulate_frames(std::span<const BobFrameObservation> observations,
                                   const SecretKey& key, const PpmSession& session, Rng& rng) {
    if (observations.size() != key.selected.size()) {
        throw ValidationError(Errc::length_mismatch,
                              "demodulate_frames: one observation per selected frame required");
    }
    std::vector<int> symbols(observations.size(), -1);
    for (std::size_t j = 0; j < observations.size(); ++j) {
        const auto& clicks = observations[j].clicks;
        if (clicks.empty()) continue;  // erasure, no key subtraction
        int pos;
        if (clicks.size() == 1) {
            pos = clicks[0];
        } else {
            pos = clicks[rng.below(clicks.size())];
        }
        if (pos < 0 || pos >= session.Q) {
            throw ValidationError(Errc::bad_argument, "demodulate_frames: click outside frame");
        }
        symbols[j] = (pos - key.key[j] + session.Q) % session.Q;
    }
    return symbols;
}

BobDecodeResult bob_decode(std::span<const BobFrameObservation> observations,
                           const SecretKey& key, const PpmSession& session, const RsCodec& codec,
                           std::uint64_t seed) {
    Rng rng = Rng::from_seed(seed);
    return bob_decode(observations, key, session, codec, rng);
}

BobDecodeResult bob_decode(std::span<const BobFrameObservation> observations,
                           const SecretKey& key, const PpmSession& session, const RsCodec& codec,
                           Rng& rng) {
    BobDecodeResult result;
    const std::vector<int> symbols = demodulate_frames(observations, key, session, rng);
    for (const auto& obs : observations) {
        if (obs.clicks.size() >= 2) ++result.multi_click_frames;
    }
    const std::int64_t usable =
        usable_data_frames(static_cast<std::int64_t>(key.selected.size()), session.rs_n);
    const std::int64_t blocks = usable / session.rs_n;
    std::vector<std::uint16_t> word(static_cast<std::size_t>(session.rs_n));
    std::vector<std::uint8_t> erased(static_cast<std::size_t>(session.rs_n));
    for (std::int64_t b = 0; b < blocks; ++b) {
        for (int i = 0; i < session.rs_n; ++i) {
            const int s = symbols[static_cast<std::size_t>(b * session.rs_n + i)];
            if (s < 0) {
                word[static_cast<std::size_t>(i)] = 0;
                erased[static_cast<std::size_t>(i)] = 1;
                ++result.erasures;
            } else {
                word[static_cast<std::size_t>(i)] = static_cast<std::uint16_t>(s);
                erased[static_cast<std::size_t>(i)] = 0;
            }
        }
        auto decoded = codec.decode(word, erased);
        if (decoded.has_value()) {
            result.errors_corrected += decoded->errors_corrected;
            result.blocks.push_back(std::move(decoded->message));
        } else {
            ++result.blocks_failed;
            result.blocks.push_back(std::nullopt);
        }
    }
    return result;
}

std::int64_t BobDecodeResult::decoded_symbols(int rs_k) const {
    std::int64_t total = 0;
    for (const auto& b : blocks) {
        if (b.has_value()) total += rs_k;
    }
    return total;
}

PpmDmc ppm_dmc_transitions(int Q, double p_D_b, double nbar_det_b) {
    if (Q < 2 || !(p_D_b >= 0.0 && p_D_b < 1.0) || !(nbar_det_b >= 0.0)) {
        throw ValidationError(Errc::bad_argument, "ppm_dmc_transitions: parameter out of range");
    }
    PpmDmc t;
    const double p_r = -std::expm1(-nbar_det_b);
    // Click probability on the pulse slot: pulse detected or dark click.
    const double p_pulse = 1.0 - (1.0 - p_r) * (1.0 - p_D_b);
    // E[1/(1+D)] with D ~ Binomial(Q-1, p_D): closed form (1-(1-p)^Q)/(Q p).
    const double pick_correct =
        p_D_b > 0.0 ? -std::expm1(static_cast<double>(Q) * std::log1p(-p_D_b)) /
                          (static_cast<double>(Q) * p_D_b)
                    : 1.0;
    t.p_correct = p_pulse * pick_correct;
    t.p_erasure = std::exp(-nbar_det_b) * std::exp(static_cast<double>(Q) * std::log1p(-p_D_b));
    t.p_wrong = Q > 1 ? (1.0 - t.p_correct - t.p_erasure) / static_cast<double>(Q - 1) : 0.0;
    if (t.p_wrong < 0.0) t.p_wrong = 0.0;
    return t;
}

double dmc_capacity(int Q, double p_D_b, double nbar_det_b) {
    const PpmDmc t = ppm_dmc_transitions(Q, p_D_b, nbar_det_b);
    const auto xlog2 = [](double p) { return p > 0.0 ? p * std::log2(p) : 0.0; };
    // I(X;Y) under uniform input; the erasure terms of H(Y) and H(Y|X) cancel.
    const double p_click = 1.0 - t.p_erasure;
    double mi = xlog2(t.p_correct) + static_cast<double>(Q - 1) * xlog2(t.p_wrong);
    if (p_click > 0.0) mi -= p_click * std::log2(p_click / static_cast<double>(Q));
    return mi;
}

double max_throughput(double capacity_bits_per_frame, double zeta, double n, int Q) {
    if (capacity_bits_per_frame < 0.0 || zeta < 0.0 || n < 0.0 || Q < 1) {
        throw ValidationError(Errc::bad_argument, "max_throughput: negative argument");
    }
    return capacity_bits_per_frame * zeta * n / static_cast<double>(Q);
}

std::vector<std::uint8_t> pack_bit_sequence(std::span<const std::uint8_t> seq) {
    std::vector<std::uint8_t> bytes((seq.size() + 7) / 8, 0);
    for (std::size_t i = 0; i < seq.size(); ++i) {
        if (seq[i]) bytes[i / 8] |= static_cast<std::uint8_t>(1u << (i % 8));
    }
    return bytes;
}

void write_bit_file(const std::string& path, std::span<const std::uint8_t> seq) {
    const std::vector<std::uint8_t> bytes = pack_bit_sequence(seq);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
}

}  // namespace covert
