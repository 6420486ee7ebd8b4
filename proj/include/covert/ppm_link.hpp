#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "covert/model.hpp"
#include "covert/rng.hpp"
#include "covert/rs.hpp"

namespace covert {

// A length-n (or 2n once interleaved) on/off mode sequence; 1 = pulse.
using BinarySequence = std::vector<std::uint8_t>;

// Bob's view of one selected frame: the set of modes that clicked.
struct BobFrameObservation {
    std::vector<int> clicks;  // strictly increasing positions in {0..Q-1}
};

// Frames are selected independently with probability zeta (sampled with
// geometric skips, so cost is O(|S|)); key entries are i.i.d. uniform on
// {0..Q-1}. Deterministic given the seed.
SecretKey generate_secret(const PpmSession& session, std::uint64_t seed);
SecretKey generate_secret(const PpmSession& session, Rng& rng);

// Number of selected frames that carry RS data: whole rs_n-blocks only.
// The trailing |S| mod rs_n frames carry key-scrambled filler pulses so the
// on-air statistics of every selected frame are identical.
std::int64_t usable_data_frames(std::int64_t selected_frames, int rs_n);

// Places one pulse per selected frame at (symbol + key) mod Q; data frames
// take coded_symbols in order, filler frames take symbol 0. Unselected
// frames stay dark. coded_symbols.size() must equal usable_data_frames.
BinarySequence alice_encode(std::span<const std::uint16_t> coded_symbols, const SecretKey& key,
                            const PpmSession& session);

// Convenience path: RS-encodes raw data (rs_k symbols per usable block)
// and then modulates. data.size() must be rs_k * (usable blocks).
BinarySequence alice_encode_payload(std::span<const std::uint16_t> data, const SecretKey& key,
                                    const PpmSession& session, const RsCodec& codec);

// Signal block followed by an equal-length all-zero block: the quiet look
// used to estimate the false-alarm side under identical conditions.
BinarySequence interleave_with_silence(std::span<const std::uint8_t> seq);

// Per-frame symbol extraction: empty click set -> erasure (no key
// subtraction), multiple clicks -> seeded uniform choice, then subtract the
// key modulo Q. Entry is -1 for an erasure.
std::vector<int> demodulate_frames(std::span<const BobFrameObservation> observations,
                                   const SecretKey& key, const PpmSession& session, Rng& rng);

struct BobDecodeResult {
    // One entry per usable RS block; nullopt = decode failure.
    std::vector<std::optional<std::vector<std::uint16_t>>> blocks;
    std::int64_t erasures = 0;            // erased frames among data frames
    std::int64_t multi_click_frames = 0;  // over all selected frames
    std::int64_t errors_corrected = 0;    // RS-corrected non-erased symbols
    std::int64_t blocks_failed = 0;

    std::int64_t decoded_symbols(int rs_k) const;
};

BobDecodeResult bob_decode(std::span<const BobFrameObservation> observations,
                           const SecretKey& key, const PpmSession& session, const RsCodec& codec,
                           std::uint64_t seed);
BobDecodeResult bob_decode(std::span<const BobFrameObservation> observations,
                           const SecretKey& key, const PpmSession& session, const RsCodec& codec,
                           Rng& rng);

// Transition probabilities of the discrete memoryless channel induced by
// Q-ary PPM with an SPD receiver and uniform multi-click resolution.
struct PpmDmc {
    double p_correct = 0.0;  // P(Y = x | X = x)
    double p_erasure = 0.0;  // P(Y = erasure | X = x)
    double p_wrong = 0.0;    // P(Y = y | X = x) for each y not in {x, erasure}
};
PpmDmc ppm_dmc_transitions(int Q, double p_D_b, double nbar_det_b);

// Shannon capacity of that channel under uniform input, in bits per frame.
double dmc_capacity(int Q, double p_D_b, double nbar_det_b);

// C_s * zeta * n / Q.
double max_throughput(double capacity_bits_per_frame, double zeta, double n, int Q);

// Byte packing for sequence export: mode 8j+b sits at bit b (LSB first) of
// byte j.
std::vector<std::uint8_t> pack_bit_sequence(std::span<const std::uint8_t> seq);
void write_bit_file(const std::string& path, std::span<const std::uint8_t> seq);

}  // namespace covert
