#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "covert/gf.hpp"

namespace covert {

// A received word plus its erasure flags; erased symbol values are ignored.
struct RsCodeword {
    std::vector<std::uint16_t> symbols;
    std::vector<std::uint8_t> erasure_mask;  // nonzero = erased
};

struct RsDecodeOutcome {
    std::vector<std::uint16_t> message;  // rs_k symbols
    int errors_corrected = 0;            // corrections outside the erased set
    int erasures_corrected = 0;
};

// Systematic narrow-sense Reed-Solomon codec over GF(2^m) with code length
// n = 2^m - 1 and generator roots alpha^1 .. alpha^(n-k). Decoding handles
// errors and erasures up to 2*errors + erasures <= n - k; anything beyond
// either fails (nullopt) or, rarely, miscorrects to a different codeword.
class RsCodec {
  public:
    RsCodec(int m, int k);

    int n() const { return n_; }
    int k() const { return k_; }
    int parity() const { return n_ - k_; }
    const GaloisField& field() const { return gf_; }

    // message.size() == k; returns n symbols, message first.
    std::vector<std::uint16_t> encode(std::span<const std::uint16_t> message) const;

    std::optional<RsDecodeOutcome> decode(const RsCodeword& received) const;
    std::optional<RsDecodeOutcome> decode(std::span<const std::uint16_t> symbols,
                                          std::span<const std::uint8_t> erasure_mask) const;

    // Syndromes S_j = r(alpha^j), j = 1..n-k, of a full-length word.
    std::vector<std::uint16_t> syndromes(std::span<const std::uint16_t> word) const;

  private:
    GaloisField gf_;
    int n_;
    int k_;
    std::vector<std::uint16_t> generator_;  // generator polynomial, low degree first
};

}  // namespace covert
