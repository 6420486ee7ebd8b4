#pragma once

#include <stdexcept>
#include <string>

namespace covert {

// Stable error codes so callers (and the CLI) can react to specific
// validation failures without parsing messages.
enum class Errc {
    negative_parameter,
    probability_out_of_range,
    transmissivity_mismatch,   // eta_b + eta_w != 1
    frame_not_dividing,        // Q does not divide n
    zeta_out_of_range,
    rs_length_mismatch,        // rs_n != Q - 1
    rs_dimension_invalid,
    q_too_small,
    key_invalid,
    length_mismatch,
    llr_needs_dark_counts,     // p_D_w == 0: LLR degenerates, use the SPD rule
    degenerate_gaussian,       // sigma0 == 0
    divergence_infinite,
    regime_invalid,
    bad_argument,
};

class ValidationError : public std::runtime_error {
  public:
    ValidationError(Errc code, const std::string& what)
        : std::runtime_error(what), code_(code) {}
    Errc code() const { return code_; }

  private:
    Errc code_;
};

class ConfigError : public std::runtime_error {
  public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace covert
