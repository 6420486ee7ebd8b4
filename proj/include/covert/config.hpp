#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "covert/model.hpp"

namespace covert {

// Flat key=value run configuration. Schema (all keys optional, '#' starts a
// comment): eta_b, nbar, nbar_T, lambda_w, p_D_b, p_D_w, nbar_det_b,
// nbar_det_w, n, Q, zeta, rs_k, seed, trials. Unknown or duplicate keys are
// errors; eta_w and rs_n are derived (1 - eta_b and Q - 1).
struct RunConfig {
    ChannelParams params;
    PpmSession session;
    std::uint64_t seed = 1;
    std::int64_t trials = 1000;

    RunConfig();
};

RunConfig parse_config_text(std::string_view text);
RunConfig parse_config_file(const std::string& path);

// Applies one "key=value" assignment (same schema) on top of a config.
void apply_config_override(RunConfig& config, const std::string& assignment);

}  // namespace covert
