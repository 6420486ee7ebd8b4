#pragma once

#include <cstdint>
#include <vector>

#include "covert/errors.hpp"

namespace covert {

// Optical channel characteristics for both receivers. Immutable after
// validation; pass by const reference everywhere.
struct ChannelParams {
    double eta_b = 0.97;      // Alice -> Bob transmissivity, in (0,1]
    double eta_w = 0.03;      // fraction reaching the adversary, = 1 - eta_b
    double nbar = 0.0;        // mean photon number per pulse at the source
    double nbar_T = 0.0;      // thermal mean photon number per mode
    double lambda_w = 0.0;    // adversary PNR dark-count rate, photons/mode
    double p_D_b = 0.0;       // Bob dark-click probability per mode, [0,1)
    double p_D_w = 0.0;       // adversary dark-click probability per mode, [0,1)
    double nbar_det_b = 0.0;  // mean detected photons per pulse at Bob
    double nbar_det_w = 0.0;  // mean detected photons per pulse at the adversary

    // Throws ValidationError on any violated invariant.
    void validate() const;
};

// Session geometry: n optical modes split into n/Q PPM frames, a frame
// selection density zeta, and the RS code working over the frame alphabet.
struct PpmSession {
    std::int64_t n = 0;  // total optical modes
    int Q = 32;          // modes per PPM frame
    double zeta = 0.0;   // per-frame selection probability, [0,1]
    int rs_n = 31;       // RS code length (must equal Q - 1)
    int rs_k = 15;       // RS code dimension

    std::int64_t frames() const { return n / Q; }
};

// The pre-shared secret: which frames carry pulses and the per-frame
// scrambling offsets.
struct SecretKey {
    std::vector<std::int64_t> selected;  // strictly increasing frame indices
    std::vector<int> key;                // one value in {0..Q-1} per selected frame

    void validate(const PpmSession& session) const;
};

struct CovertBudget {
    double epsilon = 0.05;  // covertness slack, in (0, 1/2)
    double delta = 0.05;    // reliability slack, in (0, 1)

    void validate() const;
};

struct ClickProbs {
    double p_r_w = 0.0;  // P(adversary detects a transmitted pulse)
    double p_s_w = 0.0;  // per-mode click probability on a potential pulse mode
};

enum class PulseDetectionModel {
    detected_mean,  // p_r = 1 - exp(-nbar_det_w); folds quantum efficiency in
    raw_channel,    // p_r = 1 - exp(-eta_w * nbar)
};

// p_r_w and p_s_w = zeta * p_r_w * (1 - p_D_w) + p_D_w.
ClickProbs derive_click_probs(const ChannelParams& params, double zeta,
                              PulseDetectionModel model = PulseDetectionModel::detected_mean);

// Accepts iff every session/channel invariant holds; throws ValidationError
// with a distinct code otherwise.
void validate_session(const PpmSession& session, const ChannelParams& params);

}  // namespace covert
