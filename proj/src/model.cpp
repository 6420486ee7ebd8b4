#include "covert/model.hpp"

#include <cmath>
#include <string>

namespace covert {

namespace {

void require_nonneg(double v, const char* name) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
        throw ValidationError(Errc::negative_parameter,
                              std::string(name) + " must be finite and >= 0");
    }
}

void require_prob_half_open(double v, const char* name) {
    if (!(v >= 0.0 && v < 1.0)) {
        throw ValidationError(Errc::probability_out_of_range,
                              std::string(name) + " must lie in [0, 1)");
    }
}

}  // namespace

void ChannelParams::validate() const {
    if (!(eta_b > 0.0 && eta_b <= 1.0)) {
        throw ValidationError(Errc::probability_out_of_range, "eta_b must lie in (0, 1]");
    }
    if (!(eta_w >= 0.0 && eta_w < 1.0)) {
        throw ValidationError(Errc::probability_out_of_range, "eta_w must lie in [0, 1)");
    }
    if (std::fabs(eta_b + eta_w - 1.0) > 1e-12) {
        throw ValidationError(Errc::transmissivity_mismatch,
                              "eta_b + eta_w must equal 1 (tolerance 1e-12)");
    }
    require_nonneg(nbar, "nbar");
    require_nonneg(nbar_T, "nbar_T");
    require_nonneg(lambda_w, "lambda_w");
    require_nonneg(nbar_det_b, "nbar_det_b");
    require_nonneg(nbar_det_w, "nbar_det_w");
    require_prob_half_open(p_D_b, "p_D_b");
    require_prob_half_open(p_D_w, "p_D_w");
}

void SecretKey::validate(const PpmSession& session) const {
    if (key.size() != selected.size()) {
        throw ValidationError(Errc::key_invalid, "key length differs from |selected|");
    }
    for (std::size_t i = 0; i < selected.size(); ++i) {
        if (selected[i] < 0 || selected[i] >= session.frames()) {
            throw ValidationError(Errc::key_invalid, "selected frame index out of range");
        }
        if (i > 0 && selected[i] <= selected[i - 1]) {
            throw ValidationError(Errc::key_invalid, "selected indices must be strictly increasing");
        }
        if (key[i] < 0 || key[i] >= session.Q) {
            throw ValidationError(Errc::key_invalid, "key entry outside {0..Q-1}");
        }
    }
}

void CovertBudget::validate() const {
    if (!(epsilon > 0.0 && epsilon < 0.5)) {
        throw ValidationError(Errc::probability_out_of_range, "epsilon must lie in (0, 1/2)");
    }
    if (!(delta > 0.0 && delta < 1.0)) {
        throw ValidationError(Errc::probability_out_of_range, "delta must lie in (0, 1)");
    }
}

ClickProbs derive_click_probs(const ChannelParams& params, double zeta,
                              PulseDetectionModel model) {
    params.validate();
    if (!(zeta >= 0.0 && zeta <= 1.0)) {
        throw ValidationError(Errc::zeta_out_of_range, "zeta must lie in [0, 1]");
    }
    ClickProbs out;
    const double exponent =
        model == PulseDetectionModel::detected_mean ? params.nbar_det_w
                                                    : params.eta_w * params.nbar;
    out.p_r_w = -std::expm1(-exponent);
    out.p_s_w = zeta * out.p_r_w * (1.0 - params.p_D_w) + params.p_D_w;
    return out;
}

void validate_session(const PpmSession& session, const ChannelParams& params) {
    params.validate();
    if (session.Q < 2) {
        throw ValidationError(Errc::q_too_small, "Q must be >= 2");
    }
    if (session.n <= 0 || session.n % session.Q != 0) {
        throw ValidationError(Errc::frame_not_dividing,
                              "Q (" + std::to_string(session.Q) + ") must divide n (" +
                                  std::to_string(session.n) + ")");
    }
    if (!(session.zeta >= 0.0 && session.zeta <= 1.0)) {
        throw ValidationError(Errc::zeta_out_of_range, "zeta must lie in [0, 1]");
    }
    if (session.rs_n != session.Q - 1) {
        throw ValidationError(Errc::rs_length_mismatch,
                              "rs_n (" + std::to_string(session.rs_n) + ") must equal Q - 1 (" +
                                  std::to_string(session.Q - 1) + ")");
    }
    if (session.rs_k < 1 || session.rs_k >= session.rs_n) {
        throw ValidationError(Errc::rs_dimension_invalid, "require 1 <= rs_k < rs_n");
    }
}

}  // namespace covert
