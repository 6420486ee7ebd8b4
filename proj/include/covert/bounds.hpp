#pragma once

#include <cstdint>

#include "covert/model.hpp"
#include "covert/rng.hpp"

namespace covert {

// A probability bound clamped to its meaningful range; raw keeps the
// unclamped value for diagnostics.
struct Bound {
    double value = 0.0;
    double raw = 0.0;
};

// Quantum relative entropy between thermal states with means nbar0, nbar1,
// in nats. nbar0 = 0 is handled as the vacuum limit ln(1 + nbar1); nbar1 = 0
// with nbar0 > 0 diverges and returns +infinity.
double qre_thermal(double nbar0, double nbar1);

// Lower bound on the adversary's error probability over n modes of the
// thermal channel: 1/2 - eta_w nbar sqrt(n) / (4 sqrt(eta_b nT (1+eta_b nT))).
Bound thermal_willie_bound(double n, double nbar, double eta_b, double eta_w, double nbar_T);

// Photon budget that makes the bound above equal exactly 1/2 - epsilon.
// Returns +infinity when eta_w = 0 (no adversary coupling).
double covert_nbar(double n, double epsilon, double eta_b, double eta_w, double nbar_T);

// Upper bound on Bob's decoding error with homodyne detection:
// 2^(B - (n/2) log2(1 + nbar / (2 sigma_b^2))), sigma_b^2 = (2(1-eta_b)nT+1)/(4 eta_b).
Bound homodyne_reliability_bound(double bits, double n, double nbar, double eta_b, double nbar_T);

// Per-symbol relative entropy of the adversary's observation for OOK with
// duty cycle q and detected signal mean s_w = eta_w |alpha|^2, against a
// Poisson(lambda_w) dark-count floor. Values in nats.
struct OokKl {
    double exact = 0.0;      // series, truncated at Poisson tail mass < tail_tol
    double taylor_ub = 0.0;  // q^2 (e^(s^2/lambda) - 1) / 2
};
OokKl ook_kl(double q, double s_w, double lambda_w, double tail_tol = 1e-12);

// q = 4 eps / sqrt(n (e^(s^2/lambda) - 1)); composes with the Pinsker chain
// to exactly 1/2 - eps.
double ook_q_setting(double n, double epsilon, double s_w, double lambda_w);

// Gallager exponent (rho = 1) of Bob's binary asymmetric OOK channel with
// dark-click probability p_D_b and detected signal mean s_b = eta_b |alpha|^2,
// plus the q -> 0 Taylor coefficient E0 ~ q * C.
struct OokExponent {
    double e0 = 0.0;
    double c_taylor = 0.0;
};
OokExponent ook_error_exponent(double q, double p_D_b, double s_b);

// Per-frame relative entropy for the Q-ary PPM scheme with selection
// density zeta. Exact enumeration for Q <= 6 (cutoff_K <= 0 picks K so the
// truncated mass is below 1e-10); Monte-Carlo with reported standard error
// otherwise. Values in nats.
struct PpmKlResult {
    double value = 0.0;
    double std_error = 0.0;  // 0 for the exact path
    bool is_exact = true;
    double taylor_ub = 0.0;  // zeta^2 (e^(s^2/lambda) - 1) / (2Q)
};
PpmKlResult ppm_kl(double zeta, int Q, double s_w, double lambda_w, int cutoff_K = 0,
                   std::int64_t mc_samples = 1000000, std::uint64_t mc_seed = 1);
PpmKlResult ppm_kl_exact(double zeta, int Q, double s_w, double lambda_w, int cutoff_K = 0);
// Sampling is split into fixed seed-indexed ranges and reduced in range
// order, so the estimate is identical for any worker count.
PpmKlResult ppm_kl_mc(double zeta, int Q, double s_w, double lambda_w,
                      std::int64_t samples, std::uint64_t seed, int workers = 1);

// zeta = 4 eps Q / sqrt(n (e^(s^2/lambda) - 1)), clamped to [0,1];
// *clamped reports whether clamping occurred.
double ppm_zeta_setting(double n, int Q, double epsilon, double s_w, double lambda_w,
                        bool* clamped = nullptr);

// Pure-loss regime (no excess noise anywhere): scalar consequences of the
// vacuum-overlap argument.
struct PureLossInput {
    double eta_w = 0.0;
    double epsilon = 0.0;
    double avg_vacuum_overlap = 1.0;  // mean |a_0(u)|^2 over the codebook
};
struct PureLossBounds {
    double willie_pe_ub = 0.5;              // 1/2 - (eta_w/2)(1 - overlap)
    double covert_overlap_requirement = 1.0;  // overlap >= 1 - 2 eps / eta_w
    Bound bob_pe_lb;                        // 1/4 - sqrt(eps/eta_w)
    bool validity = false;                  // eps <= eta_w / 16
};
PureLossBounds pureloss_bounds(const PureLossInput& in);

// Converse machinery: Chebyshev threshold/missed-detection bounds for the
// total-count detector and the Holevo reliability bound.
struct ConverseInput {
    double n = 0.0;
    double eta_w = 0.0;
    double mu_N = 0.0;      // lambda_w + (1 - eta_w) nbar_T
    double sigma2_N = 0.0;  // lambda_w + (1 - eta_w)^2 (nbar_T + nbar_T^2)
    double p_fa_target = 0.0;
    double nbar_u = 0.0;    // codeword mean photon number
    double sigma2_u = 0.0;  // codeword photon-number variance
    double message_bits = 0.0;
    double kappa = 1.0;     // low-energy codebook fraction
    double nbar_U = 0.0;    // photon budget of the low-energy subset

    static ConverseInput from_channel(const ChannelParams& params, double n,
                                      double p_fa_target, double nbar_u, double sigma2_u,
                                      double message_bits, double kappa, double nbar_U);
};
struct ConverseBounds {
    double threshold_S = 0.0;
    Bound p_md_ub;   // 1 when the bound is vacuous
    Bound bob_pe_lb;
};
ConverseBounds converse_bounds(const ConverseInput& in);

// 1/2 - sqrt(D/8) clamped at 0; D in nats.
Bound classical_pinsker_pe_lb(double kl_divergence);

}  // namespace covert
