#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "covert/model.hpp"

namespace covert {

// The adversary's sufficient observation: how many frames showed k clicks,
// k = 0..Q. O(Q) storage regardless of session length.
struct FrameClickCounts {
    std::vector<std::int64_t> histogram;  // size Q + 1

    int q() const { return static_cast<int>(histogram.size()) - 1; }
    std::int64_t frames() const;
    std::int64_t total_clicks() const;
    bool any_click() const;
    void add_frame(int clicks);

    static FrameClickCounts zero(int Q);
    static FrameClickCounts from_counts(std::span<const int> per_frame_counts, int Q);
};

// Log-likelihood ratio of a full click record under transmit vs quiet,
// sum over frames of log[1 + zeta * p_r * (y_i / (Q p_D) - 1)].
// Refuses p_D_w = 0, where the ratio degenerates and the optimal rule is
// spd_click_detector.
double llr_statistic(const FrameClickCounts& counts, double zeta, double p_r_w, double p_D_w);

// Dark-count-free optimal rule: accuse on any click at all.
bool spd_click_detector(const FrameClickCounts& counts);

struct PeEstimate {
    double pe_hat = 0.5;
    double threshold = 0.0;  // an attaining S; -inf means "always accuse"
};

// (1/2) min_S [1 - F0(S) + F1(S)] over empirical CDFs; exact minimum via a
// scan of the pooled sample values plus -inf.
PeEstimate empirical_pe(std::span<const double> llr_h0, std::span<const double> llr_h1);

struct GaussianPe {
    double pe_tilde = 0.5;
    double s_star = 0.0;
    double mu0 = 0.0, sigma2_0 = 0.0;
    double mu1 = 0.0, sigma2_1 = 0.0;
};

// Analytical approximation of the detection error probability from the
// total-click-count statistic: both hypotheses approximated as Gaussians,
// threshold at the likelihood crossing.
GaussianPe gaussian_pe(const PpmSession& session, const ChannelParams& params);

// Solves |S-mu0|^2/s0 - log(s1/s0) = |S-mu1|^2/s1 for the crossing between
// the two means; midpoint in the equal-variance degenerate case.
double gaussian_crossing_threshold(double mu0, double sigma2_0, double mu1, double sigma2_1);

// DKW confidence half-width: sqrt(ln(2/alpha) / (2m)).
double dkw_halfwidth(std::int64_t m, double alpha);

// Detection summary over a batch of paired trials.
struct DetectionResult {
    std::vector<double> llr_h0;
    std::vector<double> llr_h1;
    double pe_hat = 0.5;
    double threshold = 0.0;
    double dkw = 0.0;
};

// Phi(x; mu, sigma^2) through erfc.
double normal_cdf(double x, double mu, double sigma2);

}  // namespace covert
