#include "covert/adversary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "covert/errors.hpp"

namespace covert {

std::int64_t FrameClickCounts::frames() const {
    std::int64_t total = 0;
    for (std::int64_t n : histogram) total += n;
    return total;
}

std::int64_t FrameClickCounts::total_clicks() const {
    std::int64_t total = 0;
    for (std::size_t k = 1; k < histogram.size(); ++k) {
        total += static_cast<std::int64_t>(k) * histogram[k];
    }
    return total;
}

bool FrameClickCounts::any_click() const {
    for (std::size_t k = 1; k < histogram.size(); ++k) {
        if (histogram[k] > 0) return true;
    }
    return false;
}

void FrameClickCounts::add_frame(int clicks) {
    histogram.at(static_cast<std::size_t>(clicks)) += 1;
}

FrameClickCounts FrameClickCounts::zero(int Q) {
    FrameClickCounts c;
    c.histogram.assign(static_cast<std::size_t>(Q) + 1, 0);
    return c;
}

FrameClickCounts FrameClickCounts::from_counts(std::span<const int> per_frame_counts, int Q) {
    FrameClickCounts c = zero(Q);
    for (int y : per_frame_counts) {
        if (y < 0 || y > Q) {
            throw ValidationError(Errc::bad_argument, "frame click count outside {0..Q}");
        }
        c.histogram[static_cast<std::size_t>(y)] += 1;
    }
    return c;
}

double llr_statistic(const FrameClickCounts& counts, double zeta, double p_r_w, double p_D_w) {
    if (p_D_w == 0.0) {
        throw ValidationError(Errc::llr_needs_dark_counts,
                              "llr_statistic: p_D_w = 0 degenerates the likelihood ratio; "
                              "use spd_click_detector");
    }
    if (!(p_D_w > 0.0 && p_D_w < 1.0) || !(zeta >= 0.0 && zeta <= 1.0) ||
        !(p_r_w >= 0.0 && p_r_w <= 1.0)) {
        throw ValidationError(Errc::bad_argument, "llr_statistic: parameter out of range");
    }
    const int q = counts.q();
    const double zp = zeta * p_r_w;
    double llr = 0.0;
    for (int k = 0; k <= q; ++k) {
        const std::int64_t nk = counts.histogram[static_cast<std::size_t>(k)];
        if (nk == 0) continue;
        const double term =
            std::log1p(zp * (static_cast<double>(k) / (static_cast<double>(q) * p_D_w) - 1.0));
        llr += static_cast<double>(nk) * term;
    }
    return llr;
}

bool spd_click_detector(const FrameClickCounts& counts) {
    return counts.any_click();
}

PeEstimate empirical_pe(std::span<const double> llr_h0, std::span<const double> llr_h1) {
    if (llr_h0.empty() || llr_h1.empty()) {
        throw ValidationError(Errc::bad_argument, "empirical_pe: empty sample vector");
    }
    std::vector<double> s0(llr_h0.begin(), llr_h0.end());
    std::vector<double> s1(llr_h1.begin(), llr_h1.end());
    std::sort(s0.begin(), s0.end());
    std::sort(s1.begin(), s1.end());
    const double m0 = static_cast<double>(s0.size());
    const double m1 = static_cast<double>(s1.size());

    // S = -inf ("accuse always") gives exactly 1/2 and caps the estimate.
    PeEstimate best;
    best.pe_hat = 0.5;
    best.threshold = -std::numeric_limits<double>::infinity();

    // Walk the pooled order statistics; F(S) = fraction of samples <= S.
    std::size_t i0 = 0, i1 = 0;
    while (i0 < s0.size() || i1 < s1.size()) {
        double s;
        if (i1 >= s1.size() || (i0 < s0.size() && s0[i0] <= s1[i1])) {
            s = s0[i0];
        } else {
            s = s1[i1];
        }
        while (i0 < s0.size() && s0[i0] <= s) ++i0;
        while (i1 < s1.size() && s1[i1] <= s) ++i1;
        const double pe =
            0.5 * (1.0 - static_cast<double>(i0) / m0 + static_cast<double>(i1) / m1);
        if (pe < best.pe_hat) {
            best.pe_hat = pe;
            best.threshold = s;
        }
    }
    return best;
}

double normal_cdf(double x, double mu, double sigma2) {
    return 0.5 * std::erfc(-(x - mu) / std::sqrt(2.0 * sigma2));
}

GaussianPe gaussian_pe(const PpmSession& session, const ChannelParams& params) {
    validate_session(session, params);
    const double p_d = params.p_D_w;
    if (!(p_d > 0.0 && p_d < 1.0)) {
        throw ValidationError(Errc::degenerate_gaussian,
                              "gaussian_pe: needs p_D_w in (0,1) so that sigma0 > 0");
    }
    const double n = static_cast<double>(session.n);
    const double frames = static_cast<double>(session.frames());
    const double p_r = derive_click_probs(params, session.zeta).p_r_w;
    const double zp = session.zeta * p_r;

    GaussianPe g;
    g.mu0 = n * p_d;
    g.sigma2_0 = n * p_d * (1.0 - p_d);
    const double mu_x = (n - frames) * p_d;
    const double sigma2_x = (n - frames) * p_d * (1.0 - p_d);
    const double p_z = zp + (1.0 - zp) * p_d;  // per-frame click probability on the pulse slot
    const double mu_z = frames * p_z;
    const double sigma2_z = frames * p_z * (1.0 - zp) * (1.0 - p_d);
    g.mu1 = mu_x + mu_z;
    g.sigma2_1 = sigma2_x + sigma2_z;

    g.s_star = gaussian_crossing_threshold(g.mu0, g.sigma2_0, g.mu1, g.sigma2_1);
    g.pe_tilde = 0.5 * (1.0 - normal_cdf(g.s_star, g.mu0, g.sigma2_0) +
                        normal_cdf(g.s_star, g.mu1, g.sigma2_1));
    return g;
}

double gaussian_crossing_threshold(double mu0, double sigma2_0, double mu1, double sigma2_1) {
    if (!(sigma2_0 > 0.0) || !(sigma2_1 > 0.0)) {
        throw ValidationError(Errc::degenerate_gaussian,
                              "gaussian_crossing_threshold: variances must be positive");
    }
    const double log_ratio = std::log(sigma2_1 / sigma2_0);
    // Coincident distributions (up to rounding): any threshold ties; use the
    // midpoint so the degenerate zeta = 0 case stays stable.
    if (std::fabs(mu1 - mu0) <= 1e-12 * (std::fabs(mu0) + std::fabs(mu1) + 1.0) &&
        std::fabs(log_ratio) <= 1e-12) {
        return 0.5 * (mu0 + mu1);
    }

    // |S - mu0|^2 / s0 - log(s1/s0) = |S - mu1|^2 / s1, quadratic in S.
    const double a = sigma2_1 - sigma2_0;
    const double b = 2.0 * (mu1 * sigma2_0 - mu0 * sigma2_1);
    const double c =
        mu0 * mu0 * sigma2_1 - mu1 * mu1 * sigma2_0 - sigma2_0 * sigma2_1 * log_ratio;
    if (std::fabs(a) <= 1e-14 * std::max(sigma2_0, sigma2_1)) {
        // Equal variances: crossing at the midpoint.
        return b == 0.0 ? mu0 : -c / b;
    }
    const double disc = b * b - 4.0 * a * c;
    const double sq = std::sqrt(std::max(disc, 0.0));
    const double qq = -0.5 * (b + (b >= 0.0 ? sq : -sq));
    const double r1 = qq / a;
    const double r2 = qq != 0.0 ? c / qq : r1;
    const double lo = std::min(mu0, mu1);
    const double hi = std::max(mu0, mu1);
    const bool r1_in = r1 >= lo && r1 <= hi;
    const bool r2_in = r2 >= lo && r2 <= hi;
    if (r1_in && !r2_in) return r1;
    if (r2_in && !r1_in) return r2;
    const auto pe_at = [&](double s) {
        return 0.5 * (1.0 - normal_cdf(s, mu0, sigma2_0) + normal_cdf(s, mu1, sigma2_1));
    };
    return pe_at(r1) <= pe_at(r2) ? r1 : r2;
}

double dkw_halfwidth(std::int64_t m, double alpha) {
    if (m < 1) throw ValidationError(Errc::bad_argument, "dkw_halfwidth: m must be >= 1");
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw ValidationError(Errc::bad_argument, "dkw_halfwidth: alpha must lie in (0,1)");
    }
    return std::sqrt(std::log(2.0 / alpha) / (2.0 * static_cast<double>(m)));
}

}  // namespace covert
