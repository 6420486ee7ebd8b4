#pragma once

// Test-side statistical machinery and independent oracles. Everything here
// is deliberately written from first principles (no reuse of the library's
// fast paths) so it can serve as a cross-check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "covert/adversary.hpp"
#include "covert/model.hpp"
#include "covert/rng.hpp"

namespace testsupport {

// Regularized lower incomplete gamma P(a, x) via series / continued fraction.
inline double gamma_p(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_p: bad arguments");
    if (x == 0.0) return 0.0;
    const double log_prefix = a * std::log(x) - x - std::lgamma(a);
    if (x < a + 1.0) {
        // Series expansion.
        double term = 1.0 / a;
        double sum = term;
        for (int k = 1; k < 10000; ++k) {
            term *= x / (a + k);
            sum += term;
            if (std::fabs(term) < std::fabs(sum) * 1e-16) break;
        }
        return sum * std::exp(log_prefix);
    }
    // Lentz continued fraction for Q(a, x).
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 10000; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < 1e-16) break;
    }
    return 1.0 - std::exp(log_prefix) * h;
}

// Upper tail of the chi-square distribution with dof degrees of freedom.
inline double chi_square_p_value(double stat, double dof) {
    return 1.0 - gamma_p(dof / 2.0, stat / 2.0);
}

// Two-sample chi-square homogeneity statistic over pre-binned counts.
// Classes with small pooled expectation are merged into the previous bin.
struct ChiSquare {
    double stat = 0.0;
    double dof = 0.0;
};

inline ChiSquare two_sample_chi_square(std::span<const std::int64_t> a,
                                       std::span<const std::int64_t> b,
                                       double min_expected = 5.0) {
    if (a.size() != b.size()) throw std::invalid_argument("chi-square: size mismatch");
    double total_a = 0.0, total_b = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        total_a += static_cast<double>(a[i]);
        total_b += static_cast<double>(b[i]);
    }
    const double total = total_a + total_b;
    ChiSquare out;
    double merged_a = 0.0, merged_b = 0.0, merged_pool = 0.0;
    int used_bins = 0;
    const auto flush = [&]() {
        if (merged_pool <= 0.0) return;
        const double ea = merged_pool * total_a / total;
        const double eb = merged_pool * total_b / total;
        out.stat += (merged_a - ea) * (merged_a - ea) / ea;
        out.stat += (merged_b - eb) * (merged_b - eb) / eb;
        ++used_bins;
        merged_a = merged_b = merged_pool = 0.0;
    };
    for (std::size_t i = 0; i < a.size(); ++i) {
        merged_a += static_cast<double>(a[i]);
        merged_b += static_cast<double>(b[i]);
        merged_pool += static_cast<double>(a[i] + b[i]);
        const double expected_min = merged_pool * std::min(total_a, total_b) / total;
        if (expected_min >= min_expected) flush();
    }
    flush();  // tail bin (may be small; dof still counts it conservatively)
    out.dof = std::max(1, used_bins - 1);
    return out;
}

// Asymptotic two-sample Kolmogorov-Smirnov p-value.
inline double ks_two_sample_p(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    const double en = std::sqrt(na * nb / (na + nb));
    const double lambda = (en + 0.12 + 0.11 / en) * d;
    double p = 0.0;
    double sign = 1.0;
    for (int k = 1; k <= 100; ++k) {
        p += sign * 2.0 * std::exp(-2.0 * lambda * lambda * k * k);
        sign = -sign;
    }
    return std::clamp(p, 0.0, 1.0);
}

// Naive per-mode H0 sampler: every mode is an independent Bernoulli(p_D_w)
// dark click. The aggregated multinomial sampler must match this in
// distribution.
inline covert::FrameClickCounts naive_h0_histogram(const covert::PpmSession& session,
                                                   const covert::ChannelParams& params,
                                                   covert::Rng& rng) {
    covert::FrameClickCounts counts = covert::FrameClickCounts::zero(session.Q);
    for (std::int64_t f = 0; f < session.frames(); ++f) {
        int clicks = 0;
        for (int m = 0; m < session.Q; ++m) {
            clicks += rng.bernoulli(params.p_D_w) ? 1 : 0;
        }
        counts.add_frame(clicks);
    }
    return counts;
}

// Naive per-mode H1 adversary sampler: the first `selected` frames carry a
// pulse in one slot (click probability 1-(1-p_r)(1-p_D)), all other slots
// are dark-only.
inline covert::FrameClickCounts naive_h1_willie(const covert::PpmSession& session,
                                                const covert::ChannelParams& params,
                                                std::int64_t selected, covert::Rng& rng) {
    const double p_r = -std::expm1(-params.nbar_det_w);
    const double p_pulse = 1.0 - (1.0 - p_r) * (1.0 - params.p_D_w);
    covert::FrameClickCounts counts = covert::FrameClickCounts::zero(session.Q);
    for (std::int64_t f = 0; f < session.frames(); ++f) {
        int clicks = 0;
        if (f < selected) clicks += rng.bernoulli(p_pulse) ? 1 : 0;
        const int dark_modes = f < selected ? session.Q - 1 : session.Q;
        for (int m = 0; m < dark_modes; ++m) {
            clicks += rng.bernoulli(params.p_D_w) ? 1 : 0;
        }
        counts.add_frame(clicks);
    }
    return counts;
}

inline double rel_err(double got, double want) {
    if (want == 0.0) return std::fabs(got);
    return std::fabs(got - want) / std::fabs(want);
}

// Series oracle for the thermal-state relative entropy: direct summation of
// sum_k p0(k) ln(p0(k)/p1(k)) over geometric photon-number distributions,
// truncated at tail mass 1e-14.
inline double qre_series_oracle(double n0, double n1) {
    if (n0 == 0.0) return std::log1p(n1);
    double d = 0.0;
    double mass = 0.0;
    const double r0 = n0 / (1.0 + n0);
    double p0 = 1.0 / (1.0 + n0);
    const double log_ratio_step = std::log(n0 / n1);
    const double log_norm = std::log((1.0 + n1) / (1.0 + n0));
    for (int k = 0; mass < 1.0 - 1e-14; ++k) {
        if (k > 0) p0 *= r0;
        mass += p0;
        d += p0 * (k * log_ratio_step + (k + 1) * log_norm);
        if (k > 100000) break;
    }
    return d;
}

}  // namespace testsupport
