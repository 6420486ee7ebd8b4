#include "covert/bounds.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <thread>
#include <vector>

#include "covert/errors.hpp"

namespace covert {

namespace {

void require(bool cond, const char* what) {
    if (!cond) throw ValidationError(Errc::bad_argument, what);
}

// x * log2(1 + 1/x), continuous at 0.
double xlog2_1p_inv(double x) {
    if (x <= 0.0) return 0.0;
    return x * std::log2(1.0 + 1.0 / x);
}

}  // namespace

double qre_thermal(double nbar0, double nbar1) {
    require(nbar0 >= 0.0 && nbar1 >= 0.0, "qre_thermal: means must be >= 0");
    if (nbar0 == 0.0) return std::log1p(nbar1);
    if (nbar1 == 0.0) return std::numeric_limits<double>::infinity();
    return nbar0 * std::log(nbar0 * (1.0 + nbar1) / (nbar1 * (1.0 + nbar0))) +
           std::log1p(nbar1) - std::log1p(nbar0);
}

Bound thermal_willie_bound(double n, double nbar, double eta_b, double eta_w, double nbar_T) {
    require(n >= 1.0 && nbar >= 0.0 && eta_b > 0.0 && eta_w >= 0.0, "thermal_willie_bound: bad range");
    if (!(nbar_T > 0.0)) {
        throw ValidationError(Errc::bad_argument,
                              "thermal_willie_bound: nbar_T must be > 0 (pure-loss regime is "
                              "covered by pureloss_bounds)");
    }
    Bound b;
    b.raw = 0.5 - eta_w * nbar * std::sqrt(n) /
                      (4.0 * std::sqrt(eta_b * nbar_T * (1.0 + eta_b * nbar_T)));
    b.value = b.raw < 0.0 ? 0.0 : b.raw;
    return b;
}

double covert_nbar(double n, double epsilon, double eta_b, double eta_w, double nbar_T) {
    require(n >= 1.0 && epsilon > 0.0 && epsilon < 0.5 && eta_b > 0.0 && nbar_T > 0.0,
            "covert_nbar: bad range");
    if (eta_w == 0.0) return std::numeric_limits<double>::infinity();
    return 4.0 * epsilon * std::sqrt(eta_b * nbar_T * (1.0 + eta_b * nbar_T)) /
           (std::sqrt(n) * eta_w);
}

Bound homodyne_reliability_bound(double bits, double n, double nbar, double eta_b,
                                 double nbar_T) {
    require(bits >= 0.0 && n >= 0.0 && nbar >= 0.0 && eta_b > 0.0 && eta_b <= 1.0 &&
                nbar_T >= 0.0,
            "homodyne_reliability_bound: bad range");
    const double sigma2_b = (2.0 * (1.0 - eta_b) * nbar_T + 1.0) / (4.0 * eta_b);
    Bound b;
    b.raw = std::exp2(bits - 0.5 * n * std::log2(1.0 + nbar / (2.0 * sigma2_b)));
    b.value = b.raw > 1.0 ? 1.0 : b.raw;
    return b;
}

OokKl ook_kl(double q, double s_w, double lambda_w, double tail_tol) {
    require(q >= 0.0 && q < 1.0 && s_w >= 0.0 && tail_tol > 0.0, "ook_kl: bad range");
    if (!(lambda_w > 0.0)) {
        throw ValidationError(Errc::bad_argument,
                              "ook_kl: lambda_w must be > 0 (otherwise the click itself is "
                              "decisive; see spd_click_detector)");
    }
    OokKl out;
    out.taylor_ub = 0.5 * q * q * std::expm1(s_w * s_w / lambda_w);
    if (q == 0.0 || s_w == 0.0) {
        out.exact = 0.0;
        return out;
    }
    // D = -sum_y Poisson(y; lambda) log[1 - q + q (1 + s/lambda)^y e^-s].
    // The pmf is tracked in log space so large lambda cannot underflow the
    // recurrence before the bulk of the mass is reached.
    const double log_growth = std::log1p(s_w / lambda_w);
    const std::int64_t y_cap =
        static_cast<std::int64_t>(lambda_w + 60.0 * std::sqrt(lambda_w + 1.0) + 60.0);
    double log_pmf = -lambda_w;
    double mass = 0.0;
    double d = 0.0;
    for (std::int64_t y = 0; mass < 1.0 - tail_tol && y <= y_cap; ++y) {
        if (y > 0) log_pmf += std::log(lambda_w) - std::log(static_cast<double>(y));
        const double pmf = std::exp(log_pmf);
        mass += pmf;
        const double ratio = std::exp(static_cast<double>(y) * log_growth - s_w);
        d -= pmf * std::log1p(q * (ratio - 1.0));
    }
    out.exact = d;
    return out;
}

double ook_q_setting(double n, double epsilon, double s_w, double lambda_w) {
    require(n >= 1.0 && epsilon > 0.0 && epsilon < 0.5 && s_w >= 0.0 && lambda_w > 0.0,
            "ook_q_setting: bad range");
    return 4.0 * epsilon / std::sqrt(n * std::expm1(s_w * s_w / lambda_w));
}

OokExponent ook_error_exponent(double q, double p_D_b, double s_b) {
    require(q >= 0.0 && q <= 1.0 && p_D_b >= 0.0 && p_D_b < 1.0 && s_b >= 0.0,
            "ook_error_exponent: bad range");
    OokExponent out;
    const double a = -std::expm1(-0.5 * s_b);                       // 1 - e^(-s/2)
    const double b = std::sqrt(1.0 - (1.0 - p_D_b) * std::exp(-s_b));
    const double on_term = (1.0 - q) * std::sqrt(p_D_b) + q * b;
    out.e0 = -std::log((1.0 - p_D_b) * (1.0 - q * a) * (1.0 - q * a) + on_term * on_term);
    out.c_taylor = 2.0 * std::exp(-0.5 * s_b) *
                   (std::expm1(0.5 * s_b) + p_D_b -
                    std::sqrt(p_D_b * (std::expm1(s_b) + p_D_b)));
    return out;
}

namespace {

double ppm_taylor_ub(double zeta, int Q, double s_w, double lambda_w) {
    return zeta * zeta * std::expm1(s_w * s_w / lambda_w) / (2.0 * static_cast<double>(Q));
}

// -log of the per-frame likelihood ratio p1/p0 at photon counts x.
double ppm_neg_log_ratio(std::span<const std::int64_t> x, double zeta, int Q, double s_w,
                         double log_growth) {
    double sum = 0.0;
    for (std::int64_t xi : x) sum += std::exp(static_cast<double>(xi) * log_growth - s_w);
    return -std::log1p(zeta * (sum / static_cast<double>(Q) - 1.0));
}

}  // namespace

PpmKlResult ppm_kl_exact(double zeta, int Q, double s_w, double lambda_w, int cutoff_K) {
    require(zeta >= 0.0 && zeta <= 1.0 && Q >= 1 && s_w >= 0.0 && lambda_w > 0.0,
            "ppm_kl: bad range");
    require(Q <= 6, "ppm_kl_exact: enumeration only supported for Q <= 6");
    PpmKlResult out;
    out.is_exact = true;
    out.taylor_ub = ppm_taylor_ub(zeta, Q, s_w, lambda_w);
    if (zeta == 0.0 || s_w == 0.0) return out;

    int k_max = cutoff_K;
    if (k_max <= 0) {
        // Per-coordinate tail below 1e-10 / Q keeps the box mass above 1 - 1e-10.
        const double tol = 1e-10 / static_cast<double>(Q);
        double pmf = std::exp(-lambda_w);
        double tail = 1.0 - pmf;
        k_max = 0;
        while (tail > tol && k_max < 400) {
            ++k_max;
            pmf *= lambda_w / static_cast<double>(k_max);
            tail -= pmf;
        }
    }
    std::vector<double> pois(static_cast<std::size_t>(k_max) + 1);
    pois[0] = std::exp(-lambda_w);
    for (int k = 1; k <= k_max; ++k) {
        pois[static_cast<std::size_t>(k)] =
            pois[static_cast<std::size_t>(k - 1)] * lambda_w / static_cast<double>(k);
    }
    const double log_growth = std::log1p(s_w / lambda_w);

    std::vector<std::int64_t> x(static_cast<std::size_t>(Q), 0);
    double d = 0.0;
    for (;;) {
        double weight = 1.0;
        for (std::int64_t xi : x) weight *= pois[static_cast<std::size_t>(xi)];
        d += weight * ppm_neg_log_ratio(x, zeta, Q, s_w, log_growth);
        int pos = 0;
        while (pos < Q && x[static_cast<std::size_t>(pos)] == k_max) {
            x[static_cast<std::size_t>(pos)] = 0;
            ++pos;
        }
        if (pos == Q) break;
        ++x[static_cast<std::size_t>(pos)];
    }
    out.value = d;
    return out;
}

PpmKlResult ppm_kl_mc(double zeta, int Q, double s_w, double lambda_w, std::int64_t samples,
                      std::uint64_t seed, int workers) {
    require(zeta >= 0.0 && zeta <= 1.0 && Q >= 1 && s_w >= 0.0 && lambda_w > 0.0,
            "ppm_kl: bad range");
    require(samples >= 2, "ppm_kl_mc: need at least 2 samples");
    PpmKlResult out;
    out.is_exact = false;
    out.taylor_ub = ppm_taylor_ub(zeta, Q, s_w, lambda_w);
    if (zeta == 0.0 || s_w == 0.0) return out;

    const double log_growth = std::log1p(s_w / lambda_w);
    // Fixed seed-indexed ranges reduced in range order: the estimate does
    // not depend on the worker count.
    const int ranges = 64;
    std::vector<double> sums(ranges, 0.0), sums_sq(ranges, 0.0);
    const auto run_range = [&](int r) {
        const std::int64_t lo = samples * r / ranges;
        const std::int64_t hi = samples * (r + 1) / ranges;
        Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(r), 0);
        std::vector<std::int64_t> x(static_cast<std::size_t>(Q));
        double sum = 0.0, sum_sq = 0.0;
        for (std::int64_t i = lo; i < hi; ++i) {
            for (auto& xi : x) xi = rng.poisson(lambda_w);
            const double v = ppm_neg_log_ratio(x, zeta, Q, s_w, log_growth);
            sum += v;
            sum_sq += v * v;
        }
        sums[static_cast<std::size_t>(r)] = sum;
        sums_sq[static_cast<std::size_t>(r)] = sum_sq;
    };
    if (workers <= 1) {
        for (int r = 0; r < ranges; ++r) run_range(r);
    } else {
        std::vector<std::thread> pool;
        std::atomic<int> next{0};
        for (int w = 0; w < std::min(workers, ranges); ++w) {
            pool.emplace_back([&]() {
                for (int r = next.fetch_add(1); r < ranges; r = next.fetch_add(1)) run_range(r);
            });
        }
        for (auto& th : pool) th.join();
    }
    double sum = 0.0, sum_sq = 0.0;
    for (int r = 0; r < ranges; ++r) {
        sum += sums[static_cast<std::size_t>(r)];
        sum_sq += sums_sq[static_cast<std::size_t>(r)];
    }
    const double mean = sum / static_cast<double>(samples);
    const double var =
        (sum_sq - static_cast<double>(samples) * mean * mean) / static_cast<double>(samples - 1);
    out.value = mean;
    out.std_error = std::sqrt(std::max(var, 0.0) / static_cast<double>(samples));
    return out;
}

PpmKlResult ppm_kl(double zeta, int Q, double s_w, double lambda_w, int cutoff_K,
                   std::int64_t mc_samples, std::uint64_t mc_seed) {
    if (Q <= 6) return ppm_kl_exact(zeta, Q, s_w, lambda_w, cutoff_K);
    return ppm_kl_mc(zeta, Q, s_w, lambda_w, mc_samples, mc_seed);
}

double ppm_zeta_setting(double n, int Q, double epsilon, double s_w, double lambda_w,
                        bool* clamped) {
    require(n >= 1.0 && Q >= 1 && epsilon > 0.0 && epsilon < 0.5 && s_w >= 0.0 && lambda_w > 0.0,
            "ppm_zeta_setting: bad range");
    const double zeta = 4.0 * epsilon * static_cast<double>(Q) /
                        std::sqrt(n * std::expm1(s_w * s_w / lambda_w));
    if (clamped != nullptr) *clamped = zeta > 1.0;
    return zeta > 1.0 ? 1.0 : zeta;
}

PureLossBounds pureloss_bounds(const PureLossInput& in) {
    require(in.eta_w > 0.0 && in.eta_w < 1.0, "pureloss_bounds: eta_w must lie in (0,1)");
    require(in.epsilon > 0.0 && in.epsilon < 0.5, "pureloss_bounds: epsilon must lie in (0,1/2)");
    require(in.avg_vacuum_overlap >= 0.0 && in.avg_vacuum_overlap <= 1.0,
            "pureloss_bounds: overlap must lie in [0,1]");
    PureLossBounds out;
    out.willie_pe_ub = 0.5 - 0.5 * in.eta_w * (1.0 - in.avg_vacuum_overlap);
    out.covert_overlap_requirement = 1.0 - 2.0 * in.epsilon / in.eta_w;
    out.bob_pe_lb.raw = 0.25 - std::sqrt(in.epsilon / in.eta_w);
    out.bob_pe_lb.value = out.bob_pe_lb.raw < 0.0 ? 0.0 : out.bob_pe_lb.raw;
    out.validity = in.epsilon <= in.eta_w / 16.0;
    return out;
}

ConverseInput ConverseInput::from_channel(const ChannelParams& params, double n,
                                          double p_fa_target, double nbar_u, double sigma2_u,
                                          double message_bits, double kappa, double nbar_U) {
    params.validate();
    ConverseInput in;
    in.n = n;
    in.eta_w = params.eta_w;
    in.mu_N = params.lambda_w + (1.0 - params.eta_w) * params.nbar_T;
    in.sigma2_N = params.lambda_w +
                  (1.0 - params.eta_w) * (1.0 - params.eta_w) *
                      (params.nbar_T + params.nbar_T * params.nbar_T);
    in.p_fa_target = p_fa_target;
    in.nbar_u = nbar_u;
    in.sigma2_u = sigma2_u;
    in.message_bits = message_bits;
    in.kappa = kappa;
    in.nbar_U = nbar_U;
    return in;
}

ConverseBounds converse_bounds(const ConverseInput& in) {
    require(in.n >= 1.0 && in.sigma2_N >= 0.0 && in.mu_N >= 0.0, "converse_bounds: bad noise");
    require(in.p_fa_target > 0.0 && in.p_fa_target < 1.0, "converse_bounds: bad p_fa_target");
    require(in.kappa > 0.0 && in.kappa <= 1.0, "converse_bounds: kappa must lie in (0,1]");
    require(in.eta_w >= 0.0 && in.eta_w <= 1.0, "converse_bounds: bad eta_w");
    ConverseBounds out;
    const double spread = std::sqrt(in.n * in.sigma2_N / in.p_fa_target);
    out.threshold_S = in.n * in.mu_N + spread;

    const double denom = in.eta_w * in.nbar_u - spread;
    if (denom <= 0.0) {
        // Vacuous: the codeword is too weak for this detector to matter.
        out.p_md_ub.raw = std::numeric_limits<double>::infinity();
        out.p_md_ub.value = 1.0;
    } else {
        out.p_md_ub.raw =
            (in.n * in.sigma2_N + in.eta_w * in.eta_w * in.sigma2_u) / (denom * denom);
        out.p_md_ub.value = out.p_md_ub.raw > 1.0 ? 1.0 : out.p_md_ub.raw;
    }

    const double holevo_per_mode =
        std::log2(1.0 + in.nbar_U / in.n) + xlog2_1p_inv(in.nbar_U / in.n);
    const double numer = holevo_per_mode + 1.0 / in.n;
    const double rate = std::log2(in.kappa) / in.n + in.message_bits / in.n;
    require(rate > 0.0, "converse_bounds: message rate must be positive");
    out.bob_pe_lb.raw = in.kappa * (1.0 - numer / rate);
    out.bob_pe_lb.value = out.bob_pe_lb.raw < 0.0 ? 0.0 : out.bob_pe_lb.raw;
    return out;
}

Bound classical_pinsker_pe_lb(double kl_divergence) {
    require(kl_divergence >= 0.0, "classical_pinsker_pe_lb: divergence must be >= 0");
    Bound b;
    b.raw = 0.5 - std::sqrt(kl_divergence / 8.0);
    b.value = b.raw < 0.0 ? 0.0 : b.raw;
    return b;
}

}  // namespace covert
