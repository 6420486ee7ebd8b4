#include "covert/rng.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

namespace covert {

namespace {

inline std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

// splitmix64 finalizer; also used to expand seeds into full state.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace

Rng::Rng(std::uint64_t s0, std::uint64_t s1, std::uint64_t s2, std::uint64_t s3)
    : s_{s0, s1, s2, s3} {}

Rng Rng::from_seed(std::uint64_t seed) {
    std::uint64_t z = seed;
    std::uint64_t a = mix64(z);
    std::uint64_t b = mix64(a);
    std::uint64_t c = mix64(b);
    std::uint64_t d = mix64(c);
    return Rng(a, b, c, d);
}

Rng Rng::stream(std::uint64_t master, std::uint64_t trial, std::uint64_t substream) {
    // Counter-based derivation: avalanche each component so that nearby
    // (trial, substream) pairs yield unrelated states.
    std::uint64_t h = mix64(master);
    h = mix64(h ^ (trial * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL));
    h = mix64(h ^ (substream * 0x9e6c63d0876a9a47ULL + 0xb5026f5aa96619e9ULL));
    return from_seed(h);
}

std::uint64_t Rng::next() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double Rng::uniform() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

std::uint64_t Rng::below(std::uint64_t bound) {
    assert(bound >= 1);
    const std::uint64_t threshold = -bound % bound;  // 2^64 mod bound
    for (;;) {
        const std::uint64_t r = next();
        if (r >= threshold) return r % bound;
    }
}

bool Rng::bernoulli(double p) {
    if (p <= 0.0) return false;
    if (p >= 1.0) return true;
    return uniform() < p;
}

std::int64_t Rng::binomial(std::int64_t n, double p) {
    if (n < 0 || p < 0.0 || p > 1.0) throw std::invalid_argument("binomial: bad arguments");
    if (n == 0 || p == 0.0) return 0;
    if (p == 1.0) return n;
    if (p > 0.5) return n - binomial(n, 1.0 - p);
    const double np = static_cast<double>(n) * p;
    if (np <= 30.0) return binomial_inversion(n, p);
    return binomial_btrs(n, p);
}

std::int64_t Rng::binomial_inversion(std::int64_t n, double p) {
    // CDF walk with the pmf recurrence; expected O(np) iterations.
    const double ratio = p / (1.0 - p);
    double pmf = std::exp(static_cast<double>(n) * std::log1p(-p));
    double u = uniform();
    std::int64_t k = 0;
    while (u > pmf && k < n) {
        u -= pmf;
        ++k;
        pmf *= ratio * static_cast<double>(n - k + 1) / static_cast<double>(k);
    }
    return k;
}

std::int64_t Rng::binomial_btrs(std::int64_t n, double p) {
    // Hormann's transformed rejection with squeeze; exact for np >= 10.
    const double q = 1.0 - p;
    const double np = static_cast<double>(n) * p;
    const double spq = std::sqrt(np * q);
    const double b = 1.15 + 2.53 * spq;
    const double a = -0.0873 + 0.0248 * b + 0.01 * p;
    const double c = np + 0.5;
    const double v_r = 0.92 - 4.2 / b;
    const double alpha = (2.83 + 5.1 / b) * spq;
    const double lpq = std::log(p / q);
    const std::int64_t m = static_cast<std::int64_t>(std::floor((static_cast<double>(n) + 1) * p));
    const double h = std::lgamma(static_cast<double>(m) + 1) +
                     std::lgamma(static_cast<double>(n - m) + 1);
    for (;;) {
        const double u = uniform() - 0.5;
        double v = uniform();
        const double us = 0.5 - std::fabs(u);
        const double kd = std::floor((2.0 * a / us + b) * u + c);
        if (kd < 0 || kd > static_cast<double>(n)) continue;
        const std::int64_t k = static_cast<std::int64_t>(kd);
        if (us >= 0.07 && v <= v_r) return k;
        v = v * alpha / (a / (us * us) + b);
        if (std::log(v) <= h - std::lgamma(kd + 1) - std::lgamma(static_cast<double>(n - k) + 1) +
                               (kd - static_cast<double>(m)) * lpq) {
            return k;
        }
    }
}

std::int64_t Rng::poisson(double lambda) {
    if (lambda < 0.0 || !std::isfinite(lambda)) throw std::invalid_argument("poisson: bad lambda");
    std::int64_t total = 0;
    // Chunk so exp(-chunk) stays well above the double underflow threshold.
    while (lambda > 0.0) {
        const double chunk = lambda > 400.0 ? 400.0 : lambda;
        lambda -= chunk;
        const double limit = std::exp(-chunk);
        double prod = uniform();
        std::int64_t k = 0;
        while (prod > limit) {
            ++k;
            prod *= uniform();
        }
        total += k;
    }
    return total;
}

void multinomial(Rng& rng, std::int64_t trials, std::span<const double> probs,
                 std::span<std::int64_t> out) {
    assert(probs.size() == out.size());
    const std::size_t k = probs.size();
    // Suffix sums keep the conditional probabilities well normalized.
    std::vector<double> suffix(k + 1, 0.0);
    for (std::size_t i = k; i-- > 0;) suffix[i] = suffix[i + 1] + probs[i];
    std::int64_t remaining = trials;
    for (std::size_t i = 0; i < k; ++i) {
        if (remaining == 0) {
            out[i] = 0;
            continue;
        }
        if (i + 1 == k || suffix[i + 1] <= 0.0) {
            out[i] = remaining;
            remaining = 0;
            continue;
        }
        double cond = probs[i] / suffix[i];
        if (cond < 0.0) cond = 0.0;
        if (cond > 1.0) cond = 1.0;
        out[i] = rng.binomial(remaining, cond);
        remaining -= out[i];
    }
}

std::vector<double> binomial_pmf(int count, double p) {
    std::vector<double> pmf(static_cast<std::size_t>(count) + 1, 0.0);
    if (p <= 0.0) {
        pmf[0] = 1.0;
        return pmf;
    }
    if (p >= 1.0) {
        pmf[static_cast<std::size_t>(count)] = 1.0;
        return pmf;
    }
    pmf[0] = std::exp(static_cast<double>(count) * std::log1p(-p));
    const double ratio = p / (1.0 - p);
    for (int k = 0; k < count; ++k) {
        pmf[static_cast<std::size_t>(k) + 1] =
            pmf[static_cast<std::size_t>(k)] * ratio * static_cast<double>(count - k) /
            static_cast<double>(k + 1);
    }
    return pmf;
}

}  // namespace covert
