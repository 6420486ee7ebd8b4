#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace covert {

// Self-contained xoshiro256++ generator with counter-based stream derivation.
// Standard-library distributions are implementation-defined, so all sampling
// used by the simulator lives here; two runs with the same (master seed,
// trial index) produce identical draws no matter how trials are scheduled.
class Rng {
  public:
    static Rng from_seed(std::uint64_t seed);

    // Independent stream for (master seed, trial index, substream). Pure
    // function of its arguments.
    static Rng stream(std::uint64_t master, std::uint64_t trial, std::uint64_t substream);

    std::uint64_t next();

    // Uniform double in [0, 1) with 53 random bits.
    double uniform();

    // Uniform integer in [0, bound), bound >= 1. Unbiased (rejection).
    std::uint64_t below(std::uint64_t bound);

    bool bernoulli(double p);

    // Exact binomial sampling: inversion for small means, transformed
    // rejection (BTRS) otherwise.
    std::int64_t binomial(std::int64_t n, double p);

    // Exact Poisson sampling via Knuth's product method, chunked so the
    // intermediate product never underflows.
    std::int64_t poisson(double lambda);

  private:
    explicit Rng(std::uint64_t s0, std::uint64_t s1, std::uint64_t s2, std::uint64_t s3);
    std::int64_t binomial_inversion(std::int64_t n, double p);
    std::int64_t binomial_btrs(std::int64_t n, double p);

    std::uint64_t s_[4];
};

// Multinomial draw over `probs` (must sum to ~1): out[i] counts of class i.
// Sequential conditional binomials; O(classes) binomial draws.
void multinomial(Rng& rng, std::int64_t trials, std::span<const double> probs,
                 std::span<std::int64_t> out);

// Binomial(count, p) pmf table for k = 0..count, by stable recurrence.
std::vector<double> binomial_pmf(int count, double p);

}  // namespace covert
