#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "covert/adversary.hpp"
#include "covert/errors.hpp"
#include "covert/rng.hpp"
#include "support.hpp"

using namespace covert;

TEST_CASE("llr_statistic: formula spot checks") {
    SUBCASE("zeta = 0 gives L = 0 for any record") {
        FrameClickCounts c = FrameClickCounts::zero(8);
        c.histogram = {3, 4, 1, 0, 0, 2, 0, 0, 1};
        CHECK(llr_statistic(c, 0.0, 0.7, 0.01) == 0.0);
    }
    SUBCASE("single empty frame") {
        FrameClickCounts c = FrameClickCounts::zero(4);
        c.add_frame(0);
        const double zeta = 0.3, p_r = 0.6, p_d = 0.05;
        CHECK(llr_statistic(c, zeta, p_r, p_d) ==
              doctest::Approx(std::log(1.0 - zeta * p_r)).epsilon(1e-12));
    }
    SUBCASE("one frame, y = Q = 4 (scalar example)") {
        FrameClickCounts c = FrameClickCounts::zero(4);
        c.add_frame(4);
        // log(1 + 0.25 (4/0.4 - 1)) = log(3.25)
        CHECK(llr_statistic(c, 0.5, 0.5, 0.1) ==
              doctest::Approx(std::log(3.25)).epsilon(1e-12));
    }
    SUBCASE("p_D_w = 0 is refused with the dedicated code") {
        FrameClickCounts c = FrameClickCounts::zero(4);
        c.add_frame(1);
        try {
            llr_statistic(c, 0.5, 0.5, 0.0);
            FAIL("expected throw");
        } catch (const ValidationError& e) {
            CHECK(e.code() == Errc::llr_needs_dark_counts);
        }
    }
}

TEST_CASE("histogram-form LLR equals the per-frame sum") {
    Rng rng = Rng::from_seed(42);
    for (int rep = 0; rep < 100; ++rep) {
        const int Q = 2 + static_cast<int>(rng.below(31));
        const double zeta = rng.uniform();
        const double p_r = rng.uniform();
        const double p_d = 1e-4 + rng.uniform() * 0.5;
        std::vector<int> counts(200);
        for (auto& y : counts) y = static_cast<int>(rng.below(static_cast<std::uint64_t>(Q + 1)));
        const FrameClickCounts hist = FrameClickCounts::from_counts(counts, Q);

        double per_frame = 0.0;
        for (int y : counts) {
            per_frame += std::log1p(zeta * p_r * (y / (Q * p_d) - 1.0));
        }
        CHECK(llr_statistic(hist, zeta, p_r, p_d) ==
              doctest::Approx(per_frame).epsilon(1e-12));
    }
}

TEST_CASE("LLR additivity over disjoint mode ranges") {
    Rng rng = Rng::from_seed(43);
    for (int rep = 0; rep < 100; ++rep) {
        const int Q = 16;
        const double zeta = rng.uniform(), p_r = rng.uniform(), p_d = 0.01 + rng.uniform() * 0.4;
        FrameClickCounts a = FrameClickCounts::zero(Q);
        FrameClickCounts b = FrameClickCounts::zero(Q);
        FrameClickCounts merged = FrameClickCounts::zero(Q);
        for (int k = 0; k <= Q; ++k) {
            a.histogram[static_cast<std::size_t>(k)] = static_cast<std::int64_t>(rng.below(50));
            b.histogram[static_cast<std::size_t>(k)] = static_cast<std::int64_t>(rng.below(50));
            merged.histogram[static_cast<std::size_t>(k)] =
                a.histogram[static_cast<std::size_t>(k)] + b.histogram[static_cast<std::size_t>(k)];
        }
        const double sum = llr_statistic(a, zeta, p_r, p_d) + llr_statistic(b, zeta, p_r, p_d);
        CHECK(llr_statistic(merged, zeta, p_r, p_d) == doctest::Approx(sum).epsilon(1e-12));
    }
}

TEST_CASE("spd_click_detector accuses exactly on any click") {
    FrameClickCounts quiet = FrameClickCounts::zero(32);
    quiet.histogram[0] = 1000;
    CHECK_FALSE(spd_click_detector(quiet));
    quiet.histogram[3] = 1;
    CHECK(spd_click_detector(quiet));
}

TEST_CASE("empirical_pe: separation, ties, and the documented example") {
    SUBCASE("perfect separation") {
        const std::vector<double> l0 = {1, 2, 3}, l1 = {4, 5, 6};
        const PeEstimate pe = empirical_pe(l0, l1);
        CHECK(pe.pe_hat == doctest::Approx(0.0));
    }
    SUBCASE("identical samples") {
        const std::vector<double> l = {0.5, 1.5, 2.5, 2.5};
        const PeEstimate pe = empirical_pe(l, l);
        CHECK(pe.pe_hat == doctest::Approx(0.5));
    }
    SUBCASE("interleaved example attains 0.25 at S = 1") {
        const std::vector<double> l0 = {1, 3}, l1 = {2, 4};
        const PeEstimate pe = empirical_pe(l0, l1);
        CHECK(pe.pe_hat == doctest::Approx(0.25));
        CHECK((pe.threshold == doctest::Approx(1.0) || pe.threshold == doctest::Approx(3.0)));
    }
    SUBCASE("empty inputs are rejected") {
        const std::vector<double> l0 = {1.0}, empty;
        CHECK_THROWS_AS(empirical_pe(l0, empty), ValidationError);
        CHECK_THROWS_AS(empirical_pe(empty, l0), ValidationError);
    }
}

TEST_CASE("empirical_pe is invariant under strictly increasing transforms") {
    Rng rng = Rng::from_seed(7);
    for (int rep = 0; rep < 50; ++rep) {
        std::vector<double> l0(40), l1(60);
        for (auto& v : l0) v = rng.uniform() * 10.0 - 5.0;
        for (auto& v : l1) v = rng.uniform() * 10.0 - 3.0;
        const double base = empirical_pe(l0, l1).pe_hat;
        const auto warp = [](double x) { return std::atan(0.3 * x) + x * 0.001; };
        for (auto& v : l0) v = warp(v);
        for (auto& v : l1) v = warp(v);
        CHECK(empirical_pe(l0, l1).pe_hat == doctest::Approx(base).epsilon(1e-15));
    }
}

TEST_CASE("empirical_pe never exceeds 1/2 and hits 1/2 on equal multisets") {
    Rng rng = Rng::from_seed(8);
    for (int rep = 0; rep < 100; ++rep) {
        std::vector<double> l0(30), l1(30);
        for (auto& v : l0) v = std::floor(rng.uniform() * 8.0);
        for (auto& v : l1) v = std::floor(rng.uniform() * 8.0);
        CHECK(empirical_pe(l0, l1).pe_hat <= 0.5 + 1e-15);
    }
}

TEST_CASE("gaussian crossing threshold: degeneracies and plug-back residual") {
    SUBCASE("equal variances give the midpoint") {
        CHECK(gaussian_crossing_threshold(2.0, 1.5, 6.0, 1.5) == doctest::Approx(4.0));
    }
    SUBCASE("identical Gaussians give pe 1/2") {
        // Through the public gaussian_pe path with zeta = 0.
        PpmSession session{3200, 32, 0.0, 31, 15};
        ChannelParams params;
        params.p_D_w = 1e-4;
        params.nbar_det_w = 0.03;
        const GaussianPe g = gaussian_pe(session, params);
        CHECK(g.pe_tilde == doctest::Approx(0.5));
        CHECK(g.s_star == doctest::Approx(g.mu0));
    }
    SUBCASE("plug-back residual below 1e-9 on random instances") {
        Rng rng = Rng::from_seed(11);
        for (int rep = 0; rep < 300; ++rep) {
            const double mu0 = rng.uniform() * 100.0;
            const double mu1 = mu0 + rng.uniform() * 20.0 + 1e-3;
            const double s0 = 0.5 + rng.uniform() * 30.0;
            const double s1 = s0 * (1.0 + rng.uniform());
            const double s = gaussian_crossing_threshold(mu0, s0, mu1, s1);
            const double lhs = (s - mu0) * (s - mu0) / s0 - std::log(s1 / s0);
            const double rhs = (s - mu1) * (s - mu1) / s1;
            CHECK(std::fabs(lhs - rhs) < 1e-9);
        }
    }
}

TEST_CASE("gaussian_pe rejects a dark-count-free adversary") {
    PpmSession session{3200, 32, 0.01, 31, 15};
    ChannelParams params;
    params.p_D_w = 0.0;
    params.nbar_det_w = 0.03;
    try {
        gaussian_pe(session, params);
        FAIL("expected throw");
    } catch (const ValidationError& e) {
        CHECK(e.code() == Errc::degenerate_gaussian);
    }
}

TEST_CASE("gaussian_pe is nonincreasing in zeta") {
    ChannelParams params;
    params.p_D_w = 9.15e-5;
    params.nbar_det_w = 0.036;
    double last = 0.51;
    for (double zeta : {0.0, 0.001, 0.002, 0.004, 0.008, 0.016, 0.032}) {
        PpmSession session{320000, 32, zeta, 31, 15};
        const double pe = gaussian_pe(session, params).pe_tilde;
        CHECK(pe <= last + 1e-12);
        last = pe;
    }
}

TEST_CASE("dkw_halfwidth values and scaling") {
    // Error bars for 100-experiment batches at 95% confidence.
    CHECK(dkw_halfwidth(100, 0.05) == doctest::Approx(0.1358).epsilon(0.0037));
    CHECK(std::fabs(dkw_halfwidth(100, 0.05) - 0.13581) < 5e-5);
    // Quadrupling m halves xi.
    CHECK(dkw_halfwidth(400, 0.05) == doctest::Approx(dkw_halfwidth(100, 0.05) / 2.0));
    // Boundary rejections.
    CHECK_THROWS_AS(dkw_halfwidth(0, 0.05), ValidationError);
    CHECK_THROWS_AS(dkw_halfwidth(100, 2.0), ValidationError);
    CHECK_THROWS_AS(dkw_halfwidth(100, 0.0), ValidationError);
}

TEST_CASE("normal_cdf sanity") {
    CHECK(normal_cdf(0.0, 0.0, 1.0) == doctest::Approx(0.5));
    CHECK(normal_cdf(1.96, 0.0, 1.0) == doctest::Approx(0.975).epsilon(1e-3));
    CHECK(normal_cdf(-6.0, 0.0, 1.0) < 1e-8);
}
