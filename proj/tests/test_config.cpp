#include <doctest.h>

#include "covert/config.hpp"
#include "covert/errors.hpp"

using namespace covert;

TEST_CASE("config parsing: schema, comments, derivation of eta_w and rs_n") {
    const char* text =
        "# careful Alice, Table-1 observed values\n"
        "eta_b = 0.97\n"
        "nbar = 5\n"
        "p_D_w = 9.15e-5   # per-mode dark click\n"
        "nbar_det_w = 0.036\n"
        "p_D_b = 2.99e-6\n"
        "nbar_det_b = 1.52\n"
        "n = 2048000\n"
        "Q = 32\n"
        "zeta = 0.001\n"
        "rs_k = 15\n"
        "seed = 7\n"
        "trials = 1000\n";
    const RunConfig cfg = parse_config_text(text);
    CHECK(cfg.params.eta_b == 0.97);
    CHECK(cfg.params.eta_w == doctest::Approx(0.03));
    CHECK(cfg.params.p_D_w == 9.15e-5);
    CHECK(cfg.session.n == 2048000);
    CHECK(cfg.session.Q == 32);
    CHECK(cfg.session.rs_n == 31);
    CHECK(cfg.session.rs_k == 15);
    CHECK(cfg.seed == 7);
    CHECK(cfg.trials == 1000);
}

TEST_CASE("config errors name the offending key") {
    CHECK_THROWS_WITH_AS(parse_config_text("bogus_key = 1\n"),
                         doctest::Contains("bogus_key"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config_text("nbar = abc\n"),
                         doctest::Contains("nbar"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config_text("n = 12.5\n"),
                         doctest::Contains("integer"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config_text("Q = 32\nQ = 16\n"),
                         doctest::Contains("duplicate"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config_text("just a line\n"),
                         doctest::Contains("key=value"), ConfigError);
}

TEST_CASE("overrides reuse the schema") {
    RunConfig cfg = parse_config_text("Q = 32\n");
    apply_config_override(cfg, "p_D_w=1e-4");
    CHECK(cfg.params.p_D_w == 1e-4);
    CHECK_THROWS_AS(apply_config_override(cfg, "nope=3"), ConfigError);
    CHECK_THROWS_AS(apply_config_override(cfg, "p_D_w"), ConfigError);
}
