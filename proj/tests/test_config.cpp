#include <doctest.h>

#include "common.hpp"
#include "lorentz/config.hpp"
#include "lorentz/errors.hpp"

using namespace lorentz;

TEST_CASE("parse a full config") {
    const std::string text = R"(
# reference medium
[medium]
eps0 = 1
mu0 = 2.5e0   ; trailing comment

[electric.2]
omega = 3
Omega = 1
alpha = 0.3

[electric.1]
omega = 1
Omega = 1

[magnetic.1]
Omega = 1
omega = 2
alpha = 0.2

[run]
k = 1e3
data = optimal
)";
    auto cfg = parse_config(text);
    REQUIRE(cfg.medium.has_value());
    const auto& m = *cfg.medium;
    CHECK(m.mu0() == 2.5);
    REQUIRE(m.Ne() == 2);
    CHECK(m.electric()[0].omega == 1);
    CHECK(m.electric()[0].alpha == 0);
    CHECK(m.electric()[1].alpha == 0.3);
    CHECK(m.magnetic()[0].omega == 2);
    CHECK(cfg.number("k", 0) == 1000);
    CHECK(cfg.text("data", "") == "optimal");
    CHECK(cfg.integer("samples", 7) == 7);
    CHECK_FALSE(cfg.has("samples"));
}

TEST_CASE("run-only config has no medium") {
    auto cfg = parse_config("[run]\nsamples = 40\n");
    CHECK_FALSE(cfg.medium.has_value());
    CHECK(cfg.integer("samples", 0) == 40);
    cfg.run["samples"] = "4.5";
    CHECK_THROWS_AS(cfg.integer("samples", 0), ConfigError);
}

TEST_CASE("config errors") {
    const char* bad[] = {
        "[medium]\neps0 = 1\n",                                      // mu0 missing
        "[medium]\neps0 = 1\nmu0 = 1\n[electric.1]\nomega = 1\n",    // Omega missing
        "[medium]\neps0 = 1\nmu0 = 1\neps0 = 2\n",                   // duplicate key
        "[medium]\neps0 = 1\nmu0 = 1\n[electric.1]\nomega=1\nOmega=1\n[electric.1]\nomega=2\nOmega=1\n",
        "[medium]\neps0 = 1\nmu0 = 1\nc = 3\n",                      // unknown key
        "[vacuum]\n",                                                // unknown section
        "[electric.x]\n",                                            // bad index
        "[run\n",                                                    // unterminated header
        "k = 1\n",                                                   // outside sections
        "[run]\njust text\n",                                        // no '='
        "[medium]\neps0 = one\nmu0 = 1\n",                           // not a number
        "[medium]\neps0 = 1\nmu0 = 1\n[electric.1]\nomega=1\nOmega=1\nalpha=-1\n",
        "[medium]\neps0 = 1\nmu0 = 1\n",                             // empty medium
        "[run]\nk = 1\nk = 2\n",
    };
    for (const char* t : bad) CHECK_THROWS_AS(parse_config(t), ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/cfg.ini"), ConfigError);
}

TEST_CASE("number parsing") {
    CHECK(parse_number(" 1.5 ") == 1.5);
    CHECK(parse_number("+2e-3") == 2e-3);
    CHECK(parse_number("-4") == -4);
    CHECK_THROWS_AS(parse_number(""), ConfigError);
    CHECK_THROWS_AS(parse_number("1.5x"), ConfigError);
    CHECK_THROWS_AS(parse_number("1 2"), ConfigError);
}

TEST_CASE("medium round trip") {
    std::mt19937_64 g(17);
    for (int i = 0; i < 20; ++i) {
        auto m = testing_media::random_medium(g, true);
        auto cfg = parse_config(medium_to_config(m));
        REQUIRE(cfg.medium.has_value());
        const auto& r = *cfg.medium;
        CHECK(r.eps0() == m.eps0());
        CHECK(r.mu0() == m.mu0());
        REQUIRE(r.Ne() == m.Ne());
        REQUIRE(r.Nm() == m.Nm());
        for (int j = 0; j < m.Ne(); ++j) {
            CHECK(r.electric()[j].Omega == m.electric()[j].Omega);
            CHECK(r.electric()[j].omega == m.electric()[j].omega);
            CHECK(r.electric()[j].alpha == m.electric()[j].alpha);
        }
        for (int l = 0; l < m.Nm(); ++l) CHECK(r.magnetic()[l].omega == m.magnetic()[l].omega);
    }
}
