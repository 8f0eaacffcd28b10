#include <catch2/catch_amalgamated.hpp>

#include "dmsim/config.hpp"

using namespace dmsim;

TEST_CASE("empty config text yields all documented defaults") {
    const Config cfg = parse_config_text("");
    CHECK(cfg.orderbook.decision_cfg.alpha_abm == 1e-4);
    CHECK(cfg.orderbook.decision_cfg.beta == 0.5);
    CHECK(cfg.orderbook.decision_cfg.count == 200);
    CHECK(cfg.orderbook.random_cfg.count == 400);
    CHECK(cfg.orderbook.random_cfg.activation_prob == 1.5e-3);
    CHECK(cfg.orderbook.initial_price == 100.0);
    CHECK(cfg.equilibrium.n_agents == 101);
    CHECK(cfg.equilibrium.initial_buyers == 51);
    CHECK(cfg.equilibrium.params.alpha == 0.5);
    CHECK(cfg.equilibrium.params.beta == 0.5);
    CHECK(cfg.sweep.alpha.size() == 20);
    CHECK(cfg.sweep.alpha.front() == 0.05);
    CHECK(cfg.sweep.alpha.back() == 1.0);
    CHECK(cfg.sweep.alpha_abm.size() == 5);
    CHECK(cfg.sweep.alpha_abm.front() == Catch::Approx(1e-6));
    CHECK(cfg.sweep.alpha_abm.back() == Catch::Approx(1e-2));
}

TEST_CASE("comments, blank lines and assignments parse") {
    const Config cfg = parse_config_text(
        "# a comment\n"
        "\n"
        "decision.beta = 0.25\n"
        "random.lifetime = 900\n"
        "orderbook.horizon = 123456\n");
    CHECK(cfg.orderbook.decision_cfg.beta == 0.25);
    CHECK(cfg.orderbook.random_cfg.lifetime == 900);
    CHECK(cfg.orderbook.horizon == 123456);
}

TEST_CASE("errors carry the key and the line number") {
    SECTION("out-of-range value") {
        try {
            (void)parse_config_text("decision.alpha_abm = 2\n");
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            const std::string msg = e.what();
            CHECK(msg.find("decision.alpha_abm") != std::string::npos);
            CHECK(msg.find(":1") != std::string::npos);
        }
    }
    SECTION("unknown key") {
        try {
            (void)parse_config_text("\n\nnope.key = 1\n");
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            const std::string msg = e.what();
            CHECK(msg.find("nope.key") != std::string::npos);
            CHECK(msg.find(":3") != std::string::npos);
        }
    }
    SECTION("malformed line") {
        CHECK_THROWS_AS(parse_config_text("decision.beta 0.5\n"), ConfigError);
    }
    SECTION("garbage value") {
        CHECK_THROWS_AS(parse_config_text("decision.beta = fast\n"), ConfigError);
        CHECK_THROWS_AS(parse_config_text("decision.count = 3.7\n"), ConfigError);
    }
    SECTION("missing file") {
        CHECK_THROWS_AS(parse_config("/nonexistent/path/sim.cfg"), ConfigError);
    }
}

TEST_CASE("overrides supersede file values") {
    Config cfg = parse_config_text("decision.beta = 0.9\n");
    apply_override(cfg, "decision.beta=0.3");
    CHECK(cfg.orderbook.decision_cfg.beta == 0.3);
    CHECK_THROWS_AS(apply_override(cfg, "decision.beta"), ConfigError);
    CHECK_THROWS_AS(apply_override(cfg, "who.knows=1"), ConfigError);
}

TEST_CASE("emit/parse round trip preserves every key") {
    Config cfg;
    cfg.seed = 987654321;
    cfg.threads = 3;
    cfg.equilibrium.params.alpha = 0.123456789012345;
    cfg.orderbook.decision_cfg.alpha_abm = 7.25e-5;
    cfg.orderbook.random_cfg.price_stddev = 0.037;
    cfg.sweep.alpha = {0.1, 0.2, 0.35};
    cfg.returns.log_returns = true;

    const std::string text = emit_config(cfg);
    const Config back = parse_config_text(text);
    CHECK(emit_config(back) == text);
    CHECK(back.equilibrium.params.alpha == cfg.equilibrium.params.alpha);
    CHECK(back.orderbook.decision_cfg.alpha_abm == cfg.orderbook.decision_cfg.alpha_abm);
    CHECK(back.sweep.alpha == cfg.sweep.alpha);
}

TEST_CASE("grid syntax") {
    SECTION("linear range start:stop:count") {
        const auto g = detail::parse_grid("0.05:1.0:20", false);
        REQUIRE(g.size() == 20);
        CHECK(g.front() == 0.05);
        CHECK(g.back() == 1.0);
        CHECK(g[1] == Catch::Approx(0.05 + 0.95 / 19.0));
    }
    SECTION("geometric range") {
        const auto g = detail::parse_grid("1e-6:1e-2:5", true);
        REQUIRE(g.size() == 5);
        CHECK(g[0] == Catch::Approx(1e-6));
        CHECK(g[1] == Catch::Approx(1e-5));
        CHECK(g[4] == Catch::Approx(1e-2));
    }
    SECTION("comma list") {
        const auto g = detail::parse_grid("0.1, 0.5, 0.9", false);
        CHECK(g == std::vector<double>{0.1, 0.5, 0.9});
    }
    SECTION("bad ranges") {
        CHECK_THROWS(detail::parse_grid("0.1:0.5", false));
        CHECK_THROWS(detail::parse_grid("", false));
    }
}
