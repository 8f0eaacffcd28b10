#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "dmsim/equilibrium.hpp"
#include "dmsim/stats.hpp"

using namespace dmsim;

namespace {

std::vector<Expectation> stances(int buyers, int sellers) {
    std::vector<Expectation> out;
    for (int i = 0; i < buyers; ++i) out.push_back(Expectation::buy());
    for (int i = 0; i < sellers; ++i) out.push_back(Expectation::sell());
    return out;
}

EquilibriumConfig desk_config() {
    EquilibriumConfig cfg;
    cfg.n_agents = 101;
    cfg.initial_buyers = 51;
    cfg.steps = 1'000;
    cfg.params.alpha = 0.5;
    cfg.params.beta = 0.5;
    cfg.initial_price = 100.0;
    cfg.seed = 12345;
    return cfg;
}

}  // namespace

TEST_CASE("aggregate_return is the mean stance") {
    CHECK(aggregate_return(stances(101, 0)) == 1.0);
    CHECK(aggregate_return(stances(51, 50)) == Catch::Approx(1.0 / 101.0).epsilon(1e-15));
    CHECK(aggregate_return(stances(50, 51)) == Catch::Approx(-1.0 / 101.0).epsilon(1e-15));
    CHECK_THROWS_AS(aggregate_return(stances(0, 0)), std::invalid_argument);
    CHECK_THROWS_AS(aggregate_return(stances(1, 1)), std::invalid_argument);
}

TEST_CASE("step_market moves the price by the mean stance first") {
    DecisionParams params;
    params.alpha = 0.5;
    params.beta = 0.5;
    std::vector<TraderState> states;
    for (int i = 0; i < 101; ++i) {
        const Expectation m = i < 51 ? Expectation::buy() : Expectation::sell();
        states.push_back(TraderState{m, reset_estimate(100.0, m), 0});
    }
    Rng rng(1);
    const MarketStep step = step_market(states, 100.0, params, rng);
    CHECK_FALSE(step.collapsed);
    CHECK(step.new_price == Catch::Approx(100.0 * (1.0 + 1.0 / 101.0)).epsilon(1e-15));
}

TEST_CASE("step_market reports collapse on total sell consensus") {
    DecisionParams params;
    std::vector<TraderState> states;
    for (int i = 0; i < 5; ++i)
        states.push_back(TraderState{Expectation::sell(), 0.0, 0});
    Rng rng(1);
    const MarketStep step = step_market(states, 100.0, params, rng);
    CHECK(step.collapsed);
}

TEST_CASE("run_equilibrium basics") {
    SECTION("zero steps yields only the initial price") {
        EquilibriumConfig cfg = desk_config();
        cfg.steps = 0;
        const PriceSeries s = run_equilibrium(cfg);
        CHECK(s.values == std::vector<double>{100.0});
        CHECK_FALSE(s.collapsed);
    }

    SECTION("beta = 0 with a buyer surplus grows at the closed-form rate") {
        EquilibriumConfig cfg = desk_config();
        cfg.params.beta = 0.0;
        cfg.steps = 5'000;
        const PriceSeries s = run_equilibrium(cfg);
        REQUIRE(s.values.size() == 5'001);
        const double expected =
            std::log(100.0) + 5'000 * std::log1p(1.0 / 101.0);  // ln S0 + t ln(1 + 1/101)
        CHECK(std::log(s.values.back()) == Catch::Approx(expected).epsilon(1e-12));
    }

    SECTION("alpha = 1 gives a constant return forever") {
        EquilibriumConfig cfg = desk_config();
        cfg.params.alpha = 1.0;
        cfg.steps = 500;
        const PriceSeries s = run_equilibrium(cfg);
        const ReturnSeries rs = make_returns(s, 1);
        for (double r : rs.values)
            CHECK(r == Catch::Approx(1.0 / 101.0).epsilon(1e-12));
    }

    SECTION("same config is bit-identical") {
        const EquilibriumConfig cfg = desk_config();
        const PriceSeries a = run_equilibrium(cfg);
        const PriceSeries b = run_equilibrium(cfg);
        REQUIRE(a.values.size() == b.values.size());
        for (std::size_t i = 0; i < a.values.size(); ++i) CHECK(a.values[i] == b.values[i]);
    }

    SECTION("one-step returns lie in [-1, 1] and are never zero; prices stay positive") {
        EquilibriumConfig cfg = desk_config();
        cfg.steps = 3'000;
        const PriceSeries s = run_equilibrium(cfg);
        for (double v : s.values) CHECK(v > 0.0);
        for (std::size_t i = 0; i + 1 < s.values.size(); ++i) {
            const double r = (s.values[i + 1] - s.values[i]) / s.values[i];
            CHECK(r >= -1.0);
            CHECK(r <= 1.0);
            CHECK(r != 0.0);
        }
    }

    SECTION("a market of sellers collapses immediately") {
        EquilibriumConfig cfg = desk_config();
        cfg.initial_buyers = 0;
        const PriceSeries s = run_equilibrium(cfg);
        CHECK(s.collapsed);
        CHECK(s.values == std::vector<double>{100.0});
        const EquilibriumSummary sum = run_equilibrium_summary(cfg);
        CHECK(sum.collapsed);
        CHECK(std::isinf(sum.terminal_log_price));
        CHECK(sum.terminal_log_price < 0.0);
    }

    SECTION("summary agrees with the stored series") {
        EquilibriumConfig cfg = desk_config();
        cfg.steps = 2'000;
        const PriceSeries s = run_equilibrium(cfg);
        const EquilibriumSummary sum = run_equilibrium_summary(cfg);
        CHECK(sum.terminal_log_price ==
              Catch::Approx(std::log(s.values.back())).epsilon(1e-10));
    }

    SECTION("strong drift does not overflow the log-domain summary") {
        EquilibriumConfig cfg = desk_config();
        cfg.params.alpha = 1.0;  // frozen stances: relentless exponential growth
        cfg.steps = 200'000;
        const EquilibriumSummary sum = run_equilibrium_summary(cfg);
        CHECK(std::isfinite(sum.terminal_log_price));
        CHECK(sum.terminal_log_price ==
              Catch::Approx(std::log(100.0) + 200'000 * std::log1p(1.0 / 101.0)).epsilon(1e-9));
    }

    SECTION("config validation") {
        EquilibriumConfig cfg = desk_config();
        cfg.n_agents = 100;
        CHECK_THROWS_AS(run_equilibrium(cfg), std::invalid_argument);
        cfg = desk_config();
        cfg.initial_buyers = 102;
        CHECK_THROWS_AS(run_equilibrium(cfg), std::invalid_argument);
    }
}

TEST_CASE("no-drift regime stays near the starting price at desk scale") {
    EquilibriumConfig cfg = desk_config();
    cfg.steps = 10'000;
    std::vector<double> logs;
    for (int rep = 0; rep < 5; ++rep) {
        cfg.seed = derive_seed(99, 0, static_cast<std::uint64_t>(rep));
        logs.push_back(run_equilibrium_summary(cfg).terminal_log_price);
    }
    const double cell = log_mean_from_logs(logs) - std::log(100.0);
    CHECK(std::abs(cell) < 3.0);  // wide band: regime check, not a value check
}

TEST_CASE("log_mean_from_logs") {
    SECTION("single value passes through") {
        CHECK(log_mean_from_logs(std::vector<double>{2.5}) == Catch::Approx(2.5));
    }
    SECTION("matches direct arithmetic in a safe range") {
        const std::vector<double> logs{std::log(2.0), std::log(6.0)};
        CHECK(log_mean_from_logs(logs) == Catch::Approx(std::log(4.0)).epsilon(1e-12));
    }
    SECTION("collapsed entries count toward the denominator") {
        const double neg_inf = -std::numeric_limits<double>::infinity();
        const std::vector<double> logs{std::log(8.0), neg_inf};
        CHECK(log_mean_from_logs(logs) == Catch::Approx(std::log(4.0)).epsilon(1e-12));
        CHECK(std::isinf(log_mean_from_logs(std::vector<double>{neg_inf, neg_inf})));
    }
}

TEST_CASE("sweep_phase_diagram") {
    SECTION("a 1x1 grid reproduces the direct run") {
        EquilibriumConfig base = desk_config();
        base.steps = 500;
        base.seed = 7;
        const std::vector<double> alpha{0.5}, beta{0.5};
        const SweepResult sweep = sweep_phase_diagram(alpha, beta, 1, base, 1);
        EquilibriumConfig direct = base;
        direct.params.alpha = 0.5;
        direct.params.beta = 0.5;
        direct.seed = derive_seed(7, 0, 0);
        const PriceSeries s = run_equilibrium(direct);
        CHECK(sweep.cells[0].mean_log_terminal_price ==
              Catch::Approx(std::log(s.values.back())).epsilon(1e-10));
        CHECK(sweep.cells[0].n_seeds == 1);
    }

    SECTION("parallel equals sequential cell for cell") {
        EquilibriumConfig base = desk_config();
        base.steps = 300;
        base.seed = 21;
        const std::vector<double> alpha{0.1, 0.5, 0.9};
        const std::vector<double> beta{0.2, 0.8};
        const SweepResult seq = sweep_phase_diagram(alpha, beta, 3, base, 1);
        const SweepResult par = sweep_phase_diagram(alpha, beta, 3, base, 4);
        REQUIRE(seq.cells.size() == par.cells.size());
        for (std::size_t i = 0; i < seq.cells.size(); ++i) {
            CHECK(seq.cells[i].mean_log_terminal_price ==
                  par.cells[i].mean_log_terminal_price);
            CHECK(seq.cells[i].n_collapsed == par.cells[i].n_collapsed);
        }
    }

    SECTION("input validation") {
        const EquilibriumConfig base = desk_config();
        CHECK_THROWS_AS(
            sweep_phase_diagram(std::vector<double>{}, std::vector<double>{0.5}, 1, base),
            std::invalid_argument);
        CHECK_THROWS_AS(sweep_phase_diagram(std::vector<double>{0.5},
                                            std::vector<double>{0.5}, 0, base),
                        std::invalid_argument);
    }
}
