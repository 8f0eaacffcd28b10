#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "dmsim/decision.hpp"
#include "dmsim/order_book.hpp"
#include "dmsim/random.hpp"

namespace dmsim {

/// Liquidity providers: random limit orders around the best same-side
/// quote, with a finite lifetime. Defaults reproduce about 1500 orders per
/// trader over 10^6 seconds; stddev and lifetime are calibrated so that the
/// provider-only market has near-normal returns while deeper price levels
/// keep their gaps.
struct RandomTraderConfig {
    int count = 400;
    double activation_prob = 1.5e-3;  ///< per trader, per second
    double price_stddev = 0.4;        ///< currency units around the reference quote
    std::int64_t order_volume = 1;
    std::int64_t lifetime = 200;      ///< seconds

    void validate() const {
        if (count < 0) throw std::invalid_argument("RandomTraderConfig: count must be >= 0");
        if (!(activation_prob > 0.0 && activation_prob <= 1.0))
            throw std::invalid_argument("RandomTraderConfig: activation_prob must lie in (0, 1]");
        if (!(price_stddev > 0.0))
            throw std::invalid_argument("RandomTraderConfig: price_stddev must be positive");
        if (order_volume < 1)
            throw std::invalid_argument("RandomTraderConfig: order_volume must be >= 1");
        if (lifetime < 1)
            throw std::invalid_argument("RandomTraderConfig: lifetime must be >= 1");
    }
};

/// Decision-rule traders: market orders only, side given by the current
/// stance. The adjustment rate is per second of elapsed time, applied in
/// closed form over the gap since the trader last acted.
struct DecisionTraderConfig {
    int count = 200;
    double activation_prob = 1.5e-3;  ///< per trader, per second
    double alpha_abm = 1e-4;
    double beta = 0.5;
    std::int64_t order_volume = 3;    ///< calibrated; unit orders cannot dent the book

    void validate() const {
        if (count < 0) throw std::invalid_argument("DecisionTraderConfig: count must be >= 0");
        if (!(activation_prob > 0.0 && activation_prob <= 1.0))
            throw std::invalid_argument("DecisionTraderConfig: activation_prob must lie in (0, 1]");
        if (!(alpha_abm >= 0.0 && alpha_abm <= 1.0))
            throw std::invalid_argument("DecisionTraderConfig: alpha_abm must lie in [0, 1]");
        if (!(beta >= 0.0))
            throw std::invalid_argument("DecisionTraderConfig: beta must be >= 0");
        if (order_volume < 1)
            throw std::invalid_argument("DecisionTraderConfig: order_volume must be >= 1");
    }
};

/// A freshly drawn random-trader order plus how many price draws had to be
/// repeated because they came out non-positive.
struct RandomTraderAction {
    Order order;
    int redraws = 0;
};

/// Draws one liquidity-provider limit order: a fair coin for the side, then
/// a normal price centered on the best same-side quote (falling back to the
/// last trade, then to `fallback_price`). Non-positive price draws are
/// repeated. Draw order is fixed: side, then price.
[[nodiscard]] inline RandomTraderAction random_trader_act(const Book& book,
                                                          const RandomTraderConfig& cfg,
                                                          Rng& rng, std::int64_t now,
                                                          double fallback_price,
                                                          OrderId id, AgentId owner = -1) {
    if (!(fallback_price > 0.0))
        throw std::invalid_argument("random_trader_act: fallback_price must be positive");
    const Side side = uniform01(rng) < 0.5 ? Side::buy : Side::sell;
    const auto quote = side == Side::buy ? book.best_bid() : book.best_ask();
    double reference = fallback_price;
    if (quote) {
        reference = book.to_price(*quote);
    } else if (book.last_trade_price()) {
        reference = *book.last_trade_price();
    }

    RandomTraderAction action;
    Tick tick = 0;
    do {
        const double drawn = normal(rng, reference, cfg.price_stddev);
        tick = book.to_tick(drawn);
        if (tick < 1) ++action.redraws;
    } while (tick < 1);
    action.order = make_limit_order(id, side, tick, cfg.order_volume, now, cfg.lifetime, owner);
    return action;
}

/// Catches a decision trader up over the seconds it skipped and emits the
/// market order its stance dictates. The estimate evolves once per skipped
/// second against the current price, and the flip criterion is evaluated at
/// every one of those seconds, so a trader left on the wrong side of the
/// market for a long stretch flips almost surely no matter how small beta
/// is. A single uniform draw decides against the accumulated probability,
/// which keeps draw accounting fixed.
[[nodiscard]] inline Order decision_trader_act(TraderState& state, double last_price,
                                               const DecisionTraderConfig& cfg, Rng& rng,
                                               std::int64_t now, OrderId id,
                                               AgentId owner = -1) {
    if (now <= state.last_update)
        throw std::invalid_argument("decision_trader_act: time must move forward");
    const std::int64_t k = now - state.last_update;
    const double u = uniform01(rng);

    // Against a fixed price the mispricing decays geometrically:
    // h_j = (1-alpha)^j * h_0. Walk the seconds, accumulating the
    // probability of having flipped by second j, until it exceeds u.
    const double h0 = mispricing(state.s, last_price);
    const double keep_per_second = 1.0 - cfg.alpha_abm;
    std::int64_t flip_second = 0;  // 0: no flip
    if (flip_probability(state.m, h0, cfg.beta) > 0.0) {
        double h = h0;
        double no_flip = 1.0;
        for (std::int64_t j = 1; j <= k; ++j) {
            h *= keep_per_second;
            const double w = flip_probability(state.m, h, cfg.beta);
            no_flip *= 1.0 - w;
            if (u < 1.0 - no_flip) {
                flip_second = j;
                break;
            }
            if (w == 0.0 || no_flip == 0.0) break;  // cannot fire later
        }
    }

    if (flip_second > 0) {
        state.m = state.m.flipped();
        // Reset at the flip moment, then relax over the remaining seconds.
        state.s = reset_estimate(last_price, state.m);
        if (flip_second < k)
            state.s = evolve_estimate_lagged(state.s, last_price, cfg.alpha_abm,
                                             k - flip_second);
    } else {
        state.s = evolve_estimate_lagged(state.s, last_price, cfg.alpha_abm, k);
    }
    state.last_update = now;
    return make_market_order(id, state.m.is_buy() ? Side::buy : Side::sell,
                             cfg.order_volume, now, owner);
}

/// Indices of the agents that act this second: each of `count` agents is
/// included independently with probability `activation_prob`. Consumes
/// exactly `count` uniform draws.
[[nodiscard]] inline std::vector<int> activation_schedule(int count, double activation_prob,
                                                          Rng& rng) {
    if (!(activation_prob > 0.0 && activation_prob <= 1.0))
        throw std::invalid_argument("activation_schedule: activation_prob must lie in (0, 1]");
    std::vector<int> active;
    for (int i = 0; i < count; ++i) {
        if (uniform01(rng) < activation_prob) active.push_back(i);
    }
    return active;
}

}  // namespace dmsim
