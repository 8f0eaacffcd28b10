#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "dmsim/agents.hpp"
#include "dmsim/equilibrium.hpp"
#include "dmsim/order_book.hpp"
#include "dmsim/parallel.hpp"
#include "dmsim/random.hpp"
#include "dmsim/series.hpp"

namespace dmsim {

/// Configuration of one order-book market run. `horizon` counts all
/// simulated seconds including the warm-up, during which only the
/// liquidity providers act and nothing is recorded.
struct OrderBookSimConfig {
    std::int64_t horizon = 1'000'000;
    std::int64_t warmup = 10'000;
    double initial_price = 100.0;
    double tick_size = 0.01;
    RandomTraderConfig random_cfg{};
    DecisionTraderConfig decision_cfg{};
    std::int64_t snapshot_every = 120;
    int snapshot_depth = 50;
    std::uint64_t seed = 1;
    bool log_events = false;

    void validate() const {
        if (horizon < 1)
            throw std::invalid_argument("OrderBookSimConfig: horizon must be >= 1");
        if (warmup < 0 || warmup > horizon)
            throw std::invalid_argument("OrderBookSimConfig: warmup must lie in [0, horizon]");
        if (!(initial_price > 0.0))
            throw std::invalid_argument("OrderBookSimConfig: initial_price must be positive");
        if (!(tick_size > 0.0))
            throw std::invalid_argument("OrderBookSimConfig: tick_size must be positive");
        if (snapshot_every < 1)
            throw std::invalid_argument("OrderBookSimConfig: snapshot_every must be >= 1");
        if (snapshot_depth < 1)
            throw std::invalid_argument("OrderBookSimConfig: snapshot_depth must be >= 1");
        random_cfg.validate();
        decision_cfg.validate();
    }
};

enum class EventKind { submit_limit, submit_market, trade, expire };

[[nodiscard]] inline const char* to_string(EventKind kind) {
    switch (kind) {
        case EventKind::submit_limit: return "submit_limit";
        case EventKind::submit_market: return "submit_market";
        case EventKind::trade: return "trade";
        case EventKind::expire: return "expire";
    }
    return "?";
}

/// One row of the append-only audit log.
struct EventRecord {
    std::int64_t time = 0;
    EventKind kind = EventKind::submit_limit;
    Side side = Side::buy;
    Tick price_tick = 0;  ///< 0 for market submissions
    std::int64_t volume = 0;
    OrderId order_id = 0;
};

/// Everything one order-book run produces. The price series holds the
/// last-trade price sampled once per post-warm-up second (carrying the
/// previous price through tradeless seconds).
struct SimOutput {
    PriceSeries prices;
    std::vector<BookSnapshot> snapshots;
    std::vector<std::int64_t> imbalance_times;
    std::vector<double> imbalance;  ///< (bid vol - ask vol) / total, in [-1, 1]
    std::int64_t trades = 0;        ///< executions after warm-up
    bool collapsed = false;
    std::int64_t price_redraws = 0;
    std::int64_t empty_book_seconds = 0;  ///< post-warm-up seconds with an empty book
    std::vector<EventRecord> events;      ///< populated when log_events is set
};

/// Runs the double-auction market: each second the activated liquidity
/// providers place limit orders, then the activated decision traders place
/// market orders, then lifetimes expire, then the price is sampled.
///
/// Randomness comes from two generators derived from the seed, one per
/// population, so disabling the decision traders leaves the liquidity
/// providers' draw sequence untouched and the run collapses exactly onto
/// the baseline model.
[[nodiscard]] inline SimOutput run_orderbook_sim(const OrderBookSimConfig& cfg) {
    cfg.validate();
    Rng rng_random(derive_seed(cfg.seed, 0xA11CE));
    Rng rng_decision(derive_seed(cfg.seed, 0xB0B));

    Book book(cfg.tick_size);
    SimOutput out;
    out.prices.t0 = cfg.warmup;
    out.prices.dt = 1.0;
    out.prices.values.reserve(static_cast<std::size_t>(cfg.horizon - cfg.warmup));

    std::vector<TraderState> deciders;
    bool deciders_ready = false;
    OrderId next_id = 1;

    const auto current_price = [&]() {
        return book.last_trade_price() ? *book.last_trade_price() : cfg.initial_price;
    };
    const auto log_trades = [&](const std::vector<Trade>& trades, Side taker_side,
                                std::int64_t t) {
        if (t >= cfg.warmup) out.trades += static_cast<std::int64_t>(trades.size());
        if (!cfg.log_events) return;
        for (const Trade& tr : trades) {
            out.events.push_back(EventRecord{t, EventKind::trade, taker_side, tr.price_tick,
                                             tr.volume, tr.taker_order_id});
        }
    };

    for (std::int64_t t = 0; t < cfg.horizon; ++t) {
        const bool main_phase = t >= cfg.warmup;

        if (main_phase && !deciders_ready && cfg.decision_cfg.count > 0) {
            // The decision traders join with alternating stances, treating
            // this second as everyone's reset time.
            const double p0 = current_price();
            deciders.resize(static_cast<std::size_t>(cfg.decision_cfg.count));
            for (int i = 0; i < cfg.decision_cfg.count; ++i) {
                const Expectation m = i % 2 == 0 ? Expectation::buy() : Expectation::sell();
                deciders[static_cast<std::size_t>(i)] =
                    TraderState{m, reset_estimate(p0, m), cfg.warmup - 1};
            }
            deciders_ready = true;
        }

        const std::vector<int> active_random =
            cfg.random_cfg.count > 0
                ? activation_schedule(cfg.random_cfg.count, cfg.random_cfg.activation_prob,
                                      rng_random)
                : std::vector<int>{};
        const std::vector<int> active_decision =
            (main_phase && cfg.decision_cfg.count > 0)
                ? activation_schedule(cfg.decision_cfg.count, cfg.decision_cfg.activation_prob,
                                      rng_decision)
                : std::vector<int>{};

        for (int idx : active_random) {
            RandomTraderAction action = random_trader_act(book, cfg.random_cfg, rng_random, t,
                                                          cfg.initial_price, next_id++, idx);
            out.price_redraws += action.redraws;
            if (cfg.log_events) {
                out.events.push_back(EventRecord{t, EventKind::submit_limit, action.order.side,
                                                 action.order.price, action.order.volume,
                                                 action.order.id});
            }
            const auto trades = book.submit_limit(action.order, t);
            log_trades(trades, action.order.side, t);
        }

        for (int idx : active_decision) {
            TraderState& state = deciders[static_cast<std::size_t>(idx)];
            Order order = decision_trader_act(state, current_price(), cfg.decision_cfg,
                                              rng_decision, t, next_id++,
                                              cfg.random_cfg.count + idx);
            if (cfg.log_events) {
                out.events.push_back(EventRecord{t, EventKind::submit_market, order.side, 0,
                                                 order.volume, order.id});
            }
            const auto trades = book.submit_market(order, t);
            log_trades(trades, order.side, t);
        }

        const auto expired = book.expire(t);
        if (cfg.log_events) {
            for (const Order& o : expired) {
                out.events.push_back(
                    EventRecord{t, EventKind::expire, o.side, o.price, o.volume, o.id});
            }
        }

        if (main_phase) {
            out.prices.values.push_back(current_price());
            if (!book.best_bid() && !book.best_ask()) ++out.empty_book_seconds;
            if ((t - cfg.warmup) % cfg.snapshot_every == 0) {
                out.snapshots.push_back(book.volume_profile(t, cfg.snapshot_depth));
                const double total = static_cast<double>(book.total_volume());
                const double imb =
                    total > 0.0
                        ? static_cast<double>(book.bid_volume() - book.ask_volume()) / total
                        : 0.0;
                out.imbalance.push_back(imb);
                out.imbalance_times.push_back(t);
            }
        }
    }
    return out;
}

/// Seed-averaged terminal price for each adjustment rate; the order-book
/// counterpart of the equilibrium phase diagram, one-dimensional.
[[nodiscard]] inline SweepResult sweep_alpha_abm(std::span<const double> alpha_values,
                                                 int seeds, const OrderBookSimConfig& base_cfg,
                                                 unsigned n_threads = 0) {
    if (alpha_values.empty())
        throw std::invalid_argument("sweep_alpha_abm: alpha_values must be nonempty");
    if (seeds < 1)
        throw std::invalid_argument("sweep_alpha_abm: seeds must be >= 1");
    if (base_cfg.horizon <= base_cfg.warmup)
        throw std::invalid_argument("sweep_alpha_abm: horizon must exceed warmup");

    SweepResult out;
    out.alpha_grid.assign(alpha_values.begin(), alpha_values.end());
    out.cells.resize(alpha_values.size());

    std::vector<double> terminals(alpha_values.size() * static_cast<std::size_t>(seeds));
    parallel_for(terminals.size(), n_threads, [&](std::size_t run_idx) {
        const std::size_t cell = run_idx / static_cast<std::size_t>(seeds);
        const int rep = static_cast<int>(run_idx % static_cast<std::size_t>(seeds));
        OrderBookSimConfig cfg = base_cfg;
        cfg.log_events = false;
        cfg.decision_cfg.alpha_abm = alpha_values[cell];
        cfg.seed = derive_seed(base_cfg.seed, cell, static_cast<std::uint64_t>(rep));
        const SimOutput run = run_orderbook_sim(cfg);
        terminals[run_idx] = run.prices.values.back();
    });

    for (std::size_t cell = 0; cell < alpha_values.size(); ++cell) {
        double mean = 0.0;
        for (int rep = 0; rep < seeds; ++rep) {
            mean += terminals[cell * static_cast<std::size_t>(seeds) + static_cast<std::size_t>(rep)];
        }
        mean /= static_cast<double>(seeds);
        out.cells[cell] = SweepCell{std::log(mean), seeds, 0};
    }
    return out;
}

}  // namespace dmsim
